//! Exact matrix-free action of S, T and Z on C[D] inside Q(ζ_m), m a
//! multiple of the level.
//!
//! Uses e(sign/8)/√|D| = G/|D| with G = Σ e(q(γ)), so every entry stays in
//! Q(ζ_m). A vector is a block of integer power-basis coordinates per
//! element plus one common denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::arith::{euler_phi, modp};
use crate::cyclo::{cyclotomic_poly, CycloNumber};
use crate::error::{Error, Result};
use crate::fqm::DiscriminantForm;

const MAGNITUDE_LIMIT: i128 = 1 << 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FVec {
    pub num: Vec<i128>,
    pub den: i128,
}

#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub size: usize,
    pub m: usize,
    pub phi: usize,
    cyc: Vec<i128>,
    orders: Vec<usize>,
    strides: Vec<usize>,
    /// ρ(T) multiplies entry γ by ζ_m^{tq[γ]}.
    tq: Vec<usize>,
    /// DFT output permutation.
    lambda: Vec<usize>,
    pub neg: Vec<usize>,
    pub iso: Vec<bool>,
    gauss: Vec<i128>,
    /// e(sign/4) for even signature.
    pub z_sign: i128,
}

impl Kernel {
    pub fn new(d: &DiscriminantForm, m: usize) -> Self {
        let k = d.level() as usize;
        assert!(m % k == 0, "field order must be a multiple of the level");
        let phi = euler_phi(m as u64) as usize;
        let cyc: Vec<i128> = cyclotomic_poly(m as u64).iter().map(|&c| c as i128).collect();
        let size = d.order();
        let orders: Vec<usize> = d.orders().iter().map(|&x| x as usize).collect();
        let strides = d.strides().to_vec();
        let scale = m / k;
        let q = d.q_table();
        let tq: Vec<usize> = q
            .iter()
            .map(|&x| modp(-(x as i64) * scale as i64, m as i64) as usize)
            .collect();
        let bn = d.b_numerators();
        let kk = k as i64;
        let lambda: Vec<usize> = (0..size)
            .map(|beta| {
                let c = d.coords(beta);
                (0..orders.len())
                    .map(|i| {
                        let s: i64 = (0..orders.len()).map(|j| c[j] * bn[i][j]).sum();
                        let s = modp(s, kk);
                        let step = kk / orders[i] as i64;
                        debug_assert_eq!(s % step, 0);
                        (s / step) as usize * strides[i]
                    })
                    .sum()
            })
            .collect();
        let neg: Vec<usize> = (0..size).map(|i| d.neg(i)).collect();
        let iso: Vec<bool> = q.iter().map(|&x| x == 0).collect();
        let mut kern = Kernel {
            size,
            m,
            phi,
            cyc,
            orders,
            strides,
            tq,
            lambda,
            neg,
            iso,
            gauss: Vec::new(),
            z_sign: 1,
        };
        let mut buf = vec![0i128; m];
        for &x in q {
            buf[(x as usize * scale) % m] += 1;
        }
        kern.gauss = kern.reduce(&mut buf);
        kern.z_sign = if d.signature() % 4 == 0 { 1 } else { -1 };
        kern
    }

    /// Reduce a length-m exponent buffer modulo Φ_m (buffer is clobbered).
    fn reduce(&self, buf: &mut [i128]) -> Vec<i128> {
        let phi = self.phi;
        for k in (phi..buf.len()).rev() {
            let c = buf[k];
            if c == 0 {
                continue;
            }
            buf[k] = 0;
            let base = k - phi;
            for j in 0..phi {
                buf[base + j] -= c * self.cyc[j];
            }
        }
        buf[..phi].to_vec()
    }

    fn mul_poly(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let mut prod = vec![0i128; 2 * self.phi];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(&mut prod)
    }

    pub fn zero(&self) -> FVec {
        FVec {
            num: vec![0; self.size * self.phi],
            den: 1,
        }
    }

    pub fn basis(&self, i: usize) -> FVec {
        let mut v = self.zero();
        v.num[i * self.phi] = 1;
        v
    }

    pub fn normalize(&self, v: &mut FVec) {
        if v.den < 0 {
            v.den = -v.den;
            for x in v.num.iter_mut() {
                *x = -*x;
            }
        }
        let mut g = v.den;
        for x in &v.num {
            if g == 1 {
                break;
            }
            if *x != 0 {
                g = g.gcd(x);
            }
        }
        if g > 1 {
            v.den /= g;
            for x in v.num.iter_mut() {
                *x /= g;
            }
        }
        if v.num.iter().any(|x| x.abs() > MAGNITUDE_LIMIT) || v.den > MAGNITUDE_LIMIT {
            panic!("coefficient growth exceeded the i128 safety margin");
        }
    }

    /// ρ(T)^n.
    pub fn apply_t(&self, v: &FVec, n: i64) -> FVec {
        let (m, phi) = (self.m, self.phi);
        let mut out = self.zero();
        out.den = v.den;
        let mut buf = vec![0i128; m + phi];
        for g in 0..self.size {
            let src = &v.num[g * phi..(g + 1) * phi];
            if src.iter().all(|x| *x == 0) {
                continue;
            }
            let r = modp(self.tq[g] as i64 * n, m as i64) as usize;
            if r == 0 {
                out.num[g * phi..(g + 1) * phi].copy_from_slice(src);
                continue;
            }
            buf.iter_mut().for_each(|x| *x = 0);
            for (j, x) in src.iter().enumerate() {
                buf[(j + r) % m] += x;
            }
            let red = self.reduce(&mut buf[..m]);
            out.num[g * phi..(g + 1) * phi].copy_from_slice(&red);
        }
        out
    }

    /// ρ(S) = (G/|D|) · DFT.
    pub fn apply_s(&self, v: &FVec) -> FVec {
        let (m, phi, size) = (self.m, self.phi, self.size);
        let mut buf = vec![0i128; size * m];
        for g in 0..size {
            buf[g * m..g * m + phi].copy_from_slice(&v.num[g * phi..(g + 1) * phi]);
        }
        for (axis, &d) in self.orders.iter().enumerate() {
            let s = self.strides[axis];
            let step = m / d;
            let mut tin = vec![0i128; d * m];
            let mut tout = vec![0i128; d * m];
            for base in 0..size {
                if (base / s) % d != 0 {
                    continue;
                }
                for a in 0..d {
                    let at = (base + a * s) * m;
                    tin[a * m..(a + 1) * m].copy_from_slice(&buf[at..at + m]);
                }
                tout.iter_mut().for_each(|x| *x = 0);
                for a in 0..d {
                    let src = &tin[a * m..(a + 1) * m];
                    if src.iter().all(|x| *x == 0) {
                        continue;
                    }
                    for l in 0..d {
                        let r = (a * l * step) % m;
                        let dst = &mut tout[l * m..(l + 1) * m];
                        for j in 0..m - r {
                            dst[j + r] += src[j];
                        }
                        for j in m - r..m {
                            dst[j + r - m] += src[j];
                        }
                    }
                }
                for l in 0..d {
                    let at = (base + l * s) * m;
                    buf[at..at + m].copy_from_slice(&tout[l * m..(l + 1) * m]);
                }
            }
        }
        let mut out = self.zero();
        for beta in 0..size {
            let src = self.lambda[beta];
            let red = self.reduce(&mut buf[src * m..(src + 1) * m]);
            if red.iter().all(|x| *x == 0) {
                continue;
            }
            let prod = self.mul_poly(&red, &self.gauss);
            out.num[beta * phi..(beta + 1) * phi].copy_from_slice(&prod);
        }
        out.den = v.den * size as i128;
        self.normalize(&mut out);
        out
    }

    /// ρ(Z) e^γ = e(sign/4) e^{-γ}.
    pub fn apply_z(&self, v: &FVec) -> FVec {
        let phi = self.phi;
        let mut out = self.zero();
        out.den = v.den;
        for g in 0..self.size {
            let t = self.neg[g];
            for j in 0..phi {
                out.num[t * phi + j] = self.z_sign * v.num[g * phi + j];
            }
        }
        out
    }

    pub fn restrict_isotropic(&self, v: &FVec) -> FVec {
        let phi = self.phi;
        let mut out = v.clone();
        for g in 0..self.size {
            if !self.iso[g] {
                out.num[g * phi..(g + 1) * phi].iter_mut().for_each(|x| *x = 0);
            }
        }
        out
    }

    pub fn add(&self, a: &FVec, b: &FVec) -> FVec {
        let l = a.den.lcm(&b.den);
        let (fa, fb) = (l / a.den, l / b.den);
        let mut out = FVec {
            num: a.num.iter().zip(&b.num).map(|(x, y)| x * fa + y * fb).collect(),
            den: l,
        };
        self.normalize(&mut out);
        out
    }

    pub fn scale(&self, v: &FVec, num: i128, den: i128) -> FVec {
        let mut out = FVec {
            num: v.num.iter().map(|x| x * num).collect(),
            den: v.den * den,
        };
        self.normalize(&mut out);
        out
    }

    pub fn entry(&self, v: &FVec, g: usize) -> Result<CycloNumber> {
        let d = BigInt::from(v.den);
        let coeffs: Vec<BigRational> = v.num[g * self.phi..(g + 1) * self.phi]
            .iter()
            .map(|x| BigRational::new(BigInt::from(*x), d.clone()))
            .collect();
        CycloNumber::from_canonical(self.m as u64, coeffs)
    }

    pub fn to_cyclo(&self, v: &FVec) -> Result<Vec<CycloNumber>> {
        (0..self.size).map(|g| self.entry(v, g)).collect()
    }

    pub fn encode(&self, entries: &[CycloNumber]) -> Result<FVec> {
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(entries.len());
        let mut den = BigInt::from(1);
        for e in entries {
            let c = e.coeffs_at(self.m as u64)?;
            for x in &c {
                den = den.lcm(x.denom());
            }
            rows.push(c);
        }
        let too_big = || Error::Internal("coefficients do not fit the exact kernel".into());
        let mut num = Vec::with_capacity(self.size * self.phi);
        for row in rows {
            for x in row {
                let v = (x * BigRational::from_integer(den.clone())).to_integer();
                if v.abs() > BigInt::from(MAGNITUDE_LIMIT) {
                    return Err(too_big());
                }
                num.push(v.to_i128().ok_or_else(too_big)?);
            }
        }
        let den = den.to_i128().ok_or_else(too_big)?;
        let mut v = FVec { num, den };
        self.normalize(&mut v);
        Ok(v)
    }
}

//! Exact arithmetic in cyclotomic fields Q(ζ_M).
//!
//! An element of order M is stored by its coordinates on the power basis
//! 1, ζ, …, ζ^{φ(M)-1}, i.e. reduced modulo the cyclotomic polynomial Φ_M.
//! That basis is a Q-basis, so equality at a fixed order is syntactic.
//! Binary operations lift both operands to the lcm of their orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{euler_phi, factorize, gcd, lcm, legendre, modp};
use crate::config;
use crate::error::{Error, Result};

/// Coefficients of Φ_n, lowest degree first; cached per n.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let poly = Arc::new(compute_cyclotomic(n));
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn compute_cyclotomic(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    // Φ_{pm}(x) = Φ_m(x^p) / Φ_m(x) for p ∤ m, then Φ_n(x) = Φ_rad(x^{n/rad}).
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let mut poly: Vec<i128> = vec![-1, 1];
    let mut m = 1u64;
    for &p in &primes {
        let mut stretched = vec![0i128; (poly.len() - 1) * p as usize + 1];
        for (i, c) in poly.iter().enumerate() {
            stretched[i * p as usize] = *c;
        }
        poly = exact_div(&stretched, &poly);
        m *= p;
    }
    let k = (n / m) as usize;
    let mut out = vec![0i64; (poly.len() - 1) * k + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i * k] = i64::try_from(*c).expect("cyclotomic coefficient overflow");
    }
    out
}

fn exact_div(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = den.len() - 1;
    let lead = den[dn];
    let mut rem = num.to_vec();
    let mut q = vec![0i128; num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn] / lead;
        q[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|r| *r == 0));
    q
}

/// Reduce a coefficient vector indexed by exponents 0..len modulo Φ_M,
/// truncating to φ(M) entries.
fn reduce_mod_phi(mut a: Vec<BigRational>, order: u64) -> Vec<BigRational> {
    let phi = cyclotomic_poly(order);
    let deg = phi.len() - 1;
    for k in (deg..a.len()).rev() {
        if a[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut a[k], BigRational::zero());
        let base = k - deg;
        for (j, pj) in phi.iter().enumerate().take(deg) {
            if *pj != 0 {
                a[base + j] -= &c * BigRational::from_integer(BigInt::from(*pj));
            }
        }
    }
    a.truncate(deg);
    a.resize(deg, BigRational::zero());
    a
}

fn check_order(order: u64) -> Result<()> {
    let bound = config::bounds().max_cyclo_order;
    if order > bound {
        Err(Error::OrderTooLarge { order, bound })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact element of Q(ζ_M).
#[derive(Clone, Debug)]
pub struct CycloNumber {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber {
            order: 1,
            coeffs: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycloNumber {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        Self::from_rational(BigRational::new((*r.numer()).into(), (*r.denom()).into()))
    }

    /// Build Σ c_k ζ_M^k from exponent/coefficient pairs (any exponents).
    pub fn from_powers(order: u64, terms: &[(i64, BigRational)]) -> Result<Self> {
        check_order(order)?;
        let mut a = vec![BigRational::zero(); order as usize];
        for (k, c) in terms {
            a[modp(*k, order as i64) as usize] += c;
        }
        Ok(CycloNumber {
            order,
            coeffs: reduce_mod_phi(a, order),
        }
        .simplified())
    }

    /// Canonical coordinates on the power basis of Q(ζ_M).
    pub fn from_canonical(order: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        check_order(order)?;
        let deg = euler_phi(order) as usize;
        if coeffs.len() != deg {
            return Err(Error::Internal(format!(
                "expected {deg} coordinates for order {order}, got {}",
                coeffs.len()
            )));
        }
        Ok(CycloNumber { order, coeffs }.simplified())
    }

    /// ζ_M^k.
    pub fn zeta(order: u64, k: i64) -> Result<Self> {
        Self::from_powers(order, &[(k, BigRational::one())])
    }

    /// e(x) = exp(2πix), x reduced mod 1.
    pub fn e_of(x: Ratio<i64>) -> Result<Self> {
        let den = *x.denom() as u64;
        Self::zeta(den, *x.numer())
    }

    /// Positive square root of n built from quadratic Gauss sums.
    pub fn sqrt_int(n: i64) -> Result<Self> {
        if n <= 0 {
            return Err(Error::NonPositiveSqrt(n));
        }
        let mut square = 1i64;
        let mut free = 1i64;
        for (p, e) in factorize(n as u64) {
            square *= (p as i64).pow(e / 2);
            if e % 2 == 1 {
                free *= p as i64;
            }
        }
        let mut acc = CycloNumber::from_int(square);
        for (p, _) in factorize(free as u64) {
            acc = acc.checked_mul(&sqrt_prime(p as i64)?)?;
        }
        let (re, im) = acc.embed_complex();
        if re <= 0.0 || im.abs() > 1e-9 * re.max(1.0) {
            return Err(Error::Internal(format!("sqrt({n}) embedded to {re}+{im}i")));
        }
        Ok(acc)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Σ c_k exp(2πik/M) in floating point, as (re, im).
    pub fn embed_complex(&self) -> (f64, f64) {
        let m = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = std::f64::consts::TAU * k as f64 / m;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Coordinates at a multiple `m` of the current order.
    pub fn coeffs_at(&self, m: u64) -> Result<Vec<BigRational>> {
        if m % self.order != 0 {
            return Err(Error::Internal(format!("order {} does not divide {m}", self.order)));
        }
        check_order(m)?;
        Ok(self.lift_to(m).coeffs)
    }

    /// Re-express at a multiple of the current order.
    fn lift_to(&self, order: u64) -> Self {
        if order == self.order {
            return self.clone();
        }
        debug_assert_eq!(order % self.order, 0);
        let step = (order / self.order) as usize;
        let mut a = vec![BigRational::zero(); order as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                a[k * step] = c.clone();
            }
        }
        CycloNumber {
            order,
            coeffs: reduce_mod_phi(a, order),
        }
    }

    fn unify(&self, other: &Self) -> Result<(Self, Self)> {
        let l = lcm(self.order as i64, other.order as i64) as u64;
        check_order(l)?;
        Ok((self.lift_to(l), other.lift_to(l)))
    }

    /// Collapse to order 1 when the value is rational.
    fn simplified(self) -> Self {
        if self.order != 1 {
            if let Some(r) = self.as_rational() {
                return CycloNumber::from_rational(r);
            }
        }
        self
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(CycloNumber { order: a.order, coeffs }.simplified())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let m = a.order as usize;
        let mut prod = vec![BigRational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[(i + j) % m] += x * y;
                }
            }
        }
        Ok(CycloNumber {
            order: a.order,
            coeffs: reduce_mod_phi(prod, a.order),
        }
        .simplified())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    pub fn arith(a: &Self, b: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => a.checked_div(b),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
        .simplified()
    }

    /// Multiplicative inverse by solving the linear system of x ↦ self·x.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycloNumber::from_rational(r.recip()));
        }
        let n = self.coeffs.len();
        // Column j of the matrix holds self·ζ^j.
        let mut mat: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
        for j in 0..n {
            let col = self.checked_mul(&CycloNumber::zeta(self.order, j as i64)?)?;
            let col = col.lift_to(self.order);
            for (i, c) in col.coeffs.iter().enumerate() {
                mat[i][j] = c.clone();
            }
        }
        mat[0][n] = BigRational::one();
        let sol = solve(mat).ok_or(Error::DivisionByZero)?;
        CycloNumber::from_canonical(self.order, sol)
    }

    /// Complex conjugate, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Galois action ζ ↦ ζ^a for a coprime to the order.
    pub fn galois(&self, a: i64) -> Self {
        let m = self.order as i64;
        debug_assert_eq!(gcd(a, m.max(1)), 1);
        let mut out = vec![BigRational::zero(); m as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[modp(k as i64 * a, m) as usize] += c;
            }
        }
        CycloNumber {
            order: self.order,
            coeffs: reduce_mod_phi(out, self.order),
        }
    }

    /// Normalizing twice is a no-op; exposed for tests.
    pub fn renormalized(&self) -> Self {
        let mut a = self.coeffs.clone();
        a.resize(self.order as usize, BigRational::zero());
        CycloNumber {
            order: self.order,
            coeffs: reduce_mod_phi(a, self.order),
        }
    }
}

fn sqrt_prime(p: i64) -> Result<CycloNumber> {
    if p == 2 {
        return CycloNumber::zeta(8, 1)?.checked_add(&CycloNumber::zeta(8, -1)?);
    }
    let terms: Vec<(i64, BigRational)> = (1..p)
        .map(|a| (a, BigRational::from_integer(legendre(a, p).into())))
        .collect();
    let g = CycloNumber::from_powers(p as u64, &terms)?;
    let g = if p % 4 == 1 {
        g
    } else {
        g.checked_mul(&CycloNumber::zeta(4, -1)?)?
    };
    if g.embed_complex().0 > 0.0 {
        Ok(g)
    } else {
        Ok(-&g)
    }
}

/// Gaussian elimination on an augmented matrix; None if singular.
fn solve(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let l = lcm(self.order as i64, other.order as i64) as u64;
        self.lift_to(l).coeffs == other.lift_to(l).coeffs
    }
}

impl Eq for CycloNumber {}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

// Operator forms panic only when the lcm order passes the configured bound.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&CycloNumber> for &CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &CycloNumber) -> CycloNumber {
                self.$checked(rhs).expect("cyclotomic order bound exceeded")
            }
        }
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl fmt::Display for CycloNumber {
    /// `sum(c_k * zeta{M}^k)`, exponents ascending, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{} * zeta{}^{}", fmt_rational(c), self.order, k))
            .collect();
        write!(f, "sum({})", terms.join(" + "))
    }
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a rational such as "-3/4" or "5".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Convenience: rational a/b.
pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// True if the value is a (rational) integer.
pub fn is_integer(x: &CycloNumber) -> bool {
    x.as_rational().map(|r| r.is_integer()).unwrap_or(false)
}

/// Absolute value squared as a cyclotomic number.
pub fn norm_sq(x: &CycloNumber) -> CycloNumber {
    x * &x.conj()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(CycloNumber::e_of(q(0, 1)).unwrap(), CycloNumber::one());
        assert_eq!(CycloNumber::e_of(q(1, 2)).unwrap(), CycloNumber::from_int(-1));
        let a = CycloNumber::e_of(q(1, 3)).unwrap();
        let b = CycloNumber::e_of(q(2, 3)).unwrap();
        assert_eq!(&a * &b, CycloNumber::one());
    }

    #[test]
    fn sqrt_two_from_eighth_roots() {
        let s = CycloNumber::e_of(q(1, 8)).unwrap() + CycloNumber::e_of(q(-1, 8)).unwrap();
        assert_eq!(s, CycloNumber::sqrt_int(2).unwrap());
        let (re, im) = s.embed_complex();
        assert!((re - 2f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12);
        assert_eq!(&s * &s, CycloNumber::from_int(2));
    }

    #[test]
    fn sqrt_small_integers() {
        for n in 1..=50 {
            let s = CycloNumber::sqrt_int(n).unwrap();
            assert_eq!(&s * &s, CycloNumber::from_int(n), "n = {n}");
            let (re, im) = s.embed_complex();
            assert!(re > 0.0 && im.abs() < 1e-9);
            assert!((re - (n as f64).sqrt()).abs() < 1e-9);
        }
        assert_eq!(CycloNumber::sqrt_int(4).unwrap(), CycloNumber::from_int(2));
        assert!(CycloNumber::sqrt_int(0).is_err());
    }

    #[test]
    fn fifth_roots_sum_to_minus_one() {
        let s = (1..5).fold(CycloNumber::zero(), |acc, k| acc + CycloNumber::e_of(q(k, 5)).unwrap());
        assert!((CycloNumber::one() + s).is_zero());
    }

    #[test]
    fn rational_detection() {
        assert_eq!(CycloNumber::e_of(q(1, 2)).unwrap().as_rational(), Some(rat(-1, 1)));
        assert_eq!(CycloNumber::e_of(q(1, 3)).unwrap().as_rational(), None);
        let x = CycloNumber::e_of(q(1, 8)).unwrap() * CycloNumber::e_of(q(-1, 8)).unwrap() * CycloNumber::from_int(5);
        assert_eq!(x.as_rational(), Some(rat(5, 1)));
    }

    #[test]
    fn division_and_inverse() {
        let a = CycloNumber::from_int(2) + CycloNumber::e_of(q(1, 7)).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, CycloNumber::one());
        assert_eq!(
            CycloNumber::one().checked_div(&CycloNumber::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(matches!(
            CycloNumber::e_of(q(1, 2_000_003)),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn serialization_format() {
        let z = CycloNumber::zeta(8, 1).unwrap() - CycloNumber::zeta(8, 3).unwrap().scale(&rat(1, 2));
        assert_eq!(z.to_string(), "sum(1 * zeta8^1 + -1/2 * zeta8^3)");
        assert_eq!(CycloNumber::from_int(5).to_string(), "sum(5 * zeta1^0)");
    }
}

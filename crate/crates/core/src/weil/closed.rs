//! Closed formulas for inv_D(e^γ) and dim C[D]^Γ on prime-level and a few
//! small 2-adic families.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::arith::{legendre, modp};
use crate::cyclo::{rat, CycloNumber};
use crate::error::{Error, Result};
use crate::fqm::{count_norm, ComponentKind, DiscriminantForm, JordanSymbol};

use super::GroupAlgebraVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Trivial,
    /// p^{εn}, p odd.
    OddPrime {
        p: i64,
        n: i64,
        eps: i64,
    },
    /// 2_II^{εn}.
    TwoEven {
        n: i64,
        eps: i64,
    },
    /// 2_t^{εn}.
    TwoOdd {
        n: i64,
        t: i64,
        eps: i64,
    },
    /// 2_t^{εn} 4_II^{+2}.
    TwoOddFour {
        n: i64,
        t: i64,
        eps: i64,
    },
    /// 2_1^{+1} 4_t^ε 8_II^{+2}.
    Eight {
        t: i64,
        eps: i64,
    },
}

fn classify(sym: &JordanSymbol) -> Result<Family> {
    let none = || Error::NoClosedForm(format!("{sym} is outside the covered families"));
    let cs = sym.components();
    let fam = match cs {
        [] => Family::Trivial,
        [c] if c.q == c.p => {
            let (n, eps) = (c.rank as i64, c.sign as i64);
            match c.kind {
                ComponentKind::OddPrime => Family::OddPrime { p: c.p as i64, n, eps },
                ComponentKind::Even => Family::TwoEven { n, eps },
                ComponentKind::Odd(t) => Family::TwoOdd { n, t: t as i64, eps },
            }
        }
        [a, b] if a.q == 2 && b.q == 4 && b.kind == ComponentKind::Even && b.rank == 2 && b.sign == 1 => match a.kind {
            ComponentKind::Odd(t) => Family::TwoOddFour {
                n: a.rank as i64,
                t: t as i64,
                eps: a.sign as i64,
            },
            _ => return Err(none()),
        },
        [a, b, c]
            if a.q == 2
                && a.kind == ComponentKind::Odd(1)
                && a.rank == 1
                && a.sign == 1
                && b.q == 4
                && b.rank == 1
                && c.q == 8
                && c.kind == ComponentKind::Even
                && c.rank == 2
                && c.sign == 1 =>
        {
            match b.kind {
                ComponentKind::Odd(t) => Family::Eight {
                    t: t as i64,
                    eps: b.sign as i64,
                },
                _ => return Err(none()),
            }
        }
        _ => return Err(none()),
    };
    Ok(fam)
}

fn pow_rat(b: i64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(b));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        BigRational::one() / num_traits::pow(base, (-e) as usize)
    }
}

fn e(x: i64, den: i64) -> CycloNumber {
    CycloNumber::e_of(Ratio::new(x, den)).expect("small root of unity")
}

fn to_dim(x: &BigRational, sym: &JordanSymbol) -> Result<u64> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::Internal(format!("closed dimension for {sym} is {x}")));
    }
    Ok(x.to_integer().try_into().unwrap_or(u64::MAX))
}

/// Counts of norm j/4, j = 0..3, in the 2_t^{εn} part, and of the 4_II^{+2} part.
fn two_four_counts(sym: &JordanSymbol) -> Result<(u64, u64)> {
    let two = JordanSymbol::new(vec![sym.components()[0].clone()]);
    let n2: Vec<u64> = (0..4).map(|j| count_norm(&two, j)).collect::<Result<_>>()?;
    // ab/4 over (Z/4)^2.
    let f4 = [8u64, 2, 4, 2];
    let total: u64 = (0..4).map(|j| n2[j] * f4[(4 - j) % 4]).sum();
    // The 2-torsion of 4_II^{+2} is isotropic.
    Ok((total, n2[0] * 4))
}

/// Distribution of level·q over a form, optionally restricted to the k-torsion.
fn norm_poly(d: &DiscriminantForm, den: i64, torsion: Option<i64>) -> Vec<u64> {
    let mut out = vec![0u64; den as usize];
    let scale = den / d.level();
    for g in 0..d.order() {
        if torsion.map_or(true, |k| d.mul(k, g) == 0) {
            out[(d.q_num(g) * scale % den) as usize] += 1;
        }
    }
    out
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            out[(i + j) % n] += a[i] * b[j];
        }
    }
    out
}

/// |I| and |I_4| for 2_1^{+1}4_t^ε8_II^{+2} from the partition polynomials of
/// the three components.
fn eight_counts(sym: &JordanSymbol) -> Result<(u64, u64)> {
    let mut all = vec![0u64; 8];
    all[0] = 1;
    let mut four = all.clone();
    for c in sym.components() {
        let f = JordanSymbol::new(vec![c.clone()]).to_form()?;
        all = poly_mul(&all, &norm_poly(&f, 8, None));
        four = poly_mul(&four, &norm_poly(&f, 8, Some(4)));
    }
    Ok((all[0], four[0]))
}

/// dim C[D]^Γ from the closed formulas; zero for odd signature.
pub fn dim_closed_form(sym: &JordanSymbol) -> Result<u64> {
    let fam = classify(sym)?;
    if sym.signature() % 2 == 1 {
        return Ok(0);
    }
    let val: BigRational = match fam {
        Family::Trivial => BigRational::one(),
        Family::OddPrime { p, n, eps } => {
            if n % 2 == 0 {
                let m1 = legendre(-1, p) as i64;
                (pow_rat(p, n - 1) - pow_rat(p, 1)) / pow_rat(p * p - 1, 1)
                    + pow_rat(eps * m1.pow((n / 2) as u32), 1) * pow_rat(p, (n - 2) / 2)
                    + BigRational::one()
            } else {
                (pow_rat(p, n - 1) - BigRational::one()) / pow_rat(p * p - 1, 1)
            }
        }
        Family::TwoEven { n, eps } => {
            (pow_rat(2, n - 1) + BigRational::one()) / rat(3, 1) + rat(eps, 1) * pow_rat(2, (n - 2) / 2)
        }
        Family::TwoOdd { n, t, eps } => {
            if modp(t, 4) == 2 {
                BigRational::zero()
            } else {
                let s = if modp(t, 8) == 0 { 1 } else { -1 };
                (pow_rat(2, n - 3) + BigRational::one()) / rat(3, 1) + rat(eps * s, 1) * pow_rat(2, (n - 4) / 2)
            }
        }
        Family::TwoOddFour { n, t, eps } => {
            let (i_all, i_two) = two_four_counts(sym)?;
            let twelfth = rat(1, 12);
            let et4 = e(t, 4);
            let phase = e(3 * t, 8).scale(&(rat(eps, 1) * pow_rat(2, -(n / 2))));
            let inner = &CycloNumber::one() + &(&phase * &(&CycloNumber::one() + &et4));
            let total =
                &inner.scale(&(rat(i_all as i64, 1) * &twelfth)) + &et4.scale(&(rat(i_two as i64, 1) * &twelfth));
            total
                .as_rational()
                .ok_or_else(|| Error::Internal(format!("closed dimension for {sym} is not rational")))?
        }
        Family::Eight { .. } => {
            let (i_all, i_four) = eight_counts(sym)?;
            rat(i_all as i64 - i_four as i64, 48)
        }
    };
    to_dim(&val, sym)
}

/// Dense accumulator over the realization of a symbol.
struct Acc<'a> {
    d: &'a DiscriminantForm,
    v: Vec<CycloNumber>,
}

impl<'a> Acc<'a> {
    fn new(d: &'a DiscriminantForm) -> Self {
        Acc {
            d,
            v: vec![CycloNumber::zero(); d.order()],
        }
    }

    fn add(&mut self, i: usize, c: &CycloNumber) {
        self.v[i] = &self.v[i] + c;
    }

    /// c {e^μ + z e^{-μ}}.
    fn add_pm(&mut self, mu: usize, c: &CycloNumber, z: &CycloNumber) {
        self.add(mu, c);
        let m = self.d.neg(mu);
        self.add(m, &(c * z));
    }

    fn finish(self) -> GroupAlgebraVector {
        GroupAlgebraVector::from_coeffs(self.v)
    }
}

fn q(x: &BigRational) -> CycloNumber {
    CycloNumber::from_rational(x.clone())
}

/// b(μ, γ) as a fraction in [0, 1).
fn b_frac(d: &DiscriminantForm, i: usize, j: usize) -> Ratio<i64> {
    crate::fqm::frac(d.b_num(i, j), d.level())
}

/// Adds c {Σ_{μ∈γ^⊥∩I} p e^μ − Σ_{μ∈I} e^μ}.
fn perp_bracket(acc: &mut Acc, iso: &[usize], gamma: usize, p: i64, c: &BigRational) {
    let d = acc.d;
    for &mu in iso {
        let w = if d.b_num(mu, gamma) == 0 { p - 1 } else { -1 };
        acc.add(mu, &q(&(c * rat(w, 1))));
    }
}

/// inv_D(e^γ) from the closed formulas, over the realization `sym.to_form()`.
pub fn projection_closed_form(sym: &JordanSymbol, gamma: usize) -> Result<GroupAlgebraVector> {
    let fam = classify(sym)?;
    let d = sym.to_form()?;
    if gamma >= d.order() {
        return Err(Error::NotInSubset(format!("element index {gamma} out of range")));
    }
    if !d.is_isotropic(gamma) {
        return Err(Error::NotIsotropic);
    }
    if d.signature() % 2 == 1 {
        return Ok(GroupAlgebraVector::zero(d.order()));
    }
    let iso: Vec<usize> = (0..d.order()).filter(|&g| d.is_isotropic(g)).collect();
    let mut acc = Acc::new(&d);
    let sig = d.signature() as i64;
    match fam {
        Family::Trivial => acc.add(gamma, &CycloNumber::one()),
        Family::OddPrime { p, n, eps } => {
            let m1 = legendre(-1, p) as i64;
            let unit = rat(1, p * p - 1);
            if n % 2 == 0 {
                let c = rat(eps * m1.pow((n / 2) as u32), p * p - 1) * pow_rat(p, -(n - 2) / 2);
                perp_bracket(&mut acc, &iso, gamma, p, &c);
                for a in 1..p {
                    acc.add(d.mul(a, gamma), &q(&unit));
                }
            } else {
                let c = rat(eps * m1.pow(((n + 1) / 2) as u32) * legendre(2, p) as i64, p * p - 1)
                    * pow_rat(p, -(n - 3) / 2);
                for &mu in &iso {
                    let b = b_frac(&d, mu, gamma);
                    let j = b.numer() * (p / b.denom());
                    let l = legendre(j, p) as i64;
                    if l != 0 {
                        acc.add(mu, &q(&(&c * rat(l, 1))));
                    }
                }
                for a in 1..p {
                    let l = legendre(a, p) as i64;
                    acc.add(d.mul(a, gamma), &q(&(&unit * rat(l, 1))));
                }
            }
        }
        Family::TwoEven { n, eps } => {
            let c = rat(eps, 3) * pow_rat(2, -(n - 2) / 2);
            perp_bracket(&mut acc, &iso, gamma, 2, &c);
            acc.add(gamma, &q(&rat(1, 3)));
        }
        Family::TwoOdd { n, t, eps } => {
            if modp(t, 4) == 0 {
                let x2 = d.x_c(2).ok_or_else(|| Error::Internal("2_t form without x_2".into()))?;
                acc.add(gamma, &q(&rat(1, 6)));
                acc.add(d.add(gamma, x2), &q(&rat(1, 6)));
                let s = if modp(t, 8) == 0 { 1 } else { -1 };
                let c = rat(eps * s, 6) * pow_rat(2, -(n - 4) / 2);
                perp_bracket(&mut acc, &iso, gamma, 2, &c);
            }
        }
        Family::TwoOddFour { n, t, eps } => {
            let z = e(t, 4);
            acc.add_pm(gamma, &q(&rat(1, 12)), &z);
            let x2 = d
                .x_c(2)
                .ok_or_else(|| Error::Internal("no 2-torsion element in D^{2*}".into()))?;
            let star = d.subquotients(2).star;
            for &beta in &star {
                let mu = d.add(gamma, beta);
                if !d.is_isotropic(mu) {
                    continue;
                }
                let q2 = d.q_c(2, beta, x2)?;
                acc.add_pm(mu, &CycloNumber::e_of(q2)?.scale(&rat(1, 24)), &z);
            }
            let c = e(3 * t, 8).scale(&(rat(eps, 12) * pow_rat(2, -(n / 2))));
            for &mu in &iso {
                let b = b_frac(&d, mu, gamma);
                acc.add_pm(mu, &(&c * &CycloNumber::e_of(-b)?), &z);
            }
        }
        Family::Eight { t, eps } => {
            let z = e(sig, 4);
            let sqrt2 = CycloNumber::sqrt_int(2)?;
            let c1 = e(-sig, 8).checked_div(&sqrt2)?.scale(&rat(1, 96));
            for &mu in &iso {
                let b = b_frac(&d, mu, gamma);
                let w = &CycloNumber::e_of(-b)? * &(&CycloNumber::one() - &CycloNumber::e_of(-b * 4)?);
                acc.add_pm(mu, &(&c1 * &w), &z);
            }
            let c2 = e(-t, 8).checked_div(&sqrt2)?.scale(&rat(eps, 192));
            let c3 = rat(1, 96);
            for (cc, odd_step) in [(2i64, 2i64), (4, 4)] {
                let x = d
                    .x_c(cc)
                    .ok_or_else(|| Error::Internal(format!("no 2-torsion element in D^{{{cc}*}}")))?;
                let star = d.subquotients(cc).star;
                for a in (1..8).step_by(odd_step as usize) {
                    let ag = d.mul(a, gamma);
                    for &beta in &star {
                        let mu = d.add(ag, beta);
                        if !d.is_isotropic(mu) {
                            continue;
                        }
                        let qc = d.q_c(cc, beta, x)?;
                        let b = b_frac(&d, mu, gamma) * Ratio::from_integer((a - 1) / cc);
                        let phase = CycloNumber::e_of(qc + b)?;
                        let coeff = if cc == 2 { &c2 * &phase } else { phase.scale(&c3) };
                        acc.add_pm(mu, &coeff, &z);
                    }
                }
            }
            for a in (1..8).step_by(2) {
                let chi = d.chi(a)? as i64;
                acc.add(d.mul(a, gamma), &q(&rat(chi, 48)));
            }
        }
    }
    Ok(acc.finish())
}

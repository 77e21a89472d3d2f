//! Number of elements of a given norm in p-elementary Jordan components.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::arith::{kronecker_two, legendre, modp};
use crate::error::{Error, Result};

use super::{ComponentKind, DiscriminantForm, JordanSymbol};

fn pow(b: i64, e: i64) -> Ratio<i64> {
    if e >= 0 {
        Ratio::from_integer(b.pow(e as u32))
    } else {
        Ratio::new(1, b.pow((-e) as u32))
    }
}

/// Closed-form count of elements of norm j/p (odd p), j/2 (even 2-adic) or
/// j/4 (odd 2-adic) in a single Jordan component of exponent p.
pub fn count_norm(sym: &JordanSymbol, j: i64) -> Result<u64> {
    let [c] = sym.components() else {
        return Err(Error::NoClosedForm(format!(
            "norm counts need a single Jordan component, got {sym}"
        )));
    };
    if c.q != c.p {
        return Err(Error::NoClosedForm(format!("{sym} is not p-elementary")));
    }
    let n = c.rank as i64;
    let eps = c.sign as i64;
    let val: Ratio<i64> = match c.kind {
        ComponentKind::OddPrime => {
            let p = c.p as i64;
            let m1 = legendre(-1, p) as i64;
            if n % 2 == 0 {
                let delta = i64::from(modp(j, p) == 0);
                pow(p, n - 1)
                    + Ratio::from_integer(eps * m1.pow((n / 2) as u32) * (p * delta - 1)) * pow(p, (n - 2) / 2)
            } else {
                let s = eps * m1.pow(((n - 1) / 2) as u32) * legendre(2, p) as i64 * legendre(j, p) as i64;
                pow(p, n - 1) + Ratio::from_integer(s) * pow(p, (n - 1) / 2)
            }
        }
        ComponentKind::Even => {
            let sgn = if modp(j, 2) == 0 { 1 } else { -1 };
            pow(2, n - 1) + Ratio::from_integer(eps * sgn) * pow(2, (n - 2) / 2)
        }
        ComponentKind::Odd(t) => {
            let t = t as i64;
            let jr = modp(j, 4);
            if n % 2 == 1 {
                let base = eps * kronecker_two(t) as i64;
                let s = match jr {
                    0 => base,
                    2 => -base,
                    1 => base * if modp((t - 1) / 2, 2) == 0 { 1 } else { -1 },
                    _ => -base * if modp((t - 1) / 2, 2) == 0 { 1 } else { -1 },
                };
                pow(2, n - 2) + Ratio::from_integer(s) * Ratio::new(1, 2) * pow(2, (n - 1) / 2)
            } else {
                let k = kronecker_two(t - 1) as i64;
                let d0 = i64::from(modp(t, 4) == 0);
                let d2 = i64::from(modp(t + 2, 4) == 0);
                let s = match jr {
                    0 => eps * d0 * k,
                    2 => -eps * d0 * k,
                    1 => eps * d2 * k,
                    _ => -eps * d2 * k,
                };
                pow(2, n - 2) + Ratio::from_integer(s) * pow(2, (n - 2) / 2)
            }
        }
    };
    if !val.is_integer() || val < Ratio::from_integer(0) {
        return Err(Error::Internal(format!("count for {sym} at {j} is {val}")));
    }
    Ok(val.to_integer().to_u64().unwrap_or(0))
}

/// Number of γ with q(γ) = num/den mod 1, by enumeration.
pub fn count_norm_brute(d: &DiscriminantForm, num: i64, den: i64) -> u64 {
    let target = super::frac(num, den);
    (0..d.order())
        .filter(|&i| super::frac(d.q_num(i), d.level()) == target)
        .count() as u64
}

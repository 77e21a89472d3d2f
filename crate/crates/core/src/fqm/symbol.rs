//! Genus symbols: parsing, consistency rules and a fixed realization.
//!
//! Grammar: components joined by "."; a component is
//! `q ["_" (t | "II")] "^" ("+" | "-" | "−") n`. For q a power of 2 a missing
//! subscript means an even component.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::arith::{kronecker_two, legendre, modp, prime_power};
use crate::error::{Error, Result};

use super::DiscriminantForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    /// q a power of an odd prime.
    OddPrime,
    /// q_II, even 2-adic.
    Even,
    /// q_t, odd 2-adic with t mod 8.
    Odd(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JordanComponent {
    pub p: u64,
    pub q: u64,
    pub rank: u32,
    /// +1 or -1.
    pub sign: i8,
    pub kind: ComponentKind,
}

impl JordanComponent {
    pub fn new(q: u64, rank: u32, sign: i8, kind: ComponentKind) -> Result<Self> {
        let c = JordanComponent {
            p: prime_power(q).map(|(p, _)| p).unwrap_or(0),
            q,
            rank,
            sign,
            kind,
        };
        c.validate()?;
        Ok(c)
    }

    fn fail(&self, reason: &str) -> Error {
        Error::InconsistentSymbol {
            symbol: self.to_string(),
            reason: reason.to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        if prime_power(self.q).is_none() {
            return Err(self.fail("q must be a prime power greater than 1"));
        }
        if self.rank == 0 {
            return Err(self.fail("rank must be positive"));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(self.fail("sign must be + or -"));
        }
        match self.kind {
            ComponentKind::OddPrime if self.p == 2 => Err(self.fail("2-adic components need a subscript")),
            ComponentKind::Even | ComponentKind::Odd(_) if self.p != 2 => {
                Err(self.fail("subscripts are only allowed for powers of 2"))
            }
            ComponentKind::Even if self.rank % 2 == 1 => Err(self.fail("even 2-adic components have even rank")),
            ComponentKind::Odd(t) => {
                if (t as u32) % 2 != self.rank % 2 {
                    return Err(self.fail("t must have the parity of the rank"));
                }
                if split_odd(self.rank, t, self.sign).is_none() {
                    return Err(self.fail("no decomposition into rank-1 components"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Order q^n as an integer, if it fits.
    pub fn order(&self) -> Option<u64> {
        self.q.checked_pow(self.rank)
    }

    pub fn level(&self) -> u64 {
        match self.kind {
            ComponentKind::Odd(_) => 2 * self.q,
            _ => self.q,
        }
    }

    fn k(&self) -> i64 {
        let q_square = prime_power(self.q).is_some_and(|(_, e)| e % 2 == 0);
        i64::from(!q_square && self.sign == -1)
    }

    /// p-excess for odd p, 0 otherwise.
    pub fn p_excess(&self) -> i64 {
        match self.kind {
            ComponentKind::OddPrime => modp(self.rank as i64 * (self.q as i64 - 1) + 4 * self.k(), 8),
            _ => 0,
        }
    }

    /// Oddity for p = 2, 0 otherwise.
    pub fn oddity(&self) -> i64 {
        match self.kind {
            ComponentKind::OddPrime => 0,
            ComponentKind::Even => modp(4 * self.k(), 8),
            ComponentKind::Odd(t) => modp(t as i64 + 4 * self.k(), 8),
        }
    }
}

/// Rank-1 subscripts t_i (odd, mod 8) with Σ t_i = t and Π (t_i/2) = sign.
/// Tries 1+…+1+(t−(n−1)) first, then varies the last one, two or three.
pub(crate) fn split_odd(n: u32, t: u8, sign: i8) -> Option<Vec<u8>> {
    let n = n as usize;
    for m in 1..=n.min(3) {
        let ones = n - m;
        let mut tail = vec![0usize; m];
        // Enumerate m-tuples over {1,3,5,7}, starting from the canonical choice.
        let total = 4usize.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            for slot in tail.iter_mut() {
                *slot = c % 4;
                c /= 4;
            }
            let vals: Vec<u8> = tail.iter().map(|&s| [1u8, 3, 5, 7][s]).collect();
            let sum = (ones as i64 + vals.iter().map(|&v| v as i64).sum::<i64>()).rem_euclid(8);
            let sgn: i32 = vals.iter().map(|&v| kronecker_two(v as i64)).product();
            if sum == t as i64 % 8 && sgn == sign as i32 {
                let mut out = vec![1u8; ones];
                out.extend(vals);
                return Some(out);
            }
        }
    }
    None
}

impl fmt::Display for JordanComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign >= 0 { '+' } else { '-' };
        match self.kind {
            ComponentKind::OddPrime => write!(f, "{}^{}{}", self.q, sign, self.rank),
            ComponentKind::Even => write!(f, "{}_II^{}{}", self.q, sign, self.rank),
            ComponentKind::Odd(t) => write!(f, "{}_{}^{}{}", self.q, t, sign, self.rank),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JordanSymbol {
    components: Vec<JordanComponent>,
}

impl JordanSymbol {
    pub fn new(mut components: Vec<JordanComponent>) -> Self {
        components.sort_by_key(|c| c.q);
        JordanSymbol { components }
    }

    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "0" {
            return Ok(JordanSymbol::default());
        }
        let comps = trimmed
            .split('.')
            .map(|s| parse_component(s.trim(), input))
            .collect::<Result<Vec<_>>>()?;
        Ok(JordanSymbol::new(comps))
    }

    pub fn components(&self) -> &[JordanComponent] {
        &self.components
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn order(&self) -> Option<u64> {
        self.components
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.order()?))
    }

    pub fn level(&self) -> u64 {
        self.components
            .iter()
            .fold(1u64, |acc, c| crate::arith::lcm(acc as i64, c.level() as i64) as u64)
    }

    /// sign = oddity − Σ p-excess mod 8.
    pub fn signature(&self) -> u8 {
        let odd: i64 = self.components.iter().map(|c| c.oddity()).sum();
        let exc: i64 = self.components.iter().map(|c| c.p_excess()).sum();
        modp(odd - exc, 8) as u8
    }

    /// Orthogonal sum of indecomposable realizations, in component order.
    pub fn to_form(&self) -> Result<DiscriminantForm> {
        let mut orders: Vec<i64> = Vec::new();
        let mut q: Vec<Ratio<i64>> = Vec::new();
        // Off-diagonal b entries as (i, j, value).
        let mut b: Vec<(usize, usize, Ratio<i64>)> = Vec::new();
        for c in &self.components {
            let qq = c.q as i64;
            match c.kind {
                ComponentKind::OddPrime => {
                    let p = c.p as i64;
                    let a_plus = smallest_a(p, 1);
                    let a_minus = smallest_a(p, -1);
                    for i in 0..c.rank {
                        let a = if i + 1 == c.rank && c.sign == -1 {
                            a_minus
                        } else {
                            a_plus
                        };
                        orders.push(qq);
                        q.push(Ratio::new(a, qq));
                    }
                }
                ComponentKind::Even => {
                    for i in 0..c.rank / 2 {
                        let minus = i + 1 == c.rank / 2 && c.sign == -1;
                        let v = if minus { Ratio::new(1, qq) } else { Ratio::new(0, 1) };
                        let s = orders.len();
                        orders.extend([qq, qq]);
                        q.extend([v, v]);
                        b.push((s, s + 1, Ratio::new(1, qq)));
                    }
                }
                ComponentKind::Odd(t) => {
                    let ts = split_odd(c.rank, t, c.sign).ok_or_else(|| c.fail("no decomposition"))?;
                    for ti in ts {
                        orders.push(qq);
                        q.push(Ratio::new(ti as i64, 2 * qq));
                    }
                }
            }
        }
        let k = orders.len();
        let mut bm = vec![vec![Ratio::new(0, 1); k]; k];
        for (i, j, v) in b {
            bm[i][j] = v;
            bm[j][i] = v;
        }
        let form = DiscriminantForm::new(orders, &q, &bm)?;
        if form.signature() != self.signature() {
            return Err(Error::Internal(format!(
                "symbol {} has signature {} but its realization has {}",
                self,
                self.signature(),
                form.signature()
            )));
        }
        Ok(form)
    }
}

/// Smallest a >= 1 with (2a/p) = eps.
fn smallest_a(p: i64, eps: i32) -> i64 {
    (1..p)
        .find(|&a| legendre(2 * a, p) == eps)
        .expect("both residue classes occur")
}

fn parse_component(s: &str, input: &str) -> Result<JordanComponent> {
    let err = |reason: &str| Error::SymbolParse {
        input: input.to_string(),
        reason: format!("{reason} in component {s:?}"),
    };
    let (base, exp) = s.split_once('^').ok_or_else(|| err("missing '^'"))?;
    let (q_str, sub) = match base.split_once('_') {
        Some((a, b)) => (a, Some(b)),
        None => (base, None),
    };
    let q: u64 = q_str.trim().parse().map_err(|_| err("bad prime power"))?;
    let mut chars = exp.chars();
    let sign = match chars.next() {
        Some('+') => 1,
        Some('-') | Some('−') => -1,
        _ => return Err(err("expected sign after '^'")),
    };
    let rank: u32 = chars.as_str().trim().parse().map_err(|_| err("bad rank"))?;
    let kind = match sub {
        None if q % 2 == 0 => ComponentKind::Even,
        None => ComponentKind::OddPrime,
        Some("II") => ComponentKind::Even,
        Some(t) => {
            let t: i64 = t.trim().parse().map_err(|_| err("bad subscript"))?;
            ComponentKind::Odd(modp(t, 8) as u8)
        }
    };
    if q < 2 {
        return Err(err("q must be at least 2"));
    }
    JordanComponent::new(q, rank, sign, kind)
}

impl FromStr for JordanSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        JordanSymbol::parse(s)
    }
}

impl fmt::Display for JordanSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

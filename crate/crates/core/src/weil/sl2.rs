//! SL2(Z) words in S and T, coset enumeration of SL2(Z/N) and cusps.

use std::fmt;

use crate::arith::{ext_gcd, factorize, gcd, modp};
use crate::config;
use crate::error::{Error, Result};

pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];
pub const S_MAT: Mat2 = [[0, -1], [1, 0]];
pub const T_MAT: Mat2 = [[1, 1], [0, 1]];
pub const T_INV_MAT: Mat2 = [[1, -1], [0, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    S,
    T,
    TInv,
}

impl Letter {
    pub fn matrix(self) -> Mat2 {
        match self {
            Letter::S => S_MAT,
            Letter::T => T_MAT,
            Letter::TInv => T_INV_MAT,
        }
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(m: &Mat2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn inverse(m: &Mat2) -> Mat2 {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

pub fn reduce_mod(m: &Mat2, n: i64) -> Mat2 {
    let mut out = *m;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x = modp(*x, n);
        }
    }
    out
}

/// A matrix together with a word in S, T, T⁻¹ whose product equals it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SL2Word {
    pub target: Mat2,
    pub word: Vec<Letter>,
}

impl SL2Word {
    pub fn product(&self) -> Mat2 {
        self.word.iter().fold(IDENTITY, |acc, l| mat_mul(&acc, &l.matrix()))
    }

    /// Run-length form: (letter, exponent) with T powers merged.
    pub fn runs(&self) -> Vec<(Letter, i64)> {
        let mut out: Vec<(Letter, i64)> = Vec::new();
        for &l in &self.word {
            let (base, e) = match l {
                Letter::S => (Letter::S, 1),
                Letter::T => (Letter::T, 1),
                Letter::TInv => (Letter::T, -1),
            };
            match out.last_mut() {
                Some((b, k)) if *b == Letter::T && base == Letter::T => *k += e,
                _ => out.push((base, e)),
            }
        }
        out.retain(|(b, k)| *b == Letter::S || *k != 0);
        out
    }
}

impl fmt::Display for SL2Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .word
            .iter()
            .map(|l| match l {
                Letter::S => "S",
                Letter::T => "T",
                Letter::TInv => "T^-1",
            })
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    Floor,
}

fn push_t_power(word: &mut Vec<Letter>, q: i64) {
    let l = if q >= 0 { Letter::T } else { Letter::TInv };
    word.extend(std::iter::repeat(l).take(q.unsigned_abs() as usize));
}

/// Decompose a determinant-one matrix by the Euclidean algorithm:
/// M = T^q S M1 with M1 = S⁻¹ T^{-q} M having a smaller lower-left entry.
pub fn word_decompose(m: &Mat2) -> Result<SL2Word> {
    word_decompose_with(m, Rounding::Nearest)
}

pub fn word_decompose_with(m: &Mat2, rounding: Rounding) -> Result<SL2Word> {
    let dt = det(m);
    if dt != 1 {
        return Err(Error::NotSl2(dt));
    }
    let mut word = Vec::new();
    let [[mut a, mut b], [mut c, mut d]] = *m;
    while c != 0 {
        let q = match rounding {
            Rounding::Nearest => (2 * a + c.abs()).div_euclid(2 * c.abs()) * c.signum(),
            Rounding::Floor => a.div_euclid(c),
        };
        push_t_power(&mut word, q);
        word.push(Letter::S);
        let (na, nb) = (a - q * c, b - q * d);
        (a, b, c, d) = (c, d, -na, -nb);
    }
    // Remaining matrix is ±T^{b'} with a = d = ±1.
    if a == 1 {
        push_t_power(&mut word, b);
    } else {
        word.push(Letter::S);
        word.push(Letter::S);
        push_t_power(&mut word, -b);
    }
    let w = SL2Word { target: *m, word };
    if w.product() != *m {
        return Err(Error::Internal("word product mismatch".into()));
    }
    Ok(w)
}

/// |SL2(Z/N)| = N³ Π (1 - 1/p²).
pub fn sl2_order(n: i64) -> u64 {
    let n = n as u64;
    factorize(n)
        .into_iter()
        .fold(n * n * n, |acc, (p, _)| acc / (p * p) * (p * p - 1))
}

/// Lift a matrix mod N with determinant 1 mod N to SL2(Z).
pub fn lift(m: &Mat2, n: i64) -> Result<Mat2> {
    let r = reduce_mod(m, n);
    if n == 1 {
        return Ok(IDENTITY);
    }
    if modp(det(&r), n) != 1 {
        return Err(Error::NotSl2(det(m)));
    }
    let [[a, b], [c, d]] = r;
    let (c1, d1) = lift_row(c, d, n)?;
    let (_, x, y) = ext_gcd(d1, -c1);
    // x*d1 - y*c1 = 1; top row (x, y) + t (c1, d1).
    for t in 0..n {
        let (ta, tb) = (x + t * c1, y + t * d1);
        if modp(ta - a, n) == 0 && modp(tb - b, n) == 0 {
            let out = [[ta, tb], [c1, d1]];
            debug_assert_eq!(det(&out), 1);
            return Ok(out);
        }
    }
    Err(Error::Internal("no lift found".into()))
}

/// Coprime integers congruent to (c, d) mod N, for (c, d) of order N.
fn lift_row(c: i64, d: i64, n: i64) -> Result<(i64, i64)> {
    let c1 = if c == 0 { n } else { c };
    for k in 0..=c1.abs() * n + n {
        let d1 = d + k * n;
        if gcd(c1, d1) == 1 {
            return Ok((c1, d1));
        }
    }
    Err(Error::Internal(format!("({c}, {d}) has no coprime lift mod {n}")))
}

/// Lift a column (a, c) of order N to a matrix in SL2(Z) with that first column mod N.
pub fn lift_column(a: i64, c: i64, n: i64) -> Result<Mat2> {
    if gcd(gcd(a, c), n) != 1 {
        return Err(Error::BadCusp { a, c, level: n as u64 });
    }
    let (c1, a1) = lift_row(modp(c, n), modp(a, n), n.max(1))?;
    let (_, x, y) = ext_gcd(a1, c1);
    // a1*x + c1*y = 1 -> (a1 -y; c1 x).
    let m = [[a1, -y], [c1, x]];
    debug_assert_eq!(det(&m), 1);
    Ok(m)
}

fn check_level(n: i64) -> Result<()> {
    let bound = config::bounds().max_level;
    if n < 1 || n as u64 > bound {
        return Err(Error::LevelBoundExceeded {
            level: n.max(0) as u64,
            bound,
        });
    }
    Ok(())
}

/// All elements of SL2(Z/N), lifted to SL2(Z) with words.
pub fn enumerate_cosets(n: i64) -> Result<Vec<SL2Word>> {
    check_level(n)?;
    let mut out = Vec::with_capacity(sl2_order(n) as usize);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if modp(a * d - b * c, n) != 1 % n {
                        continue;
                    }
                    let m = lift(&[[a, b], [c, d]], n)?;
                    out.push(word_decompose(&m)?);
                }
            }
        }
    }
    Ok(out)
}

/// Canonical key of ±v (N >= 3) or v (N <= 2).
pub fn pm_key(x: i64, y: i64, n: i64) -> (i64, i64) {
    let v = (modp(x, n), modp(y, n));
    if n <= 2 {
        return v;
    }
    let w = (modp(-x, n), modp(-y, n));
    v.min(w)
}

/// Cusp representatives (a, c) of order N, up to sign when N >= 3.
pub fn cusps(n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in 0..n {
        for c in 0..n {
            if gcd(gcd(a, c), n) != 1 {
                continue;
            }
            if pm_key(a, c, n) == (a, c) {
                out.push((a, c));
            }
        }
    }
    if n == 1 {
        out = vec![(0, 0)];
    }
    out
}

pub fn num_cusps(n: i64) -> usize {
    if n == 1 {
        return 1;
    }
    let prim = sl2_order(n) / n as u64;
    (if n <= 2 { prim } else { prim / 2 }) as usize
}

//! Discriminant forms (finite quadratic modules).
//!
//! A form is stored on generators g_1..g_k of orders d_i with
//! q(g_i) = qn[i]/N and b(g_i, g_j) = bn[i][j]/N, where N is the level.
//! Elements are indexed in mixed radix with the first coordinate most
//! significant, so index order is lexicographic order of coordinate tuples.

mod count;
mod gram;
mod symbol;

pub use count::{count_norm, count_norm_brute};
pub use gram::{from_gram, GramForm};
pub use symbol::{ComponentKind, JordanComponent, JordanSymbol};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;

use crate::arith::{factorize, gcd, is_square, kronecker, lcm, modp};
use crate::config;
use crate::cyclo::{rat, CycloNumber};
use crate::error::{Error, Result};

/// Group element as coordinates over the generators, 0 <= a_i < d_i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub Vec<i64>);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SquareClass::Square => "square",
            SquareClass::NonSquare => "non-square",
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// x mod 1 as a reduced fraction in [0, 1).
pub fn frac(num: i64, den: i64) -> Ratio<i64> {
    Ratio::new(modp(num, den), den)
}

#[derive(Clone)]
pub struct DiscriminantForm {
    orders: Vec<i64>,
    level: i64,
    qn: Vec<i64>,
    bn: Vec<Vec<i64>>,
    strides: Vec<usize>,
    size: usize,
    qtable: OnceLock<Vec<u32>>,
    signature: OnceLock<u8>,
}

impl fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscriminantForm")
            .field("orders", &self.orders)
            .field("level", &self.level)
            .field("q", &self.q_gen())
            .finish()
    }
}

impl DiscriminantForm {
    pub fn trivial() -> Self {
        Self::from_numerators(vec![], 1, vec![], vec![]).expect("trivial form")
    }

    /// Build from generator orders, q(g_i) and the symmetric matrix b(g_i, g_j)
    /// (diagonal entries are ignored and replaced by 2q(g_i)).
    pub fn new(orders: Vec<i64>, q_gen: &[Ratio<i64>], b_gen: &[Vec<Ratio<i64>>]) -> Result<Self> {
        let k = orders.len();
        if q_gen.len() != k || b_gen.len() != k || b_gen.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidForm("dimension mismatch".into()));
        }
        let mut n = 1i64;
        for x in q_gen {
            n = lcm(n, *x.denom());
        }
        for (i, row) in b_gen.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    n = lcm(n, *x.denom());
                }
            }
        }
        let to_num = |x: &Ratio<i64>| modp(x.numer() * (n / x.denom()), n);
        let qn: Vec<i64> = q_gen.iter().map(to_num).collect();
        let mut bn = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                bn[i][j] = if i == j {
                    modp(2 * qn[i], n)
                } else {
                    to_num(&b_gen[i][j])
                };
            }
        }
        for i in 0..k {
            for j in 0..i {
                if bn[i][j] != bn[j][i] {
                    return Err(Error::InvalidForm("bilinear form is not symmetric".into()));
                }
            }
        }
        Self::from_numerators(orders, n, qn, bn)
    }

    /// Build from numerators over a common denominator `den`; the level is
    /// recomputed as the true denominator.
    pub(crate) fn from_numerators(orders: Vec<i64>, den: i64, qn: Vec<i64>, bn: Vec<Vec<i64>>) -> Result<Self> {
        let k = orders.len();
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::InvalidForm("generator orders must be at least 2".into()));
        }
        let mut size: u64 = 1;
        for &d in &orders {
            size = size.saturating_mul(d as u64);
        }
        let bound = config::bounds().max_order;
        if size > bound {
            return Err(Error::OrderBoundExceeded { order: size, bound });
        }
        let mut level = 1i64;
        for i in 0..k {
            level = lcm(level, den / gcd(qn[i], den));
            for j in 0..k {
                level = lcm(level, den / gcd(bn[i][j], den));
            }
        }
        let f = den / level;
        let qn: Vec<i64> = qn.iter().map(|x| modp(*x, den) / f).collect();
        let bn: Vec<Vec<i64>> = bn
            .iter()
            .map(|r| r.iter().map(|x| modp(*x, den) / f).collect())
            .collect();
        for i in 0..k {
            let d = orders[i];
            if modp(d * d % level * qn[i], level) != 0 || modp(2 * d * qn[i], level) != 0 {
                return Err(Error::InvalidForm(format!(
                    "q(g_{i}) = {}/{} is not compatible with order {d}",
                    qn[i], level
                )));
            }
            if bn[i][i] != modp(2 * qn[i], level) {
                return Err(Error::InvalidForm("diagonal of b must equal 2q".into()));
            }
            for j in 0..k {
                if modp(d * bn[i][j], level) != 0 {
                    return Err(Error::InvalidForm(format!(
                        "b(g_{i}, g_{j}) is not compatible with order {d}"
                    )));
                }
            }
        }
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }
        let form = DiscriminantForm {
            orders,
            level,
            qn,
            bn,
            strides,
            size: size as usize,
            qtable: OnceLock::new(),
            signature: OnceLock::new(),
        };
        form.check_nondegenerate()?;
        Ok(form)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let k = self.orders.len();
        for idx in 1..self.size {
            let a = self.coords(idx);
            let radical = (0..k).all(|j| {
                let s: i64 = (0..k).map(|i| a[i] * self.bn[i][j]).sum();
                modp(s, self.level) == 0
            });
            if radical {
                return Err(Error::InvalidForm(format!(
                    "degenerate: {} lies in the radical",
                    Element(a)
                )));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.size
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// Orders of the generators.
    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    /// Exponent of the group (largest element order).
    pub fn exponent(&self) -> i64 {
        self.orders.iter().fold(1, |a, &d| lcm(a, d))
    }

    /// q(g_i) for each generator.
    pub fn q_gen(&self) -> Vec<Ratio<i64>> {
        self.qn.iter().map(|&x| frac(x, self.level)).collect()
    }

    /// Numerators of b(g_i, g_j) over the level.
    pub fn b_numerators(&self) -> &[Vec<i64>] {
        &self.bn
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.orders.len()];
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = (idx / s) as i64;
            idx %= s;
        }
        out
    }

    /// Index of the element with the given coordinates (reduced mod d_i).
    pub fn index(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((a, d), s)| modp(*a, *d) as usize * s)
            .sum()
    }

    pub fn element(&self, idx: usize) -> Element {
        Element(self.coords(idx))
    }

    pub fn index_of(&self, e: &Element) -> usize {
        self.index(&e.0)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.coords(i), self.coords(j));
        let s: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.index(&s)
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.coords(i), self.coords(j));
        let s: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        self.index(&s)
    }

    pub fn neg(&self, i: usize) -> usize {
        let a: Vec<i64> = self.coords(i).iter().map(|x| -x).collect();
        self.index(&a)
    }

    pub fn mul(&self, c: i64, i: usize) -> usize {
        let a: Vec<i64> = self.coords(i).iter().map(|x| c * x).collect();
        self.index(&a)
    }

    pub fn element_order(&self, i: usize) -> i64 {
        self.coords(i)
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&a, &d)| lcm(acc, d / gcd(a, d)))
    }

    fn q_from_coords(&self, a: &[i64]) -> i64 {
        let n = self.level;
        let mut s = 0i64;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            s = (s + a[i] * a[i] % n * self.qn[i]) % n;
            for j in i + 1..a.len() {
                s = (s + a[i] * a[j] % n * self.bn[i][j]) % n;
            }
        }
        modp(s, n)
    }

    /// Table of level * q(γ) mod level, indexed by element.
    pub fn q_table(&self) -> &[u32] {
        self.qtable.get_or_init(|| {
            (0..self.size)
                .map(|i| self.q_from_coords(&self.coords(i)) as u32)
                .collect()
        })
    }

    /// level * q(γ) mod level.
    pub fn q_num(&self, i: usize) -> i64 {
        self.q_table()[i] as i64
    }

    /// level * b(γ, δ) mod level.
    pub fn b_num(&self, i: usize, j: usize) -> i64 {
        let (a, c) = (self.coords(i), self.coords(j));
        self.b_coords(&a, &c)
    }

    pub fn b_coords(&self, a: &[i64], c: &[i64]) -> i64 {
        let n = self.level;
        let mut s = 0i64;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..c.len() {
                s = (s + a[i] * c[j] % n * self.bn[i][j]) % n;
            }
        }
        modp(s, n)
    }

    pub fn q_val(&self, g: &Element) -> Ratio<i64> {
        frac(
            self.q_from_coords(
                &g.0.iter()
                    .zip(&self.orders)
                    .map(|(a, d)| modp(*a, *d))
                    .collect::<Vec<_>>(),
            ),
            self.level,
        )
    }

    pub fn b_val(&self, g: &Element, h: &Element) -> Ratio<i64> {
        frac(self.b_coords(&g.0, &h.0), self.level)
    }

    pub fn is_isotropic(&self, i: usize) -> bool {
        self.q_num(i) == 0
    }

    /// Σ_γ e(c q(γ)) exactly.
    pub fn gauss_sum(&self, c: i64) -> CycloNumber {
        gauss_sum_of(self, 0..self.size, c)
    }

    /// Signature mod 8 from the Gauss sum; panics if the Milgram phase is not
    /// an eighth root of unity, which cannot happen for a valid form.
    pub fn signature(&self) -> u8 {
        *self.signature.get_or_init(|| {
            signature_of(self, 0..self.size, self.size as i64).unwrap_or_else(|e| panic!("Gauss sum check failed: {e}"))
        })
    }

    /// Exact check Σ e(q(γ)) = √|D| e(sign/8).
    pub fn milgram_holds(&self) -> bool {
        let s = self.signature() as i64;
        let rhs =
            CycloNumber::sqrt_int(self.size as i64).and_then(|r| r.checked_mul(&CycloNumber::e_of(Ratio::new(s, 8))?));
        matches!(rhs, Ok(r) if r == self.gauss_sum(1))
    }

    pub fn square_class(&self) -> SquareClass {
        if is_square(self.size as u64) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }

    /// Oddity, equal to the signature of the 2-part.
    pub fn oddity(&self) -> u8 {
        let two = self.p_subgroup(2);
        if two.len() == 1 {
            return 0;
        }
        let n = two.len() as i64;
        signature_of(self, two.into_iter(), n).expect("2-part Gauss sum")
    }

    /// The quadratic character χ_D(a) = (a/|D|) e((a-1) oddity/8).
    pub fn chi(&self, a: i64) -> Result<i8> {
        if self.signature() % 2 == 1 {
            return Err(Error::OddSignature(self.signature()));
        }
        if gcd(a, self.level) != 1 {
            return Err(Error::NotCoprime {
                a,
                level: self.level as u64,
            });
        }
        let k = kronecker(a, self.size as i64);
        let m = modp((a - 1) * self.oddity() as i64, 8);
        match m {
            0 => Ok(k as i8),
            4 => Ok(-k as i8),
            _ => Err(Error::Internal(format!("chi({a}) is not real"))),
        }
    }

    /// Orthogonal direct sum, generators of `self` first.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let n = lcm(self.level, other.level);
        let (f1, f2) = (n / self.level, n / other.level);
        let (k1, k2) = (self.orders.len(), other.orders.len());
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut qn: Vec<i64> = self.qn.iter().map(|x| x * f1).collect();
        qn.extend(other.qn.iter().map(|x| x * f2));
        let mut bn = vec![vec![0i64; k1 + k2]; k1 + k2];
        for i in 0..k1 {
            for j in 0..k1 {
                bn[i][j] = self.bn[i][j] * f1;
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                bn[k1 + i][k1 + j] = other.bn[i][j] * f2;
            }
        }
        Self::from_numerators(orders, n, qn, bn)
    }

    /// Elements killed by the full power of p dividing the exponent.
    pub fn p_subgroup(&self, p: i64) -> Vec<usize> {
        let mut pk = 1i64;
        while self.exponent() % (pk * p) == 0 {
            pk *= p;
        }
        (0..self.size).filter(|&i| self.mul(pk, i) == 0).collect()
    }

    /// Decomposition D = ⊕_p D_p into p-parts.
    pub fn p_parts(&self) -> Vec<PPart> {
        let mut out = Vec::new();
        for (p, _) in factorize(self.size as u64) {
            let p = p as i64;
            let mut idx = Vec::new();
            let mut mult = Vec::new();
            let mut orders = Vec::new();
            for (i, &d) in self.orders.iter().enumerate() {
                let mut pk = 1;
                while d % (pk * p) == 0 {
                    pk *= p;
                }
                if pk > 1 {
                    idx.push(i);
                    mult.push(d / pk);
                    orders.push(pk);
                }
            }
            let k = idx.len();
            let n = self.level;
            let qn: Vec<i64> = (0..k).map(|s| mult[s] * mult[s] % n * self.qn[idx[s]] % n).collect();
            let bn: Vec<Vec<i64>> = (0..k)
                .map(|s| {
                    (0..k)
                        .map(|t| mult[s] * mult[t] % n * self.bn[idx[s]][idx[t]] % n)
                        .collect()
                })
                .collect();
            let form = Self::from_numerators(orders, n, qn, bn).expect("p-part of a valid form is valid");
            out.push(PPart {
                p,
                form,
                coords: idx,
                multipliers: mult,
            });
        }
        out
    }

    /// D_c (kernel of c), D^c (image of c) and D^{c*}.
    pub fn subquotients(&self, c: i64) -> Subquotients {
        let kernel: Vec<usize> = (0..self.size).filter(|&i| self.mul(c, i) == 0).collect();
        let mut image: Vec<usize> = (0..self.size).map(|i| self.mul(c, i)).collect();
        image.sort_unstable();
        image.dedup();
        let n = self.level;
        let star: Vec<usize> = (0..self.size)
            .filter(|&g| {
                kernel
                    .iter()
                    .all(|&a| modp(c * self.q_num(a) + self.b_num(a, g), n) == 0)
            })
            .collect();
        debug_assert_eq!(star.len(), image.len());
        Subquotients { c, kernel, image, star }
    }

    /// A 2-torsion element of D^{c*}, smallest in index order.
    pub fn x_c(&self, c: i64) -> Option<usize> {
        self.subquotients(c).star.into_iter().find(|&x| self.mul(2, x) == 0)
    }

    /// q_c(γ) = c q(μ) + b(x_c, μ) for γ = x_c + cμ; every admissible μ is
    /// tried and all must agree.
    pub fn q_c(&self, c: i64, gamma: usize, x_c: usize) -> Result<Ratio<i64>> {
        let sq = self.subquotients(c);
        if !sq.star.contains(&x_c) || self.mul(2, x_c) != 0 {
            return Err(Error::NotInSubset("x_c must be 2-torsion in D^{c*}".into()));
        }
        if !sq.star.contains(&gamma) {
            return Err(Error::NotInSubset("γ is not in D^{c*}".into()));
        }
        let target = self.sub(gamma, x_c);
        let n = self.level;
        let mut value: Option<i64> = None;
        for mu in 0..self.size {
            if self.mul(c, mu) != target {
                continue;
            }
            let v = modp(c * self.q_num(mu) + self.b_num(x_c, mu), n);
            match value {
                None => value = Some(v),
                Some(w) if w != v => return Err(Error::Internal("q_c is not well defined".into())),
                _ => {}
            }
        }
        value
            .map(|v| frac(v, n))
            .ok_or_else(|| Error::Internal("no μ with γ = x_c + cμ".into()))
    }

    /// Isomorphism invariants: order, level, signature and, per prime, the
    /// group structure and the distribution of norms.
    pub fn invariants(&self) -> FormInvariants {
        let mut parts = Vec::new();
        for part in self.p_parts() {
            let f = &part.form;
            let mut structure = f.orders.clone();
            structure.sort_unstable();
            let mut norms = BTreeMap::new();
            for i in 0..f.size {
                let r = frac(f.q_num(i), f.level);
                let o = f.element_order(i);
                *norms.entry((o, r)).or_insert(0usize) += 1;
            }
            parts.push((part.p, structure, norms));
        }
        FormInvariants {
            order: self.size,
            level: self.level,
            exponent: self.exponent(),
            signature: self.signature(),
            parts,
        }
    }
}

/// Counts of elements by (order, norm).
pub type NormCounts = BTreeMap<(i64, Ratio<i64>), usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormInvariants {
    pub order: usize,
    pub level: i64,
    pub exponent: i64,
    pub signature: u8,
    /// (p, sorted generator orders, counts of (element order, norm)).
    pub parts: Vec<(i64, Vec<i64>, NormCounts)>,
}

/// The p-part of a form, realized on the p-power parts of the generators.
#[derive(Debug, Clone)]
pub struct PPart {
    pub p: i64,
    pub form: DiscriminantForm,
    coords: Vec<usize>,
    multipliers: Vec<i64>,
}

impl PPart {
    /// Image in the parent form of an element of the part.
    pub fn embed(&self, parent: &DiscriminantForm, idx: usize) -> usize {
        let a = self.form.coords(idx);
        let mut out = vec![0i64; parent.num_generators()];
        for (s, &i) in self.coords.iter().enumerate() {
            out[i] = a[s] * self.multipliers[s];
        }
        parent.index(&out)
    }
}

#[derive(Debug, Clone)]
pub struct Subquotients {
    pub c: i64,
    /// D_c, kernel of multiplication by c.
    pub kernel: Vec<usize>,
    /// D^c, image of multiplication by c.
    pub image: Vec<usize>,
    /// D^{c*}, a coset of D^c.
    pub star: Vec<usize>,
}

fn gauss_sum_of(d: &DiscriminantForm, it: impl Iterator<Item = usize>, c: i64) -> CycloNumber {
    let n = d.level;
    let mut counts = vec![0i64; n as usize];
    for i in it {
        counts[modp(c * d.q_num(i), n) as usize] += 1;
    }
    let terms: Vec<(i64, _)> = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(k, c)| (k as i64, rat(*c, 1)))
        .collect();
    CycloNumber::from_powers(n as u64, &terms).expect("level within cyclotomic bound")
}

/// Signature of the sub-form on the given elements (a subgroup of order m
/// on which b is non-degenerate).
fn signature_of(d: &DiscriminantForm, it: impl Iterator<Item = usize>, m: i64) -> Result<u8> {
    let g = gauss_sum_of(d, it, 1);
    let (re, im) = g.embed_complex();
    let turns = im.atan2(re) / std::f64::consts::TAU * 8.0;
    let guess = modp(turns.round() as i64, 8);
    let root = CycloNumber::sqrt_int(m)?;
    let mut order: Vec<i64> = vec![guess];
    order.extend((0..8).filter(|&s| s != guess));
    for s in order {
        let rhs = root.checked_mul(&CycloNumber::e_of(Ratio::new(s, 8))?)?;
        if rhs == g {
            return Ok(s as u8);
        }
    }
    Err(Error::Internal(
        "Gauss sum is not √|D| times an eighth root of unity".into(),
    ))
}

#[cfg(test)]
mod tests;

//! The Weil representation of SL2(Z) on C[D] and the projection onto its
//! invariants.

mod closed;
mod kernel;
pub mod sl2;

pub use closed::{dim_closed_form, projection_closed_form};
pub use sl2::{enumerate_cosets, word_decompose, Letter, Mat2, SL2Word};

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{gcd, lcm, modp};
use crate::cyclo::{fmt_rational, CycloNumber};
use crate::error::{Error, Result};
use crate::fqm::DiscriminantForm;

use kernel::{FVec, Kernel};
use sl2::{inverse, lift_column, num_cusps, pm_key, sl2_order};

/// Vector of C[D] as dense coefficients indexed by element index.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAlgebraVector {
    coeffs: Vec<CycloNumber>,
}

impl GroupAlgebraVector {
    pub fn zero(n: usize) -> Self {
        GroupAlgebraVector {
            coeffs: vec![CycloNumber::zero(); n],
        }
    }

    /// e^γ.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coeffs[i] = CycloNumber::one();
        v
    }

    pub fn from_coeffs(coeffs: Vec<CycloNumber>) -> Self {
        GroupAlgebraVector { coeffs }
    }

    pub fn from_integers(xs: &[i64]) -> Self {
        GroupAlgebraVector {
            coeffs: xs.iter().map(|&x| CycloNumber::from_int(x)).collect(),
        }
    }

    /// Characteristic function of a set of elements.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut v = Self::zero(n);
        for &i in set {
            v.coeffs[i] = CycloNumber::one();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, i: usize) -> &CycloNumber {
        &self.coeffs[i]
    }

    pub fn set(&mut self, i: usize, x: CycloNumber) {
        self.coeffs[i] = x;
    }

    pub fn coeffs(&self) -> &[CycloNumber] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        GroupAlgebraVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GroupAlgebraVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        GroupAlgebraVector {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        GroupAlgebraVector {
            coeffs: self.coeffs.iter().map(|a| a.scale(r)).collect(),
        }
    }

    /// (v, w) = Σ v_γ conj(w_γ).
    pub fn inner(&self, other: &Self) -> CycloNumber {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(CycloNumber::zero(), |acc, (a, b)| &acc + &(a * &b.conj()))
    }

    /// All coefficients as rationals, if they are rational.
    pub fn as_rationals(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(|c| c.as_rational()).collect()
    }

    /// Scale a rational vector to coprime integers whose first nonzero entry
    /// is positive.
    pub fn integer_normalized(&self) -> Option<Vec<BigInt>> {
        let r = self.as_rationals()?;
        let mut den = BigInt::one();
        for x in &r {
            den = den.lcm(x.denom());
        }
        let mut ints: Vec<BigInt> = r
            .iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return Some(ints);
        }
        let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        let g = if first_negative { -g } else { g };
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
        Some(ints)
    }

    /// Human-readable form `sum(c * e^(a,b) + ...)` using element coordinates.
    pub fn display_with(&self, d: &DiscriminantForm) -> String {
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| {
                let c = &self.coeffs[i];
                let cs = match c.as_rational() {
                    Some(r) => fmt_rational(&r),
                    None => c.to_string(),
                };
                format!("{cs} * e^{}", d.element(i))
            })
            .collect();
        format!("sum({})", terms.join(" + "))
    }
}

impl fmt::Display for GroupAlgebraVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| format!("{} * e[{i}]", self.coeffs[i]))
            .collect();
        write!(f, "sum({})", terms.join(" + "))
    }
}

/// Weil representation of an even-signature form, with the exact kernel.
pub struct Weil {
    form: DiscriminantForm,
    kern: Kernel,
    level: i64,
}

impl Weil {
    pub fn new(d: &DiscriminantForm) -> Result<Self> {
        let sig = d.signature();
        if sig % 2 == 1 {
            return Err(Error::OddSignature(sig));
        }
        let level = d.level();
        Ok(Weil {
            form: d.clone(),
            kern: Kernel::new(d, level as usize),
            level,
        })
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    fn kernel_for(&self, v: &GroupAlgebraVector) -> Result<Cow<'_, Kernel>> {
        if v.len() != self.form.order() {
            return Err(Error::Internal("vector length does not match the form".into()));
        }
        let m = v.coeffs.iter().fold(self.level, |acc, c| lcm(acc, c.order() as i64));
        if m == self.kern.m as i64 {
            Ok(Cow::Borrowed(&self.kern))
        } else {
            crate::cyclo::CycloNumber::zeta(m as u64, 1)?;
            Ok(Cow::Owned(Kernel::new(&self.form, m as usize)))
        }
    }

    fn apply<F: Fn(&Kernel, &FVec) -> FVec>(&self, v: &GroupAlgebraVector, f: F) -> Result<GroupAlgebraVector> {
        let k = self.kernel_for(v)?;
        let fv = k.encode(&v.coeffs)?;
        let out = f(&k, &fv);
        Ok(GroupAlgebraVector::from_coeffs(k.to_cyclo(&out)?))
    }

    pub fn rho_s(&self, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        self.apply(v, |k, x| k.apply_s(x))
    }

    pub fn rho_t(&self, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        self.apply(v, |k, x| k.apply_t(x, 1))
    }

    pub fn rho_z(&self, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        self.apply(v, |k, x| k.apply_z(x))
    }

    pub fn rho_word(&self, w: &SL2Word, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        let runs = w.runs();
        self.apply(v, |k, x| apply_runs(k, &runs, x))
    }

    /// ρ(M) via the Euclidean word of M.
    pub fn rho(&self, m: &Mat2, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        self.rho_word(&word_decompose(m)?, v)
    }

    fn to_vector(&self, v: &FVec) -> GroupAlgebraVector {
        GroupAlgebraVector::from_coeffs(self.kern.to_cyclo(v).expect("level within cyclotomic bound"))
    }

    fn classes(&self) -> usize {
        num_cusps(self.level)
    }

    fn with_pm(&self) -> bool {
        self.level >= 3
    }

    /// Breadth-first walk over the classes ±⟨T⟩Y of SL2(Z/N), calling
    /// `visit(bottom row of Y, ρ(Y) v)` once per class.
    fn walk<F: FnMut((i64, i64), &FVec)>(&self, start: FVec, mut visit: F) {
        let n = self.level;
        let k = &self.kern;
        let mut seen = HashSet::new();
        let mut queue: VecDeque<([i64; 4], FVec)> = VecDeque::new();
        seen.insert(pm_key(0, 1, n));
        queue.push_back(([1, 0, 0, 1], start));
        while let Some(([a, b, c, d], w)) = queue.pop_front() {
            visit((c, d), &w);
            for t in 0..n {
                let (ta, tb) = (modp(a + t * c, n), modp(b + t * d, n));
                if !seen.insert(pm_key(ta, tb, n)) {
                    continue;
                }
                let next = k.apply_s(&k.apply_t(&w, t));
                queue.push_back(([modp(-c, n), modp(-d, n), ta, tb], next));
            }
        }
        debug_assert_eq!(seen.len(), self.classes());
    }

    /// Fold a sum of class vectors Σ ρ(Y)v into the projection.
    fn finish(&self, acc: &FVec) -> FVec {
        let k = &self.kern;
        let total = if self.with_pm() {
            k.add(acc, &k.apply_z(acc))
        } else {
            acc.clone()
        };
        let factor = self.classes() as i128 * if self.with_pm() { 2 } else { 1 };
        k.scale(&k.restrict_isotropic(&total), 1, factor)
    }

    fn inv_fast(&self, start: FVec) -> FVec {
        let k = &self.kern;
        let mut acc = k.zero();
        self.walk(start, |_, w| acc = k.add(&acc, w));
        self.finish(&acc)
    }

    /// Projection inv_D(v) onto the invariants.
    pub fn inv(&self, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
        if v.coeffs.iter().all(|c| self.level % c.order() as i64 == 0) {
            let fv = self.kern.encode(&v.coeffs)?;
            return Ok(self.to_vector(&self.inv_fast(fv)));
        }
        // Coefficients outside Q(ζ_N): project each basis vector and combine.
        let mut out = GroupAlgebraVector::zero(v.len());
        for i in v.support() {
            let p = self.inv_basis(i);
            out = out.add(&p.scale(v.get(i)));
        }
        Ok(out)
    }

    /// inv_D(e^γ).
    pub fn inv_basis(&self, gamma: usize) -> GroupAlgebraVector {
        self.to_vector(&self.inv_fast(self.kern.basis(gamma)))
    }

    /// inv_D(e^γ) by averaging ρ(M) e^γ over lifted words of all of SL2(Z/N).
    pub fn inv_naive(&self, gamma: usize) -> Result<GroupAlgebraVector> {
        let k = &self.kern;
        let start = k.basis(gamma);
        let mut acc = k.zero();
        for w in enumerate_cosets(self.level)? {
            acc = k.add(&acc, &apply_runs(k, &w.runs(), &start));
        }
        let total = sl2_order(self.level) as i128;
        Ok(self.to_vector(&k.scale(&acc, 1, total)))
    }

    /// Contributions inv_D(e^γ)_s keyed by cusp (a, c), from one walk.
    pub fn cusp_contributions(&self, gamma: usize) -> BTreeMap<(i64, i64), GroupAlgebraVector> {
        let n = self.level;
        let mut out = BTreeMap::new();
        self.walk(self.kern.basis(gamma), |(c, d), w| {
            // Y = M_s^{-1} has bottom row (-c_s, a_s).
            let cusp = pm_key(d, -c, n);
            out.insert(cusp, self.to_vector(&self.finish_single(w)));
        });
        out
    }

    fn finish_single(&self, w: &FVec) -> FVec {
        let k = &self.kern;
        let total = if self.with_pm() {
            k.add(w, &k.apply_z(w))
        } else {
            w.clone()
        };
        let factor = self.classes() as i128 * if self.with_pm() { 2 } else { 1 };
        k.scale(&k.restrict_isotropic(&total), 1, factor)
    }

    /// inv_D(e^γ)_s for the cusp s = a/c, computed from a lift M_s and the
    /// word of M_s^{-1}.
    pub fn inv_at_cusp(&self, gamma: usize, cusp: (i64, i64)) -> Result<GroupAlgebraVector> {
        if !self.form.is_isotropic(gamma) {
            return Err(Error::NotInSubset(format!(
                "{} is not isotropic",
                self.form.element(gamma)
            )));
        }
        let (a, c) = cusp;
        let n = self.level;
        let ms = lift_column(a, c, n)?;
        let w = word_decompose(&inverse(&ms))?;
        let v = apply_runs(&self.kern, &w.runs(), &self.kern.basis(gamma));
        Ok(self.to_vector(&self.finish_single(&v)))
    }

    /// dim C[D]^Γ as the trace of inv_D, using that the diagonal entry
    /// inv(e^γ)_γ is constant on (Z/N)^× orbits.
    pub fn dim(&self) -> Result<u64> {
        let reps = self.isotropic_orbits();
        let parts: Vec<(CycloNumber, usize)> = reps
            .par_iter()
            .map(|(g, size)| {
                let v = self.inv_fast(self.kern.basis(*g));
                let e = self.kern.entry(&v, *g).expect("entry in range");
                (e, *size)
            })
            .collect();
        let mut total = CycloNumber::zero();
        for (e, s) in parts {
            total = &total + &e.scale(&BigRational::from_integer(BigInt::from(s)));
        }
        trace_to_dim(&total)
    }

    /// Trace of inv_D over every isotropic element, without orbit reduction.
    pub fn dim_full_trace(&self) -> Result<u64> {
        let iso: Vec<usize> = (0..self.form.order()).filter(|&g| self.form.is_isotropic(g)).collect();
        let parts: Vec<CycloNumber> = iso
            .par_iter()
            .map(|&g| {
                let v = self.inv_fast(self.kern.basis(g));
                self.kern.entry(&v, g).expect("entry in range")
            })
            .collect();
        let total = parts.iter().fold(CycloNumber::zero(), |acc, e| &acc + e);
        trace_to_dim(&total)
    }

    /// Representatives of (Z/N)^× orbits on the isotropic elements, with sizes.
    pub fn isotropic_orbits(&self) -> Vec<(usize, usize)> {
        let d = &self.form;
        let n = self.level;
        let units: Vec<i64> = (1..=n).filter(|&a| gcd(a, n) == 1).collect();
        let mut seen = vec![false; d.order()];
        let mut out = Vec::new();
        for g in 0..d.order() {
            if seen[g] || !d.is_isotropic(g) {
                continue;
            }
            let mut orbit = HashSet::new();
            for &a in &units {
                orbit.insert(d.mul(a, g));
            }
            for &h in &orbit {
                seen[h] = true;
            }
            out.push((g, orbit.len()));
        }
        out
    }

    /// The factor ξ of ρ(M)e^0 = ξ √|D_c|/√|D| Σ_{β∈D^{c*}} e(-a q_c(β)) e^β,
    /// extracted from every β and required to agree.
    pub fn xi_factor(&self, m: &Mat2) -> Result<CycloNumber> {
        let d = &self.form;
        let [[a, _], [c, _]] = *m;
        let w = self.rho(m, &GroupAlgebraVector::basis(d.order(), 0))?;
        let sq = d.subquotients(c);
        let x = d
            .x_c(c)
            .ok_or_else(|| Error::NotInSubset(format!("no 2-torsion element in D^{{{c}*}}")))?;
        let size = d.order() as i64;
        let ratio = CycloNumber::sqrt_int(sq.kernel.len() as i64 * size)?
            .scale(&BigRational::new(BigInt::one(), BigInt::from(size)));
        let mut xi: Option<CycloNumber> = None;
        for &beta in &sq.star {
            let qc = d.q_c(c, beta, x)?;
            let phase = CycloNumber::e_of(-Ratio::new(a, 1) * qc)?;
            let val = w.get(beta).checked_div(&ratio.checked_mul(&phase)?)?;
            match &xi {
                None => xi = Some(val),
                Some(prev) if *prev != val => {
                    return Err(Error::Internal(
                        "ξ differs across D^{c*}; the x_c convention does not match".into(),
                    ))
                }
                _ => {}
            }
        }
        let xi = xi.ok_or_else(|| Error::Internal("empty D^{c*}".into()))?;
        if &xi * &xi.conj() != CycloNumber::one() {
            return Err(Error::Internal("extracted ξ is not a unit".into()));
        }
        if w.support().iter().any(|b| !sq.star.contains(b)) {
            return Err(Error::Internal("ρ(M)e^0 is not supported on D^{c*}".into()));
        }
        Ok(xi)
    }
}

/// Exact rank of a family of vectors by elimination over the cyclotomic field.
pub fn rank(vectors: &[GroupAlgebraVector]) -> Result<usize> {
    let mut rows: Vec<Vec<CycloNumber>> = vectors.iter().map(|v| v.coeffs.clone()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = rows[rank][col].inverse()?;
        let pivot: Vec<CycloNumber> = rows[rank].iter().map(|x| x * &inv).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..ncols {
                if !pivot[c].is_zero() {
                    row[c] = &row[c] - &(&f * &pivot[c]);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    Ok(rank)
}

fn apply_runs(k: &Kernel, runs: &[(Letter, i64)], v: &FVec) -> FVec {
    let mut cur = v.clone();
    for &(l, e) in runs.iter().rev() {
        cur = match l {
            Letter::S => k.apply_s(&cur),
            _ => k.apply_t(&cur, e),
        };
    }
    cur
}

fn trace_to_dim(total: &CycloNumber) -> Result<u64> {
    let r = total
        .as_rational()
        .ok_or_else(|| Error::Internal(format!("trace {total} is not rational")))?;
    if !r.is_integer() || r.is_negative() {
        return Err(Error::Internal(format!(
            "trace {} is not a non-negative integer",
            fmt_rational(&r)
        )));
    }
    Ok(r.to_integer().try_into().unwrap_or(u64::MAX))
}

pub fn rho_s(d: &DiscriminantForm, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    Weil::new(d)?.rho_s(v)
}

pub fn rho_t(d: &DiscriminantForm, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    Weil::new(d)?.rho_t(v)
}

pub fn rho(d: &DiscriminantForm, m: &Mat2, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    Weil::new(d)?.rho(m, v)
}

pub fn xi_factor(d: &DiscriminantForm, m: &Mat2) -> Result<CycloNumber> {
    Weil::new(d)?.xi_factor(m)
}

/// inv_D(v); the zero vector for odd signature.
pub fn inv(d: &DiscriminantForm, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    match Weil::new(d) {
        Ok(w) => w.inv(v),
        Err(Error::OddSignature(_)) => Ok(GroupAlgebraVector::zero(d.order())),
        Err(e) => Err(e),
    }
}

pub fn inv_at_cusp(d: &DiscriminantForm, gamma: usize, cusp: (i64, i64)) -> Result<GroupAlgebraVector> {
    match Weil::new(d) {
        Ok(w) => w.inv_at_cusp(gamma, cusp),
        Err(Error::OddSignature(_)) => Ok(GroupAlgebraVector::zero(d.order())),
        Err(e) => Err(e),
    }
}

/// dim C[D]^Γ; zero for odd signature.
pub fn dim_invariants(d: &DiscriminantForm) -> Result<u64> {
    match Weil::new(d) {
        Ok(w) => w.dim(),
        Err(Error::OddSignature(_)) => Ok(0),
        Err(e) => Err(e),
    }
}

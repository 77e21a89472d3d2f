//! The minimal p-adic forms carrying a one-dimensional invariant space, and
//! generation of all invariants by lifting their invariants along isotropic
//! subgroups.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{is_prime, kronecker_two, legendre, prime_power};
use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use crate::fqm::{DiscriminantForm, JordanSymbol, PPart, SquareClass};
use crate::induct::{isotropic_elements, isotropic_subgroups, quotient, IsotropicSubgroup};
use crate::weil::{rank, GroupAlgebraVector, Weil};

/// Which row of the fundamental tables a descriptor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FundamentalKind {
    /// The zero form, invariant e^0.
    Trivial,
    /// p^{-4} for odd p, or 2_II^{-4}.
    MinusFour,
    /// p^{ε3}, odd p.
    Cube { eps: i8 },
    /// 2_t^{+2} 4_II^{+2}, t ≡ 2 mod 4.
    TwoFour { t: u8 },
    /// 2_1^{+1} 4_t^ε 8_II^{+2}.
    Eight { t: u8, eps: i8 },
}

#[derive(Debug, Clone)]
pub struct FundamentalDescriptor {
    pub p: u64,
    pub square_class: SquareClass,
    pub signature: u8,
    pub kind: FundamentalKind,
    pub symbol: JordanSymbol,
    pub form: DiscriminantForm,
}

impl FundamentalDescriptor {
    pub fn level(&self) -> i64 {
        self.form.level()
    }

    pub fn order(&self) -> usize {
        self.form.order()
    }
}

fn no_form(p: u64, x: SquareClass, s: u8) -> Error {
    Error::NoFundamentalForm {
        p,
        square_class: x.as_str(),
        signature: s,
    }
}

/// Row of the fundamental tables for prime p, square class x and even
/// signature s.
pub fn fundamental_form(p: u64, x: SquareClass, s: u8) -> Result<FundamentalDescriptor> {
    if !is_prime(p) {
        return Err(Error::InvalidForm(format!("{p} is not prime")));
    }
    let s = s % 8;
    if s % 2 == 1 {
        return Err(Error::OddSignature(s));
    }
    let (kind, text) = match (p, x, s) {
        (_, SquareClass::Square, 0) => (FundamentalKind::Trivial, String::new()),
        (2, SquareClass::Square, 4) => (FundamentalKind::MinusFour, "2_II^-4".to_string()),
        (_, SquareClass::Square, 4) => (FundamentalKind::MinusFour, format!("{p}^-4")),
        (2, SquareClass::Square, t) => (FundamentalKind::TwoFour { t }, format!("2_{t}^+2.4_II^+2")),
        (2, SquareClass::NonSquare, s) => {
            let t = (s + 7) % 8;
            let eps = kronecker_two(t as i64) as i8;
            let sign = if eps == 1 { '+' } else { '-' };
            (
                FundamentalKind::Eight { t, eps },
                format!("2_1^+1.4_{t}^{sign}1.8_II^+2"),
            )
        }
        (_, SquareClass::NonSquare, s) => {
            let eps = [1i8, -1]
                .into_iter()
                .find(|&e| cube_signature(p, e) == s)
                .ok_or_else(|| no_form(p, x, s))?;
            let sign = if eps == 1 { '+' } else { '-' };
            (FundamentalKind::Cube { eps }, format!("{p}^{sign}3"))
        }
        _ => return Err(no_form(p, x, s)),
    };
    let symbol = JordanSymbol::parse(&text)?;
    let form = symbol.to_form()?;
    if form.signature() != s || form.square_class() != x {
        return Err(Error::Internal(format!("table row {text} does not realize ({x}, {s})")));
    }
    Ok(FundamentalDescriptor {
        p,
        square_class: x,
        signature: s,
        kind,
        symbol,
        form,
    })
}

fn cube_signature(p: u64, eps: i8) -> u8 {
    let excess = 3 * (p as i64 - 1) + if eps == -1 { 4 } else { 0 };
    (-excess).rem_euclid(8) as u8
}

/// Descriptor matching a form of prime-power level, if its (square class,
/// signature) admits one.
pub fn descriptor_for(d: &DiscriminantForm) -> Result<FundamentalDescriptor> {
    let p = match prime_power(d.level() as u64) {
        Some((p, _)) => p,
        None if d.is_trivial() => 2,
        None => return Err(Error::InvalidForm("level is not a prime power".into())),
    };
    fundamental_form(p, d.square_class(), d.signature())
}

#[derive(Debug, Clone)]
pub struct FundamentalInvariant {
    pub descriptor: FundamentalDescriptor,
    /// Coprime integer coefficients, least-index nonzero entry positive.
    pub vector: GroupAlgebraVector,
    pub plus_set: Vec<usize>,
    pub minus_set: Vec<usize>,
    /// vector = sign · (Σ_{M+} e^μ − Σ_{M−} e^μ) when the sets apply.
    pub sign: i8,
}

fn from_bigints(xs: &[BigInt]) -> GroupAlgebraVector {
    GroupAlgebraVector::from_coeffs(
        xs.iter()
            .map(|x| CycloNumber::from_rational(BigRational::from_integer(x.clone())))
            .collect(),
    )
}

fn normalized(v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    let ints = v
        .integer_normalized()
        .ok_or_else(|| Error::Internal("invariant has irrational coefficients".into()))?;
    Ok(from_bigints(&ints))
}

/// Isotropic elements whose order equals the level.
pub fn top_isotropic(d: &DiscriminantForm) -> Vec<usize> {
    let n = d.level();
    isotropic_elements(d)
        .into_iter()
        .filter(|&g| d.element_order(g) == n)
        .collect()
}

/// γ used to project: 0 for the square rows of signature 0 or 4, else the
/// smallest isotropic element of order equal to the level.
fn projection_seed(d: &DiscriminantForm) -> Option<usize> {
    if d.is_trivial() || (d.square_class() == SquareClass::Square && d.signature() % 4 == 0) {
        return Some(0);
    }
    top_isotropic(d).into_iter().next()
}

/// Normalized inv(e^γ) of a form with one-dimensional invariant space.
pub fn generic_invariant(d: &DiscriminantForm) -> Result<GroupAlgebraVector> {
    let seed = projection_seed(d).ok_or_else(|| Error::Internal("no isotropic element of top order".into()))?;
    let w = Weil::new(d)?;
    let v = w.inv_basis(seed);
    if v.is_zero() {
        return Err(Error::Internal("projection of the seed vanished".into()));
    }
    normalized(&v)
}

pub fn fundamental_invariant(desc: &FundamentalDescriptor) -> Result<FundamentalInvariant> {
    let d = &desc.form;
    let dim = Weil::new(d)?.dim()?;
    if dim != 1 {
        return Err(Error::Internal(format!(
            "{} has {dim} invariants, expected 1",
            desc.symbol
        )));
    }
    let vector = generic_invariant(d)?;
    let n = d.order();
    let (explicit, plus_set, minus_set) = match desc.kind {
        FundamentalKind::Trivial => (GroupAlgebraVector::basis(n, 0), vec![], vec![]),
        FundamentalKind::MinusFour => {
            let mut c = vec![0i64; n];
            c[0] = desc.p as i64 - 1;
            for g in top_isotropic(d) {
                c[g] = -1;
            }
            (GroupAlgebraVector::from_integers(&c), vec![], vec![])
        }
        FundamentalKind::Cube { eps } => {
            let (plus, minus) = cube_sets(d, desc.p as i64, eps)?;
            (signed_sum(n, &plus, &minus), plus, minus)
        }
        FundamentalKind::TwoFour { t } => {
            let (plus, minus) = two_four_sets(d, t)?;
            (signed_sum(n, &plus, &minus), plus, minus)
        }
        FundamentalKind::Eight { t, .. } => {
            let (plus, minus) = eight_sets(d, t)?;
            (signed_sum(n, &plus, &minus), plus, minus)
        }
    };
    let (e, v) = (explicit.as_rationals(), vector.as_rationals());
    let neg = e.as_ref().map(|e| e.iter().map(|x| -x).collect::<Vec<_>>());
    let sign = if e == v {
        1
    } else if neg == v {
        -1
    } else {
        return Err(Error::Internal(format!(
            "explicit invariant of {} disagrees with the projection",
            desc.symbol
        )));
    };
    Ok(FundamentalInvariant {
        descriptor: desc.clone(),
        vector,
        plus_set,
        minus_set,
        sign,
    })
}

fn signed_sum(n: usize, plus: &[usize], minus: &[usize]) -> GroupAlgebraVector {
    let mut c = vec![0i64; n];
    for &g in plus {
        c[g] += 1;
    }
    for &g in minus {
        c[g] -= 1;
    }
    GroupAlgebraVector::from_integers(&c)
}

/// Elements μ of `candidates` with (μ, γ) = j/N, bucketed by j.
fn buckets(d: &DiscriminantForm, candidates: &[usize], gamma: usize) -> Vec<Vec<usize>> {
    let n = d.level() as usize;
    let mut out = vec![Vec::new(); n];
    for &mu in candidates {
        out[d.b_num(mu, gamma) as usize].push(mu);
    }
    out
}

fn chi(d: &DiscriminantForm, j: i64) -> Result<i8> {
    d.chi(j)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn cube_sets(d: &DiscriminantForm, p: i64, eps: i8) -> Result<(Vec<usize>, Vec<usize>)> {
    let nonzero: Vec<usize> = isotropic_elements(d).into_iter().filter(|&g| g != 0).collect();
    let gamma = nonzero[0];
    let m = buckets(d, &nonzero, gamma);
    let sel = eps as i32 * legendre(2, p);
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for j in 1..p {
        let c = chi(d, j)? as i32;
        let side = if sel * c == 1 { &mut plus } else { &mut minus };
        side.extend(&m[j as usize]);
        let side = if c == 1 { &mut plus } else { &mut minus };
        side.push(d.mul(j, gamma));
    }
    Ok((sorted(plus), sorted(minus)))
}

fn two_four_sets(d: &DiscriminantForm, t: u8) -> Result<(Vec<usize>, Vec<usize>)> {
    let outer: Vec<usize> = top_isotropic(d);
    let gamma = outer[0];
    let m = buckets(d, &outer, gamma);
    let x2 = d.x_c(2).ok_or_else(|| Error::Internal("no x_2".into()))?;
    let alpha = *m[2]
        .iter()
        .find(|&&a| d.q_c(2, d.sub(a, gamma), x2).is_ok_and(|v| v.is_zero()))
        .ok_or_else(|| Error::Internal("no α with q_2(α − γ) = 0".into()))?;
    let sel: i8 = if t % 8 == 6 { 1 } else { -1 };
    let j = [1i64, 3]
        .into_iter()
        .find(|&j| chi(d, j).is_ok_and(|c| sel * c == 1))
        .ok_or_else(|| Error::Internal("no j with εχ(j) = 1".into()))?;
    let mut plus = m[j as usize].clone();
    plus.extend([alpha, gamma]);
    let mut minus = m[(4 - j) as usize].clone();
    minus.extend([d.neg(alpha), d.neg(gamma)]);
    Ok((sorted(plus), sorted(minus)))
}

fn eight_sets(d: &DiscriminantForm, t: u8) -> Result<(Vec<usize>, Vec<usize>)> {
    // Coordinates (a, b, c, d) with q = a²/4 + t b²/8 + cd/8.
    if d.orders() != [2, 4, 8, 8]
        || d.q_num(d.index(&[1, 0, 0, 0])) * 4 != d.level()
        || d.q_num(d.index(&[0, 1, 0, 0])) != t as i64
        || d.b_num(d.index(&[0, 0, 1, 0]), d.index(&[0, 0, 0, 1])) != 1
    {
        return Err(Error::Internal("unexpected realization of the level-8 form".into()));
    }
    let outer = top_isotropic(d);
    let gamma = d.index(&[0, 0, 1, 0]);
    let m = buckets(d, &outer, gamma);
    let special = [
        d.index(&[1, 2, 1, 2]),
        d.index(&[1, 0, 1, 6]),
        d.index(&[0, 2, 1, 4]),
        gamma,
    ];
    let sel: i8 = if matches!(t % 8, 5 | 7) { 1 } else { -1 };
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for j in [1i64, 3, 5, 7] {
        let c = chi(d, j)?;
        let side = if sel * c == 1 { &mut plus } else { &mut minus };
        side.extend(&m[j as usize]);
        let side = if c == 1 { &mut plus } else { &mut minus };
        side.extend(special.iter().map(|&g| d.mul(j, g)));
    }
    Ok((sorted(plus), sorted(minus)))
}

/// Q matches desc on order, level, exponent and signature.
pub fn is_fundamental_quotient(q: &DiscriminantForm, desc: &FundamentalDescriptor) -> bool {
    let f = &desc.form;
    q.order() == f.order() && q.level() == f.level() && q.exponent() == f.exponent() && q.signature() == f.signature()
}

/// One lifted fundamental invariant.
#[derive(Debug, Clone)]
pub struct InducedInvariant {
    pub subgroup: IsotropicSubgroup,
    pub vector: GroupAlgebraVector,
}

#[derive(Debug, Clone)]
pub struct InducedGeneratingSet {
    pub entries: Vec<InducedInvariant>,
    /// Rank of the span of all entries.
    pub rank: usize,
    /// The fundamental row the entries come from, for prime-power level.
    pub descriptor: Option<FundamentalDescriptor>,
}

impl InducedGeneratingSet {
    pub fn vectors(&self) -> Vec<GroupAlgebraVector> {
        self.entries.iter().map(|e| e.vector.clone()).collect()
    }

    fn empty() -> Self {
        InducedGeneratingSet {
            entries: Vec::new(),
            rank: 0,
            descriptor: None,
        }
    }
}

/// Lifts of the fundamental invariant along every isotropic H with H^⊥/H
/// fundamental. D must have prime-power level.
pub fn induced_generating_set(d: &DiscriminantForm) -> Result<InducedGeneratingSet> {
    if d.signature() % 2 == 1 {
        return Ok(InducedGeneratingSet::empty());
    }
    if d.is_trivial() {
        let h = IsotropicSubgroup::trivial(d);
        return Ok(InducedGeneratingSet {
            entries: vec![InducedInvariant {
                subgroup: h,
                vector: GroupAlgebraVector::basis(1, 0),
            }],
            rank: 1,
            descriptor: Some(fundamental_form(2, SquareClass::Square, 0)?),
        });
    }
    let desc = match descriptor_for(d) {
        Ok(desc) => desc,
        Err(Error::NoFundamentalForm { .. }) => return Ok(InducedGeneratingSet::empty()),
        Err(e) => return Err(e),
    };
    let ratio = d.order() / desc.order();
    let h_order = (ratio as f64).sqrt().round() as usize;
    if d.order() % desc.order() != 0 || h_order * h_order != ratio {
        return Ok(InducedGeneratingSet {
            descriptor: Some(desc),
            ..InducedGeneratingSet::empty()
        });
    }
    let subgroups: Vec<IsotropicSubgroup> = isotropic_subgroups(d, Some(h_order))?
        .into_iter()
        .filter(|h| h.order() == h_order)
        .collect();
    let mut entries: Vec<InducedInvariant> = subgroups
        .into_par_iter()
        .map(|h| -> Result<Option<InducedInvariant>> {
            let q = quotient(d, &h)?;
            if !is_fundamental_quotient(&q.form, &desc) {
                return Ok(None);
            }
            let v = generic_invariant(&q.form)?;
            let vector = normalized(&q.lift_up(&v))?;
            Ok(Some(InducedInvariant { subgroup: h, vector }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    entries.sort_by(|a, b| a.subgroup.elements.cmp(&b.subgroup.elements));
    let r = rank(&entries.iter().map(|e| e.vector.clone()).collect::<Vec<_>>())?;
    Ok(InducedGeneratingSet {
        entries,
        rank: r,
        descriptor: Some(desc),
    })
}

/// All products of one basis vector per part, re-indexed in the parent.
pub fn tensor_combine(
    parent: &DiscriminantForm,
    parts: &[(PPart, Vec<GroupAlgebraVector>)],
) -> Vec<GroupAlgebraVector> {
    let n = parent.order();
    // Running list of (support element, coefficient) vectors.
    let mut acc: Vec<Vec<(usize, CycloNumber)>> = vec![vec![(0, CycloNumber::one())]];
    for (part, basis) in parts {
        let embed: Vec<usize> = (0..part.form.order()).map(|i| part.embed(parent, i)).collect();
        let mut next = Vec::with_capacity(acc.len() * basis.len());
        for a in &acc {
            for v in basis {
                let mut terms = Vec::new();
                for (x, cx) in a {
                    for y in v.support() {
                        terms.push((parent.add(*x, embed[y]), cx * v.get(y)));
                    }
                }
                next.push(terms);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|terms| {
            let mut out = GroupAlgebraVector::zero(n);
            for (g, c) in terms {
                let s = out.get(g) + &c;
                out.set(g, s);
            }
            out
        })
        .collect()
}

/// Generating set for any level: prime-power parts are handled by
/// `induced_generating_set` and combined by tensor products.
pub fn generating_set(d: &DiscriminantForm) -> Result<InducedGeneratingSet> {
    if d.signature() % 2 == 1 {
        return Ok(InducedGeneratingSet::empty());
    }
    if d.is_trivial() || prime_power(d.level() as u64).is_some() {
        return induced_generating_set(d);
    }
    let parts = d.p_parts();
    let mut per_part = Vec::with_capacity(parts.len());
    for part in parts {
        let set = induced_generating_set(&part.form)?;
        per_part.push((part, set));
    }
    // Subgroups combine as the sum of one embedded subgroup per part.
    let mut subgroups: Vec<Vec<usize>> = vec![vec![]];
    for (part, set) in &per_part {
        let mut next = Vec::new();
        for gens in &subgroups {
            for e in &set.entries {
                let mut g = gens.clone();
                g.extend(e.subgroup.generators.iter().map(|&x| part.embed(d, x)));
                next.push(g);
            }
        }
        subgroups = next;
    }
    let inputs: Vec<(PPart, Vec<GroupAlgebraVector>)> = per_part
        .into_iter()
        .map(|(p, s)| {
            let v = s.vectors();
            (p, v)
        })
        .collect();
    let vectors = tensor_combine(d, &inputs);
    let entries = subgroups
        .into_iter()
        .zip(vectors)
        .map(|(gens, v)| {
            Ok(InducedInvariant {
                subgroup: IsotropicSubgroup::generated_by(d, &gens)?,
                vector: normalized(&v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r = rank(&entries.iter().map(|e| e.vector.clone()).collect::<Vec<_>>())?;
    Ok(InducedGeneratingSet {
        entries,
        rank: r,
        descriptor: None,
    })
}

#[cfg(test)]
mod tests;

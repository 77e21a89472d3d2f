//! Isotropic subgroups, the quotient H^⊥/H and the isotropic lift and descent.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::config;
use crate::error::{Error, Result};
use crate::fqm::DiscriminantForm;
use crate::snf::quotient_presentation;
use crate::weil::GroupAlgebraVector;

pub fn isotropic_elements(d: &DiscriminantForm) -> Vec<usize> {
    (0..d.order()).filter(|&g| d.is_isotropic(g)).collect()
}

/// Subgroup generated by `gens`, as a sorted element list.
pub fn span(d: &DiscriminantForm, gens: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; d.order()];
    inside[0] = true;
    let mut elems = vec![0usize];
    for &g in gens {
        extend_span(d, &mut inside, &mut elems, g);
    }
    elems.sort_unstable();
    elems
}

fn extend_span(d: &DiscriminantForm, inside: &mut [bool], elems: &mut Vec<usize>, g: usize) {
    if inside[g] {
        return;
    }
    let base = elems.clone();
    let mut step = g;
    while !inside[step] {
        for &h in &base {
            let x = d.add(h, step);
            if !inside[x] {
                inside[x] = true;
                elems.push(x);
            }
        }
        step = d.add(step, g);
    }
}

/// A small generating set of the subgroup formed by `elements`.
pub fn generating_set(d: &DiscriminantForm, elements: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; d.order()];
    inside[0] = true;
    let mut elems = vec![0usize];
    let mut gens = Vec::new();
    let mut sorted: Vec<usize> = elements.to_vec();
    // Larger orders first keeps the set short.
    sorted.sort_by_key(|&g| (std::cmp::Reverse(d.element_order(g)), g));
    for g in sorted {
        if !inside[g] {
            gens.push(g);
            extend_span(d, &mut inside, &mut elems, g);
        }
    }
    gens
}

/// Elements orthogonal to every generator.
pub fn orthogonal_complement(d: &DiscriminantForm, gens: &[usize]) -> Vec<usize> {
    (0..d.order())
        .filter(|&g| gens.iter().all(|&h| d.b_num(g, h) == 0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicSubgroup {
    pub generators: Vec<usize>,
    /// Sorted element indices.
    pub elements: Vec<usize>,
    /// Sorted indices of H^⊥.
    pub perp: Vec<usize>,
}

impl IsotropicSubgroup {
    pub fn trivial(d: &DiscriminantForm) -> Self {
        IsotropicSubgroup {
            generators: Vec::new(),
            elements: vec![0],
            perp: (0..d.order()).collect(),
        }
    }

    /// The subgroup generated by `gens`; fails unless q vanishes on it.
    pub fn generated_by(d: &DiscriminantForm, gens: &[usize]) -> Result<Self> {
        let elements = span(d, gens);
        if elements.iter().any(|&h| !d.is_isotropic(h)) {
            return Err(Error::NotIsotropic);
        }
        let generators = generating_set(d, &elements);
        let perp = orthogonal_complement(d, &generators);
        debug_assert_eq!(perp.len() * elements.len(), d.order());
        Ok(IsotropicSubgroup {
            generators,
            elements,
            perp,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }
}

fn check_size(d: &DiscriminantForm) -> Result<()> {
    let bound = config::bounds().max_order;
    if d.order() as u64 > bound {
        return Err(Error::OrderBoundExceeded {
            order: d.order() as u64,
            bound,
        });
    }
    Ok(())
}

/// All isotropic subgroups of order at most `max_order`, each once, sorted
/// by order and then by element list.
pub fn isotropic_subgroups(d: &DiscriminantForm, max_order: Option<usize>) -> Result<Vec<IsotropicSubgroup>> {
    check_size(d)?;
    let limit = max_order.unwrap_or(usize::MAX);
    let iso = isotropic_elements(d);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut queue: VecDeque<(Vec<usize>, Vec<usize>)> = VecDeque::new();
    seen.insert(vec![0]);
    queue.push_back((Vec::new(), vec![0]));
    while let Some((gens, elems)) = queue.pop_front() {
        let member: HashSet<usize> = elems.iter().copied().collect();
        for &h in &iso {
            if member.contains(&h) || gens.iter().any(|&k| d.b_num(h, k) != 0) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(h);
            let next = span(d, &next_gens);
            if next.len() > limit || !seen.insert(next.clone()) {
                continue;
            }
            queue.push_back((next_gens, next));
        }
        found.push((gens, elems));
    }
    let mut out: Vec<IsotropicSubgroup> = found
        .into_iter()
        .map(|(_, elements)| {
            let generators = generating_set(d, &elements);
            let perp = orthogonal_complement(d, &generators);
            IsotropicSubgroup {
                generators,
                elements,
                perp,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(out)
}

/// a(p, γ): the number of isotropic subgroups of order p inside γ^⊥.
pub fn count_order_p_subgroups_in_perp(d: &DiscriminantForm, p: i64, gamma: usize) -> usize {
    let n = (0..d.order())
        .filter(|&g| d.element_order(g) == p && d.is_isotropic(g) && d.b_num(g, gamma) == 0)
        .count();
    n / (p as usize - 1)
}

/// H^⊥/H with a fixed section and projection.
#[derive(Debug, Clone)]
pub struct QuotientForm {
    pub form: DiscriminantForm,
    /// Smallest-index representative in H^⊥ of each quotient element.
    pub section: Vec<usize>,
    /// Quotient element of each parent element in H^⊥.
    pub projection: Vec<Option<usize>>,
    /// Parent elements of each coset γ + H.
    cosets: Vec<Vec<usize>>,
    parent_order: usize,
    h_order: usize,
}

pub fn quotient(d: &DiscriminantForm, h: &IsotropicSubgroup) -> Result<QuotientForm> {
    if h.elements.iter().any(|&g| !d.is_isotropic(g)) {
        return Err(Error::NotIsotropic);
    }
    let k = d.num_generators();
    let orders = d.orders();
    let coords = |g: usize| d.coords(g);
    let moduli: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { orders[i] } else { 0 }).collect())
        .collect();
    let perp_gens = generating_set(d, &h.perp);
    let kg: Vec<Vec<i64>> = perp_gens.iter().map(|&g| coords(g)).collect();
    let hg: Vec<Vec<i64>> = h.generators.iter().map(|&g| coords(g)).collect();
    let (form, gen_idx) = if k == 0 {
        (DiscriminantForm::trivial(), Vec::new())
    } else {
        let pres = quotient_presentation(k, &moduli, &kg, &hg);
        let keep: Vec<usize> = (0..pres.orders.len()).filter(|&i| pres.orders[i] > 1).collect();
        let gen_idx: Vec<usize> = keep.iter().map(|&i| d.index(&pres.gens[i])).collect();
        let qorders: Vec<i64> = keep.iter().map(|&i| pres.orders[i]).collect();
        if qorders.is_empty() {
            (DiscriminantForm::trivial(), gen_idx)
        } else {
            let n = d.level();
            let qn: Vec<i64> = gen_idx.iter().map(|&g| d.q_num(g)).collect();
            let bn: Vec<Vec<i64>> = gen_idx
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    gen_idx
                        .iter()
                        .enumerate()
                        .map(|(j, &f)| if i == j { 2 * qn[i] % n } else { d.b_num(g, f) })
                        .collect()
                })
                .collect();
            (DiscriminantForm::from_numerators(qorders, n, qn, bn)?, gen_idx)
        }
    };
    // Map every quotient element to its coset by walking generator combinations.
    let size = form.order();
    let mut rep = vec![0usize; size];
    for (idx, r) in rep.iter_mut().enumerate() {
        let c = form.coords(idx);
        let mut x = 0usize;
        for (i, &ci) in c.iter().enumerate() {
            x = d.add(x, d.mul(ci, gen_idx[i]));
        }
        *r = x;
    }
    let mut projection = vec![None; d.order()];
    let mut cosets = vec![Vec::new(); size];
    for (idx, &r) in rep.iter().enumerate() {
        for &m in &h.elements {
            let x = d.add(r, m);
            if projection[x].is_some() {
                return Err(Error::Internal("quotient presentation is not injective".into()));
            }
            projection[x] = Some(idx);
            cosets[idx].push(x);
        }
    }
    if cosets.iter().map(|c| c.len()).sum::<usize>() != h.perp.len() {
        return Err(Error::Internal("quotient presentation does not cover H^⊥".into()));
    }
    for c in cosets.iter_mut() {
        c.sort_unstable();
    }
    let section: Vec<usize> = cosets.iter().map(|c| c[0]).collect();
    for (idx, &s) in section.iter().enumerate() {
        if form.q_num(idx) * (d.level() / form.level()) != d.q_num(s) {
            return Err(Error::Internal("quotient norm disagrees with the parent".into()));
        }
    }
    Ok(QuotientForm {
        form,
        section,
        projection,
        cosets,
        parent_order: d.order(),
        h_order: h.order(),
    })
}

impl QuotientForm {
    pub fn h_order(&self) -> usize {
        self.h_order
    }

    /// Coset γ + H of a quotient element, as parent indices.
    pub fn coset(&self, idx: usize) -> &[usize] {
        &self.cosets[idx]
    }

    /// ↑(e^{γ+H}) = Σ_{μ∈H} e^{γ+μ}, extended linearly.
    pub fn lift_up(&self, v: &GroupAlgebraVector) -> GroupAlgebraVector {
        let mut out = GroupAlgebraVector::zero(self.parent_order);
        for i in v.support() {
            for &x in &self.cosets[i] {
                out.set(x, v.get(i).clone());
            }
        }
        out
    }

    /// ↓(e^γ) = e^{γ+H} for γ ∈ H^⊥ and 0 otherwise.
    pub fn descend(&self, v: &GroupAlgebraVector) -> GroupAlgebraVector {
        let mut out = GroupAlgebraVector::zero(self.form.order());
        for g in v.support() {
            if let Some(i) = self.projection[g] {
                out.set(i, out.get(i) + v.get(g));
            }
        }
        out
    }

    /// K/H inside H^⊥/H for an isotropic K ⊇ H.
    pub fn image_subgroup(&self, k: &IsotropicSubgroup) -> Result<IsotropicSubgroup> {
        let mut elems = BTreeSet::new();
        for &g in &k.elements {
            let i = self.projection[g].ok_or_else(|| Error::NotInSubset("K is not inside H^⊥".into()))?;
            elems.insert(i);
        }
        let gens: Vec<usize> = elems.into_iter().collect();
        IsotropicSubgroup::generated_by(&self.form, &gens)
    }
}

/// ↑_H^D for a subgroup H of D.
pub fn lift_up(d: &DiscriminantForm, h: &IsotropicSubgroup, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    Ok(quotient(d, h)?.lift_up(v))
}

/// ↓_H^D for a subgroup H of D.
pub fn descend(d: &DiscriminantForm, h: &IsotropicSubgroup, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    Ok(quotient(d, h)?.descend(v))
}

//! Weight-2 cusp form dimensions for prime level and singular-weight Jacobi
//! forms.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{is_prime, legendre};
use crate::cyclo::{rat, CycloNumber};
use crate::error::{Error, Result};
use crate::fqm::{from_gram, ComponentKind, DiscriminantForm, GramForm, JordanSymbol};
use crate::fundamental::generating_set;
use crate::induct::{quotient, IsotropicSubgroup};
use crate::snf::det;
use crate::weil::{dim_invariants, GroupAlgebraVector, Weil};

/// Largest number of lattice vectors the theta enumeration will visit.
pub const MAX_THETA_VECTORS: f64 = 2.0e7;

/// (p, n, ε) of a symbol p^{εn} with n even and prime level p.
fn prime_level_symbol(sym: &JordanSymbol) -> Result<(i64, u32, i8)> {
    let bad = |reason: &str| Error::InvalidForm(format!("{sym}: {reason}"));
    let [c] = sym.components() else {
        return Err(bad("expected a single Jordan component"));
    };
    if !is_prime(c.q) || c.rank == 0 {
        return Err(bad("level is not prime"));
    }
    if c.q == 2 && c.kind != ComponentKind::Even {
        return Err(bad("odd 2-adic component has level 4"));
    }
    if c.rank % 2 == 1 {
        return Err(bad("odd rank is not supported"));
    }
    Ok((c.q as i64, c.rank, c.sign))
}

/// Closed formula for dim S₂ on p^{εn}, n even.
pub fn dim_s2(sym: &JordanSymbol) -> Result<u64> {
    let (p, n, eps) = prime_level_symbol(sym)?;
    if p <= 3 {
        return Ok(0);
    }
    let pw = |k: u32| BigRational::from_integer(BigInt::from(p).pow(k));
    let sign = eps as i64 * (legendre(-1, p) as i64).pow(n / 2);
    let val = (pw(n) + rat(5, 1)) / rat(24, 1) - pw(n - 1) / rat(4, 1) - rat(sign * (p - 5), 4) * pw((n - 2) / 2)
        + (pw(n - 1) - rat(p, 1)) / rat(p * p - 1, 1);
    to_count(&val)
}

fn to_count(x: &BigRational) -> Result<u64> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::Internal(format!("dimension {x} is not a non-negative integer")));
    }
    x.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Internal("dimension overflow".into()))
}

/// The terms of the trace formula for dim S₂, evaluated on the subspace
/// spanned by e^γ + e^{−γ}.
#[derive(Debug, Clone)]
pub struct S2Trace {
    pub d: u64,
    /// tr(e(1/2)ρ(S)) on V.
    pub trace_s: CycloNumber,
    pub alpha_s: BigRational,
    pub alpha_st: BigRational,
    pub alpha_t: BigRational,
    pub isotropic_classes: u64,
    pub invariants: u64,
    pub dim: u64,
}

fn rational(x: &CycloNumber, what: &str) -> Result<BigRational> {
    x.as_rational()
        .ok_or_else(|| Error::Internal(format!("{what} is not rational")))
}

/// dim S₂ from the representation itself, for p^{εn} with n even.
pub fn dim_s2_trace_oracle(sym: &JordanSymbol) -> Result<S2Trace> {
    prime_level_symbol(sym)?;
    let d = sym.to_form()?;
    if d.signature() % 4 != 0 {
        return Err(Error::Internal("signature is not 0 mod 4".into()));
    }
    let w = Weil::new(&d)?;
    let n = d.order();
    let level = d.level();
    let classes: Vec<usize> = (0..n).filter(|&g| g <= d.neg(g)).collect();
    // Diagonal contributions of ρ(S) and ρ(ST) on V, one class at a time.
    let parts: Vec<(CycloNumber, CycloNumber)> = classes
        .par_iter()
        .map(|&g| -> Result<(CycloNumber, CycloNumber)> {
            let col = w.rho_s(&GroupAlgebraVector::basis(n, g))?;
            let ng = d.neg(g);
            let s = if ng == g {
                col.get(g).clone()
            } else {
                col.get(g) + col.get(ng)
            };
            let t = CycloNumber::e_of(Ratio::new(-d.q_num(g), level))?;
            let st = s.checked_mul(&t)?;
            Ok((s, st))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tr_s = CycloNumber::zero();
    let mut tr_st = CycloNumber::zero();
    for (s, st) in &parts {
        tr_s = tr_s.checked_add(s)?;
        tr_st = tr_st.checked_add(st)?;
    }
    let dd = BigRational::from_integer(BigInt::from(classes.len()));
    let trace_s = -tr_s;
    let alpha_s = &dd / rat(4, 1) - rational(&trace_s, "tr(e(1/2)ρ(S))")? / rat(4, 1);
    // tr(M⁻¹) for M = (e(1/3)ρ(ST))⁻¹.
    let t = tr_st.checked_mul(&CycloNumber::e_of(Ratio::new(1, 3))?)?;
    let conj = t.conj();
    let re = rational(&t.checked_add(&conj)?, "Re tr")? / rat(2, 1);
    let i_sqrt3 = CycloNumber::e_of(Ratio::new(1, 3))?.checked_sub(&CycloNumber::e_of(Ratio::new(2, 3))?)?;
    let im_over_sqrt3 = rational(&t.checked_sub(&conj)?.checked_div(&i_sqrt3)?, "Im tr")? / rat(2, 1);
    let alpha_st = &dd / rat(3, 1) - re / rat(3, 1) + im_over_sqrt3 / rat(3, 1);
    // ρ(T) e^γ = e(−q(γ)) e^γ.
    let alpha_t = classes.iter().fold(BigRational::zero(), |acc, &g| {
        acc + rat((level - d.q_num(g)) % level, level)
    });
    let isotropic_classes = classes.iter().filter(|&&g| d.q_num(g) == 0).count() as u64;
    let invariants = w.dim()?;
    let total = &dd / rat(6, 1) + &dd - &alpha_s - &alpha_st - &alpha_t - rat(isotropic_classes as i64, 1)
        + rat(invariants as i64, 1);
    Ok(S2Trace {
        d: classes.len() as u64,
        trace_s,
        alpha_s,
        alpha_st,
        alpha_t,
        isotropic_classes,
        invariants,
        dim: to_count(&total)?,
    })
}

/// One overlattice M ⊃ L and its invariant on M'/M.
#[derive(Debug, Clone)]
pub struct JacobiBasisEntry {
    /// M/L inside L'/L.
    pub overlattice: IsotropicSubgroup,
    /// v_γ on M'/M, each class given by its smallest representative in L'/L.
    pub coefficients: Vec<(usize, BigInt)>,
    /// The lifted invariant of L'/L.
    pub lifted: GroupAlgebraVector,
    pub rank: usize,
    /// Twice the weight.
    pub weight_times_two: usize,
}

#[derive(Debug, Clone)]
pub struct JacobiBasis {
    pub lattice: GramForm,
    pub entries: Vec<JacobiBasisEntry>,
    /// Rank of the lifted invariants.
    pub span_rank: usize,
    /// dim C[L'/L]^Γ.
    pub dim: u64,
    /// Set when the rank is odd and the space is trivial.
    pub odd_rank: bool,
}

fn check_positive_definite(g: &[Vec<i64>]) -> Result<()> {
    for k in 1..=g.len() {
        let minor: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| g[i][j] as i128).collect()).collect();
        if det(&minor) <= 0 {
            return Err(Error::InvalidGram("matrix is not positive definite".into()));
        }
    }
    Ok(())
}

/// Generators of the singular-weight Jacobi forms of index L, one per
/// overlattice whose discriminant form has fundamental p-parts.
pub fn jacobi_singular_basis(gram: &[Vec<i64>]) -> Result<JacobiBasis> {
    let lattice = from_gram(gram)?;
    check_positive_definite(gram)?;
    let n = gram.len();
    let d = lattice.form.clone();
    if n % 2 == 1 {
        return Ok(JacobiBasis {
            lattice,
            entries: Vec::new(),
            span_rank: 0,
            dim: 0,
            odd_rank: true,
        });
    }
    let set = generating_set(&d)?;
    let entries = set
        .entries
        .into_iter()
        .map(|e| -> Result<JacobiBasisEntry> {
            let q = quotient(&d, &e.subgroup)?;
            let coefficients = q
                .section
                .iter()
                .filter_map(|&g| {
                    let c = e.vector.get(g).as_rational()?;
                    (!c.is_zero()).then(|| (g, c.to_integer()))
                })
                .collect();
            Ok(JacobiBasisEntry {
                overlattice: e.subgroup,
                coefficients,
                lifted: e.vector,
                rank: n,
                weight_times_two: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JacobiBasis {
        lattice,
        entries,
        span_rank: set.rank,
        dim: dim_invariants(&d)?,
        odd_rank: false,
    })
}

/// Dual-lattice vectors y (α = G⁻¹y) with yᵀG⁻¹y ≤ bound, by Fincke–Pohst
/// enumeration over the dual Gram matrix.
fn short_dual_vectors(lattice: &GramForm, bound: i128) -> Vec<Vec<i64>> {
    let n = lattice.rank();
    let det = lattice.det() as f64;
    let adj = lattice.adjugate();
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| adj[i][j] as f64 / det).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut y = vec![0i64; n];
    let limit = bound as f64 + 1e-6;
    fn recurse(i: usize, rem: f64, q: &[Vec<f64>], y: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = y.len();
        let c: f64 = -(i + 1..n).map(|j| q[i][j] * y[j] as f64).sum::<f64>();
        let r = (rem.max(0.0) / q[i][i]).sqrt() + 1e-9;
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for v in lo..=hi {
            y[i] = v;
            let used = q[i][i] * (v as f64 - c).powi(2);
            if used > rem + 1e-6 {
                continue;
            }
            if i == 0 {
                out.push(y.clone());
            } else {
                recurse(i - 1, rem - used, q, y, out);
            }
        }
        y[i] = 0;
    }
    if n > 0 {
        recurse(n - 1, limit, &q, &mut y, &mut out);
    } else {
        out.push(Vec::new());
    }
    out.retain(|y| {
        let v = lattice.inner_dual(y);
        v <= Ratio::from_integer(bound)
    });
    out
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Coefficients c(0..=P) of Σ_γ v_γ ϑ_γ(τ, 0), where ϑ_γ runs over γ + L.
pub fn theta_q_expansion(lattice: &GramForm, v: &GroupAlgebraVector, precision: u64) -> Result<Vec<BigInt>> {
    let d: &DiscriminantForm = &lattice.form;
    if v.len() != d.order() {
        return Err(Error::InvalidForm("vector length does not match L'/L".into()));
    }
    let coeffs: Vec<BigInt> = v
        .as_rationals()
        .filter(|r| r.iter().all(|x| x.is_integer()))
        .ok_or_else(|| Error::NotInSubset("coefficients must be integers".into()))?
        .into_iter()
        .map(|x| x.to_integer())
        .collect();
    let n = lattice.rank();
    let radius_sq = 2.0 * precision as f64;
    let estimate = unit_ball_volume(n) * radius_sq.powf(n as f64 / 2.0) * (lattice.det() as f64).sqrt();
    if estimate > MAX_THETA_VECTORS {
        return Err(Error::PrecisionTooLarge(precision));
    }
    let mut out = vec![BigInt::zero(); precision as usize + 1];
    for y in short_dual_vectors(lattice, 2 * precision as i128) {
        let g = lattice.coset_of(&y);
        if coeffs[g].is_zero() {
            continue;
        }
        let norm = lattice.inner_dual(&y) / Ratio::from_integer(2);
        if !norm.is_integer() {
            return Err(Error::NotInSubset(
                "vector is supported on a non-isotropic class".into(),
            ));
        }
        out[norm.to_integer() as usize] += &coeffs[g];
    }
    Ok(out)
}

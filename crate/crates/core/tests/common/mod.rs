//! Batteries and seeded property checks shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weilinv::arith::gcd;
use weilinv::fqm::{DiscriminantForm, JordanSymbol};
use weilinv::induct::{isotropic_elements, isotropic_subgroups, quotient};
use weilinv::weil::{GroupAlgebraVector, Weil};

pub fn form(s: &str) -> DiscriminantForm {
    JordanSymbol::parse(s).unwrap().to_form().unwrap()
}

/// Symbols of every family with a closed dimension formula.
pub fn family_battery() -> Vec<String> {
    let mut out = Vec::new();
    for p in [3, 5, 7] {
        for n in 1..=4 {
            for e in ["+", "-"] {
                out.push(format!("{p}^{e}{n}"));
            }
        }
    }
    for n in (2..=6).step_by(2) {
        for e in ["+", "-"] {
            out.push(format!("2_II^{e}{n}"));
        }
    }
    for n in 1..=5 {
        for t in 0..8 {
            for e in ["+", "-"] {
                out.push(format!("2_{t}^{e}{n}"));
                if n <= 3 {
                    out.push(format!("2_{t}^{e}{n}.4_II^+2"));
                }
            }
        }
    }
    for t in [1, 3, 5, 7] {
        let e = if t == 1 || t == 7 { "+" } else { "-" };
        out.push(format!("2_1^+1.4_{t}^{e}1.8_II^+2"));
    }
    out.retain(|s| JordanSymbol::parse(s).and_then(|x| x.to_form()).is_ok());
    out
}

pub fn span_battery() -> Vec<&'static str> {
    vec![
        "3^+3",
        "3^-4",
        "3^+5",
        "5^+2",
        "5^-2",
        "2_II^+2",
        "2_II^-2",
        "2_II^-4",
        "2_0^+2",
        "2_2^+2.4_II^+2",
        "2_6^+2.4_II^+2",
        "2_1^+1.4_1^+1.8_II^+2",
        "4_II^+2",
        "2_II^+2.3^-2",
    ]
}

const POOL: &[(u64, &[&str])] = &[
    (
        2,
        &[
            "2_II^+2", "2_II^-2", "2_1^+1", "2_7^+1", "2_3^-1", "2_0^+2", "2_2^+2", "2_6^+2", "2_II^+4", "2_1^+3",
        ],
    ),
    (4, &["4_II^+2", "4_II^-2", "4_1^+1", "4_3^-1", "4_7^+1", "4_5^-1"]),
    (8, &["8_1^+1", "8_5^-1"]),
    (3, &["3^+1", "3^-1", "3^+2", "3^-2", "3^+3"]),
    (9, &["9^+1", "9^-1"]),
    (5, &["5^+1", "5^-1", "5^+2", "5^-2"]),
    (7, &["7^+1", "7^-1"]),
];

/// Seeded random forms with |D| ≤ max_order; `even` keeps even signatures only.
pub fn random_forms(seed: u64, count: usize, max_order: usize, even: bool) -> Vec<(String, DiscriminantForm)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut parts = Vec::new();
        for (_, opts) in POOL {
            if rng.gen_bool(0.35) {
                parts.push(*opts.choose(&mut rng).unwrap());
            }
        }
        if parts.is_empty() {
            continue;
        }
        let s = parts.join(".");
        let Ok(d) = JordanSymbol::parse(&s).and_then(|x| x.to_form()) else {
            continue;
        };
        if d.order() > max_order || d.level() > 40 || (even && d.signature() % 2 == 1) {
            continue;
        }
        out.push((s, d));
    }
    out
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> GroupAlgebraVector {
    let xs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    GroupAlgebraVector::from_integers(&xs)
}

type Check = Result<(), String>;

fn ensure(ok: bool, what: &str) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn err(e: weilinv::Error) -> String {
    e.to_string()
}

/// ρ(S)² = ρ(Z), (ρ(S)ρ(T))³ = ρ(S)², ρ(Z)² = 1 and unitarity on random vectors.
pub fn check_representation(d: &DiscriminantForm, rng: &mut ChaCha8Rng) -> Check {
    let w = Weil::new(d).map_err(err)?;
    let n = d.order();
    let (v, u) = (random_vector(rng, n), random_vector(rng, n));
    let s2 = w.rho_s(&w.rho_s(&v).map_err(err)?).map_err(err)?;
    let z = w.rho_z(&v).map_err(err)?;
    ensure(s2 == z, "S^2 != Z")?;
    let mut st = v.clone();
    for _ in 0..3 {
        st = w.rho_s(&w.rho_t(&st).map_err(err)?).map_err(err)?;
    }
    ensure(st == s2, "(ST)^3 != S^2")?;
    ensure(w.rho_z(&z).map_err(err)? == v, "Z^2 != 1")?;
    let (sv, su) = (w.rho_s(&v).map_err(err)?, w.rho_s(&u).map_err(err)?);
    ensure(sv.inner(&su) == v.inner(&u), "S not unitary")?;
    let (tv, tu) = (w.rho_t(&v).map_err(err)?, w.rho_t(&u).map_err(err)?);
    ensure(tv.inner(&tu) == v.inner(&u), "T not unitary")
}

/// inv is idempotent, self-adjoint and lands in the invariants.
pub fn check_projection(d: &DiscriminantForm, rng: &mut ChaCha8Rng) -> Check {
    let w = Weil::new(d).map_err(err)?;
    let n = d.order();
    let (v, u) = (random_vector(rng, n), random_vector(rng, n));
    let p = w.inv(&v).map_err(err)?;
    ensure(w.inv(&p).map_err(err)? == p, "inv not idempotent")?;
    ensure(w.rho_s(&p).map_err(err)? == p, "inv(v) not S-invariant")?;
    ensure(w.rho_t(&p).map_err(err)? == p, "inv(v) not T-invariant")?;
    let pu = w.inv(&u).map_err(err)?;
    ensure(p.inner(&u) == v.inner(&pu), "inv not self-adjoint")
}

fn chi_nontrivial(d: &DiscriminantForm) -> bool {
    let n = d.level();
    (1..n.max(2)).any(|a| gcd(a, n) == 1 && d.chi(a).unwrap() == -1)
}

/// The vanishing and symmetry properties of projected basis vectors.
pub fn check_structure(d: &DiscriminantForm, rng: &mut ChaCha8Rng) -> Check {
    let w = Weil::new(d).map_err(err)?;
    let n = d.order();
    let level = d.level();
    let iso = isotropic_elements(d);
    let iperp: Vec<bool> = (0..n).map(|g| iso.iter().all(|&m| d.b_num(g, m) == 0)).collect();
    let nontrivial = chi_nontrivial(d);
    let zero = w.inv_basis(0);
    if nontrivial {
        ensure(zero.is_zero(), "tamtam: inv(e^0) != 0 with nontrivial character")?;
    }
    // Isotropic elements carry the content; a few others check the zero cases.
    let mut gammas: Vec<usize> = iso.choose_multiple(rng, 10).copied().collect();
    gammas.extend((0..4).map(|_| rng.gen_range(0..n)));
    let units: Vec<i64> = (1..=level).filter(|&a| gcd(a, level) == 1).collect();
    let chi5 = if gcd(level, 5) == 1 {
        Some(d.chi(5).map_err(err)?)
    } else {
        None
    };
    for g in gammas {
        let v = w.inv_basis(g);
        for &a in &units {
            let c = d.chi(a).map_err(err)?;
            for x in 0..n {
                let lhs = v.get(x);
                let rhs = v.get(d.mul(a, x));
                let ok = if c == 1 { lhs == rhs } else { *lhs == -rhs.clone() };
                ensure(ok, &format!("abba fails at a = {a}, gamma = {g}"))?;
            }
        }
        if iperp[g] {
            ensure(v == zero, "iggypop: gamma in I-perp but inv(e^gamma) != inv(e^0)")?;
        }
        if nontrivial && iperp[d.mul(2, g)] {
            ensure(v.is_zero(), "ironmaiden: inv(e^gamma) != 0")?;
        }
        if chi5 == Some(-1) && iperp[d.mul(4, g)] {
            ensure(v.is_zero(), "cash: inv(e^gamma) != 0")?;
        }
    }
    Ok(())
}

/// Lift and descent intertwine the representations, are adjoint, and
/// compose transitively.
pub fn check_induction(d: &DiscriminantForm, rng: &mut ChaCha8Rng) -> Check {
    let subs = isotropic_subgroups(d, None).map_err(err)?;
    let h = subs.choose(rng).unwrap();
    let q = quotient(d, h).map_err(err)?;
    let (wd, wq) = (Weil::new(d).map_err(err)?, Weil::new(&q.form).map_err(err)?);
    let u = random_vector(rng, q.form.order());
    let v = random_vector(rng, d.order());
    ensure(q.form.signature() == d.signature(), "quotient signature")?;
    ensure(q.form.order() * h.order() * h.order() == d.order(), "quotient order")?;
    let up = q.lift_up(&u);
    ensure(
        wd.rho_s(&up).map_err(err)? == q.lift_up(&wq.rho_s(&u).map_err(err)?),
        "lift does not intertwine S",
    )?;
    ensure(
        wd.rho_t(&up).map_err(err)? == q.lift_up(&wq.rho_t(&u).map_err(err)?),
        "lift does not intertwine T",
    )?;
    let down = q.descend(&v);
    ensure(
        q.descend(&wd.rho_s(&v).map_err(err)?) == wq.rho_s(&down).map_err(err)?,
        "descent does not intertwine S",
    )?;
    ensure(
        q.descend(&wd.rho_t(&v).map_err(err)?) == wq.rho_t(&down).map_err(err)?,
        "descent does not intertwine T",
    )?;
    ensure(up.inner(&v) == u.inner(&down), "lift and descent are not adjoint")?;
    ensure(
        wd.inv(&up).map_err(err)? == q.lift_up(&wq.inv(&u).map_err(err)?),
        "lift does not commute with inv",
    )?;
    let supers: Vec<_> = subs.iter().filter(|k| h.is_subgroup_of(k)).collect();
    let k = supers.choose(rng).unwrap();
    let kq = quotient(d, k).map_err(err)?;
    let inner = quotient(&q.form, &q.image_subgroup(k).map_err(err)?).map_err(err)?;
    let x = random_vector(rng, kq.form.order());
    // Transport x to the iterated quotient through the common coset labels.
    let mut y = GroupAlgebraVector::zero(inner.form.order());
    for (i, &g) in kq.section.iter().enumerate() {
        let j = inner.projection[q.projection[g].unwrap()].unwrap();
        y.set(j, x.get(i).clone());
    }
    ensure(
        kq.lift_up(&x) == q.lift_up(&inner.lift_up(&y)),
        "lifts are not transitive",
    )?;
    ensure(
        inner.descend(&q.descend(&v)) == {
            let dv = kq.descend(&v);
            let mut t = GroupAlgebraVector::zero(inner.form.order());
            for (i, &g) in kq.section.iter().enumerate() {
                t.set(inner.projection[q.projection[g].unwrap()].unwrap(), dv.get(i).clone());
            }
            t
        },
        "descents are not transitive",
    )
}

pub type Suite = fn(&DiscriminantForm, &mut ChaCha8Rng) -> Check;

pub fn suites() -> Vec<(&'static str, Suite, u64)> {
    vec![
        (
            "representation relations and unitarity",
            check_representation as Suite,
            11,
        ),
        (
            "projection idempotent, invariant, self-adjoint",
            check_projection as Suite,
            12,
        ),
        (
            "character symmetry and vanishing of projections",
            check_structure as Suite,
            13,
        ),
        ("lift and descent laws", check_induction as Suite, 14),
    ]
}

/// Runs a suite on `count` seeded forms; returns the number of instances or
/// the first failure.
pub fn run_suite(suite: Suite, seed: u64, count: usize) -> Result<usize, String> {
    let forms = random_forms(seed, count, 1 << 8, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for (s, d) in &forms {
        suite(d, &mut rng).map_err(|e| format!("{s}: {e}"))?;
    }
    Ok(forms.len())
}

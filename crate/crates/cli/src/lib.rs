//! Job runner behind the `weilinv` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use weilinv::appl::{dim_s2, dim_s2_trace_oracle, jacobi_singular_basis, theta_q_expansion};
use weilinv::config::Bounds;
use weilinv::cyclo::{fmt_rational, rat};
use weilinv::fqm::{from_gram, DiscriminantForm, JordanSymbol};
use weilinv::fundamental::generating_set;
use weilinv::induct::{isotropic_elements, isotropic_subgroups, quotient};
use weilinv::weil::{dim_closed_form, rank, GroupAlgebraVector, Weil};
use weilinv::{CycloNumber, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dim,
    Invariants,
    InducedBasis,
    Verify,
    S2Dim,
    Jacobi,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dim => "dim",
            Command::Invariants => "invariants",
            Command::InducedBasis => "induced-basis",
            Command::Verify => "verify",
            Command::S2Dim => "s2dim",
            Command::Jacobi => "jacobi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Symbol(String),
    GramFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub input: Input,
    pub check: bool,
    pub max_order: u64,
    pub format: Format,
    /// Theta coefficients to print for `jacobi`.
    pub precision: Option<u64>,
}

/// Exit status and rendered document.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: i32,
    pub document: Value,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.document).expect("serializable") + "\n",
            Format::Text => {
                let mut out = String::new();
                render_text(&self.document, "", &mut out);
                out
            }
        }
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_text(x, &key, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in xs.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix}: {s}");
        }
        other => {
            let _ = writeln!(out, "{prefix}: {other}");
        }
    }
}

struct Loaded {
    label: String,
    form: DiscriminantForm,
    symbol: Option<JordanSymbol>,
    gram: Option<Vec<Vec<i64>>>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> &'static str {
        match self {
            Failure::Lib(e) => e.code(),
            Failure::Io(_) => "io_error",
            Failure::Usage(_) => "usage_error",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) | Failure::Usage(m) => m.clone(),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn load(input: &Input) -> Res<Loaded> {
    match input {
        Input::Symbol(s) => {
            let sym = JordanSymbol::parse(s)?;
            let form = sym.to_form()?;
            Ok(Loaded {
                label: sym.to_string(),
                form,
                symbol: Some(sym),
                gram: None,
            })
        }
        Input::GramFile(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let gram: Vec<Vec<i64>> = serde_json::from_str(&text)
                .map_err(|e| Failure::Lib(Error::InvalidGram(format!("not a JSON array of integer arrays: {e}"))))?;
            let form = from_gram(&gram)?.form;
            Ok(Loaded {
                label: format!("gram {}", serde_json::to_string(&gram).expect("serializable")),
                form,
                symbol: None,
                gram: Some(gram),
            })
        }
    }
}

fn header(l: &Loaded, command: Command) -> Map<String, Value> {
    let d = &l.form;
    let mut m = Map::new();
    m.insert("command".into(), json!(command.name()));
    m.insert("form".into(), json!(l.label));
    m.insert("order".into(), json!(d.order()));
    m.insert("level".into(), json!(d.level()));
    m.insert("signature".into(), json!(d.signature()));
    m.insert("square_class".into(), json!(d.square_class().as_str()));
    m
}

fn coefficient(c: &CycloNumber) -> String {
    match c.as_rational() {
        Some(r) => fmt_rational(&r),
        None => c.to_string(),
    }
}

fn vector_json(d: &DiscriminantForm, v: &GroupAlgebraVector) -> Value {
    let terms: Vec<Value> = v
        .support()
        .into_iter()
        .map(|i| json!({"element": d.coords(i), "coefficient": coefficient(v.get(i))}))
        .collect();
    json!({"terms": terms, "text": v.display_with(d)})
}

fn integral(v: &GroupAlgebraVector) -> GroupAlgebraVector {
    match v.integer_normalized() {
        Some(ints) => GroupAlgebraVector::from_coeffs(
            ints.into_iter()
                .map(|x| CycloNumber::from_rational(num_rational::BigRational::from_integer(x)))
                .collect(),
        ),
        None => v.clone(),
    }
}

pub fn run(spec: &JobSpec) -> Outcome {
    match run_inner(spec) {
        Ok(o) => o,
        Err(f) => {
            // Keep the schema fields even when the form could not be built.
            let mut doc = match load(&spec.input) {
                Ok(l) => header(&l, spec.command),
                Err(_) => {
                    let mut m = Map::new();
                    m.insert("command".into(), json!(spec.command.name()));
                    for k in ["form", "order", "level", "signature", "square_class"] {
                        m.insert(k.into(), Value::Null);
                    }
                    m
                }
            };
            doc.insert("error".into(), json!({"code": f.code(), "message": f.message()}));
            Outcome {
                status: 2,
                document: Value::Object(doc),
            }
        }
    }
}

fn run_inner(spec: &JobSpec) -> Res<Outcome> {
    if spec.max_order == 0 {
        return Err(Failure::Usage("--max-order must be positive".into()));
    }
    let l = load(&spec.input)?;
    let order = l.form.order() as u64;
    if order > spec.max_order {
        return Err(Error::OrderBoundExceeded {
            order,
            bound: spec.max_order,
        }
        .into());
    }
    let mut doc = header(&l, spec.command);
    let ok = match spec.command {
        Command::Dim => cmd_dim(&l, spec.check, &mut doc)?,
        Command::Invariants => cmd_invariants(&l, &mut doc)?,
        Command::InducedBasis => cmd_induced(&l, spec.check, &mut doc)?,
        Command::Verify => cmd_verify(&l, &mut doc)?,
        Command::S2Dim => cmd_s2(&l, spec.check, &mut doc)?,
        Command::Jacobi => cmd_jacobi(&l, spec.precision, &mut doc)?,
    };
    Ok(Outcome {
        status: if ok { 0 } else { 1 },
        document: Value::Object(doc),
    })
}

fn even_weil(d: &DiscriminantForm) -> Res<Weil> {
    Ok(Weil::new(d)?)
}

fn cmd_dim(l: &Loaded, check: bool, doc: &mut Map<String, Value>) -> Res<bool> {
    let d = &l.form;
    if d.signature() % 2 == 1 {
        doc.insert("dim".into(), json!(0));
        return Ok(true);
    }
    let w = even_weil(d)?;
    let dim = w.dim()?;
    doc.insert("dim".into(), json!(dim));
    if !check {
        return Ok(true);
    }
    let full = w.dim_full_trace()?;
    let closed = match &l.symbol {
        Some(s) => match dim_closed_form(s) {
            Ok(v) => Some(v),
            Err(Error::NoClosedForm(_)) => None,
            Err(e) => return Err(e.into()),
        },
        None => None,
    };
    let ok = full == dim && closed.map_or(true, |c| c == dim);
    doc.insert(
        "checks".into(),
        json!({"full_trace": full, "closed_form": closed, "agree": ok}),
    );
    Ok(ok)
}

/// Independent projections inv(e^γ), γ isotropic, until the rank reaches the dimension.
fn projected_basis(w: &Weil) -> Res<Vec<GroupAlgebraVector>> {
    let dim = w.dim()? as usize;
    let mut basis: Vec<GroupAlgebraVector> = Vec::new();
    for g in isotropic_elements(w.form()) {
        if basis.len() == dim {
            break;
        }
        let v = integral(&w.inv_basis(g));
        if v.is_zero() {
            continue;
        }
        basis.push(v);
        if rank(&basis)? < basis.len() {
            basis.pop();
        }
    }
    Ok(basis)
}

fn cmd_invariants(l: &Loaded, doc: &mut Map<String, Value>) -> Res<bool> {
    let d = &l.form;
    if d.signature() % 2 == 1 {
        doc.insert("dim".into(), json!(0));
        doc.insert("basis".into(), json!([]));
        return Ok(true);
    }
    let w = even_weil(d)?;
    let basis = projected_basis(&w)?;
    doc.insert("dim".into(), json!(basis.len()));
    doc.insert(
        "basis".into(),
        Value::Array(basis.iter().map(|v| vector_json(d, v)).collect()),
    );
    Ok(true)
}

fn cmd_induced(l: &Loaded, check: bool, doc: &mut Map<String, Value>) -> Res<bool> {
    let d = &l.form;
    let set = generating_set(d)?;
    if let Some(desc) = &set.descriptor {
        doc.insert(
            "fundamental".into(),
            json!({"p": desc.p, "symbol": desc.symbol.to_string(), "order": desc.order(), "level": desc.level()}),
        );
    }
    let entries: Vec<Value> = set
        .entries
        .iter()
        .map(|e| {
            let gens: Vec<Vec<i64>> = e.subgroup.generators.iter().map(|&g| d.coords(g)).collect();
            json!({"subgroup_order": e.subgroup.order(), "subgroup_generators": gens, "vector": vector_json(d, &e.vector)})
        })
        .collect();
    doc.insert("count".into(), json!(set.entries.len()));
    doc.insert("rank".into(), json!(set.rank));
    doc.insert("vectors".into(), Value::Array(entries));
    if !check {
        return Ok(true);
    }
    let dim = if d.signature() % 2 == 1 {
        0
    } else {
        even_weil(d)?.dim()?
    };
    let ok = dim as usize == set.rank;
    doc.insert("checks".into(), json!({"dim": dim, "rank_equals_dim": ok}));
    Ok(ok)
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn sample(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    let step = n / cap;
    (0..cap).map(|i| (i * step + i) % n).collect()
}

fn first_failure<I: IntoIterator<Item = (usize, bool)>>(it: I, d: &DiscriminantForm) -> (bool, String) {
    for (g, ok) in it {
        if !ok {
            return (false, format!("counterexample e^{}", d.element(g)));
        }
    }
    (true, String::new())
}

fn cmd_verify(l: &Loaded, doc: &mut Map<String, Value>) -> Res<bool> {
    let d = &l.form;
    let n = d.order();
    let mut checks = vec![Check {
        name: "milgram_formula",
        pass: d.milgram_holds(),
        detail: String::new(),
    }];
    if d.signature() % 2 == 0 {
        let w = even_weil(d)?;
        let pts = sample(n, 24);
        let basis = |g| GroupAlgebraVector::basis(n, g);
        let mut rel = Vec::new();
        for &g in &pts {
            let v = basis(g);
            let z = w.rho_z(&v)?;
            let s2 = w.rho_s(&w.rho_s(&v)?)?;
            let mut st = v.clone();
            for _ in 0..3 {
                st = w.rho_s(&w.rho_t(&st)?)?;
            }
            rel.push((g, s2 == z && st == z));
        }
        let (pass, detail) = first_failure(rel, d);
        checks.push(Check {
            name: "s_squared_and_st_cubed_equal_z",
            pass,
            detail,
        });

        let orbits = w.isotropic_orbits();
        let mut inv_ok = Vec::new();
        let mut idem = Vec::new();
        for &(g, _) in &orbits {
            let p = w.inv_basis(g);
            inv_ok.push((g, w.rho_s(&p)? == p && w.rho_t(&p)? == p));
            idem.push((g, w.inv(&p)? == p));
        }
        let (pass, detail) = first_failure(inv_ok, d);
        checks.push(Check {
            name: "projection_is_invariant",
            pass,
            detail,
        });
        let (pass, detail) = first_failure(idem, d);
        checks.push(Check {
            name: "projection_is_idempotent",
            pass,
            detail,
        });

        let dim = w.dim()?;
        let full = w.dim_full_trace()?;
        checks.push(Check {
            name: "orbit_trace_equals_full_trace",
            pass: dim == full,
            detail: format!("{dim} vs {full}"),
        });
        if let Some(s) = &l.symbol {
            match dim_closed_form(s) {
                Ok(c) => checks.push(Check {
                    name: "closed_dimension",
                    pass: c == dim,
                    detail: format!("{c} vs {dim}"),
                }),
                Err(Error::NoClosedForm(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let basis_rank = projected_basis(&w)?.len() as u64;
        checks.push(Check {
            name: "projected_basis_rank",
            pass: basis_rank == dim,
            detail: format!("{basis_rank} vs {dim}"),
        });
        let set = generating_set(d)?;
        checks.push(Check {
            name: "induced_set_spans",
            pass: set.rank as u64 == dim,
            detail: format!("rank {} vs dim {dim}", set.rank),
        });
    }
    // Lift and descend are adjoint for every isotropic subgroup of order ≤ 4.
    let mut adj = (true, String::new());
    'outer: for h in isotropic_subgroups(d, Some(4))? {
        let q = quotient(d, &h)?;
        for a in sample(q.form.order(), 8) {
            let up = q.lift_up(&GroupAlgebraVector::basis(q.form.order(), a));
            for b in sample(n, 8) {
                let eb = GroupAlgebraVector::basis(n, b);
                if up.inner(&eb) != GroupAlgebraVector::basis(q.form.order(), a).inner(&q.descend(&eb)) {
                    adj = (false, format!("H of order {}, e^{}", h.order(), d.element(b)));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check {
        name: "lift_descend_adjoint",
        pass: adj.0,
        detail: adj.1,
    });
    let all = checks.iter().all(|c| c.pass);
    doc.insert(
        "checks".into(),
        Value::Array(
            checks
                .iter()
                .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
                .collect(),
        ),
    );
    doc.insert("all_pass".into(), json!(all));
    Ok(all)
}

fn cmd_s2(l: &Loaded, check: bool, doc: &mut Map<String, Value>) -> Res<bool> {
    let sym = l
        .symbol
        .as_ref()
        .ok_or_else(|| Failure::Usage("s2dim needs --symbol".into()))?;
    let dim = dim_s2(sym)?;
    doc.insert("dim_s2".into(), json!(dim));
    if !check {
        return Ok(true);
    }
    let t = dim_s2_trace_oracle(sym)?;
    let ok = t.dim == dim;
    doc.insert(
        "checks".into(),
        json!({
            "trace_oracle": t.dim,
            "d": t.d,
            "trace_s": coefficient(&t.trace_s),
            "alpha_s": t.alpha_s.to_string(),
            "alpha_st": t.alpha_st.to_string(),
            "alpha_t": t.alpha_t.to_string(),
            "isotropic_classes": t.isotropic_classes,
            "invariants": t.invariants,
            "agree": ok,
        }),
    );
    Ok(ok)
}

fn cmd_jacobi(l: &Loaded, precision: Option<u64>, doc: &mut Map<String, Value>) -> Res<bool> {
    let gram = l
        .gram
        .as_ref()
        .ok_or_else(|| Failure::Usage("jacobi needs --gram".into()))?;
    let basis = jacobi_singular_basis(gram)?;
    let d = &basis.lattice.form;
    let mut entries = Vec::new();
    for e in &basis.entries {
        let mut m = Map::new();
        let gens: Vec<Vec<i64>> = e.overlattice.generators.iter().map(|&g| d.coords(g)).collect();
        m.insert("overlattice_index".into(), json!(e.overlattice.order()));
        m.insert("overlattice_generators".into(), json!(gens));
        let coeffs: Vec<Value> = e
            .coefficients
            .iter()
            .map(|(g, c)| json!({"element": d.coords(*g), "coefficient": c.to_string()}))
            .collect();
        m.insert("coefficients".into(), Value::Array(coeffs));
        m.insert("weight".into(), json!(fmt_rational(&rat(e.weight_times_two as i64, 2))));
        if let Some(p) = precision {
            let theta = theta_q_expansion(&basis.lattice, &e.lifted, p)?;
            m.insert(
                "theta".into(),
                json!(theta.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
            );
        }
        entries.push(Value::Object(m));
    }
    doc.insert("rank".into(), json!(gram.len()));
    doc.insert("odd_rank".into(), json!(basis.odd_rank));
    doc.insert("count".into(), json!(entries.len()));
    doc.insert("span_rank".into(), json!(basis.span_rank));
    doc.insert("dim".into(), json!(basis.dim));
    doc.insert("entries".into(), Value::Array(entries));
    Ok(basis.span_rank as u64 == basis.dim)
}

pub fn default_max_order() -> u64 {
    Bounds::from_env().max_order
}

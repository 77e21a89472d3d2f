use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use weilinv::appl::{jacobi_singular_basis, theta_q_expansion};
use weilinv::fundamental::generating_set;
use weilinv::weil::Weil;
use weilinv::JordanSymbol;

const SYMBOLS: &[&str] = &["3^-4", "5^+3", "2_II^-4", "2_1^+1.4_1^+1.8_II^+2", "2_II^+2.3^-2"];

fn dims(c: &mut Criterion) {
    let mut g = c.benchmark_group("dim");
    for s in SYMBOLS {
        let d = JordanSymbol::parse(s).unwrap().to_form().unwrap();
        g.bench_with_input(BenchmarkId::new("orbit_trace", s), &d, |b, d| {
            b.iter(|| Weil::new(d).unwrap().dim().unwrap())
        });
    }
    g.finish();
}

fn projections(c: &mut Criterion) {
    let mut g = c.benchmark_group("inv_basis");
    for s in SYMBOLS {
        let d = JordanSymbol::parse(s).unwrap().to_form().unwrap();
        let w = Weil::new(&d).unwrap();
        let gamma = (1..d.order()).find(|&x| d.is_isotropic(x)).unwrap_or(0);
        g.bench_function(*s, |b| b.iter(|| w.inv_basis(gamma)));
    }
    g.finish();
}

fn generators(c: &mut Criterion) {
    let mut g = c.benchmark_group("generating_set");
    g.sample_size(10);
    for s in ["3^+3", "3^-4", "2_II^-4", "2_2^+2.4_II^+2"] {
        let d = JordanSymbol::parse(s).unwrap().to_form().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(s), &d, |b, d| {
            b.iter(|| generating_set(d).unwrap())
        });
    }
    g.finish();
}

fn theta(c: &mut Criterion) {
    let mut e8 = vec![vec![0i64; 8]; 8];
    for (i, row) in e8.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)] {
        e8[a][b] = -1;
        e8[b][a] = -1;
    }
    let basis = jacobi_singular_basis(&e8).unwrap();
    let v = basis.entries[0].lifted.clone();
    let mut g = c.benchmark_group("theta_e8");
    g.sample_size(10);
    for p in [3u64, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| theta_q_expansion(&basis.lattice, &v, p).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, dims, projections, generators, theta);
criterion_main!(benches);

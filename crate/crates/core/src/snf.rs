//! Smith normal form over Z and presentations of finite abelian quotients.

pub type Mat = Vec<Vec<i128>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out = vec![vec![0i128; m]; n];
    for i in 0..n {
        for t in 0..k {
            let x = a[i][t];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &Mat, v: &[i128]) -> Vec<i128> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Result of `smith`: `u * a * v = diag(diag)` with unimodular `u`, `v`
/// and `diag[i] | diag[i+1]`, all entries non-negative.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub diag: Vec<i128>,
}

pub fn smith(a: &Mat) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut u_inv = identity(rows);
    let mut v = identity(cols);
    let r = rows.min(cols);

    // Row ops update u (left) and u_inv (right, inverse op); column ops update v.
    let swap_rows = |m: &mut Mat, u: &mut Mat, ui: &mut Mat, i: usize, j: usize| {
        m.swap(i, j);
        u.swap(i, j);
        for row in ui.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i += c * row_j
    let add_row = |m: &mut Mat, u: &mut Mat, ui: &mut Mat, i: usize, j: usize, c: i128| {
        if c == 0 {
            return;
        }
        for k in 0..m[0].len() {
            m[i][k] += c * m[j][k];
        }
        for k in 0..u[0].len() {
            u[i][k] += c * u[j][k];
        }
        for row in ui.iter_mut() {
            row[j] -= c * row[i];
        }
    };
    let swap_cols = |m: &mut Mat, v: &mut Mat, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_i += c * col_j
    let add_col = |m: &mut Mat, v: &mut Mat, i: usize, j: usize, c: i128| {
        if c == 0 {
            return;
        }
        for row in m.iter_mut() {
            row[i] += c * row[j];
        }
        for row in v.iter_mut() {
            row[i] += c * row[j];
        }
    };

    for t in 0..r {
        loop {
            // Pivot: smallest nonzero absolute value in the lower-right block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            swap_rows(&mut m, &mut u, &mut u_inv, t, pi);
            swap_cols(&mut m, &mut v, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                add_row(&mut m, &mut u, &mut u_inv, i, t, -q);
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                add_col(&mut m, &mut v, j, t, -q);
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: pivot must divide every remaining entry.
            let p = m[t][t];
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| m[i][j] % p != 0);
            match bad {
                Some((i, _)) => add_row(&mut m, &mut u, &mut u_inv, t, i, 1),
                None => break,
            }
        }
        if m[t][t] < 0 {
            for k in 0..cols {
                m[t][k] = -m[t][k];
            }
            for k in 0..rows {
                u[t][k] = -u[t][k];
            }
            for row in u_inv.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    let diag = (0..r).map(|i| m[i][i]).collect();
    Smith { u, u_inv, v, diag }
}

/// Presentation of a quotient K/H of subgroups of Z^k containing
/// the lattice spanned by `moduli` (so both are finite index).
///
/// `orders[i]` are the nontrivial invariant factors, `gens[i]` lifts of the
/// corresponding generators in Z^k, and `coords` maps a vector of K to its
/// coordinates modulo `orders`.
#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    pub orders: Vec<i64>,
    pub gens: Vec<Vec<i64>>,
    // coordinates = (transform * x) / scale, taken at rows `rows`
    transform: Mat,
    scale: Vec<i128>,
    rows: Vec<usize>,
}

impl QuotientPresentation {
    pub fn coords(&self, x: &[i64]) -> Vec<i64> {
        let xv: Vec<i128> = x.iter().map(|&t| t as i128).collect();
        let y = mat_vec(&self.transform, &xv);
        self.rows
            .iter()
            .zip(&self.orders)
            .map(|(&r, &o)| {
                debug_assert_eq!(y[r] % self.scale[r], 0, "vector not in K");
                (y[r] / self.scale[r]).rem_euclid(o as i128) as i64
            })
            .collect()
    }
}

/// K = span(k_gens) + span(moduli), H = span(h_gens) + span(moduli), H ⊂ K.
pub fn quotient_presentation(
    k: usize,
    moduli: &[Vec<i64>],
    k_gens: &[Vec<i64>],
    h_gens: &[Vec<i64>],
) -> QuotientPresentation {
    let cols = |vs: &[Vec<i64>]| -> Mat { (0..k).map(|i| vs.iter().map(|v| v[i] as i128).collect()).collect() };
    let mut kk: Vec<Vec<i64>> = k_gens.to_vec();
    kk.extend_from_slice(moduli);
    let mut hh: Vec<Vec<i64>> = h_gens.to_vec();
    hh.extend_from_slice(moduli);

    // Basis of K: B = u_inv * diag(a) (K has full rank k).
    let sa = smith(&cols(&kk));
    let a: Vec<i128> = sa.diag.clone();
    assert!(a.len() == k && a.iter().all(|&x| x != 0), "K must have full rank");
    // Coordinates of H generators in basis B: diag(1/a) * u * h.
    let uh = mat_mul(&sa.u, &cols(&hh));
    let c: Mat = uh
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|x| {
                    assert_eq!(x % a[i], 0, "H must lie in K");
                    x / a[i]
                })
                .collect()
        })
        .collect();
    let sc = smith(&c);
    // New basis of K: B * sc.u_inv. Coordinates of x: sc.u * diag(1/a) * u * x.
    let b: Mat = sa
        .u_inv
        .iter()
        .map(|row| row.iter().zip(&a).map(|(x, ai)| x * ai).collect())
        .collect();
    let newb = mat_mul(&b, &sc.u_inv);
    // transform = sc.u * diag(1/a) * sa.u, kept fraction-free with a common scale.
    let l = a.iter().fold(1i128, |acc, &x| lcm128(acc, x));
    let scaled_u: Mat =
        sa.u.iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|x| x * (l / a[i])).collect())
            .collect();
    let transform = mat_mul(&sc.u, &scaled_u);
    let mut orders = Vec::new();
    let mut gens = Vec::new();
    let mut rows = Vec::new();
    for (i, &s) in sc.diag.iter().enumerate() {
        assert!(s != 0, "quotient must be finite");
        if s > 1 {
            orders.push(s as i64);
            gens.push((0..k).map(|r| newb[r][i] as i64).collect());
            rows.push(i);
        }
    }
    QuotientPresentation {
        orders,
        gens,
        transform,
        scale: vec![l; k],
        rows,
    }
}

fn lcm128(a: i128, b: i128) -> i128 {
    let (mut x, mut y) = (a.abs(), b.abs());
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x * b).abs()
}

/// Integer determinant by fraction-free elimination.
pub fn det(a: &Mat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Adjugate matrix, so that a * adj = det * I.
pub fn adjugate(a: &Mat) -> Mat {
    let n = a.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Mat = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = s * det(&minor);
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &Mat) {
        let s = smith(a);
        let d = mat_mul(&mat_mul(&s.u, a), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(*x, s.diag[i]);
                } else {
                    assert_eq!(*x, 0);
                }
            }
        }
        assert_eq!(mat_mul(&s.u, &s.u_inv), identity(a.len()));
        for w in s.diag.windows(2) {
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0);
            }
        }
    }

    #[test]
    fn smith_small_examples() {
        check(&vec![vec![2, 1], vec![1, 2]]);
        check(&vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        check(&vec![vec![4, 0], vec![0, 6]]);
        check(&vec![vec![0, 3, 5, 7], vec![2, 2, 0, 1]]);
        let s = smith(&vec![vec![4, 0], vec![0, 6]]);
        assert_eq!(s.diag, vec![2, 12]);
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(det(&a), 4);
        let adj = adjugate(&a);
        let p = mat_mul(&a, &adj);
        assert_eq!(p, vec![vec![4, 0, 0], vec![0, 4, 0], vec![0, 0, 4]]);
    }

    #[test]
    fn quotient_of_z4_by_2z4() {
        let moduli = vec![vec![4]];
        let p = quotient_presentation(1, &moduli, &[vec![1]], &[vec![2]]);
        assert_eq!(p.orders, vec![2]);
        assert_eq!(p.coords(&[3]), vec![1]);
        assert_eq!(p.coords(&[2]), vec![0]);
    }
}

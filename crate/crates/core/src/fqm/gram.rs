//! Discriminant form L'/L of an even lattice given by its Gram matrix.
//!
//! We identify L' with Z^n through α = G^{-1} y, so L'/L = Z^n / G Z^n and
//! q(α) = yᵀ G^{-1} y / 2.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::snf::{adjugate, det, mat_vec, quotient_presentation, Mat, QuotientPresentation};

use super::DiscriminantForm;

#[derive(Debug, Clone)]
pub struct GramForm {
    pub form: DiscriminantForm,
    pub gram: Vec<Vec<i64>>,
    pres: QuotientPresentation,
    det: i128,
    adj: Mat,
}

impl GramForm {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    /// Class in L'/L of α = G^{-1} y.
    pub fn coset_of(&self, y: &[i64]) -> usize {
        self.form.index(&self.pres.coords(y))
    }

    /// yᵀ G^{-1} y as an exact fraction (twice the norm of α = G^{-1} y).
    pub fn inner_dual(&self, y: &[i64]) -> Ratio<i128> {
        let yy: Vec<i128> = y.iter().map(|&v| v as i128).collect();
        let ay = mat_vec(&self.adj, &yy);
        let num: i128 = yy.iter().zip(&ay).map(|(a, b)| a * b).sum();
        Ratio::new(num, self.det)
    }

    /// Adjugate of the Gram matrix (G^{-1} = adj / det).
    pub fn adjugate(&self) -> &Mat {
        &self.adj
    }
}

pub fn from_gram(g: &[Vec<i64>]) -> Result<GramForm> {
    let n = g.len();
    if g.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidGram("matrix is not square".into()));
    }
    for i in 0..n {
        if g[i][i] % 2 != 0 {
            return Err(Error::InvalidGram(format!("diagonal entry {i} is odd")));
        }
        for j in 0..i {
            if g[i][j] != g[j][i] {
                return Err(Error::InvalidGram("matrix is not symmetric".into()));
            }
        }
    }
    let m: Mat = g.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let d = det(&m);
    if d == 0 {
        return Err(Error::InvalidGram("matrix is singular".into()));
    }
    let adj = adjugate(&m);
    let unit: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let columns: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| g[i][j]).collect()).collect();
    let pres = quotient_presentation(n, &columns, &unit, &[]);
    let k = pres.gens.len();
    let pair = |a: &[i64], b: &[i64]| -> i128 {
        let bb: Vec<i128> = b.iter().map(|&v| v as i128).collect();
        let ab = mat_vec(&adj, &bb);
        a.iter().zip(&ab).map(|(x, y)| *x as i128 * y).sum()
    };
    let to_ratio = |num: i128, den: i128| -> Result<Ratio<i64>> {
        let r = Ratio::new(num, den);
        let r = r - r.floor();
        let num = i64::try_from(*r.numer()).map_err(|_| Error::InvalidGram("entries too large".into()))?;
        let den = i64::try_from(*r.denom()).map_err(|_| Error::InvalidGram("entries too large".into()))?;
        Ok(Ratio::new(num, den))
    };
    let mut q = Vec::with_capacity(k);
    let mut b = vec![vec![Ratio::new(0, 1); k]; k];
    for i in 0..k {
        q.push(to_ratio(pair(&pres.gens[i], &pres.gens[i]), 2 * d)?);
        for j in 0..k {
            if i != j {
                b[i][j] = to_ratio(pair(&pres.gens[i], &pres.gens[j]), d)?;
            }
        }
    }
    let form = DiscriminantForm::new(pres.orders.clone(), &q, &b)?;
    Ok(GramForm {
        form,
        gram: g.to_vec(),
        pres,
        det: d,
        adj,
    })
}

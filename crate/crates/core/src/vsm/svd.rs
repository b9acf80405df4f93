//! Truncated SVD of a PPMI matrix into dense latent vectors.

use std::collections::HashMap;

use log::warn;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{SparseMatrix, SparseVector};
use crate::error::{Error, Result};

/// Above this smaller dimension `Auto` switches to the randomized method.
const EXACT_LIMIT: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvdMethod {
    /// Dense SVD of the whole matrix.
    Exact,
    /// Gaussian range finder with power iterations, seeded.
    Randomized {
        oversample: usize,
        power_iters: usize,
    },
    Auto,
}

/// Right singular vectors kept for folding new rows into the latent space.
#[derive(Debug, Clone, PartialEq)]
struct Basis {
    columns: HashMap<String, usize>,
    /// columns × k
    v: DMatrix<f64>,
}

/// Rows of `U_k Σ_k`, one per label.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMatrix {
    pub labels: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    /// Non-negative, non-increasing.
    pub singular_values: Vec<f64>,
    basis: Option<Basis>,
}

impl LatentMatrix {
    pub(crate) fn from_parts(labels: Vec<String>, vectors: Vec<Vec<f64>>, singular_values: Vec<f64>) -> Self {
        Self {
            labels,
            vectors,
            singular_values,
            basis: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    pub fn get(&self, label: &str) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.vectors[i].as_slice())
    }

    /// Columns of `U_k`, recovered row by row as `latent / σ`.
    pub fn left_singular_vectors(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|row| row.iter().zip(&self.singular_values).map(|(x, s)| x / s).collect())
            .collect()
    }

    /// Row of `V_k` for a feature, if the feature was a column of the fitted matrix.
    pub fn basis_row(&self, feature: &str) -> Option<Vec<f64>> {
        let basis = self.basis.as_ref()?;
        let &i = basis.columns.get(feature)?;
        Some(basis.v.row(i).iter().copied().collect())
    }

    pub fn can_project(&self) -> bool {
        self.basis.is_some()
    }

    /// Fold a sparse row into the latent space: `x V_k`. Features unseen
    /// while fitting are ignored. For a fitted row this reproduces its
    /// `U_k Σ_k` row up to rounding.
    pub fn project(&self, x: &SparseVector) -> Result<Vec<f64>> {
        let basis = self
            .basis
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("latent matrix was loaded without a projection basis".into()))?;
        let k = self.dim();
        let mut out = vec![0.0; k];
        for (f, w) in x.iter() {
            if let Some(&i) = basis.columns.get(f) {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += w * basis.v[(i, j)];
                }
            }
        }
        Ok(out)
    }
}

pub fn truncated_svd(m: &SparseMatrix, k: usize, seed: u64) -> Result<LatentMatrix> {
    truncated_svd_with(m, k, seed, SvdMethod::Auto)
}

pub fn truncated_svd_with(m: &SparseMatrix, k: usize, seed: u64, method: SvdMethod) -> Result<LatentMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("latent dimension must be at least 1".into()));
    }
    if m.is_empty() {
        return Err(Error::EmptyInput("SVD needs at least one row"));
    }
    let columns: Vec<String> = m.columns().into_iter().collect();
    let col_index: HashMap<String, usize> = columns.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let (n, p) = (m.len(), columns.len());
    if p == 0 {
        return Err(Error::EmptyInput("SVD needs at least one non-zero column"));
    }
    let limit = n.min(p);
    if k > limit {
        warn!("requested {k} latent dimensions but the matrix is {n}x{p}; clamping to {limit}");
    }

    let mut a = DMatrix::<f64>::zeros(n, p);
    for (i, row) in m.rows.iter().enumerate() {
        for (f, w) in row.iter() {
            a[(i, col_index[f])] = w;
        }
    }

    let method = match method {
        SvdMethod::Auto if limit <= EXACT_LIMIT => SvdMethod::Exact,
        SvdMethod::Auto => SvdMethod::Randomized {
            oversample: 10,
            power_iters: 2,
        },
        other => other,
    };
    let want = k.min(limit);
    let (u, sigma, v) = match method {
        SvdMethod::Randomized {
            oversample,
            power_iters,
        } if want + oversample < limit => randomized(&a, want + oversample, power_iters, seed),
        _ => exact(a.clone()),
    };

    // Numerical rank.
    let smax = sigma.first().copied().unwrap_or(0.0);
    let tol = smax * (n.max(p) as f64) * f64::EPSILON;
    let rank = sigma.iter().take_while(|&&s| s > tol).count();
    let dim = want.min(rank);
    if dim == 0 {
        return Err(Error::EmptyInput("matrix has rank zero"));
    }

    let mut u = u.columns(0, dim).into_owned();
    let mut v = v.columns(0, dim).into_owned();
    for j in 0..dim {
        let col = u.column(j);
        let (imax, _) = col.iter().enumerate().fold(
            (0, 0.0f64),
            |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc },
        );
        if u[(imax, j)] < 0.0 {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }
    let singular_values: Vec<f64> = sigma[..dim].to_vec();
    let vectors = (0..n)
        .map(|i| (0..dim).map(|j| u[(i, j)] * singular_values[j]).collect())
        .collect();

    Ok(LatentMatrix {
        labels: m.labels.clone(),
        vectors,
        singular_values,
        basis: Some(Basis { columns: col_index, v }),
    })
}

/// Full thin SVD sorted by descending singular value: (U, σ, V).
fn exact(a: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = nalgebra::linalg::SVD::new(a, true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    let sigma = order.iter().map(|&i| s[i].max(0.0)).collect();
    (u, sigma, v)
}

/// Halko–Martinsson–Tropp range finder followed by an exact SVD of the
/// small projected matrix.
fn randomized(a: &DMatrix<f64>, width: usize, power_iters: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(a.ncols(), width, |_, _| StandardNormal.sample(&mut rng));
    let mut q = (a * omega).qr().q();
    for _ in 0..power_iters {
        let z = (a.transpose() * &q).qr().q();
        q = (a * z).qr().q();
    }
    let b = q.transpose() * a;
    let (ub, sigma, v) = exact(b);
    (q * ub, sigma, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> SparseMatrix {
        let labels = (0..rows.len()).map(|i| format!("r{i}")).collect();
        let rows = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &w)| (format!("c{j}"), w)).collect())
            .collect();
        SparseMatrix { labels, rows }
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let m = dense(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let l = truncated_svd(&m, 3, 0).unwrap();
        assert_eq!(l.dim(), 3);
        for s in &l.singular_values {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_matrix_clamps_to_one_dimension() {
        // outer([1,2],[3,4])
        let m = dense(&[&[3.0, 4.0], &[6.0, 8.0]]);
        let l = truncated_svd(&m, 2, 0).unwrap();
        assert_eq!(l.dim(), 1);
        let expected = 5f64.sqrt() * 5.0;
        assert!((l.singular_values[0] - expected).abs() < 1e-9);
        assert!((l.singular_values[0] - 11.180).abs() < 1e-3);
    }

    #[test]
    fn oversized_k_is_clamped() {
        let m = dense(&[&[1.0, 2.0, 0.5], &[0.0, 1.0, 3.0]]);
        let l = truncated_svd(&m, 10, 0).unwrap();
        assert_eq!(l.dim(), 2);
    }

    #[test]
    fn fitted_rows_project_onto_their_latent_vectors() {
        let m = dense(&[&[1.0, 2.0, 0.0, 4.0], &[0.0, 1.0, 3.0, 1.0], &[2.0, 0.0, 1.0, 1.0]]);
        let l = truncated_svd(&m, 2, 0).unwrap();
        for (row, latent) in m.rows.iter().zip(&l.vectors) {
            let p = l.project(row).unwrap();
            for (a, b) in p.iter().zip(latent) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn randomized_matches_exact_on_low_rank_matrix() {
        // rank 2, 6x8
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                (0..8)
                    .map(|j| ((i + 1) * (j % 3)) as f64 + ((i % 2) * j) as f64)
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let m = dense(&refs);
        let exact = truncated_svd_with(&m, 2, 0, SvdMethod::Exact).unwrap();
        let rand = truncated_svd_with(
            &m,
            1,
            7,
            SvdMethod::Randomized {
                oversample: 2,
                power_iters: 2,
            },
        )
        .unwrap();
        assert!((exact.singular_values[0] - rand.singular_values[0]).abs() < 1e-8);
        for (a, b) in exact.vectors.iter().zip(&rand.vectors) {
            assert!((a[0] - b[0]).abs() < 1e-8);
        }
    }
}

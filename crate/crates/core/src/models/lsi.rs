//! Latent semantic indexing by truncated SVD of the term-document matrix.
//!
//! Small problems use an exact dense SVD. Larger ones go through a seeded
//! randomized range finder with power iterations, followed by an exact SVD
//! of the projected matrix.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::DocVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsiOptions {
    /// Extra sampled directions beyond `k` for the randomized path.
    pub oversample: usize,
    pub power_iterations: usize,
    /// Exact SVD when `min(V, N)` does not exceed this.
    pub exact_threshold: usize,
}

impl Default for LsiOptions {
    fn default() -> Self {
        LsiOptions {
            oversample: 10,
            power_iterations: 2,
            exact_threshold: 600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiModel {
    pub seed: u64,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `V x k` term-topic basis with orthonormal columns.
    pub basis: DMatrix<f64>,
}

impl LsiModel {
    pub fn num_topics(&self) -> usize {
        self.singular_values.len()
    }

    pub fn num_terms(&self) -> usize {
        self.basis.nrows()
    }

    /// `U_k^T q`, the coordinates of `q` in the topic basis without the
    /// inverse singular value scaling.
    pub fn coordinates(&self, doc: &DocVector) -> Vec<f64> {
        let k = self.num_topics();
        let mut out = vec![0.0; k];
        for &(i, w) in doc.entries() {
            if i >= self.num_terms() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.basis[(i, j)] * w;
            }
        }
        out
    }
}

fn dense(docs: &[DocVector], num_terms: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(num_terms, docs.len());
    for (j, d) in docs.iter().enumerate() {
        for &(i, w) in d.entries() {
            a[(i, j)] = w;
        }
    }
    a
}

/// Rank-`k` truncated SVD of the `num_terms x docs.len()` matrix whose
/// columns are `docs`. `k` is clamped to `min(V, N)`.
pub fn lsi_train(docs: &[DocVector], num_terms: usize, k: usize, seed: u64, opts: &LsiOptions) -> LsiModel {
    let a = dense(docs, num_terms);
    let max_rank = num_terms.min(docs.len());
    let k = if k > max_rank {
        log::warn!("LSI: {k} topics requested but the matrix is {num_terms}x{}, using {max_rank}", docs.len());
        max_rank
    } else {
        k
    };
    if k == 0 {
        return LsiModel {
            seed,
            singular_values: Vec::new(),
            basis: DMatrix::zeros(num_terms, 0),
        };
    }
    let (u, s) = if max_rank <= opts.exact_threshold || k + opts.oversample >= max_rank {
        exact(&a)
    } else {
        randomized(&a, k, seed, opts)
    };
    let (basis, singular_values) = truncate_sorted(u, s, k);
    LsiModel {
        seed,
        singular_values,
        basis,
    }
}

fn exact(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let svd = a.clone().svd(true, false);
    (svd.u.expect("u requested"), svd.singular_values)
}

fn randomized(a: &DMatrix<f64>, k: usize, seed: u64, opts: &LsiOptions) -> (DMatrix<f64>, DVector<f64>) {
    let l = k + opts.oversample;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(a.ncols(), l, |_, _| StandardNormal.sample(&mut rng));
    let mut q = (a * omega).qr().q();
    for _ in 0..opts.power_iterations {
        let z = (a.transpose() * &q).qr().q();
        q = (a * z).qr().q();
    }
    let b = q.transpose() * a;
    let svd = b.svd(true, false);
    (q * svd.u.expect("u requested"), svd.singular_values)
}

/// Sorts singular triplets by value, keeps `k`, and fixes signs so that the
/// largest-magnitude entry of every basis column is positive.
fn truncate_sorted(u: DMatrix<f64>, s: DVector<f64>, k: usize) -> (DMatrix<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]).then(x.cmp(&y)));
    let mut basis = DMatrix::zeros(u.nrows(), k);
    let mut values = Vec::with_capacity(k);
    for (col, &src) in order.iter().take(k).enumerate() {
        let mut column = u.column(src).clone_owned();
        let pivot = column
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if !column.is_empty() && column[pivot] < 0.0 {
            column.neg_mut();
        }
        basis.set_column(col, &column);
        values.push(s[src].max(0.0));
    }
    (basis, values)
}

/// Folds a document into topic space: `Sigma_k^-1 U_k^T q`. Directions with
/// a (numerically) zero singular value get coordinate 0.
pub fn lsi_project(model: &LsiModel, doc: &DocVector) -> Vec<f64> {
    let top = model.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = top * f64::EPSILON * model.num_terms().max(1) as f64;
    model
        .coordinates(doc)
        .into_iter()
        .zip(&model.singular_values)
        .map(|(c, &s)| if s > cutoff && s > 0.0 { c / s } else { 0.0 })
        .collect()
}

//! Latent Dirichlet allocation trained by batch variational Bayes.
//!
//! Each pass runs the per-document E-step (alternating the implicit `phi`
//! and `gamma` updates until the mean absolute change of `gamma` drops below
//! the gamma threshold or the iteration budget runs out) and then sets
//! `lambda = eta + sufficient statistics`. Document posteriors are warm
//! started from the previous pass, which keeps the evidence lower bound
//! nondecreasing from pass to pass.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use super::DocVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaOptions {
    pub num_topics: usize,
    pub gamma_threshold: f64,
    /// Per-document inference budget.
    pub iterations: usize,
    /// Full sweeps over the corpus.
    pub passes: usize,
    pub seed: u64,
    /// Document-topic prior; `1/k` when `None`.
    pub alpha: Option<f64>,
    /// Topic-word prior; `1/k` when `None`.
    pub eta: Option<f64>,
}

impl Default for LdaOptions {
    fn default() -> Self {
        LdaOptions {
            num_topics: 50,
            gamma_threshold: 0.001,
            iterations: 100,
            passes: 10,
            seed: 0,
            alpha: None,
            eta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub num_topics: usize,
    pub num_terms: usize,
    pub alpha: f64,
    pub eta: f64,
    pub gamma_threshold: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Variational topic-word parameters, `k x V` row-major.
    pub lambda: Vec<f64>,
    /// Evidence lower bound after every pass.
    pub bound_history: Vec<f64>,
}

impl LdaModel {
    pub fn num_topics(&self) -> usize {
        self.num_topics
    }

    /// Topic-word distributions, `k` rows of length `V` summing to one.
    pub fn topic_word(&self) -> Vec<Vec<f64>> {
        self.lambda
            .chunks(self.num_terms.max(1))
            .take(self.num_topics)
            .map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(|x| x / total).collect()
            })
            .collect()
    }

    fn exp_elog_beta(&self) -> Vec<f64> {
        elog_dirichlet_rows(&self.lambda, self.num_topics, self.num_terms)
            .into_iter()
            .map(f64::exp)
            .collect()
    }
}

fn elog_dirichlet_rows(m: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        let row = &m[r * cols..(r + 1) * cols];
        let psi_total = digamma(row.iter().sum());
        for (c, &x) in row.iter().enumerate() {
            out[r * cols + c] = digamma(x) - psi_total;
        }
    }
    out
}

fn elog_dirichlet(v: &[f64]) -> Vec<f64> {
    let psi_total = digamma(v.iter().sum());
    v.iter().map(|&x| digamma(x) - psi_total).collect()
}

struct EStep {
    /// Final `exp(E[log theta])`.
    exp_elog_theta: Vec<f64>,
    /// `phinorm` for each word of the document.
    phinorm: Vec<f64>,
}

/// Coordinate ascent on one document's `gamma`, in place.
fn infer_document(
    doc: &DocVector,
    gamma: &mut [f64],
    exp_elog_beta: &[f64],
    num_terms: usize,
    alpha: f64,
    threshold: f64,
    iterations: usize,
) -> EStep {
    let k = gamma.len();
    let ids: Vec<usize> = doc.entries().iter().map(|e| e.0).collect();
    let counts: Vec<f64> = doc.entries().iter().map(|e| e.1).collect();
    let beta_d = |t: usize, w: usize| exp_elog_beta[t * num_terms + ids[w]];

    let mut exp_elog_theta: Vec<f64> = elog_dirichlet(gamma).into_iter().map(f64::exp).collect();
    let norm = |theta: &[f64]| -> Vec<f64> {
        (0..ids.len())
            .map(|w| (0..k).map(|t| theta[t] * beta_d(t, w)).sum::<f64>() + f64::EPSILON)
            .collect()
    };
    let mut phinorm = norm(&exp_elog_theta);
    for _ in 0..iterations.max(1) {
        let mut change = 0.0;
        for t in 0..k {
            let s: f64 = (0..ids.len()).map(|w| counts[w] / phinorm[w] * beta_d(t, w)).sum();
            let updated = alpha + exp_elog_theta[t] * s;
            change += (updated - gamma[t]).abs();
            gamma[t] = updated;
        }
        exp_elog_theta = elog_dirichlet(gamma).into_iter().map(f64::exp).collect();
        phinorm = norm(&exp_elog_theta);
        if change / (k as f64) < threshold {
            break;
        }
    }
    EStep {
        exp_elog_theta,
        phinorm,
    }
}

/// Trains `num_topics` topics over count vectors with `num_terms` terms.
pub fn lda_train(docs: &[DocVector], num_terms: usize, opts: &LdaOptions) -> Result<LdaModel> {
    if docs.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let k = opts.num_topics;
    if k == 0 {
        return Err(Error::InvalidArgument("LDA needs at least one topic".into()));
    }
    if !(opts.gamma_threshold > 0.0) {
        return Err(Error::InvalidArgument("gamma threshold must be positive".into()));
    }
    if opts.iterations == 0 {
        return Err(Error::InvalidArgument("LDA needs at least one iteration".into()));
    }
    let alpha = opts.alpha.unwrap_or(1.0 / k as f64);
    let eta = opts.eta.unwrap_or(1.0 / k as f64);
    let v = num_terms;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let init = Gamma::new(100.0, 0.01).expect("valid gamma parameters");
    let lambda: Vec<f64> = (0..k * v).map(|_| init.sample(&mut rng)).collect();
    let mut model = LdaModel {
        num_topics: k,
        num_terms: v,
        alpha,
        eta,
        gamma_threshold: opts.gamma_threshold,
        iterations: opts.iterations,
        seed: opts.seed,
        lambda,
        bound_history: Vec::new(),
    };
    if v == 0 {
        log::warn!("LDA trained over an empty vocabulary");
        return Ok(model);
    }

    let mut gammas: Vec<Vec<f64>> = docs
        .iter()
        .map(|d| {
            let total: f64 = d.entries().iter().map(|e| e.1).sum();
            vec![alpha + total / k as f64; k]
        })
        .collect();

    for _ in 0..opts.passes.max(1) {
        let exp_elog_beta = model.exp_elog_beta();
        let mut sstats = vec![0.0; k * v];
        for (doc, gamma) in docs.iter().zip(gammas.iter_mut()) {
            let step = infer_document(
                doc,
                gamma,
                &exp_elog_beta,
                v,
                alpha,
                opts.gamma_threshold,
                opts.iterations,
            );
            for (w, &(id, count)) in doc.entries().iter().enumerate() {
                let scaled = count / step.phinorm[w];
                for t in 0..k {
                    sstats[t * v + id] += step.exp_elog_theta[t] * scaled;
                }
            }
        }
        for (i, s) in sstats.iter().enumerate() {
            model.lambda[i] = eta + s * exp_elog_beta[i];
        }
        let bound = bound(&model, docs, &gammas);
        model.bound_history.push(bound);
    }
    Ok(model)
}

/// Evidence lower bound with `phi` at its optimum given `gamma` and `lambda`.
fn bound(model: &LdaModel, docs: &[DocVector], gammas: &[Vec<f64>]) -> f64 {
    let k = model.num_topics;
    let v = model.num_terms;
    let alpha = model.alpha;
    let eta = model.eta;
    let elog_beta = elog_dirichlet_rows(&model.lambda, k, v);
    let mut score = 0.0;
    for (doc, gamma) in docs.iter().zip(gammas) {
        let elog_theta = elog_dirichlet(gamma);
        for &(id, count) in doc.entries() {
            let terms: Vec<f64> = (0..k).map(|t| elog_theta[t] + elog_beta[t * v + id]).collect();
            let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + terms.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
            score += count * lse;
        }
        for t in 0..k {
            score += (alpha - gamma[t]) * elog_theta[t] + ln_gamma(gamma[t]) - ln_gamma(alpha);
        }
        score += ln_gamma(alpha * k as f64) - ln_gamma(gamma.iter().sum());
    }
    for t in 0..k {
        let row = &model.lambda[t * v..(t + 1) * v];
        for (w, &l) in row.iter().enumerate() {
            score += (eta - l) * elog_beta[t * v + w] + ln_gamma(l) - ln_gamma(eta);
        }
        score += ln_gamma(eta * v as f64) - ln_gamma(row.iter().sum());
    }
    score
}

/// Normalised topic posterior of an unseen document. Empty documents get the
/// uniform distribution.
pub fn lda_infer(model: &LdaModel, doc: &DocVector) -> Vec<f64> {
    let k = model.num_topics;
    let known = DocVector::from_unsorted(
        doc.entries()
            .iter()
            .copied()
            .filter(|&(i, w)| i < model.num_terms && w > 0.0)
            .collect(),
    );
    if known.is_empty() {
        log::warn!("LDA inference on an empty document, returning the uniform distribution");
        return vec![1.0 / k as f64; k];
    }
    let total: f64 = known.entries().iter().map(|e| e.1).sum();
    let mut gamma = vec![model.alpha + total / k as f64; k];
    let exp_elog_beta = model.exp_elog_beta();
    infer_document(
        &known,
        &mut gamma,
        &exp_elog_beta,
        model.num_terms,
        model.alpha,
        model.gamma_threshold,
        model.iterations,
    );
    let sum: f64 = gamma.iter().sum();
    gamma.into_iter().map(|g| g / sum).collect()
}

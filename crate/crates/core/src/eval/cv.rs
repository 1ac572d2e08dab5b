use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    break_even, flatten, max_f1, msc_order, pr_curve, reference_matrix, EvalReport, PrCurve, RunRecord,
    SimilarityMatrix,
};
use crate::error::{Error, Result};
use crate::ingest::{CorpusOrdering, Document};
use crate::mathrep::WeightScheme;
use crate::models::{
    build_dictionary, lda_train, lsi_train, pairwise_similarity, tfidf_transform, DocVector, LdaOptions,
    LsiOptions, SimilarityIndex, TopicModel,
};
use crate::tokenize::{build_corpus_bows, BagOfWords, RepresentationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Lsi,
    TfIdfLsi,
    Lda,
    TfIdfLda,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lsi, Method::TfIdfLsi, Method::Lda, Method::TfIdfLda];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lsi => "LSI",
            Method::TfIdfLsi => "TfIdf-LSI",
            Method::Lda => "LDA",
            Method::TfIdfLda => "TfIdf-LDA",
        }
    }

    /// Case-insensitive; accepts the names above.
    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s.trim()))
    }

    pub fn uses_tfidf(self) -> bool {
        matches!(self, Method::TfIdfLsi | Method::TfIdfLda)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub representation: RepresentationConfig,
    pub weights: WeightScheme,
    pub method: Method,
    pub num_topics: usize,
    pub lda_gamma_threshold: f64,
    pub lda_iterations: usize,
    pub lda_passes: usize,
    pub lsi: LsiOptions,
    pub folds: usize,
    pub reruns: usize,
    pub base_seed: u64,
    pub include_diagonal: bool,
    /// Worker threads; 0 uses the global pool.
    pub jobs: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        let lda = LdaOptions::default();
        CvConfig {
            representation: RepresentationConfig::default(),
            weights: WeightScheme::default(),
            method: Method::TfIdfLsi,
            num_topics: 50,
            lda_gamma_threshold: lda.gamma_threshold,
            lda_iterations: lda.iterations,
            lda_passes: lda.passes,
            lsi: LsiOptions::default(),
            folds: 2,
            reruns: 4,
            base_seed: 0,
            include_diagonal: true,
            jobs: 0,
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        self.representation.validate()?;
        self.weights.validate()?;
        if self.num_topics == 0 {
            return Err(Error::InvalidArgument("num_topics must be positive".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 folds, got {}", self.folds)));
        }
        if self.reruns == 0 {
            return Err(Error::InvalidArgument("reruns must be positive".into()));
        }
        if !(self.lda_gamma_threshold > 0.0) || self.lda_iterations == 0 || self.lda_passes == 0 {
            return Err(Error::InvalidArgument("LDA thresholds and budgets must be positive".into()));
        }
        Ok(())
    }

    fn seed(&self, rerun: usize) -> u64 {
        self.base_seed.wrapping_add(rerun as u64)
    }
}

/// Everything a single fold x rerun evaluation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDetail {
    pub fold: usize,
    pub rerun: usize,
    /// Test documents ordered by MSC code, then id.
    pub msc_codes: Vec<String>,
    pub matrix: SimilarityMatrix,
    pub curve: PrCurve,
    pub model: TopicModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub report: EvalReport,
    pub details: Vec<RunDetail>,
    /// Bags of the arranged corpus, in ordering order.
    pub bows: Vec<(String, BagOfWords)>,
}

/// Half-open position ranges of the `k` folds over `n` ordered documents.
pub fn fold_ranges(n: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    (0..k).map(|f| f * n / k..(f + 1) * n / k).collect()
}

/// Trains on one fold and evaluates on the remaining documents, for every
/// fold and rerun.
pub fn cross_validate(docs: &[Document], ordering: &CorpusOrdering, config: &CvConfig) -> Result<CrossValidation> {
    config.validate()?;
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut arranged: Vec<Document> = Vec::with_capacity(ordering.ordered_ids.len());
    for id in &ordering.ordered_ids {
        match by_id.get(id.as_str()) {
            Some(d) => arranged.push((*d).clone()),
            None => log::warn!("ordering lists {id}, which is not in the corpus"),
        }
    }
    if arranged.len() < docs.len() {
        log::warn!(
            "{} corpus documents are not in the ordering and are skipped",
            docs.len() - arranged.len().min(docs.len())
        );
    }
    if arranged.len() < config.folds {
        return Err(Error::InvalidArgument(format!(
            "{} documents cannot form {} folds",
            arranged.len(),
            config.folds
        )));
    }
    let bows = build_corpus_bows(&arranged, &config.representation, &config.weights);
    let ids: Vec<String> = arranged.iter().map(|d| d.id.clone()).collect();
    let codes: Vec<String> = arranged.iter().map(|d| d.msc().to_string()).collect();
    let ranges = fold_ranges(arranged.len(), config.folds);

    let jobs: Vec<(usize, usize)> = (0..config.reruns)
        .flat_map(|r| (0..config.folds).map(move |f| (f, r)))
        .collect();
    let run = |&(fold, rerun): &(usize, usize)| -> Result<RunDetail> {
        let train: Vec<usize> = ranges[fold].clone().collect();
        let test: Vec<usize> = (0..arranged.len()).filter(|i| !ranges[fold].contains(i)).collect();
        evaluate_split(&ids, &codes, &bows, &train, &test, fold, rerun, config)
    };
    let details: Vec<RunDetail> = if config.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?
    } else {
        jobs.par_iter().map(run).collect::<Result<_>>()?
    };

    let mut runs = Vec::with_capacity(details.len());
    for d in &details {
        let be = break_even(&d.curve)?;
        let (t, f) = max_f1(&d.curve)?;
        runs.push(RunRecord {
            fold: d.fold,
            rerun: d.rerun,
            break_even: be,
            max_f1_threshold: t,
            max_f1: f,
        });
    }
    Ok(CrossValidation {
        report: EvalReport::from_runs(runs),
        details,
        bows: ids.into_iter().zip(bows).collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_split(
    ids: &[String],
    codes: &[String],
    bows: &[BagOfWords],
    train: &[usize],
    test: &[usize],
    fold: usize,
    rerun: usize,
    config: &CvConfig,
) -> Result<RunDetail> {
    let train_bows: Vec<BagOfWords> = train.iter().map(|&i| bows[i].clone()).collect();
    let dictionary = build_dictionary(&train_bows)?;
    let vectorize = |b: &BagOfWords| -> DocVector {
        if config.method.uses_tfidf() {
            tfidf_transform(b, &dictionary)
        } else {
            dictionary.doc2bow(b)
        }
    };
    let train_vecs: Vec<DocVector> = train_bows.iter().map(vectorize).collect();
    let seed = config.seed(rerun);
    let model = match config.method {
        Method::Lsi | Method::TfIdfLsi => {
            TopicModel::Lsi(lsi_train(&train_vecs, dictionary.len(), config.num_topics, seed, &config.lsi))
        }
        Method::Lda | Method::TfIdfLda => {
            let opts = LdaOptions {
                num_topics: config.num_topics,
                gamma_threshold: config.lda_gamma_threshold,
                iterations: config.lda_iterations,
                passes: config.lda_passes,
                seed,
                alpha: None,
                eta: None,
            };
            TopicModel::Lda(lda_train(&train_vecs, dictionary.len(), &opts)?)
        }
    };

    let test_ids: Vec<&str> = test.iter().map(|&i| ids[i].as_str()).collect();
    let test_codes: Vec<&str> = test.iter().map(|&i| codes[i].as_str()).collect();
    let order: Vec<usize> = msc_order(&test_ids, &test_codes).into_iter().map(|p| test[p]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&i| model.transform(&vectorize(&bows[i]))).collect();
    let index = SimilarityIndex::new(order.iter().map(|&i| ids[i].clone()).collect(), vectors)?;
    let matrix = pairwise_similarity(&index);
    let msc_codes: Vec<String> = order.iter().map(|&i| codes[i].clone()).collect();
    let reference = reference_matrix(&msc_codes);
    let (sims, rel) = flatten(&matrix, &reference, config.include_diagonal)?;
    let curve = pr_curve(&sims, &rel)?;
    Ok(RunDetail {
        fold,
        rerun,
        msc_codes,
        matrix,
        curve,
        model,
    })
}

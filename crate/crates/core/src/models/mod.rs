//! Vector-space machinery: dictionary, TfIdf, LSI, LDA and the cosine
//! similarity index.

mod lda;
mod lsi;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use lda::{lda_infer, lda_train, LdaModel, LdaOptions};
pub use lsi::{lsi_project, lsi_train, LsiModel, LsiOptions};

use crate::error::{Error, Result};
use crate::eval::SimilarityMatrix;
use crate::tokenize::BagOfWords;

/// Token universe of a training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<u32>,
    num_docs: usize,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn doc_freq(&self, index: usize) -> u32 {
        self.doc_freq[index]
    }

    /// Raw counts of the known tokens of `bow`.
    pub fn doc2bow(&self, bow: &BagOfWords) -> DocVector {
        DocVector::from_unsorted(
            bow.iter()
                .filter_map(|(t, c)| self.index_of(t).map(|i| (i, c as f64)))
                .collect(),
        )
    }
}

/// Assigns dense indices to every token in sorted order and records
/// document frequencies.
pub fn build_dictionary(bows: &[BagOfWords]) -> Result<Dictionary> {
    if bows.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let tokens: Vec<String> = bows
        .iter()
        .flat_map(|b| b.iter().map(|(t, _)| t))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    if tokens.is_empty() {
        log::warn!("dictionary is empty: no document has any token");
    }
    let index: HashMap<String, usize> = tokens.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut doc_freq = vec![0u32; tokens.len()];
    for bow in bows {
        for (t, _) in bow.iter() {
            doc_freq[index[t]] += 1;
        }
    }
    Ok(Dictionary {
        tokens,
        index,
        doc_freq,
        num_docs: bows.len(),
    })
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocVector {
    entries: Vec<(usize, f64)>,
}

impl DocVector {
    /// Sorts by index and sums duplicates.
    pub fn from_unsorted(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => out.push((i, w)),
            }
        }
        DocVector { entries: out }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        for &(i, w) in &self.entries {
            v[i] = w;
        }
        v
    }
}

/// TfIdf weighting: `tf * log2(N / df)`, L2-normalised, with `N` and `df`
/// taken from the training dictionary. Unknown tokens are skipped and zero
/// weights are not stored.
pub fn tfidf_transform(bow: &BagOfWords, dictionary: &Dictionary) -> DocVector {
    let n = dictionary.num_docs() as f64;
    let raw: Vec<(usize, f64)> = bow
        .iter()
        .filter_map(|(t, c)| {
            let i = dictionary.index_of(t)?;
            let idf = (n / dictionary.doc_freq(i) as f64).log2();
            Some((i, c as f64 * idf))
        })
        .filter(|(_, w)| *w != 0.0)
        .collect();
    let v = DocVector::from_unsorted(raw);
    let norm = v.norm();
    if norm == 0.0 {
        return DocVector::default();
    }
    DocVector {
        entries: v.entries.into_iter().map(|(i, w)| (i, w / norm)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TopicModel {
    #[serde(rename = "lsi")]
    Lsi(LsiModel),
    #[serde(rename = "lda")]
    Lda(LdaModel),
}

impl TopicModel {
    pub fn num_topics(&self) -> usize {
        match self {
            TopicModel::Lsi(m) => m.num_topics(),
            TopicModel::Lda(m) => m.num_topics(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            TopicModel::Lsi(m) => m.seed,
            TopicModel::Lda(m) => m.seed,
        }
    }

    /// Topic-space representation of one document.
    pub fn transform(&self, doc: &DocVector) -> Vec<f64> {
        match self {
            TopicModel::Lsi(m) => lsi_project(m, doc),
            TopicModel::Lda(m) => lda_infer(m, doc),
        }
    }

    /// Saves as a JSON document carrying kind, topic count, seed and the
    /// model matrices.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<TopicModel> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

/// Unit-normalised topic-space vectors of a document set.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityIndex {
    doc_ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    zero: Vec<bool>,
}

impl SimilarityIndex {
    pub fn new(doc_ids: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if doc_ids.len() != vectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} ids for {} vectors",
                doc_ids.len(),
                vectors.len()
            )));
        }
        let mut zero = Vec::with_capacity(vectors.len());
        let vectors = vectors
            .into_iter()
            .map(|mut v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 && norm.is_finite() {
                    v.iter_mut().for_each(|x| *x /= norm);
                    zero.push(false);
                } else {
                    v.iter_mut().for_each(|x| *x = 0.0);
                    zero.push(true);
                }
                v
            })
            .collect();
        Ok(SimilarityIndex {
            doc_ids,
            vectors,
            zero,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.zero[i]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }
}

/// Cosine similarities clamped to `[0, 1]`, diagonal 1 for nonzero vectors.
pub fn pairwise_similarity(index: &SimilarityIndex) -> SimilarityMatrix {
    let n = index.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        if index.is_zero(i) {
            continue;
        }
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            if index.is_zero(j) {
                continue;
            }
            let dot: f64 = index
                .vector(i)
                .iter()
                .zip(index.vector(j))
                .map(|(a, b)| a * b)
                .sum();
            let s = dot.clamp(0.0, 1.0);
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    SimilarityMatrix::new(index.doc_ids().to_vec(), values)
        .expect("square matrix built from the index")
}

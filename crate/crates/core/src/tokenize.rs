//! Bag-of-words construction from text, TeX and MTerm tokens.
//!
//! Math tokens live in their own namespace: they are wrapped in `$…$`, while
//! text tokens never contain `$`. Math tokens longer than 32 characters are
//! replaced by their MD4 hex digest before wrapping.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use md4::{Digest, Md4};
use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::mathrep::{formula_to_weighted_mterms, Origin, WeightScheme, WeightedMTerm};

/// Length of an MD4 digest in hex.
pub const HASH_LEN: usize = 32;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BagOfWords {
    counts: BTreeMap<String, u32>,
}

impl BagOfWords {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences; empty tokens and zero counts are ignored.
    pub fn add(&mut self, token: impl Into<String>, count: u32) {
        let token = token.into();
        if token.is_empty() || count == 0 {
            return;
        }
        *self.counts.entry(token).or_insert(0) += count;
    }

    pub fn get(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, c)| (t.as_str(), *c))
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn merge(&mut self, other: &BagOfWords) {
        for (t, c) in other.iter() {
            self.add(t, c);
        }
    }

    /// `token<TAB>count` lines sorted by token.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (t, c) in self.iter() {
            writeln!(out, "{t}\t{c}").unwrap();
        }
        out
    }
}

impl<S: Into<String>> FromIterator<S> for BagOfWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bow = BagOfWords::new();
        for t in iter {
            bow.add(t, 1);
        }
        bow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MTermStrategy {
    None,
    /// Every MTerm, repeated according to its weight.
    AllWeighted,
    /// Only the canonicalised original formulae, once each.
    Top,
    High,
    Mid,
    Low,
}

impl MTermStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            MTermStrategy::None => "none",
            MTermStrategy::AllWeighted => "all",
            MTermStrategy::Top => "top",
            MTermStrategy::High => "high",
            MTermStrategy::Mid => "mid",
            MTermStrategy::Low => "low",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "none" => MTermStrategy::None,
            "all" | "allweighted" | "all-weighted" | "weighted" => MTermStrategy::AllWeighted,
            "top" => MTermStrategy::Top,
            "high" => MTermStrategy::High,
            "mid" => MTermStrategy::Mid,
            "low" => MTermStrategy::Low,
            _ => return None,
        })
    }
}

/// Whether High/Mid/Low thirds are taken within each formula or over every
/// MTerm in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThirdsScope {
    PerFormula,
    Corpus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationConfig {
    pub use_text: bool,
    pub use_tex: bool,
    pub mterm_strategy: MTermStrategy,
    pub mtmod_scale: f64,
    pub thirds: ThirdsScope,
    pub stem: bool,
    pub stopwords: bool,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        RepresentationConfig {
            use_text: true,
            use_tex: false,
            mterm_strategy: MTermStrategy::None,
            mtmod_scale: 390.0,
            thirds: ThirdsScope::PerFormula,
            stem: false,
            stopwords: false,
        }
    }
}

impl RepresentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.use_text && !self.use_tex && self.mterm_strategy == MTermStrategy::None {
            return Err(Error::InvalidArgument(
                "representation enables no token source".into(),
            ));
        }
        if !(self.mtmod_scale.is_finite() && self.mtmod_scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mtmod scale must be positive, got {}",
                self.mtmod_scale
            )));
        }
        Ok(())
    }

    /// Short label such as `text+tex+mterms:top`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.use_text {
            parts.push("text".to_string());
        }
        if self.use_tex {
            parts.push("tex".to_string());
        }
        if self.mterm_strategy != MTermStrategy::None {
            parts.push(format!("mterms:{}", self.mterm_strategy.name()));
        }
        parts.join("+")
    }
}

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "in", "is", "it", "its",
    "of", "on", "or", "that", "the", "this", "to", "was", "we", "were", "which", "with",
];

/// Lowercased maximal runs of letters and digits.
pub fn tokenize_text(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn text_tokens(text: &str, config: &RepresentationConfig) -> Vec<String> {
    let mut tokens = tokenize_text(text);
    if config.stopwords {
        tokens.retain(|t| !STOPWORDS.contains(&t.as_str()));
    }
    if config.stem {
        let stemmer = Stemmer::create(Algorithm::English);
        for t in &mut tokens {
            *t = stemmer.stem(t).into_owned();
        }
    }
    tokens
}

pub fn wrap_math_token(token: &str) -> String {
    format!("${token}$")
}

/// Lowercase hex MD4 digest of the UTF-8 bytes.
pub fn md4_hex(bytes: &[u8]) -> String {
    let digest = Md4::digest(bytes);
    let mut out = String::with_capacity(HASH_LEN);
    for b in digest.iter() {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

/// Replaces math tokens longer than 32 characters with their MD4 digest.
pub fn hash_long_math_token(token: &str) -> String {
    if token.chars().count() > HASH_LEN {
        md4_hex(token.as_bytes())
    } else {
        token.to_string()
    }
}

/// Final math token: hashed if long, then wrapped.
pub fn math_token(raw: &str) -> String {
    wrap_math_token(&hash_long_math_token(raw))
}

/// Number of times an MTerm of weight `w_m` enters the bag:
/// `ceil(round(trunc(scale * w_m)))`.
pub fn mterm_repeat_count(w_m: f64, scale: f64) -> u32 {
    let modified = (scale * w_m).trunc();
    modified.round().ceil().max(0.0) as u32
}

/// Sizes of the High, Mid and Low thirds of `n` ranked entries.
pub fn thirds(n: usize) -> (usize, usize, usize) {
    let high = n.div_ceil(3);
    let mid = (2 * n).div_ceil(3) - high;
    (high, mid, n - high - mid)
}

/// Picks MTerms of one formula according to the strategy. `weighted` must be
/// sorted by descending weight, ties by MTerm. Returns raw MTerm strings with
/// their multiplicity.
pub fn select_mterms(
    weighted: &[WeightedMTerm],
    strategy: MTermStrategy,
    mtmod_scale: f64,
) -> Vec<(String, u32)> {
    let (high, mid, _) = thirds(weighted.len());
    let once = |slice: &[WeightedMTerm]| slice.iter().map(|t| (t.mterm.clone(), 1)).collect();
    match strategy {
        MTermStrategy::None => Vec::new(),
        MTermStrategy::AllWeighted => weighted
            .iter()
            .map(|t| (t.mterm.clone(), mterm_repeat_count(t.mias_weight, mtmod_scale)))
            .filter(|(_, n)| *n > 0)
            .collect(),
        MTermStrategy::Top => weighted
            .iter()
            .filter(|t| t.origin == Origin::Top)
            .map(|t| (t.mterm.clone(), 1))
            .collect(),
        MTermStrategy::High => once(&weighted[..high]),
        MTermStrategy::Mid => once(&weighted[high..high + mid]),
        MTermStrategy::Low => once(&weighted[high + mid..]),
    }
}

fn rank_cmp(a: &(f64, &str), b: &(f64, &str)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

/// Boundaries of the corpus-wide thirds: the last (weight, MTerm) rank key
/// inside High and inside Mid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusCutoffs {
    high_last: Option<(f64, String)>,
    mid_last: Option<(f64, String)>,
}

impl CorpusCutoffs {
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a WeightedMTerm>) -> Self {
        let mut keys: Vec<(f64, &str)> = terms
            .into_iter()
            .map(|t| (t.mias_weight, t.mterm.as_str()))
            .collect();
        keys.sort_by(rank_cmp);
        let (high, mid, _) = thirds(keys.len());
        let at = |i: usize| (i > 0).then(|| (keys[i - 1].0, keys[i - 1].1.to_string()));
        CorpusCutoffs {
            high_last: at(high),
            mid_last: at(high + mid),
        }
    }

    fn band(&self, t: &WeightedMTerm) -> MTermStrategy {
        let key = (t.mias_weight, t.mterm.as_str());
        let within = |last: &Option<(f64, String)>| {
            last.as_ref()
                .map(|(w, m)| rank_cmp(&key, &(*w, m.as_str())) != std::cmp::Ordering::Greater)
                .unwrap_or(false)
        };
        if within(&self.high_last) {
            MTermStrategy::High
        } else if within(&self.mid_last) {
            MTermStrategy::Mid
        } else {
            MTermStrategy::Low
        }
    }
}

fn document_mterms(doc: &Document, scheme: &WeightScheme) -> Vec<Vec<WeightedMTerm>> {
    doc.formulae
        .iter()
        .map(|f| formula_to_weighted_mterms(f, scheme))
        .collect()
}

fn bow_from_parts(
    doc: &Document,
    config: &RepresentationConfig,
    mterms: &[Vec<WeightedMTerm>],
    cutoffs: Option<&CorpusCutoffs>,
) -> BagOfWords {
    let mut bow = BagOfWords::new();
    if config.use_text {
        for t in text_tokens(&doc.body_text, config) {
            bow.add(t, 1);
        }
    }
    if config.use_tex {
        for f in &doc.formulae {
            let tex = f.tex.trim();
            if !tex.is_empty() {
                bow.add(math_token(tex), 1);
            }
        }
    }
    let strategy = config.mterm_strategy;
    for set in mterms {
        let picked = match (cutoffs, strategy) {
            (Some(c), MTermStrategy::High | MTermStrategy::Mid | MTermStrategy::Low) => set
                .iter()
                .filter(|t| c.band(t) == strategy)
                .map(|t| (t.mterm.clone(), 1))
                .collect(),
            _ => select_mterms(set, strategy, config.mtmod_scale),
        };
        for (mterm, n) in picked {
            bow.add(math_token(&mterm), n);
        }
    }
    bow
}

/// Builds the single flat bag of one document.
pub fn build_bow(doc: &Document, config: &RepresentationConfig, scheme: &WeightScheme) -> BagOfWords {
    build_corpus_bows(std::slice::from_ref(doc), config, scheme)
        .pop()
        .unwrap_or_default()
}

/// Builds the bags of a whole corpus; needed when thirds are corpus-wide.
pub fn build_corpus_bows(
    docs: &[Document],
    config: &RepresentationConfig,
    scheme: &WeightScheme,
) -> Vec<BagOfWords> {
    let needs_mterms = config.mterm_strategy != MTermStrategy::None;
    let mterms: Vec<Vec<Vec<WeightedMTerm>>> = docs
        .iter()
        .map(|d| if needs_mterms { document_mterms(d, scheme) } else { Vec::new() })
        .collect();
    let cutoffs = (config.thirds == ThirdsScope::Corpus && needs_mterms)
        .then(|| CorpusCutoffs::from_terms(mterms.iter().flatten().flatten()));
    docs.iter()
        .zip(&mterms)
        .map(|(d, m)| bow_from_parts(d, config, m, cutoffs.as_ref()))
        .collect()
}

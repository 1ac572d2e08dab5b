//! Corpus loading: XHTML+MathML documents, sidecar metadata, MSC filtering
//! and the persisted random ordering.
//!
//! On-disk formats:
//!
//! * metadata TSV: `doc_id<TAB>msc_codes<TAB>title`, codes `;`-separated
//! * MSC spec TSV: `CODE<TAB>description`
//! * ordering file: a `seed <N>` line followed by one document id per line
//!
//! Blank lines and lines starting with `#` are ignored in both TSV files.

mod mathml;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use roxmltree::{Document as XmlDocument, Node, ParsingOptions};

use crate::error::{Error, Result};
use crate::mathrep::MathNode;

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    /// Raw TeX annotation, trimmed; empty when the source had none.
    pub tex: String,
    /// Presentation tree; `None` when the MathML could not be parsed.
    pub tree: Option<MathNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub msc_codes: Vec<String>,
    pub title: String,
    pub authors: Vec<String>,
    pub abstract_text: String,
    /// Full text with every math element removed.
    pub body_text: String,
    pub formulae: Vec<Formula>,
}

impl Document {
    /// Primary MSC code, the first listed.
    pub fn msc(&self) -> &str {
        self.msc_codes.first().map(String::as_str).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRecord {
    pub id: String,
    pub msc_codes: Vec<String>,
    pub title: String,
}

#[derive(Debug, Clone)]
pub struct ParsedDocument {
    pub document: Document,
    /// One message per math element whose MathML could not be parsed.
    pub warnings: Vec<String>,
}

/// Checks the syntactic shape of an MSC code: five characters, the first two
/// digits.
pub fn is_valid_msc(code: &str) -> bool {
    let chars: Vec<char> = code.chars().collect();
    chars.len() == 5 && chars[0].is_ascii_digit() && chars[1].is_ascii_digit()
}

/// Top-level category: the first two characters.
pub fn msc_prefix(code: &str) -> &str {
    code.get(..2).unwrap_or(code)
}

/// Parses one XHTML document. Math elements are cut out of the text and
/// turned into formulae in document order.
pub fn parse_document(xhtml: &[u8], record: &MetadataRecord) -> Result<ParsedDocument> {
    let source = std::str::from_utf8(xhtml).map_err(|e| Error::Markup {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".to_string(),
    })?;
    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let xml = XmlDocument::parse_with_options(source, opts).map_err(|e| {
        let pos = e.pos();
        Error::Markup {
            offset: byte_offset(source, pos.row as usize, pos.col as usize),
            message: e.to_string(),
        }
    })?;

    let mut walker = Walker::default();
    walker.walk(xml.root());

    let title = if record.title.is_empty() {
        xml.descendants()
            .find(|n| n.is_element() && n.tag_name().name() == "title")
            .map(|n| mathml::collect_text(&n).trim().to_string())
            .unwrap_or_default()
    } else {
        record.title.clone()
    };
    let authors = xml
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "meta")
        .filter(|n| n.attribute("name") == Some("author"))
        .filter_map(|n| n.attribute("content"))
        .map(str::to_string)
        .collect();
    let abstract_text = xml
        .descendants()
        .find(|n| {
            n.is_element()
                && n.attribute("class")
                    .map(|c| c.split_whitespace().any(|c| c.contains("abstract")))
                    .unwrap_or(false)
        })
        .map(|n| text_outside_math(n).trim().to_string())
        .unwrap_or_default();

    Ok(ParsedDocument {
        document: Document {
            id: record.id.clone(),
            msc_codes: record.msc_codes.clone(),
            title,
            authors,
            abstract_text,
            body_text: walker.text,
            formulae: walker.formulae,
        },
        warnings: walker.warnings,
    })
}

/// Parses a standalone `<math>` element.
pub fn parse_math(markup: &str) -> Result<Formula> {
    let xml = XmlDocument::parse(markup).map_err(|e| {
        let pos = e.pos();
        Error::Markup {
            offset: byte_offset(markup, pos.row as usize, pos.col as usize),
            message: e.to_string(),
        }
    })?;
    let math = xml
        .descendants()
        .find(mathml::is_math_element)
        .ok_or_else(|| Error::Markup {
            offset: 0,
            message: "no <math> element".into(),
        })?;
    let tree = mathml::presentation_tree(&math).map_err(|message| Error::InvalidTree {
        path: "root".into(),
        message,
    })?;
    tree.validate()?;
    Ok(Formula {
        tex: mathml::tex_annotation(&math).unwrap_or_default(),
        tree: Some(tree),
    })
}

fn byte_offset(source: &str, row: usize, col: usize) -> usize {
    let line_start: usize = source
        .split_inclusive('\n')
        .take(row.saturating_sub(1))
        .map(str::len)
        .sum();
    let rest = &source[line_start.min(source.len())..];
    line_start
        + rest
            .char_indices()
            .nth(col.saturating_sub(1))
            .map(|(i, _)| i)
            .unwrap_or(rest.len())
}

fn text_outside_math(node: Node) -> String {
    let mut w = Walker::default();
    w.walk(node);
    w.text
}

#[derive(Default)]
struct Walker {
    text: String,
    formulae: Vec<Formula>,
    warnings: Vec<String>,
}

impl Walker {
    fn walk(&mut self, node: Node) {
        if mathml::is_math_element(&node) {
            self.formula(node);
            return;
        }
        if let Some(t) = node.text().filter(|_| node.is_text()) {
            self.text.push_str(t);
        }
        for child in node.children() {
            self.walk(child);
        }
    }

    fn formula(&mut self, math: Node) {
        let tex = mathml::tex_annotation(&math).unwrap_or_default();
        let tree = match mathml::presentation_tree(&math) {
            Ok(tree) => match tree.validate() {
                Ok(()) => Some(tree),
                Err(e) => {
                    self.warnings.push(format!("formula {}: {e}", self.formulae.len()));
                    None
                }
            },
            Err(e) => {
                self.warnings.push(format!("formula {}: {e}", self.formulae.len()));
                None
            }
        };
        if tex.is_empty() && tree.is_none() {
            return;
        }
        self.formulae.push(Formula { tex, tree });
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn parse_metadata(text: &str, path: &Path) -> Result<Vec<MetadataRecord>> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (line_no, line) in data_lines(text) {
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or("").trim();
        if id.is_empty() {
            return Err(Error::format(path, line_no, "empty document id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::format(path, line_no, format!("duplicate document id `{id}`")));
        }
        let codes: Vec<String> = fields
            .next()
            .unwrap_or("")
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::to_string)
            .collect();
        if let Some(bad) = codes.iter().find(|c| !is_valid_msc(c)) {
            return Err(Error::format(path, line_no, format!("invalid MSC code `{bad}`")));
        }
        records.push(MetadataRecord {
            id: id.to_string(),
            msc_codes: codes,
            title: fields.next().unwrap_or("").trim().to_string(),
        });
    }
    Ok(records)
}

pub fn read_metadata(path: &Path) -> Result<Vec<MetadataRecord>> {
    parse_metadata(&read_to_string(path)?, path)
}

pub fn write_metadata(records: &[MetadataRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!("{}\t{}\t{}\n", r.id, r.msc_codes.join(";"), r.title));
    }
    out
}

/// MSC code descriptions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MscSpec {
    pub descriptions: BTreeMap<String, String>,
}

impl MscSpec {
    pub fn parse(text: &str, path: &Path) -> Result<MscSpec> {
        let mut descriptions = BTreeMap::new();
        for (line_no, line) in data_lines(text) {
            let (code, desc) = line.split_once('\t').unwrap_or((line, ""));
            let code = code.trim();
            if !is_valid_msc(code) {
                return Err(Error::format(path, line_no, format!("invalid MSC code `{code}`")));
            }
            descriptions.insert(code.to_string(), desc.trim().to_string());
        }
        Ok(MscSpec { descriptions })
    }

    pub fn read(path: &Path) -> Result<MscSpec> {
        Self::parse(&read_to_string(path)?, path)
    }

    pub fn to_tsv(&self) -> String {
        self.descriptions
            .iter()
            .map(|(c, d)| format!("{c}\t{d}\n"))
            .collect()
    }

    pub fn description(&self, code: &str) -> Option<&str> {
        self.descriptions.get(code).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    NotExactlyOneCode,
    WeakCode,
    SeeAlso,
    UnknownCode,
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exclusion::NotExactlyOneCode => "not exactly one MSC code",
            Exclusion::WeakCode => "third character is `-` or `.`",
            Exclusion::SeeAlso => "description contains a see-also reference",
            Exclusion::UnknownCode => "code missing from the MSC specification",
        })
    }
}

/// Why a document fails the corpus filter, `None` if it is kept.
pub fn exclusion_reason(doc: &Document, spec: &MscSpec) -> Option<Exclusion> {
    code_exclusion(&doc.msc_codes, spec)
}

/// [`exclusion_reason`] on the MSC codes alone.
pub fn code_exclusion(codes: &[String], spec: &MscSpec) -> Option<Exclusion> {
    let [code] = codes else {
        return Some(Exclusion::NotExactlyOneCode);
    };
    if matches!(code.chars().nth(2), Some('-') | Some('.')) {
        return Some(Exclusion::WeakCode);
    }
    match spec.description(code) {
        None => Some(Exclusion::UnknownCode),
        Some(d) if d.to_lowercase().contains("see also") => Some(Exclusion::SeeAlso),
        Some(_) => None,
    }
}

/// Keeps documents with exactly one well-defined MSC code whose description
/// has no see-also reference.
pub fn filter_corpus(documents: Vec<Document>, spec: &MscSpec) -> Vec<Document> {
    let before = documents.len();
    let kept: Vec<Document> = documents
        .into_iter()
        .filter(|d| match exclusion_reason(d, spec) {
            None => true,
            Some(reason) => {
                if reason == Exclusion::UnknownCode {
                    log::warn!("excluding {}: {reason} ({})", d.id, d.msc());
                } else {
                    log::debug!("excluding {}: {reason}", d.id);
                }
                false
            }
        })
        .collect();
    log::info!("corpus filter kept {} of {before} documents", kept.len());
    kept
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusOrdering {
    pub seed: u64,
    pub ordered_ids: Vec<String>,
}

/// Uniform integer in `0..n` by rejection sampling on raw 64-bit output, so
/// the permutation depends on nothing but the ChaCha8 stream.
fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % n;
        }
    }
}

/// Seeded Fisher-Yates permutation of the ids. The ids are sorted first so
/// the result does not depend on the caller's order.
pub fn shuffle_once<S: AsRef<str>>(ids: &[S], seed: u64) -> Result<CorpusOrdering> {
    if ids.is_empty() {
        return Err(Error::Empty("document list"));
    }
    let mut ordered: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
    ordered.sort();
    if ordered.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("duplicate document ids".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..ordered.len()).rev() {
        let j = below(&mut rng, i as u64 + 1) as usize;
        ordered.swap(i, j);
    }
    Ok(CorpusOrdering {
        seed,
        ordered_ids: ordered,
    })
}

impl CorpusOrdering {
    pub fn to_text(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        for id in &self.ordered_ids {
            out.push_str(id);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<CorpusOrdering> {
        let mut lines = text.lines();
        let seed = lines
            .next()
            .and_then(|l| l.strip_prefix("seed "))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::format(path, 1, "expected `seed <N>`"))?;
        let mut seen = HashSet::new();
        let mut ordered_ids = Vec::new();
        for (i, line) in lines.enumerate() {
            let id = line.trim();
            if id.is_empty() {
                continue;
            }
            if !seen.insert(id) {
                return Err(Error::format(path, i + 2, format!("duplicate id `{id}`")));
            }
            ordered_ids.push(id.to_string());
        }
        Ok(CorpusOrdering { seed, ordered_ids })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<CorpusOrdering> {
        Self::parse(&read_to_string(path)?, path)
    }

    /// Arranges `documents` in this order. Documents missing from the
    /// ordering are dropped, ordering ids without a document are skipped.
    pub fn arrange(&self, documents: Vec<Document>) -> Vec<Document> {
        let mut by_id: BTreeMap<String, Document> =
            documents.into_iter().map(|d| (d.id.clone(), d)).collect();
        self.ordered_ids
            .iter()
            .filter_map(|id| by_id.remove(id))
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadStats {
    pub documents: usize,
    pub formulae: usize,
    pub warnings: usize,
}

/// Loads every document named in the metadata from `<corpus_dir>/<id>.xhtml`,
/// parsing files in parallel. Output is in metadata order.
pub fn load_corpus(corpus_dir: &Path, metadata: &[MetadataRecord]) -> Result<(Vec<Document>, LoadStats)> {
    let parsed: Vec<ParsedDocument> = metadata
        .par_iter()
        .map(|record| {
            let path: PathBuf = corpus_dir.join(format!("{}.xhtml", record.id));
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            parse_document(&bytes, record).map_err(|e| match e {
                Error::Markup { offset, message } => Error::Markup {
                    offset,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let mut stats = LoadStats::default();
    let mut documents = Vec::with_capacity(parsed.len());
    for p in parsed {
        for w in &p.warnings {
            log::warn!("{}: {w}", p.document.id);
        }
        stats.documents += 1;
        stats.formulae += p.document.formulae.len();
        stats.warnings += p.warnings.len();
        documents.push(p.document);
    }
    Ok((documents, stats))
}

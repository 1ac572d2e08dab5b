//! Synthetic labelled corpora in the on-disk format `ingest` reads.
//!
//! Every category owns a vocabulary of pseudo-words and a pool of
//! identifiers, operators and numbers. A draw takes from a pool shared by
//! all categories with probability equal to the configured overlap, and
//! from the category's own pool otherwise.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_metadata, MetadataRecord, MscSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub num_categories: usize,
    pub docs_per_category: usize,
    pub vocab_size_per_category: usize,
    pub vocab_overlap: f64,
    pub words_per_doc: usize,
    pub formulae_per_doc: usize,
    pub formula_notation_overlap: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            num_categories: 4,
            docs_per_category: 50,
            vocab_size_per_category: 1000,
            vocab_overlap: 0.0,
            words_per_doc: 120,
            formulae_per_doc: 8,
            formula_notation_overlap: 0.0,
            seed: 0,
        }
    }
}

/// Distinct category prefixes available.
pub const MAX_CATEGORIES: usize = 100;
const IDENTIFIERS_PER_POOL: usize = 5;
const OPERATORS_PER_POOL: usize = 2;
const NUMBERS_PER_POOL: usize = 3;
const MAX_DEPTH: usize = 3;

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("num_categories", self.num_categories),
            ("docs_per_category", self.docs_per_category),
            ("vocab_size_per_category", self.vocab_size_per_category),
            ("words_per_doc", self.words_per_doc),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
        if self.num_categories > MAX_CATEGORIES {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_CATEGORIES} categories, got {}",
                self.num_categories
            )));
        }
        for (name, v) in [
            ("vocab_overlap", self.vocab_overlap),
            ("formula_notation_overlap", self.formula_notation_overlap),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn num_documents(&self) -> usize {
        self.num_categories * self.docs_per_category
    }
}

/// Two-digit prefix of category `c`; 37 is coprime to 100, so prefixes
/// never repeat.
pub fn category_prefix(c: usize) -> String {
    format!("{:02}", (c * 37 + 5) % 100)
}

/// Generated files before they touch the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// `(id, xhtml)` pairs.
    pub documents: Vec<(String, String)>,
    pub metadata: Vec<MetadataRecord>,
    pub msc: MscSpec,
}

impl SynthCorpus {
    /// Writes `<id>.xhtml` files, `metadata.tsv` and `msc.tsv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (id, xhtml) in &self.documents {
            let path = dir.join(format!("{id}.xhtml"));
            fs::write(&path, xhtml).map_err(|e| Error::io(&path, e))?;
        }
        let meta = dir.join("metadata.tsv");
        fs::write(&meta, write_metadata(&self.metadata)).map_err(|e| Error::io(&meta, e))?;
        let msc = dir.join("msc.tsv");
        fs::write(&msc, self.msc.to_tsv()).map_err(|e| Error::io(&msc, e))
    }
}

struct Pools {
    words: Vec<String>,
    identifiers: Vec<Symbol>,
    operators: Vec<Symbol>,
    numbers: Vec<String>,
}

#[derive(Debug, Clone)]
struct Symbol {
    mathml: String,
    tex: String,
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Pseudo-word for `index`, written as `width` consonant-vowel syllables.
fn pseudo_word(mut index: usize, width: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut out = String::with_capacity(2 * width);
    for _ in 0..width {
        let s = index % base;
        index /= base;
        out.push(CONSONANTS[s / VOWELS.len()] as char);
        out.push(VOWELS[s % VOWELS.len()] as char);
    }
    out
}

fn word_width(total: usize) -> usize {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut width = 2;
    while base.pow(width as u32) < total {
        width += 1;
    }
    width
}

const GREEK: &[(&str, &str)] = &[
    ("α", "\\alpha"), ("β", "\\beta"), ("γ", "\\gamma"), ("δ", "\\delta"), ("ε", "\\epsilon"),
    ("ζ", "\\zeta"), ("η", "\\eta"), ("θ", "\\theta"), ("κ", "\\kappa"), ("λ", "\\lambda"),
    ("μ", "\\mu"), ("ν", "\\nu"), ("ξ", "\\xi"), ("π", "\\pi"), ("ρ", "\\rho"), ("σ", "\\sigma"),
    ("τ", "\\tau"), ("φ", "\\phi"), ("χ", "\\chi"), ("ψ", "\\psi"), ("ω", "\\omega"),
];

const OPERATORS: &[(&str, &str)] = &[
    ("+", "+"), ("−", "-"), ("×", "\\times"), ("·", "\\cdot"), ("∘", "\\circ"), ("⊕", "\\oplus"),
    ("⊗", "\\otimes"), ("∪", "\\cup"), ("∩", "\\cap"), ("∧", "\\wedge"), ("∨", "\\vee"),
    ("⋆", "\\star"), ("⊔", "\\sqcup"), ("⊓", "\\sqcap"), ("∗", "\\ast"), ("⊙", "\\odot"),
    ("⊖", "\\ominus"), ("⋄", "\\diamond"), ("÷", "\\div"), ("⊎", "\\uplus"),
];

fn identifier(index: usize) -> Symbol {
    let latin = 52;
    if index < latin {
        let c = if index < 26 { b'a' + index as u8 } else { b'A' + (index - 26) as u8 } as char;
        return Symbol { mathml: c.to_string(), tex: c.to_string() };
    }
    let g = index - latin;
    if g < GREEK.len() {
        return Symbol { mathml: GREEK[g].0.into(), tex: GREEK[g].1.into() };
    }
    // out of single symbols: letter with a numeric suffix
    let k = g - GREEK.len();
    let name = format!("{}{}", (b'a' + (k % 26) as u8) as char, k / 26 + 1);
    Symbol { mathml: name.clone(), tex: format!("\\mathit{{{name}}}") }
}

fn operator(index: usize) -> Symbol {
    if index >= OPERATORS.len() {
        log::warn!("operator pool exhausted; categories start sharing operators");
    }
    let (m, t) = OPERATORS[index % OPERATORS.len()];
    Symbol { mathml: m.into(), tex: t.into() }
}

/// Pool `p` for `p < num_categories` is category-owned; the last pool is
/// shared.
fn build_pools(spec: &SynthSpec) -> Vec<Pools> {
    let pools = spec.num_categories + 1;
    let width = word_width(pools * spec.vocab_size_per_category);
    (0..pools)
        .map(|p| Pools {
            words: (0..spec.vocab_size_per_category)
                .map(|i| pseudo_word(p * spec.vocab_size_per_category + i, width))
                .collect(),
            identifiers: (0..IDENTIFIERS_PER_POOL).map(|i| identifier(p * IDENTIFIERS_PER_POOL + i)).collect(),
            operators: (0..OPERATORS_PER_POOL).map(|i| operator(p * OPERATORS_PER_POOL + i)).collect(),
            numbers: (0..NUMBERS_PER_POOL).map(|i| (p * NUMBERS_PER_POOL + i + 2).to_string()).collect(),
        })
        .collect()
}

struct Drawer<'a> {
    rng: ChaCha8Rng,
    own: &'a Pools,
    shared: &'a Pools,
    vocab_overlap: f64,
    notation_overlap: f64,
}

impl<'a> Drawer<'a> {
    fn pool(&mut self, overlap: f64) -> &'a Pools {
        if overlap > 0.0 && self.rng.random::<f64>() < overlap {
            self.shared
        } else {
            self.own
        }
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())].clone()
    }

    fn word(&mut self) -> String {
        let pool = self.pool(self.vocab_overlap);
        self.pick(&pool.words)
    }

    fn identifier(&mut self) -> Symbol {
        let pool = self.pool(self.notation_overlap);
        self.pick(&pool.identifiers)
    }

    fn operator(&mut self) -> Symbol {
        let pool = self.pool(self.notation_overlap);
        self.pick(&pool.operators)
    }

    fn number(&mut self) -> String {
        let pool = self.pool(self.notation_overlap);
        self.pick(&pool.numbers)
    }

    fn atom(&mut self) -> Expr {
        if self.rng.random::<f64>() < 0.75 {
            Expr::Ident(self.identifier())
        } else {
            Expr::Num(self.number())
        }
    }

    /// Template expression nested at most `MAX_DEPTH` levels.
    fn expr(&mut self, depth: usize) -> Expr {
        if depth >= MAX_DEPTH || (depth > 0 && self.rng.random::<f64>() < 0.3) {
            return self.atom();
        }
        match self.rng.random_range(0..4) {
            0 => {
                let len = self.rng.random_range(2..=3);
                let items = (0..len).map(|_| self.expr(depth + 1)).collect();
                let ops = (1..len).map(|_| self.operator()).collect();
                Expr::Chain(items, ops)
            }
            1 => {
                let base = self.atom();
                Expr::Sup(Box::new(base), Box::new(self.expr(depth + 1)))
            }
            2 => Expr::Frac(Box::new(self.expr(depth + 1)), Box::new(self.expr(depth + 1))),
            _ => {
                let s = self.identifier();
                Expr::Sub(s, self.number())
            }
        }
    }

    fn words(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.word()).collect()
    }
}

enum Expr {
    Ident(Symbol),
    Num(String),
    Chain(Vec<Expr>, Vec<Symbol>),
    Sup(Box<Expr>, Box<Expr>),
    Sub(Symbol, String),
    Frac(Box<Expr>, Box<Expr>),
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Expr {
    fn mathml(&self, out: &mut String) {
        match self {
            Expr::Ident(s) => {
                let _ = write!(out, "<mi>{}</mi>", escape(&s.mathml));
            }
            Expr::Num(n) => {
                let _ = write!(out, "<mn>{n}</mn>");
            }
            Expr::Chain(items, ops) => {
                out.push_str("<mrow>");
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        let _ = write!(out, "<mo>{}</mo>", escape(&ops[i - 1].mathml));
                    }
                    e.mathml(out);
                }
                out.push_str("</mrow>");
            }
            Expr::Sup(b, e) => {
                out.push_str("<msup>");
                b.mathml(out);
                e.mathml(out);
                out.push_str("</msup>");
            }
            Expr::Sub(s, n) => {
                let _ = write!(out, "<msub><mi>{}</mi><mn>{n}</mn></msub>", escape(&s.mathml));
            }
            Expr::Frac(a, b) => {
                out.push_str("<mfrac>");
                a.mathml(out);
                b.mathml(out);
                out.push_str("</mfrac>");
            }
        }
    }

    fn tex(&self, out: &mut String) {
        match self {
            Expr::Ident(s) => out.push_str(&s.tex),
            Expr::Num(n) => out.push_str(n),
            Expr::Chain(items, ops) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        let _ = write!(out, " {} ", ops[i - 1].tex);
                    }
                    e.tex(out);
                }
            }
            Expr::Sup(b, e) => {
                b.tex(out);
                out.push_str("^{");
                e.tex(out);
                out.push('}');
            }
            Expr::Sub(s, n) => {
                let _ = write!(out, "{}_{{{n}}}", s.tex);
            }
            Expr::Frac(a, b) => {
                out.push_str("\\frac{");
                a.tex(out);
                out.push_str("}{");
                b.tex(out);
                out.push('}');
            }
        }
    }
}

fn math_element(e: &Expr) -> String {
    let mut ml = String::new();
    e.mathml(&mut ml);
    let mut tex = String::new();
    e.tex(&mut tex);
    format!(
        "<math xmlns=\"http://www.w3.org/1998/Math/MathML\"><semantics>{ml}\
         <annotation encoding=\"application/x-tex\">{}</annotation></semantics></math>",
        escape(&tex)
    )
}

fn document_xhtml(d: &mut Drawer, spec: &SynthSpec, title: &str, author: &str) -> String {
    let abstract_len = (spec.words_per_doc / 5).max(1).min(spec.words_per_doc);
    let body_words = d.words(spec.words_per_doc - abstract_len.min(spec.words_per_doc));
    let abstract_words = d.words(abstract_len);
    let mut body = String::new();
    let paragraphs = spec.formulae_per_doc.max(1);
    let per = body_words.len().div_ceil(paragraphs).max(1);
    let mut chunks = body_words.chunks(per);
    for i in 0..paragraphs {
        body.push_str("<p>");
        body.push_str(&chunks.next().map(|c| c.join(" ")).unwrap_or_default());
        if i < spec.formulae_per_doc {
            let e = d.expr(0);
            body.push(' ');
            body.push_str(&math_element(&e));
        }
        body.push_str("</p>\n");
    }
    for rest in chunks {
        let _ = writeln!(body, "<p>{}</p>", rest.join(" "));
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <html xmlns=\"http://www.w3.org/1999/xhtml\">\n\
         <head><title>{title}</title><meta name=\"author\" content=\"{author}\"/></head>\n\
         <body>\n<div class=\"abstract\"><p>{}</p></div>\n{body}</body>\n</html>\n",
        abstract_words.join(" ")
    )
}

/// Generates the corpus in memory. Category `c` documents get codes with
/// prefix [`category_prefix`]`(c)`, spread over three subcodes.
pub fn generate(spec: &SynthSpec) -> Result<SynthCorpus> {
    spec.validate()?;
    let pools = build_pools(spec);
    let shared = &pools[spec.num_categories];
    let mut msc = MscSpec::default();
    let mut documents = Vec::with_capacity(spec.num_documents());
    let mut metadata = Vec::with_capacity(spec.num_documents());
    const SUBCODES: [&str; 3] = ["A10", "B20", "C30"];
    for c in 0..spec.num_categories {
        let prefix = category_prefix(c);
        for sub in SUBCODES {
            msc.descriptions.insert(format!("{prefix}{sub}"), format!("Synthetic area {prefix}, topic {sub}"));
        }
        let mut d = Drawer {
            rng: ChaCha8Rng::seed_from_u64(spec.seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            own: &pools[c],
            shared,
            vocab_overlap: spec.vocab_overlap,
            notation_overlap: spec.formula_notation_overlap,
        };
        for i in 0..spec.docs_per_category {
            let id = format!("syn{prefix}-{i:04}");
            let code = format!("{prefix}{}", SUBCODES[i % SUBCODES.len()]);
            let title = d.words(3).join(" ");
            let author = format!("Author {}", i % 7);
            documents.push((id.clone(), document_xhtml(&mut d, spec, &title, &author)));
            metadata.push(MetadataRecord {
                id,
                msc_codes: vec![code],
                title,
            });
        }
    }
    Ok(SynthCorpus {
        documents,
        metadata,
        msc,
    })
}

/// Generates and writes the corpus into `dir`.
pub fn generate_to(spec: &SynthSpec, dir: &Path) -> Result<SynthCorpus> {
    let corpus = generate(spec)?;
    corpus.write(dir)?;
    Ok(corpus)
}

//! Experiment configuration, the run/suite drivers and the command line.
//!
//! A configuration file looks like
//!
//! ```text
//! id = text-tfidf-lsi
//!
//! [corpus]
//! dir = corpus
//! ordering = corpus/ordering.txt
//!
//! [representation]
//! use_text = true
//! mterm_strategy = none
//!
//! [model]
//! method = TfIdf-LSI
//! num_topics = 50
//! ```
//!
//! Relative paths resolve against the directory holding the file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use ini::{Ini, ParseOption};

use crate::error::{Error, Result};
use crate::eval::{cross_validate, CvConfig, EvalReport, Method, RowLabel, REPORT_COLUMNS};
use crate::ingest::{
    code_exclusion, filter_corpus, load_corpus, read_metadata, shuffle_once, CorpusOrdering, Document,
    LoadStats, MetadataRecord, MscSpec,
};
use crate::synth::{generate_to, SynthSpec};
use crate::tokenize::{MTermStrategy, ThirdsScope};
use crate::viz::{emit_pr_tsv, render_matrix};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusPaths {
    pub dir: PathBuf,
    /// Defaults to `<dir>/metadata.tsv`.
    pub metadata: Option<PathBuf>,
    /// Defaults to `<dir>/msc.tsv`.
    pub msc: Option<PathBuf>,
    /// Defaults to `<dir>/ordering.txt`.
    pub ordering: Option<PathBuf>,
}

impl CorpusPaths {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CorpusPaths {
            dir: dir.into(),
            ..Default::default()
        }
    }

    pub fn metadata(&self) -> PathBuf {
        self.metadata.clone().unwrap_or_else(|| self.dir.join("metadata.tsv"))
    }

    pub fn msc(&self) -> PathBuf {
        self.msc.clone().unwrap_or_else(|| self.dir.join("msc.tsv"))
    }

    pub fn ordering(&self) -> PathBuf {
        self.ordering.clone().unwrap_or_else(|| self.dir.join("ordering.txt"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub corpus: CorpusPaths,
    pub cv: CvConfig,
    /// Write `bow-debug-<id>.tsv` with every document's bag.
    pub bow_debug: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            id: "experiment".into(),
            corpus: CorpusPaths::default(),
            cv: CvConfig::default(),
            bow_debug: false,
        }
    }
}

fn parse_ini(text: &str) -> Result<Ini> {
    let opt = ParseOption {
        enabled_escape: false,
        ..ParseOption::default()
    };
    Ini::load_from_str_opt(text, opt).map_err(|e| Error::InvalidArgument(format!("configuration syntax: {e}")))
}

fn value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::InvalidConfigValue {
        key: key.into(),
        value: v.into(),
    })
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::InvalidConfigValue {
            key: key.into(),
            value: v.into(),
        }),
    }
}

fn unknown(section: Option<&str>, key: &str) -> Error {
    Error::UnknownConfigKey {
        section: section.unwrap_or("").into(),
        key: key.into(),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let ini = parse_ini(text)?;
        let mut cfg = ExperimentConfig::default();
        let path = |v: &str| base_dir.join(v.trim());
        for (section, props) in ini.iter() {
            for (key, v) in props.iter() {
                let rep = &mut cfg.cv.representation;
                let w = &mut cfg.cv.weights;
                match (section, key) {
                    (None, "id") => cfg.id = v.trim().to_string(),
                    (Some("corpus"), "dir") => cfg.corpus.dir = path(v),
                    (Some("corpus"), "metadata") => cfg.corpus.metadata = Some(path(v)),
                    (Some("corpus"), "msc") => cfg.corpus.msc = Some(path(v)),
                    (Some("corpus"), "ordering") => cfg.corpus.ordering = Some(path(v)),
                    (Some("representation"), "use_text") => rep.use_text = flag(key, v)?,
                    (Some("representation"), "use_tex") => rep.use_tex = flag(key, v)?,
                    (Some("representation"), "mterm_strategy") => {
                        rep.mterm_strategy = MTermStrategy::parse(v.trim()).ok_or_else(|| Error::InvalidConfigValue {
                            key: key.into(),
                            value: v.into(),
                        })?
                    }
                    (Some("representation"), "mtmod_scale") => rep.mtmod_scale = value(key, v)?,
                    (Some("representation"), "thirds") => {
                        rep.thirds = match v.trim() {
                            "formula" => ThirdsScope::PerFormula,
                            "corpus" => ThirdsScope::Corpus,
                            _ => {
                                return Err(Error::InvalidConfigValue {
                                    key: key.into(),
                                    value: v.into(),
                                })
                            }
                        }
                    }
                    (Some("representation"), "stem") => rep.stem = flag(key, v)?,
                    (Some("representation"), "stopwords") => rep.stopwords = flag(key, v)?,
                    (Some("representation"), "operand_runs") => w.derive.operand_runs = flag(key, v)?,
                    (Some("weights"), "level") => w.level_coeff = value(key, v)?,
                    (Some("weights"), "var") => w.var_coeff = value(key, v)?,
                    (Some("weights"), "const") => w.const_coeff = value(key, v)?,
                    (Some("model"), "method") => {
                        cfg.cv.method = Method::parse(v).ok_or_else(|| Error::InvalidConfigValue {
                            key: key.into(),
                            value: v.into(),
                        })?
                    }
                    (Some("model"), "num_topics") => cfg.cv.num_topics = value(key, v)?,
                    (Some("model"), "gamma_threshold") => cfg.cv.lda_gamma_threshold = value(key, v)?,
                    (Some("model"), "iterations") => cfg.cv.lda_iterations = value(key, v)?,
                    (Some("model"), "passes") => cfg.cv.lda_passes = value(key, v)?,
                    (Some("model"), "lsi_oversample") => cfg.cv.lsi.oversample = value(key, v)?,
                    (Some("model"), "lsi_power_iterations") => cfg.cv.lsi.power_iterations = value(key, v)?,
                    (Some("model"), "lsi_exact_threshold") => cfg.cv.lsi.exact_threshold = value(key, v)?,
                    (Some("evaluation"), "folds") => cfg.cv.folds = value(key, v)?,
                    (Some("evaluation"), "reruns") => cfg.cv.reruns = value(key, v)?,
                    (Some("evaluation"), "seed") => cfg.cv.base_seed = value(key, v)?,
                    (Some("evaluation"), "include_diagonal") => cfg.cv.include_diagonal = flag(key, v)?,
                    (Some("output"), "bow_debug") => cfg.bow_debug = flag(key, v)?,
                    (s, k) => return Err(unknown(s, k)),
                }
            }
        }
        if cfg.id.is_empty() {
            return Err(Error::InvalidConfigValue {
                key: "id".into(),
                value: String::new(),
            });
        }
        cfg.cv.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn label(&self) -> RowLabel {
        RowLabel {
            config_id: self.id.clone(),
            representation: self.cv.representation.label(),
            method: self.cv.method.name().into(),
            topics: self.cv.num_topics,
        }
    }
}

/// Reads a synthetic corpus spec from a `[synth]` section whose keys are
/// the [`SynthSpec`] field names.
pub fn parse_synth_spec(text: &str) -> Result<SynthSpec> {
    let ini = parse_ini(text)?;
    let mut s = SynthSpec::default();
    for (section, props) in ini.iter() {
        for (key, v) in props.iter() {
            match (section, key) {
                (Some("synth"), "num_categories") => s.num_categories = value(key, v)?,
                (Some("synth"), "docs_per_category") => s.docs_per_category = value(key, v)?,
                (Some("synth"), "vocab_size_per_category") => s.vocab_size_per_category = value(key, v)?,
                (Some("synth"), "vocab_overlap") => s.vocab_overlap = value(key, v)?,
                (Some("synth"), "words_per_doc") => s.words_per_doc = value(key, v)?,
                (Some("synth"), "formulae_per_doc") => s.formulae_per_doc = value(key, v)?,
                (Some("synth"), "formula_notation_overlap") => s.formula_notation_overlap = value(key, v)?,
                (Some("synth"), "seed") => s.seed = value(key, v)?,
                (sec, k) => return Err(unknown(sec, k)),
            }
        }
    }
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone)]
pub struct IngestSummary {
    pub stats: LoadStats,
    pub kept: usize,
    /// `(id, reason)` for every excluded document.
    pub excluded: Vec<(String, String)>,
}

/// Loads, parses and filters a corpus directory.
pub fn ingest(paths: &CorpusPaths) -> Result<(Vec<Document>, IngestSummary)> {
    let metadata = read_metadata(&paths.metadata())?;
    let msc = MscSpec::read(&paths.msc())?;
    let excluded: Vec<(String, String)> = metadata
        .iter()
        .filter_map(|r| code_exclusion(&r.msc_codes, &msc).map(|why| (r.id.clone(), why.to_string())))
        .collect();
    let (docs, stats) = load_corpus(&paths.dir, &metadata)?;
    let docs = filter_corpus(docs, &msc);
    let summary = IngestSummary {
        stats,
        kept: docs.len(),
        excluded,
    };
    Ok((docs, summary))
}

fn eligible(paths: &CorpusPaths) -> Result<Vec<MetadataRecord>> {
    let msc = MscSpec::read(&paths.msc())?;
    Ok(read_metadata(&paths.metadata())?
        .into_iter()
        .filter(|r| code_exclusion(&r.msc_codes, &msc).is_none())
        .collect())
}

/// Shuffles the ids of the documents that pass the corpus filter.
pub fn shuffle_corpus(paths: &CorpusPaths, seed: u64) -> Result<CorpusOrdering> {
    let ids: Vec<String> = eligible(paths)?.into_iter().map(|r| r.id).collect();
    shuffle_once(&ids, seed)
}

/// Runs one experiment and writes `report.csv`, `curve-*.tsv`,
/// `matrix-*.png`, the raw `matrix-*.bin` with its `order-*.tsv`, and
/// optionally `bow-debug-*.tsv` into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<EvalReport> {
    let ordering = CorpusOrdering::load(&config.corpus.ordering())?;
    let (docs, summary) = ingest(&config.corpus)?;
    log::info!(
        "{}: {} documents, {} formulae, {} kept",
        config.id,
        summary.stats.documents,
        summary.stats.formulae,
        summary.kept
    );
    let cv = cross_validate(&docs, &ordering, &config.cv)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    for d in &cv.details {
        let stem = format!("{}-{}-{}", config.id, d.fold, d.rerun);
        emit_pr_tsv(&d.curve, &out.join(format!("curve-{stem}.tsv")))?;
        let boundaries = crate::eval::reference_matrix(&d.msc_codes).boundaries();
        render_matrix(&d.matrix, &boundaries).save_png(&out.join(format!("matrix-{stem}.png")))?;
        d.matrix.save(&out.join(format!("matrix-{stem}.bin")))?;
        let order: String = d
            .matrix
            .doc_ids()
            .iter()
            .zip(&d.msc_codes)
            .map(|(id, c)| format!("{id}\t{c}\n"))
            .collect();
        let p = out.join(format!("order-{stem}.tsv"));
        fs::write(&p, order).map_err(|e| Error::io(&p, e))?;
    }
    if config.bow_debug {
        let mut text = String::new();
        for (id, bow) in &cv.bows {
            for line in bow.debug_dump().lines() {
                text.push_str(id);
                text.push('\t');
                text.push_str(line);
                text.push('\n');
            }
        }
        let p = out.join(format!("bow-debug-{}.tsv", config.id));
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    let p = out.join("report.csv");
    let file = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
    cv.report.write_csv(&config.label(), file)?;
    Ok(cv.report)
}

#[derive(Debug)]
pub struct SuiteRow {
    pub label: RowLabel,
    pub outcome: Result<EvalReport>,
}

/// Runs every configuration into `out/<id>/` and writes `out/suite.csv`,
/// aggregate rows ranked by mean break-even F1 with failed runs last.
pub fn run_suite(configs: &[ExperimentConfig], out: &Path) -> Result<Vec<SuiteRow>> {
    let mut seen = std::collections::HashSet::new();
    for c in configs {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::DuplicateConfigId(c.id.clone()));
        }
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut rows: Vec<SuiteRow> = configs
        .iter()
        .map(|c| {
            let outcome = run_experiment(c, &out.join(&c.id));
            if let Err(e) = &outcome {
                log::error!("{} failed: {e}", c.id);
            }
            SuiteRow {
                label: c.label(),
                outcome,
            }
        })
        .collect();
    let key = |r: &SuiteRow| r.outcome.as_ref().map(|rep| rep.f1.mean).unwrap_or(f64::NEG_INFINITY);
    rows.sort_by(|a, b| key(b).total_cmp(&key(a)).then_with(|| a.label.config_id.cmp(&b.label.config_id)));

    let p = out.join("suite.csv");
    let file = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(REPORT_COLUMNS)?;
    for r in &rows {
        match &r.outcome {
            Ok(rep) => w.write_record(rep.aggregate_row(&r.label))?,
            Err(e) => {
                let l = &r.label;
                let mut row = vec![
                    l.config_id.clone(),
                    l.representation.clone(),
                    l.method.clone(),
                    l.topics.to_string(),
                    format!("failed: {e}"),
                ];
                row.resize(REPORT_COLUMNS.len(), String::new());
                w.write_record(&row)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(&p, e))?;
    Ok(rows)
}

#[derive(Debug, Parser)]
#[command(name = "stemsim", version, about = "Math-aware document similarity benchmark")]
pub struct Cli {
    /// Log verbosity: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    pub log: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and filter a corpus, writing the kept metadata and exclusions.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus.
    Synth {
        /// File with a `[synth]` section.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a seeded random ordering of the filtered corpus.
    Shuffle {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to `<corpus>/ordering.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several experiments and rank them.
    Suite {
        #[arg(long, num_args = 1..)]
        config: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a saved similarity matrix as PNG.
    Render {
        /// `matrix-*.bin` written by `run`.
        matrix: PathBuf,
        /// `order-*.tsv` with the MSC code of every row; region separators
        /// are drawn when given.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub ordering: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(dir) = &self.corpus {
            cfg.corpus = CorpusPaths {
                ordering: cfg.corpus.ordering.take(),
                ..CorpusPaths::new(dir)
            };
        }
        if let Some(o) = &self.ordering {
            cfg.corpus.ordering = Some(o.clone());
        }
        if let Some(j) = self.jobs {
            cfg.cv.jobs = j;
        }
        if let Some(s) = self.seed {
            cfg.cv.base_seed = s;
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { corpus, out } => {
            let (docs, summary) = ingest(&CorpusPaths::new(&corpus))?;
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            let kept: Vec<MetadataRecord> = docs
                .iter()
                .map(|d| MetadataRecord {
                    id: d.id.clone(),
                    msc_codes: d.msc_codes.clone(),
                    title: d.title.clone(),
                })
                .collect();
            let p = out.join("metadata.tsv");
            fs::write(&p, crate::ingest::write_metadata(&kept)).map_err(|e| Error::io(&p, e))?;
            let p = out.join("exclusions.tsv");
            let text: String = summary.excluded.iter().map(|(id, why)| format!("{id}\t{why}\n")).collect();
            fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
            println!(
                "{} documents, {} formulae, {} parse warnings, {} kept",
                summary.stats.documents, summary.stats.formulae, summary.stats.warnings, summary.kept
            );
        }
        Command::Synth { config, out, seed } => {
            let mut spec = match config {
                Some(p) => parse_synth_spec(&fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?)?,
                None => SynthSpec::default(),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            let corpus = generate_to(&spec, &out)?;
            println!("{} documents written to {}", corpus.documents.len(), out.display());
        }
        Command::Shuffle { corpus, seed, out } => {
            let paths = CorpusPaths::new(&corpus);
            let ordering = shuffle_corpus(&paths, seed)?;
            let out = out.unwrap_or_else(|| paths.ordering());
            ordering.save(&out)?;
            println!("{} ids written to {}", ordering.ordered_ids.len(), out.display());
        }
        Command::Run { config, overrides, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            overrides.apply(&mut cfg);
            let report = run_experiment(&cfg, &out)?;
            println!(
                "{}: break-even F1 {:.4} (var {:.6}), max F1 {:.4}",
                cfg.id, report.f1.mean, report.f1.variance, report.max_f1.mean
            );
        }
        Command::Suite { config, overrides, out } => {
            let configs = config
                .iter()
                .map(|p| {
                    let mut c = ExperimentConfig::load(p)?;
                    overrides.apply(&mut c);
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            for row in run_suite(&configs, &out)? {
                match row.outcome {
                    Ok(r) => println!("{:<24} {:.4}", row.label.config_id, r.f1.mean),
                    Err(e) => println!("{:<24} failed: {e}", row.label.config_id),
                }
            }
        }
        Command::Render { matrix, order, out } => {
            let m = crate::eval::SimilarityMatrix::load(&matrix)?;
            let boundaries = match order {
                Some(p) => {
                    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                    let codes: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap_or("")).collect();
                    crate::eval::reference_matrix(&codes).boundaries()
                }
                None => Vec::new(),
            };
            render_matrix(&m, &boundaries).save_png(&out)?;
        }
    }
    Ok(())
}

/// Entry point of the `stemsim` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

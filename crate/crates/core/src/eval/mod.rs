//! Similarity evaluation against the MSC reference: the block-diagonal
//! perfect matrix, threshold sweeps, break-even and maximum F1, and the
//! cross-validation driver.

mod cv;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, CrossValidation, CvConfig, Method, RunDetail};

use crate::error::{Error, Result};
use crate::ingest::msc_prefix;

/// Dense `n x n` similarity values over an ordered document list.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    doc_ids: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(doc_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = doc_ids.len();
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {n}x{n} matrix",
                values.len()
            )));
        }
        Ok(SimilarityMatrix { doc_ids, values })
    }

    /// Matrix without document ids, named by position.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), values)
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Binary export: a text line `n <N>` followed by `N*N` little-endian
    /// `f32` values in row-major order.
    pub fn to_f32_bytes(&self) -> Vec<u8> {
        let mut out = format!("n {}\n", self.len()).into_bytes();
        for v in &self.values {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_f32_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("similarity matrix file: {m}"));
        let newline = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| bad("missing header"))?;
        let header = std::str::from_utf8(&bytes[..newline]).map_err(|_| bad("header is not text"))?;
        let n: usize = header
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("expected `n <N>` header"))?;
        let body = &bytes[newline + 1..];
        if body.len() != n * n * 4 {
            return Err(bad("payload size does not match header"));
        }
        let values = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        Self::from_values(n, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_f32_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_f32_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Indices sorting `(id, msc)` pairs by MSC code, then id.
pub fn msc_order<S: AsRef<str>>(ids: &[S], codes: &[S]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| {
        codes[a]
            .as_ref()
            .cmp(codes[b].as_ref())
            .then_with(|| ids[a].as_ref().cmp(ids[b].as_ref()))
    });
    idx
}

/// The perfect similarity matrix: 1 inside the diagonal blocks of documents
/// sharing a top-level MSC category, 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceMatrix {
    prefixes: Vec<String>,
}

impl ReferenceMatrix {
    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.prefixes[i] == self.prefixes[j]
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let n = self.len();
        (0..n * n).map(|c| self.get(c / n, c % n) as u8).collect()
    }

    /// Positions where the category changes, i.e. the first index of every
    /// region but the first.
    pub fn boundaries(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| self.prefixes[i] != self.prefixes[i - 1])
            .collect()
    }
}

/// Builds the reference over MSC-ordered codes.
pub fn reference_matrix<S: AsRef<str>>(ordered_codes: &[S]) -> ReferenceMatrix {
    ReferenceMatrix {
        prefixes: ordered_codes
            .iter()
            .map(|c| msc_prefix(c.as_ref()).to_string())
            .collect(),
    }
}

/// `1` where `s >= t`.
pub fn binarize(values: &[f64], t: f64) -> Vec<u8> {
    values.iter().map(|&s| (s >= t) as u8).collect()
}

/// Flattens both matrices cell by cell, optionally leaving out the diagonal.
pub fn flatten(
    matrix: &SimilarityMatrix,
    reference: &ReferenceMatrix,
    include_diagonal: bool,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = matrix.len();
    if reference.len() != n {
        return Err(Error::InvalidArgument(format!(
            "reference is {}x{0}, similarities {n}x{n}",
            reference.len()
        )));
    }
    let mut sims = Vec::with_capacity(n * n);
    let mut rel = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j && !include_diagonal {
                continue;
            }
            sims.push(matrix.get(i, j));
            rel.push(reference.get(i, j));
        }
    }
    Ok((sims, rel))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

impl CurvePoint {
    pub fn f1(&self) -> f64 {
        f1_micro(self.precision, self.recall)
    }
}

/// Precision/recall at every distinct similarity value, thresholds strictly
/// decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<CurvePoint>,
}

/// Micro-averaged precision/recall sweep over all cells.
pub fn pr_curve(similarities: &[f64], reference: &[bool]) -> Result<PrCurve> {
    if similarities.len() != reference.len() {
        return Err(Error::InvalidArgument("similarity and reference lengths differ".into()));
    }
    let positives = reference.iter().filter(|&&r| r).count();
    if positives == 0 {
        return Err(Error::NoRelevantCells);
    }
    let mut cells: Vec<(f64, bool)> = similarities.iter().copied().zip(reference.iter().copied()).collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < cells.len() {
        let t = cells[i].0;
        while i < cells.len() && cells[i].0 == t {
            if cells[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(CurvePoint {
            threshold: t,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(PrCurve { points })
}

pub fn f1_micro(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakEven {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// False when precision and recall never cross and the closest point
    /// was taken instead.
    pub crossed: bool,
}

/// Point where precision equals recall.
///
/// The crossing is interpolated linearly in confusion counts between the two
/// adjacent curve points that bracket it: true positives and predicted
/// positives, both relative to the number of relevant cells, move linearly
/// and `p = r` holds where predicted positives equal relevant cells. F1 is
/// monotone along such a segment, so the result never exceeds [`max_f1`].
/// Points without true positives are skipped.
pub fn break_even(curve: &PrCurve) -> Result<BreakEven> {
    let pts: Vec<&CurvePoint> = curve.points.iter().filter(|p| p.recall > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::Empty("precision/recall curve"));
    }
    let at = |threshold: f64, precision: f64, recall: f64, crossed: bool| BreakEven {
        threshold,
        precision,
        recall,
        f1: f1_micro(precision, recall),
        crossed,
    };
    // predicted positives over relevant cells
    let predicted = |p: &CurvePoint| p.recall / p.precision;
    for (i, p) in pts.iter().enumerate() {
        let d = p.precision - p.recall;
        if d == 0.0 {
            return Ok(at(p.threshold, p.precision, p.recall, true));
        }
        if i > 0 {
            let q = pts[i - 1];
            let dq = q.precision - q.recall;
            if dq.signum() != d.signum() {
                let (qa, qb) = (predicted(q), predicted(p));
                let lambda = (1.0 - qa) / (qb - qa);
                let lerp = |a: f64, b: f64| a + lambda * (b - a);
                let value = lerp(q.recall, p.recall);
                return Ok(at(lerp(q.threshold, p.threshold), value, value, true));
            }
        }
    }
    let closest = pts
        .iter()
        .min_by(|a, b| (a.precision - a.recall).abs().total_cmp(&(b.precision - b.recall).abs()))
        .expect("nonempty");
    log::warn!("precision and recall never cross; using the closest point");
    Ok(at(closest.threshold, closest.precision, closest.recall, false))
}

/// Highest F1 on the curve, ties resolved towards the higher threshold.
pub fn max_f1(curve: &PrCurve) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for p in &curve.points {
        let f = p.f1();
        if best.map(|(_, b)| f > b).unwrap_or(true) {
            best = Some((p.threshold, f));
        }
    }
    best.ok_or(Error::Empty("precision/recall curve"))
}

/// Mean and population variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub variance: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Aggregate {
        if values.is_empty() {
            return Aggregate {
                mean: f64::NAN,
                variance: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Aggregate { mean, variance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fold: usize,
    pub rerun: usize,
    pub break_even: BreakEven,
    pub max_f1_threshold: f64,
    pub max_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub runs: Vec<RunRecord>,
    pub threshold: Aggregate,
    pub precision: Aggregate,
    pub recall: Aggregate,
    pub f1: Aggregate,
    pub max_f1: Aggregate,
}

impl EvalReport {
    pub fn from_runs(runs: Vec<RunRecord>) -> EvalReport {
        let col = |f: fn(&RunRecord) -> f64| Aggregate::of(&runs.iter().map(f).collect::<Vec<_>>());
        EvalReport {
            threshold: col(|r| r.break_even.threshold),
            precision: col(|r| r.break_even.precision),
            recall: col(|r| r.break_even.recall),
            f1: col(|r| r.break_even.f1),
            max_f1: col(|r| r.max_f1),
            runs,
        }
    }
}

/// CSV columns of run and aggregate rows.
pub const REPORT_COLUMNS: [&str; 15] = [
    "config_id",
    "representation",
    "method",
    "topics",
    "row",
    "threshold_avg",
    "threshold_var",
    "precision_avg",
    "precision_var",
    "recall_avg",
    "recall_var",
    "f1_avg",
    "f1_var",
    "maxf1_avg",
    "maxf1_var",
];

/// Identifies the experiment a report row belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLabel {
    pub config_id: String,
    pub representation: String,
    pub method: String,
    pub topics: usize,
}

impl RowLabel {
    fn prefix(&self) -> Vec<String> {
        vec![
            self.config_id.clone(),
            self.representation.clone(),
            self.method.clone(),
            self.topics.to_string(),
        ]
    }
}

impl EvalReport {
    /// The aggregate row: means in `_avg`, population variances in `_var`.
    pub fn aggregate_row(&self, label: &RowLabel) -> Vec<String> {
        let mut row = label.prefix();
        row.push("aggregate".into());
        for a in [self.threshold, self.precision, self.recall, self.f1, self.max_f1] {
            row.push(format!("{:?}", a.mean));
            row.push(format!("{:?}", a.variance));
        }
        row
    }

    /// One row per run; run values go to the `_avg` columns and the `_var`
    /// columns stay empty.
    pub fn run_rows(&self, label: &RowLabel) -> Vec<Vec<String>> {
        self.runs
            .iter()
            .map(|r| {
                let mut row = label.prefix();
                row.push(format!("fold{}-rerun{}", r.fold, r.rerun));
                for v in [
                    r.break_even.threshold,
                    r.break_even.precision,
                    r.break_even.recall,
                    r.break_even.f1,
                    r.max_f1,
                ] {
                    row.push(format!("{v:?}"));
                    row.push(String::new());
                }
                row
            })
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, label: &RowLabel, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_COLUMNS)?;
        for row in self.run_rows(label) {
            w.write_record(&row)?;
        }
        w.write_record(self.aggregate_row(label))?;
        w.flush().map_err(|e| Error::io("report.csv", e))?;
        Ok(())
    }
}

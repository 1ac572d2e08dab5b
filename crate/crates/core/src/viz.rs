//! Grayscale rendering of similarity matrices and curve export.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{CurvePoint, PrCurve, SimilarityMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, one byte per pixel.
    pub pixels: Vec<u8>,
}

impl MatrixImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// 8-bit grayscale, non-interlaced PNG.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header()?;
            w.write_image_data(&self.pixels)?;
        }
        Ok(out)
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_png()?).map_err(|e| Error::io(path, e))
    }
}

/// `round(255 * ln(1 + 255 s) / ln 256)`, with `s` clamped to `[0, 1]`.
pub fn brightness(s: f64) -> u8 {
    let s = if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) };
    (255.0 * (255.0 * s).ln_1p() / 256f64.ln()).round() as u8
}

/// Draws the matrix with a white row and column before every index listed
/// in `boundaries` (the first index of each region after the first).
pub fn render_matrix(matrix: &SimilarityMatrix, boundaries: &[usize]) -> MatrixImage {
    let n = matrix.len();
    let mut cuts: Vec<usize> = boundaries.iter().copied().filter(|&b| b > 0 && b < n).collect();
    cuts.sort_unstable();
    cuts.dedup();
    // pixel position of every matrix index
    let mut pos = Vec::with_capacity(n);
    let mut shift = 0;
    for i in 0..n {
        if cuts.get(shift) == Some(&i) {
            shift += 1;
        }
        pos.push(i + shift);
    }
    let size = n + cuts.len();
    let mut pixels = vec![255u8; size * size];
    for i in 0..n {
        for j in 0..n {
            pixels[pos[i] * size + pos[j]] = brightness(matrix.get(i, j));
        }
    }
    MatrixImage {
        width: size,
        height: size,
        pixels,
    }
}

/// Writes a curve as `threshold<TAB>precision<TAB>recall<TAB>f1` lines under
/// a header.
pub fn write_pr_tsv<W: std::io::Write>(curve: &PrCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "threshold\tprecision\trecall\tf1")?;
    for p in &curve.points {
        writeln!(out, "{}\t{}\t{}\t{}", p.threshold, p.precision, p.recall, p.f1())?;
    }
    Ok(())
}

pub fn pr_tsv_string(curve: &PrCurve) -> String {
    let mut buf = Vec::new();
    write_pr_tsv(curve, &mut buf).expect("writing to a Vec");
    String::from_utf8(buf).expect("ASCII output")
}

pub fn read_pr_tsv(text: &str) -> Result<PrCurve> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let f: Vec<f64> = line
            .split('\t')
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format("curve.tsv", i + 1, e.to_string()))?;
        if f.len() != 4 {
            return Err(Error::format("curve.tsv", i + 1, "expected 4 columns"));
        }
        points.push(CurvePoint {
            threshold: f[0],
            precision: f[1],
            recall: f[2],
        });
    }
    Ok(PrCurve { points })
}

pub fn emit_pr_tsv(curve: &PrCurve, path: &Path) -> Result<()> {
    if curve.points.is_empty() {
        return Err(Error::Empty("precision/recall curve"));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_pr_tsv(curve, &mut f).map_err(|e| Error::io(path, e))?;
    f.flush().map_err(|e| Error::io(path, e))
}

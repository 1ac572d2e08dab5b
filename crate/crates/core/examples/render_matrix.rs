//! Writes a grayscale PNG of a block-structured similarity matrix.
//!
//! `cargo run --example render_matrix -- out.png`

use std::path::PathBuf;

use stemsim::eval::{reference_matrix, SimilarityMatrix};
use stemsim::viz::render_matrix;

fn main() -> stemsim::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "matrix.png".into()));
    let codes: Vec<String> = (0..60).map(|i| format!("{:02}A10", [5, 11, 35, 68][i / 15])).collect();
    let reference = reference_matrix(&codes);
    let n = codes.len();
    let values = (0..n * n)
        .map(|c| {
            let (i, j) = (c / n, c % n);
            let d = (i as f64 - j as f64).abs() / n as f64;
            if reference.get(i, j) { 1.0 - d } else { 0.05 * (1.0 - d) }
        })
        .collect();
    let matrix = SimilarityMatrix::from_values(n, values)?;
    let image = render_matrix(&matrix, &reference.boundaries());
    image.save_png(&out)?;
    println!("{}x{} image written to {}", image.width, image.height, out.display());
    Ok(())
}

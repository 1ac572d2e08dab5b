//! Precision/recall sweep, break-even point and maximum F1 for a hand-made
//! similarity matrix over three MSC regions.
//!
//! `cargo run --example evaluate_similarity`

use stemsim::eval::{break_even, flatten, max_f1, pr_curve, reference_matrix, SimilarityMatrix};
use stemsim::viz::pr_tsv_string;

fn main() -> stemsim::Result<()> {
    let codes = ["05C10", "05C40", "11A41", "11B39", "11N05", "68T50"];
    let n = codes.len();
    let reference = reference_matrix(&codes);
    // noisy version of the reference
    let values: Vec<f64> = (0..n * n)
        .map(|c| {
            let (i, j) = (c / n, c % n);
            let base = if reference.get(i, j) { 0.7 } else { 0.2 };
            let noise = ((i * 7 + j * 7 + i * j) % 5) as f64 * 0.08;
            if i == j { 1.0 } else { base + noise }
        })
        .collect();
    // keep it symmetric
    let values: Vec<f64> = (0..n * n).map(|c| values[c].max(values[(c % n) * n + c / n])).collect();
    let matrix = SimilarityMatrix::from_values(n, values)?;

    let (sims, rel) = flatten(&matrix, &reference, true)?;
    let curve = pr_curve(&sims, &rel)?;
    print!("{}", pr_tsv_string(&curve));
    let be = break_even(&curve)?;
    let (t, f1) = max_f1(&curve)?;
    println!("\nbreak-even: t={:.3} p=r={:.3} F1={:.3}", be.threshold, be.precision, be.f1);
    println!("max F1:     t={t:.3} F1={f1:.3}");
    Ok(())
}

//! The full benchmark on a generated corpus: text-only and MTerm-only
//! TfIdf-LSI runs under 2-fold cross-validation with 4 reruns.
//!
//! `cargo run --release --example synth_benchmark`

use stemsim::eval::{cross_validate, CvConfig, Method};
use stemsim::ingest::{parse_document, shuffle_once, Document};
use stemsim::synth::{generate, SynthSpec};
use stemsim::tokenize::{MTermStrategy, RepresentationConfig};

fn main() -> stemsim::Result<()> {
    let spec = SynthSpec {
        formula_notation_overlap: 0.5,
        vocab_overlap: 0.5,
        ..SynthSpec::default()
    };
    let corpus = generate(&spec)?;
    let docs = corpus
        .documents
        .iter()
        .zip(&corpus.metadata)
        .map(|((_, xhtml), record)| Ok(parse_document(xhtml.as_bytes(), record)?.document))
        .collect::<stemsim::Result<Vec<Document>>>()?;
    let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let ordering = shuffle_once(&ids, 2024)?;

    let runs = [
        ("text", RepresentationConfig::default()),
        (
            "mterms",
            RepresentationConfig {
                use_text: false,
                mterm_strategy: MTermStrategy::AllWeighted,
                ..Default::default()
            },
        ),
        (
            "text+top",
            RepresentationConfig {
                mterm_strategy: MTermStrategy::Top,
                ..Default::default()
            },
        ),
    ];
    println!("{:<10} {:>8} {:>10} {:>8}", "repr", "F1 avg", "F1 var", "max F1");
    for (name, representation) in runs {
        let config = CvConfig {
            representation,
            method: Method::TfIdfLsi,
            ..CvConfig::default()
        };
        let r = cross_validate(&docs, &ordering, &config)?.report;
        println!("{name:<10} {:>8.4} {:>10.2e} {:>8.4}", r.f1.mean, r.f1.variance, r.max_f1.mean);
    }
    Ok(())
}

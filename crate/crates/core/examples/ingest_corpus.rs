//! Loads a corpus directory (`metadata.tsv`, `msc.tsv`, `<id>.xhtml`),
//! applies the MSC filter and prints per-category statistics. Without an
//! argument a small synthetic corpus is generated first.
//!
//! `cargo run --example ingest_corpus -- [DIR]`

use std::collections::BTreeMap;
use std::path::PathBuf;

use stemsim::cli::{ingest, CorpusPaths};
use stemsim::ingest::msc_prefix;
use stemsim::synth::{generate_to, SynthSpec};

fn main() -> stemsim::Result<()> {
    let dir = match std::env::args().nth(1) {
        Some(d) => PathBuf::from(d),
        None => {
            let dir = std::env::temp_dir().join("stemsim-ingest-example");
            let spec = SynthSpec {
                docs_per_category: 10,
                ..SynthSpec::default()
            };
            generate_to(&spec, &dir)?;
            dir
        }
    };
    let (docs, summary) = ingest(&CorpusPaths::new(&dir))?;
    println!(
        "{} documents parsed, {} formulae, {} warnings, {} kept",
        summary.stats.documents, summary.stats.formulae, summary.stats.warnings, summary.kept
    );
    for (id, why) in &summary.excluded {
        println!("excluded {id}: {why}");
    }
    let mut per_prefix: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &docs {
        *per_prefix.entry(msc_prefix(d.msc())).or_default() += 1;
    }
    for (prefix, count) in per_prefix {
        println!("{prefix}: {count}");
    }
    Ok(())
}

//! LSI and LDA on a toy corpus with two obvious themes.
//!
//! `cargo run --release --example topic_models`

use stemsim::models::{
    build_dictionary, lda_train, lsi_train, pairwise_similarity, tfidf_transform, LdaOptions, LsiOptions,
    SimilarityIndex, TopicModel,
};
use stemsim::tokenize::{tokenize_text, BagOfWords};

const DOCS: [&str; 6] = [
    "graph vertex edge graph coloring vertex",
    "edge graph planar vertex degree",
    "vertex degree graph edge matching",
    "prime integer divisor prime modular",
    "integer modular prime residue divisor",
    "residue prime integer congruence modular",
];

fn main() -> stemsim::Result<()> {
    let bows: Vec<BagOfWords> = DOCS.iter().map(|d| tokenize_text(d).into_iter().collect()).collect();
    let dict = build_dictionary(&bows)?;
    let ids: Vec<String> = (0..DOCS.len()).map(|i| format!("d{i}")).collect();

    let tfidf: Vec<_> = bows.iter().map(|b| tfidf_transform(b, &dict)).collect();
    let lsi = TopicModel::Lsi(lsi_train(&tfidf, dict.len(), 2, 0, &LsiOptions::default()));
    report("TfIdf-LSI", &lsi, &tfidf, &ids)?;

    let counts: Vec<_> = bows.iter().map(|b| dict.doc2bow(b)).collect();
    let opts = LdaOptions {
        num_topics: 2,
        passes: 50,
        seed: 1,
        ..LdaOptions::default()
    };
    let lda = lda_train(&counts, dict.len(), &opts)?;
    for (k, row) in lda.topic_word().iter().enumerate() {
        let mut top: Vec<(usize, f64)> = row.iter().copied().enumerate().collect();
        top.sort_by(|a, b| b.1.total_cmp(&a.1));
        let words: Vec<&str> = top.iter().take(4).map(|&(i, _)| dict.token(i).unwrap_or("?")).collect();
        println!("LDA topic {k}: {}", words.join(" "));
    }
    report("LDA", &TopicModel::Lda(lda), &counts, &ids)
}

fn report(name: &str, model: &TopicModel, docs: &[stemsim::models::DocVector], ids: &[String]) -> stemsim::Result<()> {
    let vectors = docs.iter().map(|d| model.transform(d)).collect();
    let sims = pairwise_similarity(&SimilarityIndex::new(ids.to_vec(), vectors)?);
    println!("\n{name} cosine similarities:");
    for i in 0..sims.len() {
        let row: Vec<String> = (0..sims.len()).map(|j| format!("{:.2}", sims.get(i, j))).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}

//! Bags of words for one document under several representations.
//!
//! `cargo run --example bag_of_words`

use stemsim::ingest::{parse_document, MetadataRecord};
use stemsim::mathrep::WeightScheme;
use stemsim::tokenize::{build_bow, MTermStrategy, RepresentationConfig};

const XHTML: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<html xmlns="http://www.w3.org/1999/xhtml">
<head><title>Sums of powers</title></head>
<body>
<p>Consider the expression
<math xmlns="http://www.w3.org/1998/Math/MathML"><semantics>
  <mrow><mi>a</mi><mo>+</mo><msup><mi>b</mi><mrow><mn>2</mn><mo>+</mo><mi>c</mi></mrow></msup></mrow>
  <annotation encoding="application/x-tex">a + b^{2 + c}</annotation>
</semantics></math>
for integer exponents.</p>
</body>
</html>"#;

fn main() -> stemsim::Result<()> {
    let record = MetadataRecord {
        id: "demo".into(),
        msc_codes: vec!["11B57".into()],
        title: String::new(),
    };
    let doc = parse_document(XHTML.as_bytes(), &record)?.document;
    let scheme = WeightScheme::default();

    let configs = [
        ("text only", RepresentationConfig::default()),
        (
            "TeX only",
            RepresentationConfig {
                use_text: false,
                use_tex: true,
                ..Default::default()
            },
        ),
        (
            "text + top MTerms",
            RepresentationConfig {
                mterm_strategy: MTermStrategy::Top,
                ..Default::default()
            },
        ),
        (
            "all weighted MTerms",
            RepresentationConfig {
                use_text: false,
                mterm_strategy: MTermStrategy::AllWeighted,
                ..Default::default()
            },
        ),
    ];
    for (name, config) in configs {
        let bow = build_bow(&doc, &config, &scheme);
        println!("== {name} ({} distinct, {} total)", bow.len(), bow.total());
        print!("{}", bow.debug_dump());
    }
    Ok(())
}

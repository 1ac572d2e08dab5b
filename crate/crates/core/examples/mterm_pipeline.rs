//! From MathML to canonical, weighted MTerms.
//!
//! `cargo run --example mterm_pipeline`

use stemsim::ingest::parse_math;
use stemsim::mathrep::{canonical_order, encode_mterm, mterm_dump, weighted_mterms, WeightScheme};

const MATHML: &str = r#"<math xmlns="http://www.w3.org/1998/Math/MathML">
  <semantics>
    <mrow><mi>a</mi><mo>+</mo><msup><mi>b</mi><mrow><mi>c</mi><mo>+</mo><mn>2</mn></mrow></msup></mrow>
    <annotation encoding="application/x-tex">a + b^{c+2}</annotation>
  </semantics>
</math>"#;

fn main() -> stemsim::Result<()> {
    let formula = parse_math(MATHML)?;
    let tree = formula.tree.expect("presentation markup parsed");
    println!("TeX:        {}", formula.tex);
    println!("as parsed:  {}", encode_mterm(&tree)?);
    println!("canonical:  {}", encode_mterm(&canonical_order(&tree))?);

    let scheme = WeightScheme::default();
    let terms = weighted_mterms(&tree, &scheme)?;
    println!("\n{} weighted MTerms (lambda={}, alpha={}, beta={}):", terms.len(), scheme.level_coeff, scheme.var_coeff, scheme.const_coeff);
    print!("{}", mterm_dump(&terms));
    Ok(())
}

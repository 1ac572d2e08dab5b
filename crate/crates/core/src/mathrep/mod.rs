//! Formula trees to weighted MTerms.
//!
//! A formula goes through four stages: operands of commutative operators are
//! put in canonical order, subformulae are derived with their distance from
//! the original, every (sub)formula gets a variable-generalized and a
//! variable+constant-generalized twin, and each resulting tree is serialised
//! and weighted.
//!
//! ```
//! use stemsim::mathrep::{MathNode, WeightScheme, weighted_mterms};
//!
//! let tree = MathNode::row(vec![
//!     MathNode::ident("a"),
//!     MathNode::op("+"),
//!     MathNode::sup(
//!         MathNode::ident("b"),
//!         MathNode::row(vec![MathNode::ident("c"), MathNode::op("+"), MathNode::num("2")]),
//!     ),
//! ]);
//! let terms = weighted_mterms(&tree, &WeightScheme::default()).unwrap();
//! assert_eq!(terms[0].mterm, "R(I(a)O(+)J(I(b)R(I(c)O(+)N(2))))");
//! assert_eq!(terms[0].mias_weight, 0.125);
//! ```

mod canon;
mod derive;
mod node;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use canon::{canonical_order, COMMUTATIVE_OPERATORS};
pub use derive::{derive_subformulae, generalize, DeriveOptions};
pub use node::{encode_mterm, MathNode, NodeKind};

use crate::error::{Error, Result};
use crate::ingest::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Top,
    Subformula,
    VarGeneralized,
    VarConstGeneralized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedMTerm {
    pub mterm: String,
    pub mias_weight: f64,
    pub origin: Origin,
    pub depth: usize,
}

/// Multiplicative weighting of derived MTerms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScheme {
    /// Factor applied per subformula derivation level.
    pub level_coeff: f64,
    /// Factor for replacing identifiers with `id`.
    pub var_coeff: f64,
    /// Additional factor for replacing numbers with `const`.
    pub const_coeff: f64,
    pub derive: DeriveOptions,
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme {
            level_coeff: 0.5,
            var_coeff: 0.8,
            const_coeff: 0.8,
            derive: DeriveOptions::default(),
        }
    }
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("level_coeff", self.level_coeff),
            ("var_coeff", self.var_coeff),
            ("const_coeff", self.const_coeff),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Weights a derived subformula set of one top formula.
///
/// With `D` the largest depth in the set the top formula weighs `2^-D`, a
/// subformula at depth `d` weighs `2^-D * level^d`, and the generalized
/// twins are scaled by `var` and `var * const`. When several entries
/// serialise identically, the heaviest one survives. The result is sorted by
/// descending weight, ties by MTerm string.
pub fn assign_weights(
    subformulae: &[(MathNode, usize)],
    scheme: &WeightScheme,
) -> Result<Vec<WeightedMTerm>> {
    scheme.validate()?;
    let max_depth = subformulae
        .iter()
        .map(|(_, d)| *d)
        .max()
        .ok_or(Error::Empty("subformula set"))?;
    let top = 0.5f64.powi(max_depth as i32);

    let mut best: HashMap<String, WeightedMTerm> = HashMap::new();
    let mut offer = |candidate: WeightedMTerm| match best.get_mut(&candidate.mterm) {
        Some(existing) => {
            let better = candidate.mias_weight > existing.mias_weight
                || (candidate.mias_weight == existing.mias_weight
                    && (candidate.depth, candidate.origin) < (existing.depth, existing.origin));
            if better {
                *existing = candidate;
            }
        }
        None => {
            best.insert(candidate.mterm.clone(), candidate);
        }
    };

    for (tree, depth) in subformulae {
        let weight = top * scheme.level_coeff.powi(*depth as i32);
        let (var, var_const) = generalize(tree);
        offer(WeightedMTerm {
            mterm: tree.encode()?,
            mias_weight: weight,
            origin: if *depth == 0 { Origin::Top } else { Origin::Subformula },
            depth: *depth,
        });
        offer(WeightedMTerm {
            mterm: var.encode()?,
            mias_weight: weight * scheme.var_coeff,
            origin: Origin::VarGeneralized,
            depth: depth + 1,
        });
        offer(WeightedMTerm {
            mterm: var_const.encode()?,
            mias_weight: weight * scheme.var_coeff * scheme.const_coeff,
            origin: Origin::VarConstGeneralized,
            depth: depth + 2,
        });
    }

    let mut out: Vec<WeightedMTerm> = best.into_values().collect();
    sort_by_weight(&mut out);
    Ok(out)
}

pub(crate) fn sort_by_weight(terms: &mut [WeightedMTerm]) {
    terms.sort_by(|a, b| {
        b.mias_weight
            .total_cmp(&a.mias_weight)
            .then_with(|| a.mterm.cmp(&b.mterm))
    });
}

/// Full pipeline for one presentation tree.
pub fn weighted_mterms(tree: &MathNode, scheme: &WeightScheme) -> Result<Vec<WeightedMTerm>> {
    tree.validate()?;
    let canon = canonical_order(tree);
    let derived = derive_subformulae(&canon, scheme.derive);
    assign_weights(&derived, scheme)
}

/// Weighted MTerms of a parsed formula; formulae without a presentation
/// tree yield nothing.
pub fn formula_to_weighted_mterms(formula: &Formula, scheme: &WeightScheme) -> Vec<WeightedMTerm> {
    let Some(tree) = &formula.tree else {
        log::warn!("formula `{}` has no presentation tree, no MTerms derived", formula.tex);
        return Vec::new();
    };
    match weighted_mterms(tree, scheme) {
        Ok(terms) => terms,
        Err(e) => {
            log::warn!("skipping formula `{}`: {e}", formula.tex);
            Vec::new()
        }
    }
}

/// One `w_m<TAB>mterm` line per entry.
pub fn mterm_dump(terms: &[WeightedMTerm]) -> String {
    let mut out = String::new();
    for t in terms {
        out.push_str(&format!("{}\t{}\n", t.mias_weight, t.mterm));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::node::tests::sample_formula;
    use super::*;

    fn formula_c_plus_2() -> MathNode {
        MathNode::row(vec![
            MathNode::ident("a"),
            MathNode::op("+"),
            MathNode::sup(
                MathNode::ident("b"),
                MathNode::row(vec![MathNode::ident("c"), MathNode::op("+"), MathNode::num("2")]),
            ),
        ])
    }

    #[test]
    fn top_weight_is_an_eighth() {
        let terms = weighted_mterms(&formula_c_plus_2(), &WeightScheme::default()).unwrap();
        let top: Vec<_> = terms.iter().filter(|t| t.origin == Origin::Top).collect();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].mterm, "R(I(a)O(+)J(I(b)R(I(c)O(+)N(2))))");
        assert_eq!(top[0].mias_weight, 0.125);
        assert_eq!(top[0].depth, 0);
        assert_eq!(terms[0], *top[0]);
    }

    #[test]
    fn same_set_from_either_operand_order() {
        let a = weighted_mterms(&formula_c_plus_2(), &WeightScheme::default()).unwrap();
        let b = weighted_mterms(&sample_formula(), &WeightScheme::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subformula_weight_follows_level() {
        let terms = weighted_mterms(&formula_c_plus_2(), &WeightScheme::default()).unwrap();
        let sup = terms
            .iter()
            .find(|t| t.mterm == "J(I(b)R(I(c)O(+)N(2)))")
            .unwrap();
        assert_eq!(sup.mias_weight, 0.0625);
        assert_eq!(sup.origin, Origin::Subformula);
        assert_eq!(sup.depth, 1);
        let var_top = terms
            .iter()
            .find(|t| t.mterm == "R(I(id)O(+)J(I(id)R(I(id)O(+)N(2))))")
            .unwrap();
        assert!((var_top.mias_weight - 0.1).abs() < 1e-15);
    }

    #[test]
    fn single_leaf() {
        let terms = weighted_mterms(&MathNode::ident("a"), &WeightScheme::default()).unwrap();
        let got: Vec<(&str, f64)> = terms.iter().map(|t| (t.mterm.as_str(), t.mias_weight)).collect();
        // the two generalized twins coincide; the heavier one is kept
        assert_eq!(got, vec![("I(a)", 1.0), ("I(id)", 0.8)]);
        assert_eq!(terms[1].origin, Origin::VarGeneralized);
    }

    #[test]
    fn number_leaf_var_twin_collapses_into_top() {
        let terms = weighted_mterms(&MathNode::num("2"), &WeightScheme::default()).unwrap();
        let got: Vec<(&str, f64, Origin)> = terms
            .iter()
            .map(|t| (t.mterm.as_str(), t.mias_weight, t.origin))
            .collect();
        assert_eq!(
            got,
            vec![("N(2)", 1.0, Origin::Top), ("N(const)", 0.8 * 0.8, Origin::VarConstGeneralized)]
        );
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(assign_weights(&[], &WeightScheme::default()).is_err());
    }

    #[test]
    fn scheme_bounds_are_checked() {
        let s = WeightScheme {
            level_coeff: 1.0,
            ..WeightScheme::default()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn missing_tree_yields_nothing() {
        let f = Formula {
            tex: "a+b".into(),
            tree: None,
        };
        assert!(formula_to_weighted_mterms(&f, &WeightScheme::default()).is_empty());
    }

    #[test]
    fn dump_format() {
        let terms = weighted_mterms(&MathNode::ident("a"), &WeightScheme::default()).unwrap();
        assert_eq!(mterm_dump(&terms), "1\tI(a)\n0.8\tI(id)\n");
    }
}

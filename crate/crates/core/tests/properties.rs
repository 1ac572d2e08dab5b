use proptest::prelude::*;

use stemsim::eval::{break_even, max_f1, pr_curve, reference_matrix};
use stemsim::ingest::shuffle_once;
use stemsim::mathrep::{canonical_order, encode_mterm, weighted_mterms, MathNode, NodeKind, Origin, WeightScheme};
use stemsim::tokenize::{tokenize_text, BagOfWords};
use stemsim::viz::brightness;

fn leaf() -> impl Strategy<Value = MathNode> {
    let value = prop_oneof![
        "[a-e]".prop_map(String::from),
        Just("(".to_string()),
        Just(")".to_string()),
        Just("\\".to_string()),
        Just("x)(".to_string()),
    ];
    (0..3usize, value, 0..10u32).prop_map(|(k, v, n)| match k {
        0 => MathNode::ident(v),
        1 => MathNode::num(n.to_string()),
        _ => MathNode::op(v),
    })
}

fn tree() -> impl Strategy<Value = MathNode> {
    leaf().prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..5).prop_map(MathNode::row),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MathNode::sup(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MathNode::frac(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MathNode::sub(a, b)),
            prop::collection::vec(inner, 0..3).prop_map(|c| MathNode::node(NodeKind::Other("mtable".into()), c)),
        ]
    })
}

/// Operands joined by one commutative operator.
fn commutative_row() -> impl Strategy<Value = (Vec<MathNode>, &'static str)> {
    (prop::collection::vec(tree().prop_filter("operand", |t| t.kind != NodeKind::Operator), 2..5), prop::sample::select(vec!["+", "*", "="]))
}

fn join(operands: &[MathNode], op: &str) -> MathNode {
    let mut children = Vec::new();
    for (i, o) in operands.iter().enumerate() {
        if i > 0 {
            children.push(MathNode::op(op));
        }
        children.push(o.clone());
    }
    MathNode::row(children)
}

proptest! {
    #[test]
    fn encoding_round_trips(t in tree()) {
        let s = encode_mterm(&t).unwrap();
        prop_assert_eq!(MathNode::decode(&s).unwrap(), t);
    }

    #[test]
    fn canonicalization_is_idempotent(t in tree()) {
        let once = canonical_order(&t);
        prop_assert_eq!(canonical_order(&once), once);
    }

    #[test]
    fn canonicalization_is_confluent((operands, op) in commutative_row(), seed in any::<u64>()) {
        let ids: Vec<usize> = (0..operands.len()).collect();
        let order = shuffle_once(&ids.iter().map(|i| i.to_string()).collect::<Vec<_>>(), seed).unwrap();
        let permuted: Vec<MathNode> = order.ordered_ids.iter().map(|i| operands[i.parse::<usize>().unwrap()].clone()).collect();
        prop_assert_eq!(
            encode_mterm(&canonical_order(&join(&operands, op))).unwrap(),
            encode_mterm(&canonical_order(&join(&permuted, op))).unwrap()
        );
    }

    #[test]
    fn weights_are_ranked(t in tree()) {
        let terms = weighted_mterms(&t, &WeightScheme::default()).unwrap();
        prop_assert!(!terms.is_empty());
        let top = terms.iter().find(|w| w.origin == Origin::Top).unwrap();
        for w in terms.windows(2) {
            prop_assert!(w[0].mias_weight >= w[1].mias_weight);
        }
        for w in &terms {
            prop_assert!(w.mias_weight > 0.0 && w.mias_weight <= top.mias_weight);
            // deeper entries never outweigh shallower ones of the same origin
            for v in &terms {
                if v.origin == w.origin && v.depth > w.depth {
                    prop_assert!(v.mias_weight < w.mias_weight);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        prop_assert!(terms.iter().all(|w| seen.insert(w.mterm.clone())));
    }

    #[test]
    fn pr_curve_is_monotone(cells in prop::collection::vec((0..20u8, any::<bool>()), 1..120)) {
        let s: Vec<f64> = cells.iter().map(|c| c.0 as f64 / 19.0).collect();
        let mut rel: Vec<bool> = cells.iter().map(|c| c.1).collect();
        rel[0] = true;
        let curve = pr_curve(&s, &rel).unwrap();
        for w in curve.points.windows(2) {
            prop_assert!(w[0].threshold > w[1].threshold);
            prop_assert!(w[0].recall <= w[1].recall);
        }
        for p in &curve.points {
            prop_assert!((0.0..=1.0).contains(&p.precision) && (0.0..=1.0).contains(&p.recall));
        }
        prop_assert_eq!(curve.points.last().unwrap().recall, 1.0);
        let be = break_even(&curve).unwrap();
        prop_assert!(max_f1(&curve).unwrap().1 >= be.f1);
    }

    #[test]
    fn reference_is_an_equivalence(mut codes in prop::collection::vec("[0-9]{2}[A-C][0-9]{2}", 1..25)) {
        codes.sort();
        let r = reference_matrix(&codes);
        let n = codes.len();
        for i in 0..n {
            prop_assert!(r.get(i, i));
            for j in 0..n {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
                for k in 0..n {
                    if r.get(i, j) && r.get(j, k) {
                        prop_assert!(r.get(i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_is_a_permutation(n in 0..200usize, seed in any::<u64>()) {
        let ids: Vec<String> = (0..n).map(|i| format!("doc{i}")).collect();
        let a = shuffle_once(&ids, seed).unwrap();
        prop_assert_eq!(&a, &shuffle_once(&ids, seed).unwrap());
        let mut sorted = a.ordered_ids.clone();
        sorted.sort();
        let mut expected = ids.clone();
        expected.sort();
        prop_assert_eq!(sorted, expected);
    }

    #[test]
    fn bag_counts_every_token(text in "[a-z ,.0-9]{0,200}") {
        let tokens = tokenize_text(&text);
        let bow: BagOfWords = tokens.iter().cloned().collect();
        prop_assert_eq!(bow.total(), tokens.len() as u64);
    }

    #[test]
    fn brightness_is_monotone(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(brightness(lo) <= brightness(hi));
    }
}

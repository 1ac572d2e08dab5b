//! Canonical ordering of commutative operands.

use std::cmp::Ordering;

use super::node::{MathNode, NodeKind};

/// Operators whose operands may be freely permuted. `\u{2062}` is the
/// invisible times MathML inserts for juxtaposition.
pub const COMMUTATIVE_OPERATORS: &[&str] = &["+", "*", "\u{2062}", "="];

/// Relations that make `=`-chains unsafe to reorder.
const RELATIONS: &[&str] = &[
    "<", ">", "\u{2264}", "\u{2265}", "\u{2260}", "\u{2261}", "\u{2248}", "\u{223c}", "\u{2208}",
    "\u{2209}", "\u{2282}", "\u{2286}", "\u{2283}", "\u{2287}", "\u{2192}", "\u{21a6}", "\u{21d2}",
    "\u{21d4}", ":", ",", ";", "|",
];

pub(crate) fn is_commutative(op: &MathNode) -> bool {
    op.is_operator() && COMMUTATIVE_OPERATORS.contains(&op.value.as_str())
}

/// Splits row children into the operand slices between operators. Leading,
/// trailing or doubled operators produce empty operands.
pub(crate) fn split_operands(children: &[MathNode]) -> (Vec<&[MathNode]>, Vec<&MathNode>) {
    let mut operands = Vec::new();
    let mut operators = Vec::new();
    let mut start = 0;
    for (i, child) in children.iter().enumerate() {
        if child.is_operator() {
            operands.push(&children[start..i]);
            operators.push(child);
            start = i + 1;
        }
    }
    operands.push(&children[start..]);
    (operands, operators)
}

fn kind_rank(nodes: &[MathNode]) -> u8 {
    match nodes {
        [single] => match single.kind {
            NodeKind::Identifier => 0,
            NodeKind::Number => 1,
            _ => 2,
        },
        _ => 2,
    }
}

#[derive(Clone)]
struct Keyed {
    rank: u8,
    encoded: String,
    nodes: Vec<MathNode>,
}

impl Keyed {
    fn new(nodes: Vec<MathNode>) -> Self {
        Keyed {
            rank: kind_rank(&nodes),
            encoded: nodes.iter().map(MathNode::encode_unchecked).collect(),
            nodes,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.encoded.cmp(&other.encoded))
    }
}

/// Sorts the operands of `nodes` when every operator among them is the same
/// commutative one. Returns `None` if the sequence must stay as it is.
fn sort_uniform_run(nodes: &[MathNode]) -> Option<Vec<MathNode>> {
    let (operands, operators) = split_operands(nodes);
    let first = *operators.first()?;
    if !is_commutative(first) || operators.iter().any(|op| op.value != first.value) {
        return None;
    }
    if operands.iter().any(|o| o.is_empty()) {
        return None;
    }
    let mut keyed: Vec<Keyed> = operands.iter().map(|o| Keyed::new(o.to_vec())).collect();
    keyed.sort_by(Keyed::cmp_key);
    let mut out = Vec::with_capacity(nodes.len());
    for (i, k) in keyed.into_iter().enumerate() {
        if i > 0 {
            out.push(first.clone());
        }
        out.extend(k.nodes);
    }
    Some(out)
}

fn reorder_row(children: Vec<MathNode>) -> Vec<MathNode> {
    let has_equals = children.iter().any(|c| c.is_operator() && c.value == "=");
    let only_equals = children
        .iter()
        .filter(|c| c.is_operator())
        .all(|c| c.value == "=");
    if !has_equals || only_equals {
        return sort_uniform_run(&children).unwrap_or(children);
    }
    if children
        .iter()
        .any(|c| c.is_operator() && RELATIONS.contains(&c.value.as_str()))
    {
        return children;
    }
    // Mixed row: sort inside each side of `=`, then the sides themselves.
    let (sides, _) = split_on_equals(&children);
    if sides.iter().any(|s| s.is_empty()) {
        return children;
    }
    let mut keyed: Vec<Keyed> = sides
        .into_iter()
        .map(|side| Keyed::new(sort_uniform_run(side).unwrap_or_else(|| side.to_vec())))
        .collect();
    keyed.sort_by(Keyed::cmp_key);
    let mut out = Vec::with_capacity(children.len());
    for (i, k) in keyed.into_iter().enumerate() {
        if i > 0 {
            out.push(MathNode::op("="));
        }
        out.extend(k.nodes);
    }
    out
}

fn split_on_equals(children: &[MathNode]) -> (Vec<&[MathNode]>, usize) {
    let mut sides = Vec::new();
    let mut start = 0;
    for (i, c) in children.iter().enumerate() {
        if c.is_operator() && c.value == "=" {
            sides.push(&children[start..i]);
            start = i + 1;
        }
    }
    sides.push(&children[start..]);
    let n = sides.len();
    (sides, n)
}

/// Normalises operand order inside every row, bottom-up. Idempotent.
pub fn canonical_order(tree: &MathNode) -> MathNode {
    let children: Vec<MathNode> = tree.children.iter().map(canonical_order).collect();
    let children = if tree.kind == NodeKind::Row {
        reorder_row(children)
    } else {
        children
    };
    MathNode {
        kind: tree.kind.clone(),
        value: tree.value.clone(),
        children,
    }
}

use std::collections::{HashSet, VecDeque};

use super::canon::split_operands;
use super::node::{MathNode, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Also emit multi-node operands of rows (e.g. an implicit product
    /// `2 x` between two `+`) as synthetic rows.
    pub operand_runs: bool,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions { operand_runs: true }
    }
}

/// Enumerates the subformulae of a canonically ordered tree together with
/// their derivation depth. The tree itself comes first at depth 0; every
/// distinct serialisation appears once, at its minimal depth.
pub fn derive_subformulae(tree: &MathNode, opts: DeriveOptions) -> Vec<(MathNode, usize)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back((tree.clone(), 0usize));
    while let Some((node, depth)) = queue.pop_front() {
        if !seen.insert(node.encode_unchecked()) {
            continue;
        }
        for child in derivation_children(&node, opts) {
            queue.push_back((child, depth + 1));
        }
        out.push((node, depth));
    }
    out
}

fn derivation_children(node: &MathNode, opts: DeriveOptions) -> Vec<MathNode> {
    let mut children: Vec<MathNode> = node
        .children
        .iter()
        .filter(|c| !c.is_operator())
        .cloned()
        .collect();
    if opts.operand_runs && node.kind == NodeKind::Row {
        let (operands, operators) = split_operands(&node.children);
        if !operators.is_empty() {
            children.extend(
                operands
                    .into_iter()
                    .filter(|o| o.len() > 1)
                    .map(|o| MathNode::row(o.to_vec())),
            );
        }
    }
    children
}

/// Replaces identifier values with `id` and, in the second tree, numbers
/// with `const`. Shape is preserved.
pub fn generalize(tree: &MathNode) -> (MathNode, MathNode) {
    (substitute(tree, false), substitute(tree, true))
}

fn substitute(node: &MathNode, constants: bool) -> MathNode {
    let value = match node.kind {
        NodeKind::Identifier => "id".to_string(),
        NodeKind::Number if constants => "const".to_string(),
        _ => node.value.clone(),
    };
    MathNode {
        kind: node.kind.clone(),
        value,
        children: node.children.iter().map(|c| substitute(c, constants)).collect(),
    }
}

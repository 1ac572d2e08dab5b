//! Presentation MathML to [`MathNode`].

use roxmltree::Node;

use crate::mathrep::{MathNode, NodeKind};

/// Elements that only style their content.
const TRANSPARENT: &[&str] = &["mstyle", "mpadded", "mphantom", "menclose"];

pub(crate) fn is_math_element(node: &Node) -> bool {
    node.is_element() && node.tag_name().name() == "math"
}

/// Extracts the TeX annotation of a `<math>` element, if any.
pub(crate) fn tex_annotation(math: &Node) -> Option<String> {
    math.descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "annotation")
        .find(|n| {
            n.attribute("encoding")
                .map(|e| e.to_ascii_lowercase().contains("tex"))
                .unwrap_or(false)
        })
        .map(|n| collect_text(&n).trim().to_string())
        .filter(|s| !s.is_empty())
}

/// Parses the presentation tree of a `<math>` element.
pub(crate) fn presentation_tree(math: &Node) -> Result<MathNode, String> {
    let mut children: Vec<Node> = element_children(math)
        .filter(|n| !is_annotation(n))
        .collect();
    if let [single] = children.as_slice() {
        if single.tag_name().name() == "semantics" {
            children = element_children(single).filter(|n| !is_annotation(n)).take(1).collect();
        }
    }
    match children.as_slice() {
        [] => Err("math element has no presentation content".to_string()),
        [single] => convert(single),
        many => Ok(MathNode::row(many.iter().map(convert).collect::<Result<_, _>>()?)),
    }
}

fn is_annotation(n: &Node) -> bool {
    matches!(n.tag_name().name(), "annotation" | "annotation-xml")
}

fn element_children<'a, 'i>(n: &Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    n.children().filter(|c| c.is_element())
}

pub(crate) fn collect_text(n: &Node) -> String {
    n.descendants()
        .filter(|d| d.is_text())
        .filter_map(|d| d.text())
        .collect()
}

fn leaf(kind: NodeKind, n: &Node) -> Result<MathNode, String> {
    let text = collect_text(n);
    let value = text.trim();
    if value.is_empty() {
        return Err(format!("empty <{}> element", n.tag_name().name()));
    }
    Ok(MathNode::leaf(kind, value))
}

fn fixed(kind: NodeKind, n: &Node, arity: usize) -> Result<MathNode, String> {
    let children: Vec<MathNode> = element_children(n).map(|c| convert(&c)).collect::<Result<_, _>>()?;
    if children.len() != arity {
        return Err(format!(
            "<{}> expects {arity} children, found {}",
            n.tag_name().name(),
            children.len()
        ));
    }
    Ok(MathNode::node(kind, children))
}

/// Children of an element with an inferred row: one child stays as is,
/// several are wrapped in a row.
fn inferred_row(n: &Node) -> Result<MathNode, String> {
    let mut children: Vec<MathNode> = element_children(n).map(|c| convert(&c)).collect::<Result<_, _>>()?;
    if children.len() == 1 {
        Ok(children.pop().unwrap())
    } else {
        Ok(MathNode::row(children))
    }
}

fn convert(n: &Node) -> Result<MathNode, String> {
    let name = n.tag_name().name();
    match name {
        "mi" => leaf(NodeKind::Identifier, n),
        "mo" => leaf(NodeKind::Operator, n),
        "mn" => leaf(NodeKind::Number, n),
        "mtext" | "ms" => leaf(NodeKind::Text, n),
        "mrow" => Ok(MathNode::row(
            element_children(n).map(|c| convert(&c)).collect::<Result<_, _>>()?,
        )),
        "msup" => fixed(NodeKind::Sup, n, 2),
        "msub" => fixed(NodeKind::Sub, n, 2),
        "msubsup" => fixed(NodeKind::SubSup, n, 3),
        "mfrac" => fixed(NodeKind::Frac, n, 2),
        "mroot" => fixed(NodeKind::Root, n, 2),
        "msqrt" => Ok(MathNode::node(NodeKind::Sqrt, vec![inferred_row(n)?])),
        "mfenced" => Ok(MathNode::node(
            NodeKind::Fenced,
            element_children(n).map(|c| convert(&c)).collect::<Result<_, _>>()?,
        )),
        "semantics" => match element_children(n).find(|c| !is_annotation(c)) {
            Some(first) => convert(&first),
            None => Err("empty <semantics>".to_string()),
        },
        t if TRANSPARENT.contains(&t) => inferred_row(n),
        "" => Err("element without a name".to_string()),
        other => Ok(MathNode::node(
            NodeKind::Other(other.to_string()),
            element_children(n).map(|c| convert(&c)).collect::<Result<_, _>>()?,
        )),
    }
}

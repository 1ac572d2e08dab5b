//! Presentation formula trees and their linear MTerm encoding.
//!
//! Node letters:
//!
//! | kind       | letter | shape                         |
//! |------------|--------|-------------------------------|
//! | Row        | `R`    | any number of children        |
//! | Identifier | `I`    | leaf                          |
//! | Operator   | `O`    | leaf                          |
//! | Number     | `N`    | leaf                          |
//! | Text       | `T`    | leaf                          |
//! | Sup        | `J`    | base, exponent                |
//! | Sub        | `U`    | base, subscript               |
//! | SubSup     | `V`    | base, subscript, superscript  |
//! | Frac       | `F`    | numerator, denominator        |
//! | Sqrt       | `Q`    | one child                     |
//! | Root       | `W`    | radicand, index               |
//! | Fenced     | `P`    | any number of children        |
//! | Other(tag) | `X`    | `X[tag](...)`, any children   |
//!
//! Leaf values escape `(`, `)` and `\` with a backslash so that the encoding
//! can be decoded back and stays injective.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Row,
    Identifier,
    Operator,
    Number,
    Sup,
    Sub,
    SubSup,
    Frac,
    Sqrt,
    Root,
    Fenced,
    Text,
    Other(String),
}

impl NodeKind {
    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            NodeKind::Identifier | NodeKind::Operator | NodeKind::Number | NodeKind::Text
        )
    }

    pub fn letter(&self) -> char {
        match self {
            NodeKind::Row => 'R',
            NodeKind::Identifier => 'I',
            NodeKind::Operator => 'O',
            NodeKind::Number => 'N',
            NodeKind::Sup => 'J',
            NodeKind::Sub => 'U',
            NodeKind::SubSup => 'V',
            NodeKind::Frac => 'F',
            NodeKind::Sqrt => 'Q',
            NodeKind::Root => 'W',
            NodeKind::Fenced => 'P',
            NodeKind::Text => 'T',
            NodeKind::Other(_) => 'X',
        }
    }

    fn from_letter(letter: char) -> Option<NodeKind> {
        Some(match letter {
            'R' => NodeKind::Row,
            'I' => NodeKind::Identifier,
            'O' => NodeKind::Operator,
            'N' => NodeKind::Number,
            'J' => NodeKind::Sup,
            'U' => NodeKind::Sub,
            'V' => NodeKind::SubSup,
            'F' => NodeKind::Frac,
            'Q' => NodeKind::Sqrt,
            'W' => NodeKind::Root,
            'P' => NodeKind::Fenced,
            'T' => NodeKind::Text,
            'X' => NodeKind::Other(String::new()),
            _ => return None,
        })
    }

    /// Required child count, `None` when any count is allowed.
    fn arity(&self) -> Option<usize> {
        match self {
            NodeKind::Sup | NodeKind::Sub | NodeKind::Frac | NodeKind::Root => Some(2),
            NodeKind::SubSup => Some(3),
            NodeKind::Sqrt => Some(1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MathNode {
    pub kind: NodeKind,
    /// Leaf content; empty for interior nodes.
    pub value: String,
    pub children: Vec<MathNode>,
}

impl MathNode {
    pub fn leaf(kind: NodeKind, value: impl Into<String>) -> Self {
        MathNode {
            kind,
            value: value.into(),
            children: Vec::new(),
        }
    }

    pub fn node(kind: NodeKind, children: Vec<MathNode>) -> Self {
        MathNode {
            kind,
            value: String::new(),
            children,
        }
    }

    pub fn ident(value: impl Into<String>) -> Self {
        Self::leaf(NodeKind::Identifier, value)
    }

    pub fn op(value: impl Into<String>) -> Self {
        Self::leaf(NodeKind::Operator, value)
    }

    pub fn num(value: impl Into<String>) -> Self {
        Self::leaf(NodeKind::Number, value)
    }

    pub fn text(value: impl Into<String>) -> Self {
        Self::leaf(NodeKind::Text, value)
    }

    pub fn row(children: Vec<MathNode>) -> Self {
        Self::node(NodeKind::Row, children)
    }

    pub fn sup(base: MathNode, exponent: MathNode) -> Self {
        Self::node(NodeKind::Sup, vec![base, exponent])
    }

    pub fn sub(base: MathNode, subscript: MathNode) -> Self {
        Self::node(NodeKind::Sub, vec![base, subscript])
    }

    pub fn frac(numerator: MathNode, denominator: MathNode) -> Self {
        Self::node(NodeKind::Frac, vec![numerator, denominator])
    }

    pub fn is_leaf(&self) -> bool {
        self.kind.is_leaf()
    }

    pub fn is_operator(&self) -> bool {
        self.kind == NodeKind::Operator
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(MathNode::size).sum::<usize>()
    }

    /// Checks the shape invariants of every node. The error names the
    /// offending node by its child-index path from the root.
    pub fn validate(&self) -> Result<()> {
        self.validate_at(&mut String::from("root"))
    }

    fn validate_at(&self, path: &mut String) -> Result<()> {
        let fail = |message: String| Error::InvalidTree {
            path: path.clone(),
            message,
        };
        if self.kind.is_leaf() {
            if self.value.is_empty() {
                return Err(fail(format!("empty {:?} leaf", self.kind)));
            }
            if !self.children.is_empty() {
                return Err(fail(format!("{:?} leaf has children", self.kind)));
            }
            return Ok(());
        }
        if !self.value.is_empty() {
            return Err(fail(format!("interior {:?} node carries a value", self.kind)));
        }
        if let NodeKind::Other(tag) = &self.kind {
            if tag.is_empty() || !tag.chars().all(|c| c.is_alphanumeric() || "-_:.".contains(c)) {
                return Err(fail(format!("invalid tag name `{tag}`")));
            }
        }
        if let Some(arity) = self.kind.arity() {
            if self.children.len() != arity {
                return Err(fail(format!(
                    "{:?} needs {arity} children, found {}",
                    self.kind,
                    self.children.len()
                )));
            }
        }
        for (i, child) in self.children.iter().enumerate() {
            let len = path.len();
            write!(path, "/{}[{i}]", self.kind.letter()).unwrap();
            child.validate_at(path)?;
            path.truncate(len);
        }
        Ok(())
    }

    /// Serialises a valid tree without any reordering.
    pub fn encode(&self) -> Result<String> {
        self.validate()?;
        Ok(self.encode_unchecked())
    }

    pub(crate) fn encode_unchecked(&self) -> String {
        let mut out = String::new();
        self.write_mterm(&mut out);
        out
    }

    fn write_mterm(&self, out: &mut String) {
        out.push(self.kind.letter());
        if let NodeKind::Other(tag) = &self.kind {
            out.push('[');
            out.push_str(tag);
            out.push(']');
        }
        out.push('(');
        if self.kind.is_leaf() {
            for c in self.value.chars() {
                if matches!(c, '(' | ')' | '\\') {
                    out.push('\\');
                }
                out.push(c);
            }
        } else {
            for child in &self.children {
                child.write_mterm(out);
            }
        }
        out.push(')');
    }

    /// Parses an MTerm string back into a tree.
    pub fn decode(mterm: &str) -> Result<MathNode> {
        let mut parser = Decoder {
            src: mterm,
            pos: 0,
        };
        let node = parser.node()?;
        if parser.pos != mterm.len() {
            return Err(parser.error("trailing input"));
        }
        node.validate()?;
        Ok(node)
    }
}

impl fmt::Display for MathNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode_unchecked())
    }
}

/// Encodes a tree, validating it first.
pub fn encode_mterm(tree: &MathNode) -> Result<String> {
    tree.encode()
}

struct Decoder<'a> {
    src: &'a str,
    pos: usize,
}

impl Decoder<'_> {
    fn error(&self, message: &str) -> Error {
        Error::MTermSyntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            _ => Err(self.error(&format!("expected `{want}`"))),
        }
    }

    fn node(&mut self) -> Result<MathNode> {
        let letter = self.bump().ok_or_else(|| self.error("unexpected end"))?;
        let mut kind = NodeKind::from_letter(letter).ok_or_else(|| self.error("unknown node letter"))?;
        if let NodeKind::Other(tag) = &mut kind {
            self.expect('[')?;
            while let Some(c) = self.bump() {
                if c == ']' {
                    break;
                }
                tag.push(c);
            }
        }
        self.expect('(')?;
        if kind.is_leaf() {
            let mut value = String::new();
            loop {
                match self.bump() {
                    Some('\\') => value.push(self.bump().ok_or_else(|| self.error("dangling escape"))?),
                    Some(')') => break,
                    Some(c) => value.push(c),
                    None => return Err(self.error("unterminated leaf")),
                }
            }
            return Ok(MathNode::leaf(kind, value));
        }
        let mut children = Vec::new();
        loop {
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => children.push(self.node()?),
                None => return Err(self.error("unterminated node")),
            }
        }
        Ok(MathNode::node(kind, children))
    }
}

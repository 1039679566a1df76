//! Syntax trees for PENMAN expressions.
//!
//! A tree mirrors one concrete serialization: branch order, choice of
//! definition site for reused variables, and role spellings (including
//! inverted `-of` roles) are all preserved. The graph a tree denotes lives in
//! [`super::graph`].

use std::fmt;

/// A parsed PENMAN expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub root: Node,
}

/// A parenthesized node: variable, concept label, and outgoing branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub variable: String,
    /// Concept after the slash. Always present in parser output; trees built
    /// by hand may leave it `None`, which graph conversion rejects.
    pub label: Option<String>,
    pub branches: Vec<Branch>,
}

/// One `:role target` pair under a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// Role spelling as written, with the leading colon (`":ARG0"`).
    pub role: String,
    pub target: Target,
}

/// The right-hand side of a branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// A nested node, which defines its variable at this position.
    Node(Node),
    /// A bare token that matches a variable defined elsewhere in the tree.
    Reference(String),
    /// Any other leaf token: numbers, symbols like `-`, quoted strings. The
    /// lexeme is kept verbatim, quotes included.
    Constant(String),
}

impl Tree {
    pub fn new(root: Node) -> Self {
        Tree { root }
    }

    /// Variables in definition order (depth-first, source order).
    /// Duplicate definitions appear once per defining node.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.collect_variables(&mut out);
        out
    }

    /// All nodes in definition order.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.root.collect_nodes(&mut out);
        out
    }
}

impl Node {
    pub fn new(variable: impl Into<String>, label: impl Into<String>) -> Self {
        Node {
            variable: variable.into(),
            label: Some(label.into()),
            branches: Vec::new(),
        }
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        out.push(&self.variable);
        for branch in &self.branches {
            if let Target::Node(child) = &branch.target {
                child.collect_variables(out);
            }
        }
    }

    fn collect_nodes<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        for branch in &self.branches {
            if let Target::Node(child) = &branch.target {
                child.collect_nodes(out);
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::serialize(self))
    }
}

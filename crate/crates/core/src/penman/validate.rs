//! Well-formedness diagnostics for trees and graphs.
//!
//! Unlike the conversion functions, which stop at the first problem, these
//! walk the whole structure and report everything they find. Errors mark
//! structure that later stages reject or silently drop; warnings mark legal
//! but non-canonical spelling that the role canonicalization pass rewrites.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::graph::{inverse_base, Graph, TOP_ROLE};
use super::tree::{Node, Target, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into() }
    }

    fn warning(message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.severity, self.message)
    }
}

/// Tree spellings that have a canonical equivalent, keyed to their rewrite.
/// `:domain-of` and `:mod-of` are inversions written under the wrong name;
/// the other three are inversions missing their `-of-of`.
pub const CANONICAL_SPELLINGS: [(&str, &str); 5] = [
    (":domain-of", ":mod"),
    (":mod-of", ":domain"),
    (":consist", ":consist-of-of"),
    (":prep-on-behalf", ":prep-on-behalf-of-of"),
    (":prep-out", ":prep-out-of-of"),
];

pub fn canonical_spelling(role: &str) -> Option<&'static str> {
    CANONICAL_SPELLINGS
        .iter()
        .find(|(from, _)| *from == role)
        .map(|(_, to)| *to)
}

/// Check a tree without converting it. Finds everything
/// [`super::graph::tree_to_graph`] would reject, plus spelling warnings.
pub fn validate_tree(tree: &Tree) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    let mut defined: HashSet<&str> = HashSet::new();
    for node in tree.nodes() {
        if !defined.insert(&node.variable) {
            diagnostics.push(Diagnostic::error(format!(
                "variable '{}' is defined more than once",
                node.variable
            )));
        }
        if node.label.is_none() {
            diagnostics.push(Diagnostic::error(format!(
                "node '{}' has no concept label",
                node.variable
            )));
        }
    }

    let mut edges: Vec<(String, String)> = Vec::new();
    check_branches(&tree.root, &defined, &mut edges, &mut diagnostics);

    if let Some(variable) = find_cycle(defined.iter().copied(), &edges) {
        diagnostics.push(Diagnostic::error(format!(
            "graph has a directed cycle through '{variable}'"
        )));
    }

    diagnostics
}

fn check_branches(
    node: &Node,
    defined: &HashSet<&str>,
    edges: &mut Vec<(String, String)>,
    diagnostics: &mut Vec<Diagnostic>,
) {
    for branch in &node.branches {
        if let Some(canonical) = canonical_spelling(&branch.role) {
            diagnostics.push(Diagnostic::warning(format!(
                "role '{}' has canonical spelling '{}'",
                branch.role, canonical
            )));
        }
        match &branch.target {
            Target::Constant(value) => {
                if inverse_base(&branch.role).is_some() {
                    diagnostics.push(Diagnostic::error(format!(
                        "inverted role '{}' has constant target {}; only nodes may \
                         specify relations, so this cannot be deinverted",
                        branch.role, value
                    )));
                }
            }
            Target::Reference(target) => {
                if !defined.contains(target.as_str()) {
                    diagnostics.push(Diagnostic::error(format!(
                        "variable '{target}' is referenced but never defined"
                    )));
                }
                push_directed(&branch.role, &node.variable, target, edges);
            }
            Target::Node(child) => {
                push_directed(&branch.role, &node.variable, &child.variable, edges);
                check_branches(child, defined, edges, diagnostics);
            }
        }
    }
}

fn push_directed(role: &str, source: &str, target: &str, edges: &mut Vec<(String, String)>) {
    if role == TOP_ROLE {
        return;
    }
    match inverse_base(role) {
        Some(_) => edges.push((target.to_string(), source.to_string())),
        None => edges.push((source.to_string(), target.to_string())),
    }
}

/// Check graph content directly; useful for graphs built or rewritten in
/// memory rather than parsed.
pub fn validate_graph(graph: &Graph) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    if !graph.instances.contains_key(&graph.top) {
        diagnostics.push(Diagnostic::error(format!(
            "top variable '{}' is not defined",
            graph.top
        )));
    }
    for edge in &graph.edges {
        for variable in [&edge.source, &edge.target] {
            if !graph.instances.contains_key(variable) {
                diagnostics.push(Diagnostic::error(format!(
                    "variable '{variable}' is referenced but never defined"
                )));
            }
        }
        if let Some(canonical) = canonical_spelling(&edge.role) {
            diagnostics.push(Diagnostic::warning(format!(
                "role '{}' has canonical spelling '{}'",
                edge.role, canonical
            )));
        }
    }
    for attribute in &graph.attributes {
        if !graph.instances.contains_key(&attribute.source) {
            diagnostics.push(Diagnostic::error(format!(
                "variable '{}' is referenced but never defined",
                attribute.source
            )));
        }
        if inverse_base(&attribute.role).is_some() {
            diagnostics.push(Diagnostic::error(format!(
                "inverted role '{}' has constant target {}; only nodes may \
                 specify relations, so this cannot be deinverted",
                attribute.role, attribute.value
            )));
        }
        if let Some(canonical) = canonical_spelling(&attribute.role) {
            diagnostics.push(Diagnostic::warning(format!(
                "role '{}' has canonical spelling '{}'",
                attribute.role, canonical
            )));
        }
    }

    let directed: Vec<(String, String)> = graph
        .edges
        .iter()
        .filter(|e| e.role != TOP_ROLE)
        .map(|e| (e.source.clone(), e.target.clone()))
        .collect();
    if let Some(variable) = find_cycle(graph.instances.keys().map(String::as_str), &directed) {
        diagnostics.push(Diagnostic::error(format!(
            "graph has a directed cycle through '{variable}'"
        )));
    }

    // Connectivity ignores direction; an isolated node is unreachable even
    // through inverted spellings.
    if graph.instances.contains_key(&graph.top) {
        let mut undirected: HashMap<&str, Vec<&str>> = HashMap::new();
        for edge in &graph.edges {
            undirected.entry(&edge.source).or_default().push(&edge.target);
            undirected.entry(&edge.target).or_default().push(&edge.source);
        }
        let mut reached: HashSet<&str> = HashSet::new();
        let mut stack = vec![graph.top.as_str()];
        while let Some(variable) = stack.pop() {
            if !reached.insert(variable) {
                continue;
            }
            if let Some(next) = undirected.get(variable) {
                stack.extend(next.iter().copied());
            }
        }
        for variable in graph.instances.keys() {
            if !reached.contains(variable.as_str()) {
                diagnostics.push(Diagnostic::error(format!(
                    "node '{variable}' is not reachable from the top"
                )));
            }
        }
    }

    diagnostics
}

fn find_cycle<'a>(
    variables: impl Iterator<Item = &'a str>,
    edges: &[(String, String)],
) -> Option<String> {
    let mut outgoing: HashMap<&str, Vec<&str>> = HashMap::new();
    for (source, target) in edges {
        outgoing.entry(source).or_default().push(target);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: HashMap<&str, Color> = variables.map(|v| (v, Color::White)).collect();
    let keys: Vec<&str> = color.keys().copied().collect();

    for start in keys {
        if color.get(start) != Some(&Color::White) {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
        color.insert(start, Color::Gray);
        while let Some(&(var, next)) = stack.last() {
            let successors = outgoing.get(var).map(Vec::as_slice).unwrap_or(&[]);
            if next < successors.len() {
                stack.last_mut().unwrap().1 += 1;
                let succ = successors[next];
                match color.get(succ).copied().unwrap_or(Color::Black) {
                    Color::Gray => return Some(succ.to_string()),
                    Color::White => {
                        color.insert(succ, Color::Gray);
                        stack.push((succ, 0));
                    }
                    Color::Black => {}
                }
            } else {
                color.insert(var, Color::Black);
                stack.pop();
            }
        }
    }
    None
}

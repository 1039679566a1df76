//! Graphs denoted by PENMAN trees, and the layout information needed to get
//! the exact same serialization back.
//!
//! A [`Graph`] stores pure content: one concept per variable, a top, directed
//! edges between variables, and attributes from a variable to a constant.
//! Inverted `-of` branches are deinverted on the way in, so `(b :ARG0-of g)`
//! and `:ARG0` from `g` to `b` produce the same graph. A [`Layout`] remembers
//! everything the graph forgets: where each variable was defined, branch
//! order, and which spelling (base or `-of`) each relation used.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use super::tree::{Branch, Node, Target, Tree};

/// Role used by the structure-preservation pass to record definition sites as
/// ordinary edges. Exempt from cycle checks.
pub const TOP_ROLE: &str = ":TOP";

/// Pseudo-node that anchors the top triple, `TOP(top, v)`. It is a constant,
/// not a variable, so mappers never try to bind it.
pub const TOP_SOURCE: &str = "top";

/// Roles whose spelling ends in `-of` without being inversions. They pass
/// through conversion untouched, and inverting them appends another `-of`.
pub const OF_FINAL_ROLES: [&str; 3] = [":consist-of", ":prep-on-behalf-of", ":prep-out-of"];

/// True for `:consist-of` and friends, with or without the leading colon.
pub fn is_of_final_role(role: &str) -> bool {
    let role = role.strip_prefix(':').unwrap_or(role);
    OF_FINAL_ROLES
        .iter()
        .any(|r| r.strip_prefix(':').unwrap() == role)
}

/// The base role a `-of` spelling inverts, or `None` if `role` is already a
/// base spelling. `":ARG0-of"` gives `":ARG0"`; `":consist-of"` gives `None`;
/// `":consist-of-of"` gives `":consist-of"`.
pub fn inverse_base(role: &str) -> Option<&str> {
    if is_of_final_role(role) {
        return None;
    }
    role.strip_suffix("-of").filter(|base| !base.is_empty() && *base != ":")
}

/// The inverted spelling of a role: `":ARG0"` becomes `":ARG0-of"`.
pub fn invert_role(role: &str) -> String {
    format!("{role}-of")
}

/// A directed relation between two variables. Roles keep the leading colon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub role: String,
    pub target: String,
}

/// A relation from a variable to a constant.
///
/// The role keeps whatever spelling the tree used, including `-of` spellings:
/// a constant cannot be an edge source, so `(a :mod-of 7)` is stored as
/// attribute `(a, ":mod-of", 7)` rather than deinverted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub source: String,
    pub role: String,
    pub value: String,
}

/// Pure graph content, independent of any serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub top: String,
    /// Concept per variable, in definition order.
    pub instances: IndexMap<String, String>,
    pub edges: Vec<Edge>,
    pub attributes: Vec<Attribute>,
}

impl Graph {
    pub fn concept(&self, variable: &str) -> Option<&str> {
        self.instances.get(variable).map(String::as_str)
    }

    /// Number of triples: one per instance, one top, one per relation.
    pub fn triple_count(&self) -> usize {
        self.instances.len() + 1 + self.edges.len() + self.attributes.len()
    }

    /// The triples this graph asserts, in a stable order: instances in
    /// definition order, the top, edges, then attributes.
    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::with_capacity(self.triple_count());
        for (variable, concept) in &self.instances {
            out.push(Triple {
                source: Term::Variable(variable.clone()),
                role: "instance".to_string(),
                target: Term::Constant(concept.clone()),
            });
        }
        out.push(Triple {
            source: Term::Constant(TOP_SOURCE.to_string()),
            role: "TOP".to_string(),
            target: Term::Variable(self.top.clone()),
        });
        for edge in &self.edges {
            out.push(Triple {
                source: Term::Variable(edge.source.clone()),
                role: strip_colon(&edge.role),
                target: Term::Variable(edge.target.clone()),
            });
        }
        for attribute in &self.attributes {
            out.push(Triple {
                source: Term::Variable(attribute.source.clone()),
                role: strip_colon(&attribute.role),
                target: Term::Constant(attribute.value.clone()),
            });
        }
        out
    }
}

fn strip_colon(role: &str) -> String {
    role.strip_prefix(':').unwrap_or(role).to_string()
}

/// A variable or a constant in triple position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn text(&self) -> &str {
        match self {
            Term::Variable(s) | Term::Constant(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// One assertion of a graph, written `role(source, target)`. Roles drop the
/// leading colon; `instance` and `TOP` are the two reserved roles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub source: Term,
    pub role: String,
    pub target: Term,
}

impl Triple {
    /// True for relation triples that read as inversions of a relation whose
    /// source would be a constant, like `mod-of(a, 7)`. Such a triple has no
    /// valid deinverted form, so scoring excludes it.
    pub fn is_constant_inversion(&self) -> bool {
        !self.target.is_variable()
            && self.role != "instance"
            && inverse_base(&self.role).is_some()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.role, self.source, self.target)
    }
}

/// What a branch slot points at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotTarget {
    /// Nested node defining `0` at this position.
    Define(String),
    /// Bare mention of a variable defined elsewhere.
    Refer(String),
    /// Constant lexeme, verbatim.
    Constant(String),
}

/// One serialized branch: the role spelling as written (possibly `-of`
/// inverted) and its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub role: String,
    pub target: SlotTarget,
}

impl Slot {
    pub fn new(role: impl Into<String>, target: SlotTarget) -> Self {
        Slot { role: role.into(), target }
    }
}

/// Serialization choices for a graph: definition sites, branch order, and
/// role spellings. Together with the [`Graph`] this reproduces a tree
/// exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Layout {
    /// Parent variable under which each non-top variable is defined.
    pub definition_site: IndexMap<String, String>,
    /// Branch slots per variable, in serialization order.
    pub branches: IndexMap<String, Vec<Slot>>,
}

impl Layout {
    pub fn branches_of(&self, variable: &str) -> &[Slot] {
        self.branches.get(variable).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn branches_mut(&mut self, variable: &str) -> &mut Vec<Slot> {
        self.branches.entry(variable.to_string()).or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("variable '{0}' is defined more than once")]
    DuplicateDefinition(String),
    #[error("variable '{0}' is referenced but never defined")]
    UndefinedVariable(String),
    #[error("node '{0}' has no concept label")]
    MissingLabel(String),
    #[error("graph has a directed cycle through '{0}'")]
    Cycle(String),
    #[error("node '{0}' is not reachable from the top")]
    Disconnected(String),
    #[error("layout does not match the graph: {0}")]
    LayoutMismatch(String),
}

/// Interpret a tree as a graph.
///
/// `-of` branches with a variable target are deinverted; `-of` branches with
/// a constant target cannot be (a constant cannot head a relation) and are
/// kept as attributes under their written spelling. The returned layout
/// reproduces the input tree via [`graph_to_tree`].
///
/// Fails on duplicate definitions, references to undefined variables,
/// missing concept labels, and directed cycles (`:TOP` edges exempt).
pub fn tree_to_graph(tree: &Tree) -> Result<(Graph, Layout), GraphError> {
    let mut graph = Graph {
        top: tree.root.variable.clone(),
        instances: IndexMap::new(),
        edges: Vec::new(),
        attributes: Vec::new(),
    };
    let mut layout = Layout::default();
    collect_node(&tree.root, None, &mut graph, &mut layout)?;

    for slots in layout.branches.values() {
        for slot in slots {
            if let SlotTarget::Refer(target) = &slot.target {
                if !graph.instances.contains_key(target) {
                    return Err(GraphError::UndefinedVariable(target.clone()));
                }
            }
        }
    }
    check_acyclic(&graph)?;
    Ok((graph, layout))
}

fn collect_node(
    node: &Node,
    parent: Option<&str>,
    graph: &mut Graph,
    layout: &mut Layout,
) -> Result<(), GraphError> {
    let variable = node.variable.clone();
    let label = node
        .label
        .clone()
        .ok_or_else(|| GraphError::MissingLabel(variable.clone()))?;
    if graph.instances.insert(variable.clone(), label).is_some() {
        return Err(GraphError::DuplicateDefinition(variable));
    }
    if let Some(parent) = parent {
        layout
            .definition_site
            .insert(variable.clone(), parent.to_string());
    }
    // Reserve the slot list now so layout keys come out in definition order.
    layout.branches.insert(variable.clone(), Vec::new());

    let mut slots = Vec::with_capacity(node.branches.len());
    for branch in &node.branches {
        match &branch.target {
            Target::Constant(value) => {
                graph.attributes.push(Attribute {
                    source: variable.clone(),
                    role: branch.role.clone(),
                    value: value.clone(),
                });
                slots.push(Slot::new(&branch.role, SlotTarget::Constant(value.clone())));
            }
            Target::Reference(target) => {
                push_edge(graph, &variable, &branch.role, target);
                slots.push(Slot::new(&branch.role, SlotTarget::Refer(target.clone())));
            }
            Target::Node(child) => {
                push_edge(graph, &variable, &branch.role, &child.variable);
                slots.push(Slot::new(
                    &branch.role,
                    SlotTarget::Define(child.variable.clone()),
                ));
                collect_node(child, Some(&variable), graph, layout)?;
            }
        }
    }
    *layout.branches.get_mut(&variable).unwrap() = slots;
    Ok(())
}

fn push_edge(graph: &mut Graph, source: &str, role: &str, target: &str) {
    match inverse_base(role) {
        Some(base) => graph.edges.push(Edge {
            source: target.to_string(),
            role: base.to_string(),
            target: source.to_string(),
        }),
        None => graph.edges.push(Edge {
            source: source.to_string(),
            role: role.to_string(),
            target: target.to_string(),
        }),
    }
}

fn check_acyclic(graph: &Graph) -> Result<(), GraphError> {
    let mut outgoing: HashMap<&str, Vec<&str>> = HashMap::new();
    for edge in &graph.edges {
        if edge.role == TOP_ROLE {
            continue;
        }
        outgoing.entry(&edge.source).or_default().push(&edge.target);
    }

    // Iterative three-color DFS.
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: HashMap<&str, Color> = graph
        .instances
        .keys()
        .map(|v| (v.as_str(), Color::White))
        .collect();

    for start in graph.instances.keys() {
        if color[start.as_str()] != Color::White {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
        color.insert(start.as_str(), Color::Gray);
        while let Some(&(var, next)) = stack.last() {
            let successors = outgoing.get(var).map(Vec::as_slice).unwrap_or(&[]);
            if next < successors.len() {
                stack.last_mut().unwrap().1 += 1;
                let succ = successors[next];
                match color.get(succ).copied().unwrap_or(Color::White) {
                    Color::Gray => return Err(GraphError::Cycle(succ.to_string())),
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
    Ok(())
}

/// Serialize a graph back into a tree.
///
/// With a layout, the tree follows it exactly; the layout must place every
/// relation of the graph and nothing else, or the call fails with
/// [`GraphError::LayoutMismatch`]. Without a layout a default is chosen:
/// depth-first from the top, attributes before edges, each variable defined
/// at its first reachable position, and edges walked against their direction
/// spelled with `-of`.
pub fn graph_to_tree(graph: &Graph, layout: Option<&Layout>) -> Result<Tree, GraphError> {
    match layout {
        Some(layout) => tree_from_layout(graph, layout),
        None => tree_from_default_layout(graph),
    }
}

fn tree_from_layout(graph: &Graph, layout: &Layout) -> Result<Tree, GraphError> {
    let mut edges: HashMap<(&str, &str, &str), usize> = HashMap::new();
    for edge in &graph.edges {
        *edges
            .entry((&edge.source, &edge.role, &edge.target))
            .or_default() += 1;
    }
    let mut attributes: HashMap<(&str, &str, &str), usize> = HashMap::new();
    for attribute in &graph.attributes {
        *attributes
            .entry((&attribute.source, &attribute.role, &attribute.value))
            .or_default() += 1;
    }

    let mut defined: HashSet<&str> = HashSet::new();
    let root = build_from_layout(
        graph,
        layout,
        &graph.top,
        &mut edges,
        &mut attributes,
        &mut defined,
    )?;

    if let Some(missing) = graph
        .instances
        .keys()
        .find(|v| !defined.contains(v.as_str()))
    {
        return Err(GraphError::LayoutMismatch(format!(
            "variable '{missing}' is never defined"
        )));
    }
    if let Some(((s, r, t), _)) = edges.iter().find(|(_, &n)| n > 0) {
        return Err(GraphError::LayoutMismatch(format!(
            "edge ({s} {r} {t}) is not placed"
        )));
    }
    if let Some(((s, r, v), _)) = attributes.iter().find(|(_, &n)| n > 0) {
        return Err(GraphError::LayoutMismatch(format!(
            "attribute ({s} {r} {v}) is not placed"
        )));
    }
    Ok(Tree::new(root))
}

fn build_from_layout<'g>(
    graph: &'g Graph,
    layout: &'g Layout,
    variable: &'g str,
    edges: &mut HashMap<(&'g str, &'g str, &'g str), usize>,
    attributes: &mut HashMap<(&'g str, &'g str, &'g str), usize>,
    defined: &mut HashSet<&'g str>,
) -> Result<Node, GraphError> {
    let label = graph
        .concept(variable)
        .ok_or_else(|| GraphError::LayoutMismatch(format!("unknown variable '{variable}'")))?;
    if !defined.insert(variable) {
        return Err(GraphError::LayoutMismatch(format!(
            "variable '{variable}' is defined twice"
        )));
    }

    let mut node = Node::new(variable, label);
    for slot in layout.branches_of(variable) {
        let target = match &slot.target {
            SlotTarget::Constant(value) => {
                take(attributes, (variable, slot.role.as_str(), value.as_str())).ok_or_else(
                    || {
                        GraphError::LayoutMismatch(format!(
                            "attribute ({variable} {} {value}) is not in the graph",
                            slot.role
                        ))
                    },
                )?;
                Target::Constant(value.clone())
            }
            SlotTarget::Refer(other) => {
                consume_edge(edges, variable, &slot.role, other)?;
                Target::Reference(other.clone())
            }
            SlotTarget::Define(other) => {
                consume_edge(edges, variable, &slot.role, other)?;
                if layout.definition_site.get(other.as_str()).map(String::as_str)
                    != Some(variable)
                {
                    return Err(GraphError::LayoutMismatch(format!(
                        "definition site of '{other}' disagrees with its slot under '{variable}'"
                    )));
                }
                Target::Node(build_from_layout(
                    graph, layout, other, edges, attributes, defined,
                )?)
            }
        };
        node.branches.push(Branch {
            role: slot.role.clone(),
            target,
        });
    }
    Ok(node)
}

fn consume_edge<'g>(
    edges: &mut HashMap<(&'g str, &'g str, &'g str), usize>,
    holder: &'g str,
    role: &'g str,
    other: &'g str,
) -> Result<(), GraphError> {
    let key = match inverse_base(role) {
        Some(base) => (other, base, holder),
        None => (holder, role, other),
    };
    take(edges, key).ok_or_else(|| {
        GraphError::LayoutMismatch(format!(
            "edge ({} {} {}) is not in the graph",
            key.0, key.1, key.2
        ))
    })
}

fn take<'g>(
    multiset: &mut HashMap<(&'g str, &'g str, &'g str), usize>,
    key: (&'g str, &'g str, &'g str),
) -> Option<()> {
    match multiset.get_mut(&key) {
        Some(n) if *n > 0 => {
            *n -= 1;
            Some(())
        }
        _ => None,
    }
}

fn tree_from_default_layout(graph: &Graph) -> Result<Tree, GraphError> {
    let mut used: Vec<bool> = vec![false; graph.edges.len()];
    let mut visited: HashSet<&str> = HashSet::new();
    let root = build_default(graph, &graph.top, &mut used, &mut visited)?;

    if let Some(missing) = graph
        .instances
        .keys()
        .find(|v| !visited.contains(v.as_str()))
    {
        return Err(GraphError::Disconnected(missing.clone()));
    }
    Ok(Tree::new(root))
}

fn build_default<'g>(
    graph: &'g Graph,
    variable: &'g str,
    used: &mut Vec<bool>,
    visited: &mut HashSet<&'g str>,
) -> Result<Node, GraphError> {
    let label = graph
        .concept(variable)
        .ok_or_else(|| GraphError::UndefinedVariable(variable.to_string()))?;
    visited.insert(variable);
    let mut node = Node::new(variable, label);

    for attribute in &graph.attributes {
        if attribute.source == variable {
            node.branches.push(Branch {
                role: attribute.role.clone(),
                target: Target::Constant(attribute.value.clone()),
            });
        }
    }

    // Two sweeps over the edge list: first the edges leaving this variable,
    // then the ones arriving, spelled inverted. Recursion consumes edges, so
    // each is placed exactly once, at its first reachable endpoint.
    for index in 0..graph.edges.len() {
        let edge = &graph.edges[index];
        if used[index] || edge.source != variable {
            continue;
        }
        used[index] = true;
        let target = if visited.contains(edge.target.as_str()) {
            Target::Reference(edge.target.clone())
        } else {
            Target::Node(build_default(graph, &edge.target, used, visited)?)
        };
        node.branches.push(Branch {
            role: edge.role.clone(),
            target,
        });
    }
    for index in 0..graph.edges.len() {
        let edge = &graph.edges[index];
        if used[index] || edge.target != variable {
            continue;
        }
        used[index] = true;
        let target = if visited.contains(edge.source.as_str()) {
            Target::Reference(edge.source.clone())
        } else {
            Target::Node(build_default(graph, &edge.source, used, visited)?)
        };
        node.branches.push(Branch {
            role: invert_role(&edge.role),
            target,
        });
    }
    Ok(node)
}

//! Normalization passes that rewrite a graph into an equivalent form.
//!
//! Four rewrites are available, applied by [`normalize`] in a fixed order:
//!
//! 1. role canonicalization (`I`): spelling fixes like `:domain-of` to
//!    `:mod`, so the same relation always yields the same triple;
//! 2. relation reification (`R`) or dereification (`D`): trade a relation
//!    like `:manner` for an explicit `have-manner-91` node, or collapse such
//!    nodes back when nothing else hangs off them;
//! 3. attribute reification (`A`): give every constant its own node, so
//!    constants participate in relations like any node;
//! 4. structure preservation (`S`): record each variable's definition site as
//!    an extra `:TOP` edge, making the serialization's nesting part of the
//!    graph itself.
//!
//! Each pass takes and returns a (graph, layout) pair plus the number of
//! rewrites applied. Canonicalization runs first so reification sees
//! canonical role names; attribute reification runs after relation
//! reification so constants introduced as reified targets (`:ARG2 5`) still
//! get nodes; structure preservation runs last because its `:TOP` edges may
//! form directed cycles, which every other pass refuses to touch.

mod table;

pub use table::{ReificationEntry, ReificationTable, TableError};

use std::collections::{HashMap, HashSet};

use crate::penman::{
    canonical_spelling, graph_to_tree, inverse_base, invert_role, tree_to_graph, Attribute,
    Branch, Edge, Graph, GraphError, Layout, Node, Slot, SlotTarget, Target, Tree, TOP_ROLE,
};

/// Pass selection. `reify_relations` and `dereify_relations` are mutually
/// exclusive; everything else combines freely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NormalizeOptions {
    pub canonicalize_roles: bool,
    pub reify_relations: bool,
    pub dereify_relations: bool,
    pub reify_attributes: bool,
    pub preserve_structure: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("reify-relations and dereify-relations cannot be combined")]
    ConflictingPasses,
    #[error("variable '{0}' has no definition site in the layout")]
    MissingDefinitionSite(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How many rewrites each pass applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PassCounts {
    pub roles_canonicalized: usize,
    pub relations_reified: usize,
    pub nodes_dereified: usize,
    pub attributes_reified: usize,
    pub top_relations_added: usize,
}

/// Result of [`normalize`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub graph: Graph,
    pub layout: Layout,
    pub counts: PassCounts,
}

/// Apply the selected passes in fixed order:
/// canonicalize, reify or dereify relations, reify attributes, preserve
/// structure.
pub fn normalize(
    graph: &Graph,
    layout: &Layout,
    options: NormalizeOptions,
    table: &ReificationTable,
) -> Result<Normalized, NormalizeError> {
    if options.reify_relations && options.dereify_relations {
        return Err(NormalizeError::ConflictingPasses);
    }
    let mut graph = graph.clone();
    let mut layout = layout.clone();
    let mut counts = PassCounts::default();
    if options.canonicalize_roles {
        (graph, layout, counts.roles_canonicalized) = canonicalize_roles(&graph, &layout)?;
    }
    if options.reify_relations {
        (graph, layout, counts.relations_reified) = reify_relations(&graph, &layout, table)?;
    }
    if options.dereify_relations {
        (graph, layout, counts.nodes_dereified) = dereify_relations(&graph, &layout, table)?;
    }
    if options.reify_attributes {
        (graph, layout, counts.attributes_reified) = reify_attributes(&graph, &layout)?;
    }
    if options.preserve_structure {
        (graph, layout, counts.top_relations_added) = preserve_structure(&graph, &layout)?;
    }
    Ok(Normalized { graph, layout, counts })
}

/// Rewrite non-canonical role spellings in a tree: `:domain-of` to `:mod`,
/// `:mod-of` to `:domain`, and the bare forms of the `-of`-final roles
/// (`:consist` to `:consist-of-of`, etc). Purely a spelling change on the
/// serialization, but it changes which triples the tree denotes, which is the
/// point: both spellings of a relation then produce the same triple.
pub fn canonicalize_tree(tree: &Tree) -> (Tree, usize) {
    let mut count = 0;
    let root = canonicalize_node(&tree.root, &mut count);
    (Tree::new(root), count)
}

fn canonicalize_node(node: &Node, count: &mut usize) -> Node {
    let mut out = Node {
        variable: node.variable.clone(),
        label: node.label.clone(),
        branches: Vec::with_capacity(node.branches.len()),
    };
    for branch in &node.branches {
        let role = match canonical_spelling(&branch.role) {
            Some(canonical) => {
                *count += 1;
                canonical.to_string()
            }
            None => branch.role.clone(),
        };
        let target = match &branch.target {
            Target::Node(child) => Target::Node(canonicalize_node(child, count)),
            other => other.clone(),
        };
        out.branches.push(Branch { role, target });
    }
    out
}

/// Graph-level form of [`canonicalize_tree`]: the spellings live in the
/// layout, so the graph is serialized with it, rewritten, and read back.
pub fn canonicalize_roles(
    graph: &Graph,
    layout: &Layout,
) -> Result<(Graph, Layout, usize), NormalizeError> {
    let tree = graph_to_tree(graph, Some(layout))?;
    let (tree, count) = canonicalize_tree(&tree);
    let (graph, layout) = tree_to_graph(&tree)?;
    Ok((graph, layout, count))
}

/// Every token a fresh variable must not collide with: defined variables,
/// plus constant lexemes, because a bare constant equal to a new variable
/// name would turn into a reference to it on reparse.
fn used_tokens(tree: &Tree) -> HashSet<String> {
    fn walk(node: &Node, used: &mut HashSet<String>) {
        used.insert(node.variable.clone());
        for branch in &node.branches {
            match &branch.target {
                Target::Node(child) => walk(child, used),
                Target::Constant(lexeme) => {
                    used.insert(lexeme.clone());
                }
                Target::Reference(_) => {}
            }
        }
    }
    let mut used = HashSet::new();
    walk(&tree.root, &mut used);
    used
}

/// Fresh variable named after the concept: its first alphanumeric character,
/// lowercased (`x` if there is none), with the smallest integer suffix >= 2
/// that avoids collision. `have-manner-91` gives `h`, then `h2`, `h3`, ...
fn fresh_variable(concept: &str, used: &mut HashSet<String>) -> String {
    let base = concept
        .chars()
        .find(|c| c.is_alphanumeric())
        .map(|c| c.to_lowercase().to_string())
        .unwrap_or_else(|| "x".to_string());
    let mut candidate = base.clone();
    let mut suffix = 2;
    while used.contains(&candidate) {
        candidate = format!("{base}{suffix}");
        suffix += 1;
    }
    used.insert(candidate.clone());
    candidate
}

/// Replace every relation whose role has a unique reifiable table row with a
/// fresh node. A relation `(a :role b)` becomes
/// `(a :<source>-of (c / <concept> :<target> b))`; when the relation was
/// written inverted, `(b :role-of a)` becomes
/// `(b :<target>-of (c / <concept> :<source> a))`. Either way the graph
/// gains the node `c` with an edge to each original endpoint, two extra
/// triples per relation. Applies to attributes as well as edges; ambiguous
/// roles and roles without a table row are untouched.
pub fn reify_relations(
    graph: &Graph,
    layout: &Layout,
    table: &ReificationTable,
) -> Result<(Graph, Layout, usize), NormalizeError> {
    let tree = graph_to_tree(graph, Some(layout))?;
    let mut used = used_tokens(&tree);
    let mut count = 0;
    let root = reify_node(&tree.root, table, &mut used, &mut count);
    let (graph, layout) = tree_to_graph(&Tree::new(root))?;
    Ok((graph, layout, count))
}

fn reify_node(
    node: &Node,
    table: &ReificationTable,
    used: &mut HashSet<String>,
    count: &mut usize,
) -> Node {
    let mut out = Node {
        variable: node.variable.clone(),
        label: node.label.clone(),
        branches: Vec::with_capacity(node.branches.len()),
    };
    for branch in &node.branches {
        let rewrite = reification_spellings(&branch.role, &branch.target, table);
        match rewrite {
            Some((outer_role, inner_role, concept)) => {
                // Allocate before descending so names assign in reading
                // order: the first reified relation of the drive example gets
                // h2 even though deeper rewrites exist.
                let variable = fresh_variable(&concept, used);
                *count += 1;
                let inner_target = reify_target(&branch.target, table, used, count);
                let mut reified = Node::new(variable, concept);
                reified.branches.push(Branch { role: inner_role, target: inner_target });
                out.branches.push(Branch {
                    role: outer_role,
                    target: Target::Node(reified),
                });
            }
            None => out.branches.push(Branch {
                role: branch.role.clone(),
                target: reify_target(&branch.target, table, used, count),
            }),
        }
    }
    out
}

fn reify_target(
    target: &Target,
    table: &ReificationTable,
    used: &mut HashSet<String>,
    count: &mut usize,
) -> Target {
    match target {
        Target::Node(child) => Target::Node(reify_node(child, table, used, count)),
        other => other.clone(),
    }
}

/// For a reifiable branch, the new outer role (inverted, pointing at the
/// fresh node), the inner role (from the fresh node to the old target), and
/// the concept.
fn reification_spellings(
    role: &str,
    target: &Target,
    table: &ReificationTable,
) -> Option<(String, String, String)> {
    if let Some(entry) = table.reification_for(role) {
        return Some((
            invert_role(&entry.source_role),
            entry.target_role.clone(),
            entry.concept.clone(),
        ));
    }
    // An inverted spelling of a reifiable role; only meaningful with a
    // variable target, since a constant cannot be a relation's source.
    if !matches!(target, Target::Constant(_)) {
        if let Some(base) = inverse_base(role) {
            if let Some(entry) = table.reification_for(base) {
                return Some((
                    invert_role(&entry.target_role),
                    entry.source_role.clone(),
                    entry.concept.clone(),
                ));
            }
        }
    }
    None
}

/// One planned dereification: collapse node `node` back into a single
/// relation between `source_endpoint` and the target.
struct Collapse {
    node: String,
    parent: String,
    parent_slot: usize,
    role: String,
    /// Spell the collapsed branch inverted (the layout had the node defined
    /// under the relation's target endpoint rather than its source).
    inverted: bool,
    source_edge: usize,
    target_relation: TargetRelation,
    source_endpoint: String,
}

enum TargetRelation {
    Edge(usize),
    Attribute(usize),
}

/// Collapse reified nodes back into plain relations. A node is eligible when
/// its concept has dereifiable table rows, it has exactly two outgoing
/// relations matching a row's source and target roles (the source must be an
/// edge), and nothing else touches it: no incoming edges, not the graph top.
/// Collapses repeat until none applies. A collapse that would create a
/// directed cycle is skipped, since the result could no longer be
/// serialized.
pub fn dereify_relations(
    graph: &Graph,
    layout: &Layout,
    table: &ReificationTable,
) -> Result<(Graph, Layout, usize), NormalizeError> {
    let mut graph = graph.clone();
    let mut layout = layout.clone();
    let mut count = 0;
    while let Some(plan) = find_collapse(&graph, &layout, table) {
        apply_collapse(&mut graph, &mut layout, plan)?;
        count += 1;
    }
    Ok((graph, layout, count))
}

fn find_collapse(graph: &Graph, layout: &Layout, table: &ReificationTable) -> Option<Collapse> {
    'vars: for (variable, concept) in &graph.instances {
        if *variable == graph.top {
            continue;
        }
        let rows = table.dereifications_for(concept);
        if rows.is_empty() {
            continue;
        }

        let mut outgoing: Vec<usize> = Vec::new();
        for (index, edge) in graph.edges.iter().enumerate() {
            if edge.target == *variable {
                continue 'vars; // an incoming edge means the node is in use
            }
            if edge.source == *variable {
                outgoing.push(index);
            }
        }
        let attributes: Vec<usize> = graph
            .attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.source == *variable)
            .map(|(i, _)| i)
            .collect();
        if outgoing.len() + attributes.len() != 2 {
            continue;
        }

        let parent = layout.definition_site.get(variable)?.clone();
        let parent_slot = layout
            .branches_of(&parent)
            .iter()
            .position(|slot| slot.target == SlotTarget::Define(variable.clone()))?;
        let defining_role = &layout.branches_of(&parent)[parent_slot].role;

        // Structurally matching rows, each as (row, source edge, target
        // relation). The definition branch corresponds to one of the node's
        // two relations; a row can apply in the regular direction (defined
        // under the inverted source role) or the inverted one (under the
        // inverted target role). Regular matches are preferred, then table
        // order; a match creating a cycle falls through to the next.
        let mut matches: Vec<(Collapse, bool)> = Vec::new();
        for row in rows {
            let Some(&source_edge) = outgoing
                .iter()
                .find(|&&i| graph.edges[i].role == row.source_role)
            else {
                continue;
            };
            let target_relation = outgoing
                .iter()
                .find(|&&i| i != source_edge && graph.edges[i].role == row.target_role)
                .map(|&i| TargetRelation::Edge(i))
                .or_else(|| {
                    attributes
                        .iter()
                        .find(|&&i| graph.attributes[i].role == row.target_role)
                        .map(|&i| TargetRelation::Attribute(i))
                });
            let Some(target_relation) = target_relation else {
                continue;
            };

            let regular = invert_role(&row.source_role) == *defining_role
                && graph.edges[source_edge].target == parent;
            let inverted = match target_relation {
                TargetRelation::Edge(i) => {
                    invert_role(&row.target_role) == *defining_role
                        && graph.edges[i].target == parent
                }
                TargetRelation::Attribute(_) => false,
            };
            if regular {
                matches.push((
                    Collapse {
                        node: variable.clone(),
                        parent: parent.clone(),
                        parent_slot,
                        role: row.role.clone(),
                        inverted: false,
                        source_edge,
                        target_relation,
                        source_endpoint: graph.edges[source_edge].target.clone(),
                    },
                    true,
                ));
            } else if inverted {
                matches.push((
                    Collapse {
                        node: variable.clone(),
                        parent: parent.clone(),
                        parent_slot,
                        role: row.role.clone(),
                        inverted: true,
                        source_edge,
                        target_relation,
                        source_endpoint: graph.edges[source_edge].target.clone(),
                    },
                    false,
                ));
            }
        }
        matches.sort_by_key(|(_, regular)| !*regular);

        for (plan, _) in matches {
            if collapse_creates_cycle(graph, &plan) {
                continue;
            }
            return Some(plan);
        }
    }
    None
}

/// The collapsed relation runs source endpoint to target endpoint. A cycle
/// appears iff the target endpoint already reaches the source endpoint on a
/// path not through the collapsed node.
fn collapse_creates_cycle(graph: &Graph, plan: &Collapse) -> bool {
    let target = match &plan.target_relation {
        TargetRelation::Edge(i) => &graph.edges[*i].target,
        TargetRelation::Attribute(_) => return false,
    };
    let from = plan.source_endpoint.as_str();
    if target == from {
        return true;
    }
    let mut outgoing: HashMap<&str, Vec<&str>> = HashMap::new();
    for edge in &graph.edges {
        if edge.source == plan.node || edge.role == TOP_ROLE {
            continue;
        }
        outgoing.entry(&edge.source).or_default().push(&edge.target);
    }
    let mut seen: HashSet<&str> = HashSet::new();
    let mut stack: Vec<&str> = vec![target];
    while let Some(variable) = stack.pop() {
        if !seen.insert(variable) {
            continue;
        }
        if variable == from {
            return true;
        }
        if let Some(next) = outgoing.get(variable) {
            stack.extend(next.iter().copied());
        }
    }
    false
}

fn apply_collapse(
    graph: &mut Graph,
    layout: &mut Layout,
    plan: Collapse,
) -> Result<(), NormalizeError> {
    // The definition branch stands for one of the node's two relations; the
    // other is serialized either under the node itself, or at its far
    // endpoint as an inverted reference back to the node.
    let (loose_role, loose_endpoint) = match &plan.target_relation {
        _ if plan.inverted => {
            let edge = &graph.edges[plan.source_edge];
            (edge.role.clone(), Some(edge.target.clone()))
        }
        TargetRelation::Edge(i) => {
            let edge = &graph.edges[*i];
            (edge.role.clone(), Some(edge.target.clone()))
        }
        TargetRelation::Attribute(i) => {
            let attribute = &graph.attributes[*i];
            (attribute.role.clone(), None)
        }
    };

    let new_target = take_loose_slot(layout, &plan.node, &loose_role, loose_endpoint.as_deref())
        .ok_or_else(|| {
            GraphError::LayoutMismatch(format!(
                "relation ({} {} ...) has no slot to collapse",
                plan.node, loose_role
            ))
        })?;
    if let SlotTarget::Define(moved) = &new_target {
        layout
            .definition_site
            .insert(moved.clone(), plan.parent.clone());
    }

    let spelled = if plan.inverted {
        invert_role(&plan.role)
    } else {
        plan.role.clone()
    };
    layout.branches_mut(&plan.parent)[plan.parent_slot] = Slot::new(spelled, new_target);
    layout.definition_site.swap_remove(&plan.node);
    let leftover = layout.branches.swap_remove(&plan.node);
    debug_assert!(leftover.map(|slots| slots.is_empty()).unwrap_or(true));

    graph.instances.shift_remove(&plan.node);
    match plan.target_relation {
        TargetRelation::Edge(target_edge) => {
            let new_edge = Edge {
                source: plan.source_endpoint.clone(),
                role: plan.role.clone(),
                target: graph.edges[target_edge].target.clone(),
            };
            let low = plan.source_edge.min(target_edge);
            let high = plan.source_edge.max(target_edge);
            graph.edges.remove(high);
            graph.edges[low] = new_edge;
        }
        TargetRelation::Attribute(attribute) => {
            graph.attributes[attribute] = Attribute {
                source: plan.source_endpoint.clone(),
                role: plan.role.clone(),
                value: graph.attributes[attribute].value.clone(),
            };
            graph.edges.remove(plan.source_edge);
        }
    }
    Ok(())
}

/// Remove and return the slot holding the node's loose relation: either a
/// slot under the node itself, or `(role-of, Refer(node))` at the far
/// endpoint. The returned target becomes the collapsed branch's target; a
/// far-endpoint slot collapses to a plain reference.
fn take_loose_slot(
    layout: &mut Layout,
    node: &str,
    role: &str,
    endpoint: Option<&str>,
) -> Option<SlotTarget> {
    let slots = layout.branches_mut(node);
    if let Some(position) = slots.iter().position(|slot| slot.role == role) {
        return Some(slots.remove(position).target);
    }
    let endpoint = endpoint?;
    let inverted = invert_role(role);
    let slots = layout.branches_mut(endpoint);
    let position = slots
        .iter()
        .position(|slot| slot.role == inverted && slot.target == SlotTarget::Refer(node.to_string()))?;
    slots.remove(position);
    Some(SlotTarget::Refer(endpoint.to_string()))
}

/// Give every constant its own node: attribute `(a :role const)` becomes an
/// edge to a fresh node whose concept is the constant lexeme, verbatim.
/// One extra triple per former attribute. Reified constants participate in
/// scoring like any node, including former constant targets of inverted
/// roles, which deinvert normally once the target is a node.
pub fn reify_attributes(
    graph: &Graph,
    layout: &Layout,
) -> Result<(Graph, Layout, usize), NormalizeError> {
    let tree = graph_to_tree(graph, Some(layout))?;
    let mut used = used_tokens(&tree);
    let mut count = 0;
    let root = reify_constants(&tree.root, &mut used, &mut count);
    let (graph, layout) = tree_to_graph(&Tree::new(root))?;
    Ok((graph, layout, count))
}

fn reify_constants(node: &Node, used: &mut HashSet<String>, count: &mut usize) -> Node {
    let mut out = Node {
        variable: node.variable.clone(),
        label: node.label.clone(),
        branches: Vec::with_capacity(node.branches.len()),
    };
    for branch in &node.branches {
        let target = match &branch.target {
            Target::Constant(lexeme) => {
                let variable = fresh_variable(lexeme, used);
                *count += 1;
                Target::Node(Node::new(variable, lexeme.clone()))
            }
            Target::Node(child) => Target::Node(reify_constants(child, used, count)),
            Target::Reference(_) => branch.target.clone(),
        };
        out.branches.push(Branch { role: branch.role.clone(), target });
    }
    out
}

/// Record each variable's definition site as an edge `(parent :TOP variable)`
/// and a reference branch at the end of the parent's slot list. One new
/// triple per non-top variable, n-1 in total. The added edges may point
/// against existing ones, so they are exempt from cycle checks; everything
/// still serializes, since the new branches are plain references.
pub fn preserve_structure(
    graph: &Graph,
    layout: &Layout,
) -> Result<(Graph, Layout, usize), NormalizeError> {
    let mut graph = graph.clone();
    let mut layout = layout.clone();
    let mut count = 0;
    let variables: Vec<String> = graph.instances.keys().cloned().collect();
    for variable in variables {
        if variable == graph.top {
            continue;
        }
        let parent = layout
            .definition_site
            .get(&variable)
            .cloned()
            .ok_or_else(|| NormalizeError::MissingDefinitionSite(variable.clone()))?;
        let already = graph
            .edges
            .iter()
            .any(|e| e.role == TOP_ROLE && e.source == parent && e.target == variable);
        if already {
            continue;
        }
        graph.edges.push(Edge {
            source: parent.clone(),
            role: TOP_ROLE.to_string(),
            target: variable.clone(),
        });
        layout
            .branches_mut(&parent)
            .push(Slot::new(TOP_ROLE, SlotTarget::Refer(variable)));
        count += 1;
    }
    Ok((graph, layout, count))
}

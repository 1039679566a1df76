//! Shared helpers for the integration tests: fixture corpus loading and a
//! seeded random graph generator.
//!
//! Every test binary compiles its own copy of this module and uses a
//! subset, so unused-item warnings are suppressed wholesale.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use amrkit::corpus::{self, CorpusEntry};
use amrkit::penman::{tree_to_graph, Branch, Graph, Layout, Node, Target, Tree};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Roles the builtin table both reifies and collapses back.
pub const DEREIFIABLE_ROLES: &[&str] = &[
    ":accompanier",
    ":age",
    ":concession",
    ":condition",
    ":degree",
    ":destination",
    ":domain",
    ":duration",
    ":example",
    ":extent",
    ":frequency",
    ":instrument",
    ":li",
    ":location",
    ":manner",
    ":mod",
    ":name",
    ":ord",
    ":part",
    ":polarity",
    ":purpose",
    ":quant",
    ":source",
    ":subevent",
    ":time",
    ":topic",
    ":value",
];

/// Roles the builtin table leaves alone: core argument and ordering roles,
/// ambiguous rows applied by neither pass, and of-final spellings that never
/// deinvert.
pub const INERT_ROLES: &[&str] = &[
    ":ARG0",
    ":ARG1",
    ":ARG2",
    ":op1",
    ":op2",
    ":snt1",
    ":beneficiary",
    ":poss",
    ":consist-of",
    ":prep-out-of",
];

/// Concept pool. None of these label a reification node, so the only
/// collapsible nodes in a generated graph are ones the reify pass created.
const CONCEPTS: &[&str] = &[
    "dog", "cat", "chase-01", "see-01", "thing", "person", "city", "good-02", "alpha", "wind-01",
    "boy", "girl",
];

const CONSTANTS: &[&str] = &["-", "+", "1", "5", "42", "\"Kim\"", "\"north wind\"", "interrogative"];

/// Tuning knobs for [`random_tree`].
pub struct GenOptions {
    /// Upper bound on node count; at least one node is always produced.
    pub max_nodes: usize,
    /// Probability that a relation takes a role the builtin table reifies.
    pub dereifiable_share: f64,
    /// Probability that a node carries a constant-valued branch.
    pub attribute_share: f64,
    /// Largest number of reentrant reference branches to attempt.
    pub max_reentrancies: usize,
    /// Probability that a variable-target relation is spelled inverted.
    pub inverted_share: f64,
    /// Probability that a constant-valued branch is spelled inverted; such
    /// a branch stays an attribute verbatim through every pass.
    pub constant_inversion_share: f64,
    /// Probability that a relation is spelled with one of the non-canonical
    /// dual spellings (`:mod-of`, `:domain-of`). Canonicalization flips the
    /// direction of these relations, so the generator keeps both directions
    /// cycle-free around them.
    pub noncanonical_share: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_nodes: 10,
            dereifiable_share: 0.55,
            attribute_share: 0.45,
            max_reentrancies: 2,
            inverted_share: 0.2,
            constant_inversion_share: 0.05,
            noncanonical_share: 0.0,
        }
    }
}

impl GenOptions {
    /// Graphs small enough for the exhaustive matcher.
    pub fn small() -> Self {
        GenOptions {
            max_nodes: 6,
            ..GenOptions::default()
        }
    }

    /// Graphs that exercise the spelling canonicalizer.
    pub fn noncanonical() -> Self {
        GenOptions {
            noncanonical_share: 0.3,
            ..GenOptions::default()
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

struct RoleDraw {
    role: String,
    /// The relation runs target-to-owner rather than owner-to-target.
    inverted: bool,
    /// Canonicalization would flip the relation's direction.
    flippy: bool,
}

/// Draws a role spelling. Of-final base roles are never inverted further.
/// `:mod` and `:domain` are never inverted either: each is already the
/// other's inverse, so their `-of` spellings are the non-canonical duals,
/// drawn separately via `noncanonical_share`.
fn draw_role(
    rng: &mut ChaCha8Rng,
    options: &GenOptions,
    inversion_probability: f64,
) -> RoleDraw {
    if rng.random_bool(options.noncanonical_share) {
        let role = if rng.random_bool(0.5) { ":mod-of" } else { ":domain-of" };
        return RoleDraw {
            role: role.to_string(),
            inverted: true,
            flippy: true,
        };
    }
    let base = if rng.random_bool(options.dereifiable_share) {
        pick(rng, DEREIFIABLE_ROLES)
    } else {
        pick(rng, INERT_ROLES)
    };
    let invertible = !base.ends_with("-of") && base != ":mod" && base != ":domain";
    if invertible && rng.random_bool(inversion_probability) {
        RoleDraw {
            role: format!("{base}-of"),
            inverted: true,
            flippy: false,
        }
    } else {
        RoleDraw {
            role: base.to_string(),
            inverted: false,
            flippy: false,
        }
    }
}

/// Builds a random well-formed tree: unique variables, a spanning tree of
/// node branches, cycle-safe reentrant references, and a sprinkling of
/// attributes and inverted spellings. Same seed, same tree.
pub fn random_tree(rng: &mut ChaCha8Rng, options: &GenOptions) -> Tree {
    let node_count = rng.random_range(1..=options.max_nodes.max(1));

    let mut used: HashSet<String> = HashSet::new();
    let mut shells: Vec<Option<Node>> = (0..node_count)
        .map(|_| {
            let label = pick(rng, CONCEPTS);
            let letter = label.chars().next().unwrap();
            let mut variable = letter.to_string();
            let mut suffix = 1;
            while !used.insert(variable.clone()) {
                suffix += 1;
                variable = format!("{letter}{suffix}");
            }
            Some(Node::new(variable, label))
        })
        .collect();
    let variables: Vec<String> = shells
        .iter()
        .map(|shell| shell.as_ref().unwrap().variable.clone())
        .collect();

    // Tree shape: each later node hangs under an earlier one. Any
    // orientation of tree edges alone is acyclic, so inverted spellings
    // need no reachability check here; flippy relations book both
    // directions so later additions stay acyclic under canonicalization.
    let mut parents = vec![0usize; node_count];
    let mut spellings = vec![String::new(); node_count];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for child in 1..node_count {
        let parent = rng.random_range(0..child);
        let draw = draw_role(rng, options, options.inverted_share);
        parents[child] = parent;
        spellings[child] = draw.role;
        edges.push(if draw.inverted { (child, parent) } else { (parent, child) });
        if draw.flippy {
            edges.push(if draw.inverted { (parent, child) } else { (child, parent) });
        }
    }

    for shell in shells.iter_mut().map(|shell| shell.as_mut().unwrap()) {
        if rng.random_bool(options.attribute_share) {
            // Constants never source an edge, so direction bookkeeping
            // does not apply to attributes, flippy spellings included.
            let draw = draw_role(rng, options, options.constant_inversion_share);
            shell.branches.push(Branch {
                role: draw.role,
                target: Target::Constant(pick(rng, CONSTANTS).to_string()),
            });
        }
    }

    // Reentrancies: reference branches that never close a directed cycle in
    // the deinverted graph, in either direction for flippy spellings.
    // Bounded retries; dense small graphs may admit fewer than asked.
    let goal = if node_count > 1 {
        rng.random_range(0..=options.max_reentrancies)
    } else {
        0
    };
    let mut added = 0;
    for _ in 0..goal * 4 {
        if added == goal {
            break;
        }
        let owner = rng.random_range(0..node_count);
        let other = rng.random_range(0..node_count);
        if owner == other {
            continue;
        }
        let draw = draw_role(rng, options, options.inverted_share);
        let (source, target) = if draw.inverted { (other, owner) } else { (owner, other) };
        if reaches(&edges, node_count, target, source) {
            continue;
        }
        if draw.flippy && reaches(&edges, node_count, source, target) {
            continue;
        }
        edges.push((source, target));
        if draw.flippy {
            edges.push((target, source));
        }
        shells[owner].as_mut().unwrap().branches.push(Branch {
            role: draw.role,
            target: Target::Reference(variables[other].clone()),
        });
        added += 1;
    }

    // Attach children bottom-up; parents have smaller indexes, so a child's
    // subtree is complete by the time it attaches.
    for child in (1..node_count).rev() {
        let node = shells[child].take().unwrap();
        shells[parents[child]].as_mut().unwrap().branches.push(Branch {
            role: spellings[child].clone(),
            target: Target::Node(node),
        });
    }
    Tree::new(shells[0].take().unwrap())
}

/// Depth-first reachability over directed index pairs.
fn reaches(edges: &[(usize, usize)], node_count: usize, from: usize, to: usize) -> bool {
    let mut adjacency = vec![Vec::new(); node_count];
    for &(source, target) in edges {
        adjacency[source].push(target);
    }
    let mut seen = vec![false; node_count];
    let mut stack = vec![from];
    while let Some(next) = stack.pop() {
        if next == to {
            return true;
        }
        if !seen[next] {
            seen[next] = true;
            stack.extend(adjacency[next].iter().copied());
        }
    }
    false
}

/// Convenience wrapper over [`random_tree`].
pub fn random_graph(rng: &mut ChaCha8Rng, options: &GenOptions) -> (Graph, Layout) {
    let tree = random_tree(rng, options);
    tree_to_graph(&tree).expect("generated trees are well formed")
}

/// Rewrites the label of the node at `target_index` in definition order.
pub fn rename_concept(tree: &Tree, target_index: usize, new_label: &str) -> Tree {
    fn walk(node: &Node, counter: &mut usize, target_index: usize, new_label: &str) -> Node {
        let label = if *counter == target_index {
            Some(new_label.to_string())
        } else {
            node.label.clone()
        };
        *counter += 1;
        let branches = node
            .branches
            .iter()
            .map(|branch| Branch {
                role: branch.role.clone(),
                target: match &branch.target {
                    Target::Node(child) => {
                        Target::Node(walk(child, counter, target_index, new_label))
                    }
                    other => other.clone(),
                },
            })
            .collect();
        Node {
            variable: node.variable.clone(),
            label,
            branches,
        }
    }
    Tree::new(walk(&tree.root, &mut 0, target_index, new_label))
}

/// A near-copy of `tree`: up to two concepts renamed onto other pool
/// entries. Zero mutations reproduce the input, so pairs built this way
/// range from identical to mildly divergent.
pub fn mutate_tree(rng: &mut ChaCha8Rng, tree: &Tree) -> Tree {
    let mut out = tree.clone();
    let node_count = out.nodes().len();
    for _ in 0..rng.random_range(0..=2) {
        let index = rng.random_range(0..node_count);
        let label = pick(rng, CONCEPTS);
        out = rename_concept(&out, index, label);
    }
    out
}

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Vec<CorpusEntry> {
    corpus::read_corpus(fixture_path(name)).expect("fixture corpus parses")
}

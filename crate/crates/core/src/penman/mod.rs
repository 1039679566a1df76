//! Reading, writing, and interpreting PENMAN graph notation.
//!
//! The pipeline has two layers. [`parse`] and [`serialize`] move between text
//! and a [`Tree`], which records the expression exactly as written.
//! [`tree_to_graph`] and [`graph_to_tree`] move between a tree and the
//! [`Graph`] it denotes; the accompanying [`Layout`] captures the
//! serialization choices (definition sites, branch order, inverted role
//! spellings) so the original text can be reproduced, or a different layout
//! imposed on the same graph.
//!
//! ```
//! use amrkit::penman;
//!
//! let tree = penman::parse("(d / drive-01 :ARG0 (h / he))").unwrap();
//! let (graph, layout) = penman::tree_to_graph(&tree).unwrap();
//! assert_eq!(graph.triples().len(), 4);
//! let back = penman::graph_to_tree(&graph, Some(&layout)).unwrap();
//! assert_eq!(tree, back);
//! ```

mod format;
mod graph;
mod parse;
mod tree;
mod validate;

pub use format::serialize;
pub use graph::{
    graph_to_tree, inverse_base, invert_role, is_of_final_role, tree_to_graph, Attribute, Edge,
    Graph, GraphError, Layout, Slot, SlotTarget, Term, Triple, OF_FINAL_ROLES, TOP_ROLE,
    TOP_SOURCE,
};
pub use parse::{parse, ParseError};
pub use tree::{Branch, Node, Target, Tree};
pub use validate::{
    canonical_spelling, validate_graph, validate_tree, Diagnostic, Severity, CANONICAL_SPELLINGS,
};

//! Toolkit for Abstract Meaning Representation graphs in PENMAN notation:
//! parsing and printing, graph/tree conversion with layout control,
//! normalization passes (role canonicalization, relation and attribute
//! reification, dereification, structure preservation), triple-overlap
//! scoring, and corpus utilities.

pub mod corpus;
pub mod normalize;
pub mod penman;
pub mod smatch;
pub mod stats;

//! PENMAN serialization.

use super::tree::{Node, Target, Tree};

const INDENT: usize = 3;

/// Render a tree in the conventional layout: every branch on its own line,
/// indented three spaces per nesting level.
///
/// ```
/// let tree = amrkit::penman::parse("(d / drive-01 :ARG0 (h / he))").unwrap();
/// assert_eq!(
///     amrkit::penman::serialize(&tree),
///     "(d / drive-01\n   :ARG0 (h / he))"
/// );
/// ```
pub fn serialize(tree: &Tree) -> String {
    let mut out = String::new();
    write_node(&mut out, &tree.root, 0);
    out
}

fn write_node(out: &mut String, node: &Node, depth: usize) {
    out.push('(');
    out.push_str(&node.variable);
    if let Some(label) = &node.label {
        out.push_str(" / ");
        out.push_str(label);
    }
    for branch in &node.branches {
        out.push('\n');
        for _ in 0..(depth + 1) * INDENT {
            out.push(' ');
        }
        out.push_str(&branch.role);
        out.push(' ');
        match &branch.target {
            Target::Node(child) => write_node(out, child, depth + 1),
            Target::Reference(variable) => out.push_str(variable),
            Target::Constant(lexeme) => out.push_str(lexeme),
        }
    }
    out.push(')');
}

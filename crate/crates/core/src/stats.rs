//! Corpus analysis: sizes, non-canonical role spellings, and how much of a
//! corpus the reify and dereify passes would touch.
//!
//! Counts are defined by the passes themselves: a relation is reifiable iff
//! `reify_relations` would replace it, and a node is collapsible iff
//! `dereify_relations` would collapse it, so the reported numbers always
//! agree with what normalization actually does. Percentages for role and
//! reifiable-relation counts use the total triple count as denominator; node
//! percentages use the node count.

use crate::corpus::CorpusEntry;
use crate::normalize::{normalize, NormalizeOptions, ReificationTable};
use crate::penman::{Tree, CANONICAL_SPELLINGS};

/// How often one non-canonical role spelling occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleUsage {
    /// The non-canonical spelling, like `:domain-of`.
    pub role: String,
    /// Graphs containing the spelling at least once.
    pub graphs: usize,
    /// Total occurrences across the corpus.
    pub occurrences: usize,
}

/// Corpus-wide counts with their derived percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub graphs: usize,
    /// Instance triples, one per node.
    pub nodes: usize,
    /// All triples: instances, tops, edges, and attributes.
    pub triples: usize,
    /// One row per non-canonical spelling, in a fixed order, zeros included.
    pub non_canonical: Vec<RoleUsage>,
    /// Graphs with at least one reifiable relation.
    pub reifiable_graphs: usize,
    /// Relations (edges and attributes) the reify pass would replace.
    pub reifiable_relations: usize,
    /// Graphs with at least one collapsible node.
    pub collapsible_graphs: usize,
    /// Nodes the dereify pass would collapse.
    pub collapsible_nodes: usize,
}

impl CorpusStats {
    pub fn reifiable_graph_percent(&self) -> f64 {
        percent(self.reifiable_graphs, self.graphs)
    }

    /// Reifiable relations as a share of all triples.
    pub fn reifiable_relation_percent(&self) -> f64 {
        percent(self.reifiable_relations, self.triples)
    }

    pub fn collapsible_graph_percent(&self) -> f64 {
        percent(self.collapsible_graphs, self.graphs)
    }

    /// Collapsible nodes as a share of all nodes.
    pub fn collapsible_node_percent(&self) -> f64 {
        percent(self.collapsible_nodes, self.nodes)
    }

    /// Three tab-separated tables: sizes, non-canonical role usage, and
    /// reifiable/collapsible counts, with percentages to two decimals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("Graphs\tNodes\tTriples\n");
        out.push_str(&format!("{}\t{}\t{}\n", self.graphs, self.nodes, self.triples));
        out.push('\n');
        out.push_str("Role\tGraphs\t% Graphs\tTriples\t% Triples\n");
        for usage in &self.non_canonical {
            out.push_str(&format!(
                "{}\t{}\t{:.2}\t{}\t{:.2}\n",
                usage.role,
                usage.graphs,
                percent(usage.graphs, self.graphs),
                usage.occurrences,
                percent(usage.occurrences, self.triples),
            ));
        }
        out.push('\n');
        out.push_str("Measure\tGraphs\t% Graphs\tCount\t% Count\n");
        out.push_str(&format!(
            "Reifiable relations\t{}\t{:.2}\t{}\t{:.2}\n",
            self.reifiable_graphs,
            self.reifiable_graph_percent(),
            self.reifiable_relations,
            self.reifiable_relation_percent(),
        ));
        out.push_str(&format!(
            "Collapsible nodes\t{}\t{:.2}\t{}\t{:.2}\n",
            self.collapsible_graphs,
            self.collapsible_graph_percent(),
            self.collapsible_nodes,
            self.collapsible_node_percent(),
        ));
        out
    }

    /// One `key<TAB>value` line per count, for machine consumption.
    pub fn render_keyvalue(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            out.push_str(key);
            out.push('\t');
            out.push_str(&value);
            out.push('\n');
        };
        put("graphs", self.graphs.to_string());
        put("nodes", self.nodes.to_string());
        put("triples", self.triples.to_string());
        for usage in &self.non_canonical {
            put(
                &format!("non_canonical.{}.graphs", usage.role),
                usage.graphs.to_string(),
            );
            put(
                &format!("non_canonical.{}.occurrences", usage.role),
                usage.occurrences.to_string(),
            );
        }
        put("reifiable.graphs", self.reifiable_graphs.to_string());
        put("reifiable.relations", self.reifiable_relations.to_string());
        put(
            "reifiable.graph_percent",
            format!("{:.2}", self.reifiable_graph_percent()),
        );
        put(
            "reifiable.relation_percent",
            format!("{:.2}", self.reifiable_relation_percent()),
        );
        put("collapsible.graphs", self.collapsible_graphs.to_string());
        put("collapsible.nodes", self.collapsible_nodes.to_string());
        put(
            "collapsible.graph_percent",
            format!("{:.2}", self.collapsible_graph_percent()),
        );
        put(
            "collapsible.node_percent",
            format!("{:.2}", self.collapsible_node_percent()),
        );
        out
    }
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Counts every statistic over `entries` against `table`.
pub fn corpus_stats(entries: &[CorpusEntry], table: &ReificationTable) -> CorpusStats {
    let mut stats = CorpusStats {
        graphs: entries.len(),
        nodes: 0,
        triples: 0,
        non_canonical: CANONICAL_SPELLINGS
            .iter()
            .map(|(spelling, _)| RoleUsage {
                role: spelling.to_string(),
                graphs: 0,
                occurrences: 0,
            })
            .collect(),
        reifiable_graphs: 0,
        reifiable_relations: 0,
        collapsible_graphs: 0,
        collapsible_nodes: 0,
    };
    for entry in entries {
        stats.nodes += entry.graph.instances.len();
        stats.triples += entry.graph.triple_count();
        for (i, count) in spelling_counts(&entry.tree).into_iter().enumerate() {
            if count > 0 {
                stats.non_canonical[i].graphs += 1;
                stats.non_canonical[i].occurrences += count;
            }
        }
        let reified = pass_count(
            entry,
            NormalizeOptions {
                reify_relations: true,
                ..NormalizeOptions::default()
            },
            table,
        );
        stats.reifiable_relations += reified;
        stats.reifiable_graphs += usize::from(reified > 0);
        let collapsed = pass_count(
            entry,
            NormalizeOptions {
                dereify_relations: true,
                ..NormalizeOptions::default()
            },
            table,
        );
        stats.collapsible_nodes += collapsed;
        stats.collapsible_graphs += usize::from(collapsed > 0);
    }
    stats
}

/// Relations the given single pass would rewrite in this entry.
fn pass_count(entry: &CorpusEntry, options: NormalizeOptions, table: &ReificationTable) -> usize {
    match normalize(&entry.graph, &entry.layout, options, table) {
        Ok(normalized) => {
            let counts = normalized.counts;
            counts.relations_reified + counts.nodes_dereified
        }
        Err(_) => 0,
    }
}

/// Occurrences of each non-canonical spelling in the serialized form, indexed
/// like `CANONICAL_SPELLINGS`.
fn spelling_counts(tree: &Tree) -> Vec<usize> {
    let mut counts = vec![0; CANONICAL_SPELLINGS.len()];
    for node in tree.nodes() {
        for branch in &node.branches {
            for (i, (spelling, _)) in CANONICAL_SPELLINGS.iter().enumerate() {
                if branch.role == *spelling {
                    counts[i] += 1;
                }
            }
        }
    }
    counts
}

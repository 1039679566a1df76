//! Randomized invariants. Each property draws a 64-bit seed, expands it
//! into a generated graph (or pair), and checks behavior that must hold for
//! every input, not just the fixtures.

mod common;

use std::collections::HashSet;

use amrkit::normalize::{normalize, NormalizeOptions, ReificationTable};
use amrkit::penman::{graph_to_tree, parse, serialize, tree_to_graph, Graph};
use amrkit::smatch::{brute_force_map, count_matches, hill_climb, score_pair, ScoreOptions};
use common::{mutate_tree, random_graph, random_tree, GenOptions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_triples(graph: &Graph) -> Vec<String> {
    let mut triples: Vec<String> = graph.triples().iter().map(ToString::to_string).collect();
    triples.sort();
    triples
}

fn pass(
    graph: &Graph,
    layout: &amrkit::penman::Layout,
    options: NormalizeOptions,
) -> amrkit::normalize::Normalized {
    normalize(graph, layout, options, ReificationTable::builtin()).unwrap()
}

proptest! {
    /// Serializing a tree and parsing the text back reproduces the tree
    /// exactly, spellings and branch order included, and with it the
    /// denoted triple multiset.
    #[test]
    fn serialization_roundtrips(seed in any::<u64>()) {
        let tree = random_tree(&mut seeded(seed), &GenOptions::noncanonical());
        let reparsed = parse(&serialize(&tree)).unwrap();
        prop_assert_eq!(&reparsed, &tree);
        let (graph, _) = tree_to_graph(&tree).unwrap();
        let (regraph, _) = tree_to_graph(&reparsed).unwrap();
        prop_assert_eq!(sorted_triples(&regraph), sorted_triples(&graph));
    }

    /// Collapsing a fully reified graph restores the original graph, down
    /// to the serialization. Holds for canonical role spellings: the
    /// non-canonical duals (`:mod-of` for `:domain`, `:domain-of` for
    /// `:mod`) reify to the exact same node as their partner, so collapsing
    /// restores the canonical member of the pair, not the dual.
    #[test]
    fn dereify_undoes_reify(seed in any::<u64>()) {
        let (graph, layout) = random_graph(&mut seeded(seed), &GenOptions::default());
        let reified = pass(&graph, &layout, NormalizeOptions {
            reify_relations: true,
            ..NormalizeOptions::default()
        });
        let collapsed = pass(&reified.graph, &reified.layout, NormalizeOptions {
            dereify_relations: true,
            ..NormalizeOptions::default()
        });
        prop_assert_eq!(collapsed.counts.nodes_dereified, reified.counts.relations_reified);
        prop_assert_eq!(sorted_triples(&collapsed.graph), sorted_triples(&graph));

        let original = serialize(&graph_to_tree(&graph, Some(&layout)).unwrap());
        let restored = serialize(&graph_to_tree(&collapsed.graph, Some(&collapsed.layout)).unwrap());
        prop_assert_eq!(restored, original);
    }

    /// On arbitrary spellings the same roundtrip holds after the
    /// canonicalization pass, mirroring the fixed pipeline order.
    #[test]
    fn dereify_undoes_reify_after_canonicalization(seed in any::<u64>()) {
        let (graph, layout) = random_graph(&mut seeded(seed), &GenOptions::noncanonical());
        let canonical = pass(&graph, &layout, NormalizeOptions {
            canonicalize_roles: true,
            ..NormalizeOptions::default()
        });
        let reified = pass(&canonical.graph, &canonical.layout, NormalizeOptions {
            reify_relations: true,
            ..NormalizeOptions::default()
        });
        let collapsed = pass(&reified.graph, &reified.layout, NormalizeOptions {
            dereify_relations: true,
            ..NormalizeOptions::default()
        });
        prop_assert_eq!(collapsed.counts.nodes_dereified, reified.counts.relations_reified);
        prop_assert_eq!(sorted_triples(&collapsed.graph), sorted_triples(&canonical.graph));
    }

    /// Each pass changes the size of the graph by exactly what its counter
    /// reports: a reified relation adds one node and two triples, a reified
    /// attribute adds one node and one triple, and structure marking adds
    /// one triple per non-root definition site.
    #[test]
    fn pass_counts_match_size_deltas(seed in any::<u64>()) {
        let (graph, layout) = random_graph(&mut seeded(seed), &GenOptions::default());
        let triples = graph.triple_count();
        let nodes = graph.instances.len();

        let reified = pass(&graph, &layout, NormalizeOptions {
            reify_relations: true,
            ..NormalizeOptions::default()
        });
        prop_assert_eq!(
            reified.graph.triple_count(),
            triples + 2 * reified.counts.relations_reified
        );
        prop_assert_eq!(
            reified.graph.instances.len(),
            nodes + reified.counts.relations_reified
        );

        let attributes = pass(&graph, &layout, NormalizeOptions {
            reify_attributes: true,
            ..NormalizeOptions::default()
        });
        prop_assert_eq!(attributes.counts.attributes_reified, graph.attributes.len());
        prop_assert_eq!(attributes.graph.attributes.len(), 0);
        prop_assert_eq!(
            attributes.graph.triple_count(),
            triples + attributes.counts.attributes_reified
        );
        prop_assert_eq!(
            attributes.graph.instances.len(),
            nodes + attributes.counts.attributes_reified
        );

        let marked = pass(&graph, &layout, NormalizeOptions {
            preserve_structure: true,
            ..NormalizeOptions::default()
        });
        prop_assert_eq!(marked.counts.top_relations_added, nodes - 1);
        prop_assert_eq!(marked.graph.triple_count(), triples + nodes - 1);
    }

    /// Spelling canonicalization relabels roles without changing the size
    /// of the graph, and a second run finds nothing left to rewrite. The
    /// same holds for attribute reification and structure marking.
    #[test]
    fn rewrite_passes_are_idempotent(seed in any::<u64>()) {
        let (graph, layout) = random_graph(&mut seeded(seed), &GenOptions::noncanonical());

        let canonical = NormalizeOptions { canonicalize_roles: true, ..NormalizeOptions::default() };
        let once = pass(&graph, &layout, canonical);
        prop_assert_eq!(once.graph.triple_count(), graph.triple_count());
        let twice = pass(&once.graph, &once.layout, canonical);
        prop_assert_eq!(twice.counts.roles_canonicalized, 0);
        prop_assert_eq!(sorted_triples(&twice.graph), sorted_triples(&once.graph));

        let attr = NormalizeOptions { reify_attributes: true, ..NormalizeOptions::default() };
        let once = pass(&graph, &layout, attr);
        let twice = pass(&once.graph, &once.layout, attr);
        prop_assert_eq!(twice.counts.attributes_reified, 0);

        let marked = NormalizeOptions { preserve_structure: true, ..NormalizeOptions::default() };
        let once = pass(&graph, &layout, marked);
        let twice = pass(&once.graph, &once.layout, marked);
        prop_assert_eq!(twice.counts.top_relations_added, 0);
        prop_assert_eq!(sorted_triples(&twice.graph), sorted_triples(&once.graph));
    }

    /// A graph scored against itself matches perfectly.
    #[test]
    fn self_score_is_one(seed in any::<u64>()) {
        let (graph, _) = random_graph(&mut seeded(seed), &GenOptions::default());
        let report = score_pair(&graph, &graph, &ScoreOptions::default()).unwrap();
        prop_assert_eq!(report.precision, 1.0);
        prop_assert_eq!(report.recall, 1.0);
        prop_assert_eq!(report.f_score, 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Hill climbing never reports more matches than the exhaustive
    /// optimum, and its mapping is an injection from test variables to
    /// gold variables.
    #[test]
    fn hill_climb_bounded_by_exhaustive(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let options = GenOptions::small();
        let (test, _) = random_graph(&mut rng, &options);
        let (gold, _) = random_graph(&mut rng, &options);

        let (mapping, _) = hill_climb(&test, &gold, 4, seed);
        let (best_mapping, _) = brute_force_map(&test, &gold, 8).unwrap();
        let test_triples = test.triples();
        let gold_triples = gold.triples();
        let climbed = count_matches(&test_triples, &gold_triples, &mapping);
        let best = count_matches(&test_triples, &gold_triples, &best_mapping);
        prop_assert!(climbed <= best, "hill climb found {climbed}, exhaustive {best}");

        let mut range: HashSet<&str> = HashSet::new();
        for (from, to) in mapping.iter() {
            prop_assert!(test.instances.contains_key(from));
            prop_assert!(gold.instances.contains_key(to));
            prop_assert!(range.insert(to), "gold variable {to} mapped twice");
        }
    }

    /// Report arithmetic stays consistent on unequal pairs, and scoring is
    /// deterministic: the same inputs give the same mapping and score.
    #[test]
    fn report_arithmetic_and_determinism(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tree = random_tree(&mut rng, &GenOptions::default());
        let (test, _) = tree_to_graph(&tree).unwrap();
        let (gold, _) = tree_to_graph(&mutate_tree(&mut rng, &tree)).unwrap();

        let report = score_pair(&test, &gold, &ScoreOptions::default()).unwrap();
        prop_assert!(report.matched <= report.test_total.min(report.gold_total));
        let precision = report.matched as f64 / report.test_total as f64;
        let recall = report.matched as f64 / report.gold_total as f64;
        let f_score = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        prop_assert_eq!(report.precision, precision);
        prop_assert_eq!(report.recall, recall);
        prop_assert_eq!(report.f_score, f_score);

        let again = score_pair(&test, &gold, &ScoreOptions::default()).unwrap();
        prop_assert_eq!(again.matched, report.matched);
        prop_assert_eq!(again.mapping.to_string(), report.mapping.to_string());
    }
}

//! Smatch: the triple-matching score between two AMR graphs.
//!
//! Smatch compares a test graph against a gold graph by searching for an
//! injective mapping from test variables to gold variables that maximizes the
//! number of matching triples. With `M` matches, `T` test triples, and `G`
//! gold triples, precision is `M/T`, recall is `M/G`, and the score is the
//! F-score `2PR/(P+R)` (0 when `P+R` is 0). The gold graph is always the
//! second argument and always the denominator of recall.
//!
//! Finding the optimal mapping is NP-complete, so [`score_pair`] uses greedy
//! hill climbing with restarts by default and the exhaustive
//! [`brute_force_map`] only on request for small graphs. Results are
//! deterministic for a given seed.
//!
//! ```
//! use amrkit::penman::{parse, tree_to_graph};
//! use amrkit::smatch::{score_pair, ScoreOptions};
//!
//! let (test, _) = tree_to_graph(&parse("(a / apple)").unwrap()).unwrap();
//! let (gold, _) = tree_to_graph(&parse("(a / apple :quant 5)").unwrap()).unwrap();
//! let report = score_pair(&test, &gold, &ScoreOptions::default()).unwrap();
//! assert_eq!(report.score_line(), "1.0000 0.6667 0.8000");
//! ```

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::penman::{Graph, Term, Triple};

/// Default number of hill-climbing restarts (one concept-seeded, three random).
pub const DEFAULT_RESTARTS: usize = 4;

/// Default variable-count bound for exact search.
pub const DEFAULT_EXACT_BOUND: usize = 8;

/// Hard cap on injective mappings the exhaustive search will enumerate, so a
/// small bound on one side cannot hide a huge search over the other side.
const BRUTE_FORCE_CAP: u128 = 10_000_000;

/// An injective partial mapping from test-graph variables to gold-graph
/// variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mapping {
    pairs: IndexMap<String, String>,
}

impl Mapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a mapping from `(test, gold)` pairs, rejecting any pair that
    /// would break injectivity.
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self, MappingError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut mapping = Self::new();
        for (test, gold) in pairs {
            mapping.insert(test, gold)?;
        }
        Ok(mapping)
    }

    /// Maps `test` to `gold`. Re-inserting an existing pair is a no-op;
    /// remapping either side is an error.
    pub fn insert(
        &mut self,
        test: impl Into<String>,
        gold: impl Into<String>,
    ) -> Result<(), MappingError> {
        let test = test.into();
        let gold = gold.into();
        match self.pairs.get(&test) {
            Some(current) if *current == gold => return Ok(()),
            Some(_) => return Err(MappingError::TestTaken(test)),
            None => {}
        }
        if self.pairs.values().any(|g| *g == gold) {
            return Err(MappingError::GoldTaken(gold));
        }
        self.pairs.insert(test, gold);
        Ok(())
    }

    /// The gold variable `test` maps to, if any.
    pub fn get(&self, test: &str) -> Option<&str> {
        self.pairs.get(test).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(t, g)| (t.as_str(), g.as_str()))
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (test, gold)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{test}->{gold}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("test variable `{0}` is already mapped to a different gold variable")]
    TestTaken(String),
    #[error("gold variable `{0}` is already the image of a different test variable")]
    GoldTaken(String),
}

/// Knobs for [`score_pair`] and [`score_corpus`].
#[derive(Debug, Clone, Copy)]
pub struct ScoreOptions {
    /// Hill-climbing restarts; clamped to at least 1.
    pub restarts: usize,
    /// Seed for the random restarts.
    pub seed: u64,
    /// Use exhaustive search instead of hill climbing when the pair is small
    /// enough (see `exact_bound`).
    pub exact: bool,
    /// Exact search applies when the smaller variable count is at most this.
    pub exact_bound: usize,
    /// Error out on invalid triples instead of dropping them with a tally.
    pub strict: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            exact: false,
            exact_bound: DEFAULT_EXACT_BOUND,
            strict: false,
        }
    }
}

/// The outcome of scoring one pair (or, summed, a corpus).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    /// Matching triples under the best mapping found (`M`).
    pub matched: usize,
    /// Scored test triples (`T`).
    pub test_total: usize,
    /// Scored gold triples (`G`).
    pub gold_total: usize,
    /// `M/T`, or 0 when `T` is 0.
    pub precision: f64,
    /// `M/G`, or 0 when `G` is 0.
    pub recall: f64,
    /// `2PR/(P+R)`, or 0 when `P+R` is 0.
    pub f_score: f64,
    /// Climbs actually run; 0 means the exhaustive search was used.
    pub restarts_used: usize,
    /// Seed the random restarts drew from.
    pub seed: u64,
    /// Test triples dropped before scoring as constant-sourced inversions.
    pub dropped_test: usize,
    /// Gold triples dropped before scoring as constant-sourced inversions.
    pub dropped_gold: usize,
    /// The best variable mapping found (empty in a corpus summary).
    pub mapping: Mapping,
}

impl ScoreReport {
    #[allow(clippy::too_many_arguments)]
    fn from_counts(
        matched: usize,
        test_total: usize,
        gold_total: usize,
        restarts_used: usize,
        seed: u64,
        dropped_test: usize,
        dropped_gold: usize,
        mapping: Mapping,
    ) -> Self {
        debug_assert!(matched <= test_total.min(gold_total));
        let precision = ratio(matched, test_total);
        let recall = ratio(matched, gold_total);
        let f_score = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            matched,
            test_total,
            gold_total,
            precision,
            recall,
            f_score,
            restarts_used,
            seed,
            dropped_test,
            dropped_gold,
            mapping,
        }
    }

    /// `"P R F"` to four decimals, the line-oriented output format.
    pub fn score_line(&self) -> String {
        format!(
            "{:.4} {:.4} {:.4}",
            self.precision, self.recall, self.f_score
        )
    }
}

fn ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Per-pair reports plus the micro-averaged summary: `M`, `T`, and `G` are
/// summed across pairs and precision/recall/F computed from the sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    pub summary: ScoreReport,
    pub pairs: Vec<ScoreReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("exact search needs {variables} variables mapped, above the bound of {bound}")]
    ExceedsBound { variables: usize, bound: usize },
    #[error("exact search would enumerate {injections} mappings, too many to try")]
    TooManyInjections { injections: u128 },
    #[error("{side} graph has an inverted triple with a constant source: {triple}")]
    ConstantInversion { side: &'static str, triple: String },
}

/// Counts test triples that match gold triples under `mapping`.
///
/// A triple matches when its role matches, constants are string-equal, and
/// variables correspond under the mapping; each gold triple matches at most
/// one test triple. Triples whose source would be a constant after
/// deinversion are excluded from both sides, and triples with an unmapped
/// variable can never match.
pub fn count_matches(test: &[Triple], gold: &[Triple], mapping: &Mapping) -> usize {
    let mut remaining: HashMap<(&str, KeyTerm, KeyTerm), usize> = HashMap::new();
    for triple in gold.iter().filter(|t| !t.is_constant_inversion()) {
        let key = (
            triple.role.as_str(),
            KeyTerm::of(&triple.source),
            KeyTerm::of(&triple.target),
        );
        *remaining.entry(key).or_insert(0) += 1;
    }
    let mut matched = 0;
    for triple in test.iter().filter(|t| !t.is_constant_inversion()) {
        let (Some(source), Some(target)) = (
            KeyTerm::of(&triple.source).mapped(mapping),
            KeyTerm::of(&triple.target).mapped(mapping),
        ) else {
            continue;
        };
        if let Some(n) = remaining.get_mut(&(triple.role.as_str(), source, target)) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    matched
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum KeyTerm<'a> {
    Variable(&'a str),
    Constant(&'a str),
}

impl<'a> KeyTerm<'a> {
    fn of(term: &'a Term) -> Self {
        match term {
            Term::Variable(v) => KeyTerm::Variable(v),
            Term::Constant(c) => KeyTerm::Constant(c),
        }
    }

    /// The gold-side image of a test-side term, `None` for unmapped variables.
    fn mapped(self, mapping: &'a Mapping) -> Option<Self> {
        match self {
            KeyTerm::Variable(v) => mapping.get(v).map(KeyTerm::Variable),
            constant => Some(constant),
        }
    }
}

/// Greedy mapping search with restarts.
///
/// The first restart seeds the mapping by pairing variables with equal
/// concepts (first unused gold variable in definition order); later restarts
/// seed with random injective mappings drawn from one stream seeded by
/// `seed`. Each climb applies the single reassignment or swap that most
/// increases the match count, breaking ties toward the lowest (test index,
/// gold index), until no move improves. Returns the best mapping over all
/// restarts and its match count. `restarts` is clamped to at least 1.
pub fn hill_climb(test: &Graph, gold: &Graph, restarts: usize, seed: u64) -> (Mapping, usize) {
    let matcher = Matcher::new(test, gold);
    let (assignment, matched, _) = matcher.climb_restarts(restarts.max(1), seed);
    (matcher.mapping_of(&assignment), matched)
}

/// Exhaustive mapping search: enumerates every injective mapping of the
/// smaller variable set into the larger and returns a maximum, preferring the
/// lowest variable indices on ties.
///
/// Errors when the smaller variable count exceeds `bound` or the number of
/// injections is too large to enumerate.
pub fn brute_force_map(
    test: &Graph,
    gold: &Graph,
    bound: usize,
) -> Result<(Mapping, usize), ScoreError> {
    let matcher = Matcher::new(test, gold);
    let (assignment, matched) = matcher.brute_force(bound)?;
    Ok((matcher.mapping_of(&assignment), matched))
}

/// Scores one test/gold pair. Uses the exhaustive search when `exact` is set
/// and the pair is within bounds, hill climbing otherwise.
pub fn score_pair(
    test: &Graph,
    gold: &Graph,
    options: &ScoreOptions,
) -> Result<ScoreReport, ScoreError> {
    let matcher = Matcher::new(test, gold);
    if options.strict {
        if let Some(error) = matcher.first_dropped.clone() {
            return Err(error);
        }
    }
    let smaller = matcher.test_vars.len().min(matcher.gold_vars.len());
    let exact_ok = options.exact
        && smaller <= options.exact_bound
        && matcher.injections() <= BRUTE_FORCE_CAP;
    let (assignment, matched, restarts_used) = if exact_ok {
        let (assignment, matched) = matcher.brute_force(options.exact_bound)?;
        (assignment, matched, 0)
    } else {
        matcher.climb_restarts(options.restarts.max(1), options.seed)
    };
    Ok(ScoreReport::from_counts(
        matched,
        matcher.test_total,
        matcher.gold_total,
        restarts_used,
        options.seed,
        matcher.dropped_test,
        matcher.dropped_gold,
        matcher.mapping_of(&assignment),
    ))
}

/// Scores aligned pairs and micro-averages: sums `M`, `T`, and `G` across
/// pairs, then computes precision/recall/F from the sums. Per-pair reports
/// are kept alongside the summary.
pub fn score_corpus(
    pairs: &[(Graph, Graph)],
    options: &ScoreOptions,
) -> Result<CorpusReport, ScoreError> {
    let mut reports = Vec::with_capacity(pairs.len());
    let (mut matched, mut test_total, mut gold_total) = (0, 0, 0);
    let (mut dropped_test, mut dropped_gold) = (0, 0);
    let mut restarts_used = 0;
    for (test, gold) in pairs {
        let report = score_pair(test, gold, options)?;
        matched += report.matched;
        test_total += report.test_total;
        gold_total += report.gold_total;
        dropped_test += report.dropped_test;
        dropped_gold += report.dropped_gold;
        restarts_used = restarts_used.max(report.restarts_used);
        reports.push(report);
    }
    let summary = ScoreReport::from_counts(
        matched,
        test_total,
        gold_total,
        restarts_used,
        options.seed,
        dropped_test,
        dropped_gold,
        Mapping::new(),
    );
    Ok(CorpusReport {
        summary,
        pairs: reports,
    })
}

/// Variables become side-local indices and everything else interned ids, so
/// evaluating a candidate mapping is pure integer work.
const VAR_FLAG: u64 = 1 << 32;

type Key = (u32, u64, u64);

#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
}

impl Interner {
    fn id(&mut self, text: &str) -> u32 {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = self.ids.len() as u32;
        self.ids.insert(text.to_string(), id);
        id
    }
}

struct Matcher {
    test_vars: Vec<String>,
    gold_vars: Vec<String>,
    test_concepts: Vec<u32>,
    gold_concepts: Vec<u32>,
    /// Scored test triples with test-variable indices.
    test_triples: Vec<Key>,
    /// Multiset of scored gold triples with gold-variable indices.
    gold_counts: HashMap<Key, u32>,
    test_total: usize,
    gold_total: usize,
    dropped_test: usize,
    dropped_gold: usize,
    first_dropped: Option<ScoreError>,
    /// `min(T, G)`, the ceiling on any match count.
    upper: usize,
}

enum Move {
    Assign(usize, u32),
    Swap(usize, usize),
}

impl Matcher {
    fn new(test: &Graph, gold: &Graph) -> Self {
        let mut intern = Interner::default();
        let test_vars: Vec<String> = test.instances.keys().cloned().collect();
        let gold_vars: Vec<String> = gold.instances.keys().cloned().collect();
        let test_concepts = test.instances.values().map(|c| intern.id(c)).collect();
        let gold_concepts = gold.instances.values().map(|c| intern.id(c)).collect();

        let mut matcher = Self {
            test_vars,
            gold_vars,
            test_concepts,
            gold_concepts,
            test_triples: Vec::new(),
            gold_counts: HashMap::new(),
            test_total: 0,
            gold_total: 0,
            dropped_test: 0,
            dropped_gold: 0,
            first_dropped: None,
            upper: 0,
        };

        let index_of = |vars: &[String]| -> HashMap<String, u32> {
            vars.iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i as u32))
                .collect()
        };
        let test_index = index_of(&matcher.test_vars);
        let gold_index = index_of(&matcher.gold_vars);

        for triple in test.triples() {
            if matcher.drop_if_invalid(&triple, "test") {
                continue;
            }
            let key = encode(&triple, &test_index, &mut intern);
            matcher.test_triples.push(key);
            matcher.test_total += 1;
        }
        for triple in gold.triples() {
            if matcher.drop_if_invalid(&triple, "gold") {
                continue;
            }
            let key = encode(&triple, &gold_index, &mut intern);
            *matcher.gold_counts.entry(key).or_insert(0) += 1;
            matcher.gold_total += 1;
        }
        matcher.upper = matcher.test_total.min(matcher.gold_total);
        matcher
    }

    fn drop_if_invalid(&mut self, triple: &Triple, side: &'static str) -> bool {
        if !triple.is_constant_inversion() {
            return false;
        }
        match side {
            "test" => self.dropped_test += 1,
            _ => self.dropped_gold += 1,
        }
        if self.first_dropped.is_none() {
            self.first_dropped = Some(ScoreError::ConstantInversion {
                side,
                triple: triple.to_string(),
            });
        }
        true
    }

    /// Number of injective mappings the exhaustive search would enumerate.
    fn injections(&self) -> u128 {
        let larger = self.test_vars.len().max(self.gold_vars.len()) as u128;
        let smaller = self.test_vars.len().min(self.gold_vars.len()) as u128;
        let mut total: u128 = 1;
        for i in 0..smaller {
            total = total.saturating_mul(larger - i);
        }
        total
    }

    /// Match count under `assignment` (test index to gold index).
    fn eval(&self, assignment: &[Option<u32>], scratch: &mut HashMap<Key, u32>) -> usize {
        scratch.clear();
        for &(role, source, target) in &self.test_triples {
            let (Some(source), Some(target)) = (
                translate(source, assignment),
                translate(target, assignment),
            ) else {
                continue;
            };
            *scratch.entry((role, source, target)).or_insert(0) += 1;
        }
        let mut matched = 0;
        for (key, &count) in scratch.iter() {
            if let Some(&available) = self.gold_counts.get(key) {
                matched += count.min(available) as usize;
            }
        }
        matched
    }

    /// One greedy climb from `assignment`: repeatedly applies the single
    /// reassignment or swap with the biggest gain, first-found (lowest test
    /// index, then gold index) on ties, until no move strictly improves.
    fn climb(
        &self,
        assignment: &mut [Option<u32>],
        used: &mut [bool],
        scratch: &mut HashMap<Key, u32>,
    ) -> usize {
        let test_count = assignment.len();
        let mut current = self.eval(assignment, scratch);
        loop {
            if current == self.upper {
                return current;
            }
            let mut best = current;
            let mut best_move = None;
            for ti in 0..test_count {
                let old = assignment[ti];
                for gj in (0..used.len()).filter(|&gj| !used[gj]) {
                    assignment[ti] = Some(gj as u32);
                    let count = self.eval(assignment, scratch);
                    if count > best {
                        best = count;
                        best_move = Some(Move::Assign(ti, gj as u32));
                    }
                }
                assignment[ti] = old;
            }
            for ti in 0..test_count {
                for tj in ti + 1..test_count {
                    if assignment[ti] == assignment[tj] {
                        continue;
                    }
                    assignment.swap(ti, tj);
                    let count = self.eval(assignment, scratch);
                    if count > best {
                        best = count;
                        best_move = Some(Move::Swap(ti, tj));
                    }
                    assignment.swap(ti, tj);
                }
            }
            match best_move {
                Some(Move::Assign(ti, gj)) => {
                    if let Some(old) = assignment[ti] {
                        used[old as usize] = false;
                    }
                    assignment[ti] = Some(gj);
                    used[gj as usize] = true;
                }
                Some(Move::Swap(ti, tj)) => assignment.swap(ti, tj),
                None => return current,
            }
            current = best;
        }
    }

    /// Best assignment over `restarts` climbs, with the count and the number
    /// of climbs actually run (fewer than asked when a climb hits `upper`).
    fn climb_restarts(&self, restarts: usize, seed: u64) -> (Vec<Option<u32>>, usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scratch = HashMap::new();
        let mut best: Option<(Vec<Option<u32>>, usize)> = None;
        let mut restarts_used = 0;
        for restart in 0..restarts {
            let mut assignment = if restart == 0 {
                self.concept_seed()
            } else {
                self.random_seed(&mut rng)
            };
            let mut used = used_of(&assignment, self.gold_vars.len());
            let count = self.climb(&mut assignment, &mut used, &mut scratch);
            restarts_used = restart + 1;
            if best.as_ref().is_none_or(|(_, b)| count > *b) {
                best = Some((assignment, count));
            }
            if best.as_ref().unwrap().1 == self.upper {
                break;
            }
        }
        let (assignment, count) = best.unwrap_or((vec![None; self.test_vars.len()], 0));
        (assignment, count, restarts_used)
    }

    /// Pairs each test variable with the first unused gold variable holding
    /// an equal concept, in definition order.
    fn concept_seed(&self) -> Vec<Option<u32>> {
        let mut used = vec![false; self.gold_vars.len()];
        let mut assignment = vec![None; self.test_vars.len()];
        for (ti, &concept) in self.test_concepts.iter().enumerate() {
            for (gj, &gold_concept) in self.gold_concepts.iter().enumerate() {
                if !used[gj] && gold_concept == concept {
                    assignment[ti] = Some(gj as u32);
                    used[gj] = true;
                    break;
                }
            }
        }
        assignment
    }

    /// A uniformly random injective assignment covering the smaller side.
    fn random_seed(&self, rng: &mut ChaCha8Rng) -> Vec<Option<u32>> {
        let test_count = self.test_vars.len();
        let gold_count = self.gold_vars.len();
        let mut tests: Vec<usize> = (0..test_count).collect();
        let mut golds: Vec<u32> = (0..gold_count as u32).collect();
        tests.shuffle(rng);
        golds.shuffle(rng);
        let mut assignment = vec![None; test_count];
        for i in 0..test_count.min(gold_count) {
            assignment[tests[i]] = Some(golds[i]);
        }
        assignment
    }

    fn brute_force(&self, bound: usize) -> Result<(Vec<Option<u32>>, usize), ScoreError> {
        let test_count = self.test_vars.len();
        let gold_count = self.gold_vars.len();
        let smaller = test_count.min(gold_count);
        if smaller > bound {
            return Err(ScoreError::ExceedsBound {
                variables: smaller,
                bound,
            });
        }
        let injections = self.injections();
        if injections > BRUTE_FORCE_CAP {
            return Err(ScoreError::TooManyInjections { injections });
        }
        let mut search = Search {
            matcher: self,
            scratch: HashMap::new(),
            assignment: vec![None; test_count],
            used: vec![false; test_count.max(gold_count)],
            best: None,
        };
        if test_count <= gold_count {
            search.assign_test(0);
        } else {
            let mut choices = vec![0u32; gold_count];
            search.assign_gold(0, &mut choices);
        }
        Ok(search.best.expect("exhaustive search visits at least one mapping"))
    }

    fn mapping_of(&self, assignment: &[Option<u32>]) -> Mapping {
        let mut mapping = Mapping::new();
        for (ti, slot) in assignment.iter().enumerate() {
            if let Some(gj) = slot {
                mapping
                    .pairs
                    .insert(self.test_vars[ti].clone(), self.gold_vars[*gj as usize].clone());
            }
        }
        mapping
    }
}

fn encode(triple: &Triple, vars: &HashMap<String, u32>, intern: &mut Interner) -> Key {
    let mut code = |term: &Term| match term {
        Term::Variable(v) => VAR_FLAG | u64::from(vars[v]),
        Term::Constant(c) => u64::from(intern.id(c)),
    };
    let source = code(&triple.source);
    let target = code(&triple.target);
    (intern.id(&triple.role), source, target)
}

fn translate(code: u64, assignment: &[Option<u32>]) -> Option<u64> {
    if code & VAR_FLAG != 0 {
        let index = (code & !VAR_FLAG) as usize;
        assignment[index].map(|gold| VAR_FLAG | u64::from(gold))
    } else {
        Some(code)
    }
}

fn used_of(assignment: &[Option<u32>], gold_count: usize) -> Vec<bool> {
    let mut used = vec![false; gold_count];
    for slot in assignment.iter().flatten() {
        used[*slot as usize] = true;
    }
    used
}

/// Depth-first enumeration of injective assignments for the exhaustive
/// search. Candidates are tried in ascending index order, so the first
/// maximum found is the tie-break winner.
struct Search<'a> {
    matcher: &'a Matcher,
    scratch: HashMap<Key, u32>,
    assignment: Vec<Option<u32>>,
    used: Vec<bool>,
    best: Option<(Vec<Option<u32>>, usize)>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        matches!(&self.best, Some((_, count)) if *count == self.matcher.upper)
    }

    fn leaf(&mut self) {
        let count = self.matcher.eval(&self.assignment, &mut self.scratch);
        if self.best.as_ref().is_none_or(|(_, b)| count > *b) {
            self.best = Some((self.assignment.clone(), count));
        }
    }

    /// Test side is smaller: choose a distinct gold image per test variable.
    fn assign_test(&mut self, ti: usize) {
        if self.done() {
            return;
        }
        if ti == self.assignment.len() {
            self.leaf();
            return;
        }
        for gj in 0..self.matcher.gold_vars.len() {
            if self.used[gj] {
                continue;
            }
            self.used[gj] = true;
            self.assignment[ti] = Some(gj as u32);
            self.assign_test(ti + 1);
            self.assignment[ti] = None;
            self.used[gj] = false;
        }
    }

    /// Gold side is smaller: choose a distinct test variable per gold
    /// variable, then read the choices back as a test-side assignment.
    fn assign_gold(&mut self, gj: usize, choices: &mut [u32]) {
        if self.done() {
            return;
        }
        if gj == choices.len() {
            self.assignment.fill(None);
            for (gold, &test) in choices.iter().enumerate() {
                self.assignment[test as usize] = Some(gold as u32);
            }
            self.leaf();
            return;
        }
        for ti in 0..self.matcher.test_vars.len() {
            if self.used[ti] {
                continue;
            }
            self.used[ti] = true;
            choices[gj] = ti as u32;
            self.assign_gold(gj + 1, choices);
            self.used[ti] = false;
        }
    }
}

//! `amrkit`: normalize, score, inspect, and check AMR corpora.
//!
//! Exit codes: 0 on success, 1 on fatal input errors (and for `check` when
//! any error-severity diagnostic is found), 2 on usage errors. Reports go to
//! stdout; warnings, per-pass counts, and skip notices go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use amrkit::corpus::{self, CorpusEntry, SkippedEntry};
use amrkit::normalize::{normalize, NormalizeOptions, PassCounts, ReificationTable};
use amrkit::penman::{graph_to_tree, validate_tree, Severity};
use amrkit::smatch::{score_corpus, CorpusReport, ScoreOptions, DEFAULT_EXACT_BOUND, DEFAULT_RESTARTS};
use amrkit::stats::corpus_stats;

#[derive(Parser)]
#[command(name = "amrkit", version, about = "Normalize, score, inspect, and check AMR corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply normalization passes to a corpus
    Normalize(NormalizeCmd),
    /// Score a test corpus against a gold corpus (gold comes second)
    Score(ScoreCmd),
    /// Corpus statistics: sizes, role spellings, reifiable and collapsible counts
    Stats(StatsCmd),
    /// Validate a corpus and list its diagnostics
    Check(CheckCmd),
}

/// Normalization passes, shared by `normalize` and `score`. In `score` the
/// selected passes are applied to both sides, never one side only.
#[derive(Args)]
struct PassFlags {
    /// Rewrite non-canonical role spellings (`:domain-of` to `:mod` and friends)
    #[arg(short = 'I', long)]
    canonicalize_roles: bool,
    /// Replace reifiable relations with their concept nodes
    #[arg(short = 'R', long, conflicts_with = "dereify_relations")]
    reify_relations: bool,
    /// Collapse reified concept nodes back into relations
    #[arg(short = 'D', long)]
    dereify_relations: bool,
    /// Wrap attribute constants in fresh nodes
    #[arg(short = 'A', long)]
    reify_attributes: bool,
    /// Add :TOP relations recording where each node is defined
    #[arg(short = 'S', long)]
    preserve_structure: bool,
    /// Reification table (tab-separated: role, concept, source, target, flags)
    #[arg(long, env = "AMRKIT_REIFICATIONS", value_name = "PATH")]
    table: Option<PathBuf>,
}

impl PassFlags {
    fn options(&self) -> NormalizeOptions {
        NormalizeOptions {
            canonicalize_roles: self.canonicalize_roles,
            reify_relations: self.reify_relations,
            dereify_relations: self.dereify_relations,
            reify_attributes: self.reify_attributes,
            preserve_structure: self.preserve_structure,
        }
    }

    fn any(&self) -> bool {
        self.canonicalize_roles
            || self.reify_relations
            || self.dereify_relations
            || self.reify_attributes
            || self.preserve_structure
    }

    /// The table from `--table`/`AMRKIT_REIFICATIONS`, or `None` for builtin.
    fn load_table(&self) -> Result<Option<ReificationTable>> {
        match &self.table {
            Some(path) => Ok(Some(ReificationTable::from_path(path)?)),
            None => Ok(None),
        }
    }
}

#[derive(Args)]
struct NormalizeCmd {
    #[command(flatten)]
    passes: PassFlags,
    /// Input corpus file
    input: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Skip entries that fail to parse instead of aborting
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Args)]
struct ScoreCmd {
    #[command(flatten)]
    passes: PassFlags,
    /// Test corpus (system output)
    test: PathBuf,
    /// Gold corpus; always the recall denominator
    gold: PathBuf,
    /// Hill-climbing restarts (the first is concept-seeded)
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Seed for the random restarts
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search all variable mappings exhaustively when a pair is small enough
    #[arg(long)]
    exact: bool,
    /// Largest variable count exact search will take on
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND, value_name = "N")]
    exact_bound: usize,
    /// Treat constant-sourced inverted triples as fatal instead of dropping them
    #[arg(long)]
    strict: bool,
    /// Skip entries that fail to parse; unpaired entries are dropped
    #[arg(long)]
    skip_invalid: bool,
    /// Print the full per-pair key/value report instead of one `P R F` line
    #[arg(long)]
    report: bool,
}

#[derive(Args)]
struct StatsCmd {
    /// Input corpus file
    input: PathBuf,
    /// Reification table (tab-separated: role, concept, source, target, flags)
    #[arg(long, env = "AMRKIT_REIFICATIONS", value_name = "PATH")]
    table: Option<PathBuf>,
    /// Print `key<TAB>value` lines instead of tables
    #[arg(long)]
    keyvalue: bool,
    /// Skip entries that fail to parse instead of aborting
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Args)]
struct CheckCmd {
    /// Input corpus file
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Normalize(cmd) => run_normalize(cmd),
        Command::Score(cmd) => run_score(cmd),
        Command::Stats(cmd) => run_stats(cmd),
        Command::Check(cmd) => run_check(cmd),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}

/// Reads a corpus, honoring skip mode; skipped entries are reported on
/// stderr and their count returned.
fn load_corpus(path: &Path, skip_invalid: bool) -> Result<(Vec<CorpusEntry>, usize)> {
    if skip_invalid {
        let (entries, skipped) = corpus::read_corpus_skipping(path)?;
        report_skipped(path, &skipped);
        Ok((entries, skipped.len()))
    } else {
        Ok((corpus::read_corpus(path)?, 0))
    }
}

fn report_skipped(path: &Path, skipped: &[SkippedEntry]) {
    for skip in skipped {
        eprintln!(
            "warning: {}: skipped entry {} (line {}): {}",
            path.display(),
            skip.index + 1,
            skip.line,
            skip.message
        );
    }
}

/// Runs the selected passes over every entry, returning summed counts.
fn normalize_entries(
    entries: &mut [CorpusEntry],
    options: NormalizeOptions,
    table: &ReificationTable,
) -> Result<PassCounts> {
    let mut totals = PassCounts::default();
    for entry in entries.iter_mut() {
        let normalized = normalize(&entry.graph, &entry.layout, options, table)
            .with_context(|| format!("normalizing {}", entry.display_name()))?;
        entry.tree = graph_to_tree(&normalized.graph, Some(&normalized.layout))?;
        entry.graph = normalized.graph;
        entry.layout = normalized.layout;
        totals.roles_canonicalized += normalized.counts.roles_canonicalized;
        totals.relations_reified += normalized.counts.relations_reified;
        totals.nodes_dereified += normalized.counts.nodes_dereified;
        totals.attributes_reified += normalized.counts.attributes_reified;
        totals.top_relations_added += normalized.counts.top_relations_added;
    }
    Ok(totals)
}

fn print_pass_counts(counts: &PassCounts) {
    eprintln!("roles canonicalized: {}", counts.roles_canonicalized);
    eprintln!("relations reified: {}", counts.relations_reified);
    eprintln!("nodes dereified: {}", counts.nodes_dereified);
    eprintln!("attributes reified: {}", counts.attributes_reified);
    eprintln!("top relations added: {}", counts.top_relations_added);
}

fn run_normalize(cmd: NormalizeCmd) -> Result<ExitCode> {
    let (mut entries, _) = load_corpus(&cmd.input, cmd.skip_invalid)?;
    let owned_table = cmd.passes.load_table()?;
    let table = owned_table.as_ref().unwrap_or_else(|| ReificationTable::builtin());
    let counts = normalize_entries(&mut entries, cmd.passes.options(), table)?;
    print_pass_counts(&counts);
    let rendered = corpus::render_corpus(&entries);
    match &cmd.output {
        Some(path) => fs::write(path, rendered)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_score(cmd: ScoreCmd) -> Result<ExitCode> {
    let (mut test, skipped_test) = load_corpus(&cmd.test, cmd.skip_invalid)?;
    let (mut gold, skipped_gold) = load_corpus(&cmd.gold, cmd.skip_invalid)?;

    if cmd.passes.any() {
        let owned_table = cmd.passes.load_table()?;
        let table = owned_table.as_ref().unwrap_or_else(|| ReificationTable::builtin());
        let options = cmd.passes.options();
        normalize_entries(&mut test, options, table)?;
        normalize_entries(&mut gold, options, table)?;
    }

    let (aligned, unpaired) = if cmd.skip_invalid {
        corpus::align_skipping(&test, &gold)?
    } else {
        (corpus::align(&test, &gold)?, 0)
    };
    if unpaired > 0 {
        eprintln!("warning: {unpaired} entries had no partner and were not scored");
    }

    let names: Vec<String> = aligned.iter().map(|(t, _)| t.display_name()).collect();
    let pairs: Vec<_> = aligned
        .iter()
        .map(|(t, g)| (t.graph.clone(), g.graph.clone()))
        .collect();
    let options = ScoreOptions {
        restarts: cmd.restarts,
        seed: cmd.seed,
        exact: cmd.exact,
        exact_bound: cmd.exact_bound,
        strict: cmd.strict,
    };
    let report = score_corpus(&pairs, &options)?;

    let summary = &report.summary;
    if summary.dropped_test > 0 || summary.dropped_gold > 0 {
        eprintln!(
            "warning: dropped {} test and {} gold constant-sourced inverted triples",
            summary.dropped_test, summary.dropped_gold
        );
    }
    if cmd.report {
        print!(
            "{}",
            render_score_report(&report, &names, skipped_test + skipped_gold, unpaired)
        );
    } else {
        println!("{}", summary.score_line());
    }
    Ok(ExitCode::SUCCESS)
}

/// Key/value report: aggregate counts first, then one block per pair. Keys
/// are `pair.<n>.<field>` with `<n>` starting at 1; `id` is the test entry's
/// id or its entry number.
fn render_score_report(
    report: &CorpusReport,
    names: &[String],
    skipped: usize,
    unpaired: usize,
) -> String {
    let mut out = String::new();
    let summary = &report.summary;
    out.push_str(&format!("pairs\t{}\n", report.pairs.len()));
    out.push_str(&format!("matched\t{}\n", summary.matched));
    out.push_str(&format!("test_total\t{}\n", summary.test_total));
    out.push_str(&format!("gold_total\t{}\n", summary.gold_total));
    out.push_str(&format!("precision\t{:.4}\n", summary.precision));
    out.push_str(&format!("recall\t{:.4}\n", summary.recall));
    out.push_str(&format!("f_score\t{:.4}\n", summary.f_score));
    out.push_str(&format!("restarts_used\t{}\n", summary.restarts_used));
    out.push_str(&format!("seed\t{}\n", summary.seed));
    out.push_str(&format!("dropped_test_triples\t{}\n", summary.dropped_test));
    out.push_str(&format!("dropped_gold_triples\t{}\n", summary.dropped_gold));
    out.push_str(&format!("skipped_entries\t{skipped}\n"));
    out.push_str(&format!("unpaired_entries\t{unpaired}\n"));
    for (i, (pair, name)) in report.pairs.iter().zip(names).enumerate() {
        let n = i + 1;
        out.push_str(&format!("pair.{n}.id\t{name}\n"));
        out.push_str(&format!("pair.{n}.matched\t{}\n", pair.matched));
        out.push_str(&format!("pair.{n}.test_total\t{}\n", pair.test_total));
        out.push_str(&format!("pair.{n}.gold_total\t{}\n", pair.gold_total));
        out.push_str(&format!("pair.{n}.precision\t{:.4}\n", pair.precision));
        out.push_str(&format!("pair.{n}.recall\t{:.4}\n", pair.recall));
        out.push_str(&format!("pair.{n}.f_score\t{:.4}\n", pair.f_score));
        out.push_str(&format!("pair.{n}.mapping\t{}\n", pair.mapping));
    }
    out
}

fn run_stats(cmd: StatsCmd) -> Result<ExitCode> {
    let (entries, _) = load_corpus(&cmd.input, cmd.skip_invalid)?;
    let owned_table = match &cmd.table {
        Some(path) => Some(ReificationTable::from_path(path)?),
        None => None,
    };
    let table = owned_table.as_ref().unwrap_or_else(|| ReificationTable::builtin());
    let stats = corpus_stats(&entries, table);
    if cmd.keyvalue {
        print!("{}", stats.render_keyvalue());
    } else {
        print!("{}", stats.render_table());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_check(cmd: CheckCmd) -> Result<ExitCode> {
    let (entries, skipped) = corpus::read_corpus_skipping(&cmd.input)?;
    let mut errors = skipped.len();
    let mut warnings = 0;
    for skip in &skipped {
        println!(
            "error: entry {} (line {}): {}",
            skip.index + 1,
            skip.line,
            skip.message
        );
    }
    // Entries here already round-tripped through graph construction, so the
    // remaining detectable problems all live in the tree spelling: validating
    // the tree sees roles as written, before edge deinversion rewrites them.
    for entry in &entries {
        for diagnostic in validate_tree(&entry.tree) {
            match diagnostic.severity {
                Severity::Error => errors += 1,
                Severity::Warning => warnings += 1,
            }
            println!(
                "{}: {} (line {}): {}",
                diagnostic.severity,
                entry.display_name(),
                entry.line,
                diagnostic.message
            );
        }
    }
    eprintln!(
        "{} entries checked, {errors} errors, {warnings} warnings",
        entries.len() + skipped.len()
    );
    Ok(if errors > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

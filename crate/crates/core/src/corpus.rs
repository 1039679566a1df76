//! Multi-AMR corpus files: blank-line-separated PENMAN blocks with optional
//! `# ::key value` metadata lines, as used by the AMR releases.
//!
//! Reading keeps each entry's metadata verbatim and derives the graph and
//! layout from its tree. Blocks that contain only `#` lines (release headers
//! and stray comments) are skipped; `#` lines without any `::key` contribute
//! no metadata. Writing emits one `# ::key value` line per pair, so reading a
//! written corpus reproduces the same metadata, triples, and layouts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use thiserror::Error;

use crate::penman::{parse, serialize, tree_to_graph, Graph, Layout, Tree};

/// One AMR block of a corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    /// Position among the parsed entries, starting at 0.
    pub index: usize,
    /// 1-based line where the block starts in its source file.
    pub line: usize,
    /// `(key, value)` pairs from the block's `# ::key value` lines, in order.
    pub metadata: Vec<(String, String)>,
    pub tree: Tree,
    pub graph: Graph,
    pub layout: Layout,
}

impl CorpusEntry {
    /// The value of the `id` metadata key, used for corpus alignment.
    pub fn id(&self) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(key, _)| key == "id")
            .map(|(_, value)| value.as_str())
    }

    /// `id` when present, else the 1-based entry number.
    pub fn display_name(&self) -> String {
        match self.id() {
            Some(id) => id.to_string(),
            None => format!("entry {}", self.index + 1),
        }
    }
}

/// An entry that failed to parse while reading in skip mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedEntry {
    /// Position the entry would have had, starting at 0.
    pub index: usize,
    /// 1-based line of the failure in the source file.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}")]
    Read {
        path: PathBuf,
        source: io::Error,
    },
    #[error("cannot write {path}")]
    Write {
        path: PathBuf,
        source: io::Error,
    },
    #[error("entry {number} (line {line}): {message}")]
    Entry {
        /// 1-based entry number.
        number: usize,
        line: usize,
        message: String,
    },
    #[error("corpora differ in length: {test} test entries vs {gold} gold entries")]
    LengthMismatch { test: usize, gold: usize },
    #[error("{side} corpus repeats id `{id}`")]
    DuplicateId { side: &'static str, id: String },
    #[error("{side} corpus has no entry with id `{id}`")]
    MissingId { side: &'static str, id: String },
}

/// Reads a corpus file, failing on the first malformed entry.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, CorpusError> {
    let text = read_text(path.as_ref())?;
    parse_corpus(&text)
}

/// Reads a corpus file, collecting malformed entries instead of failing.
pub fn read_corpus_skipping(
    path: impl AsRef<Path>,
) -> Result<(Vec<CorpusEntry>, Vec<SkippedEntry>), CorpusError> {
    let text = read_text(path.as_ref())?;
    Ok(parse_corpus_skipping(&text))
}

fn read_text(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses corpus text, failing on the first malformed entry.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for block in blocks(text) {
        match parse_block(&block, entries.len()) {
            Ok(Some(entry)) => entries.push(entry),
            Ok(None) => {}
            Err(error) => return Err(error),
        }
    }
    Ok(entries)
}

/// Parses corpus text, collecting malformed entries instead of failing.
pub fn parse_corpus_skipping(text: &str) -> (Vec<CorpusEntry>, Vec<SkippedEntry>) {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for block in blocks(text) {
        let index = entries.len() + skipped.len();
        match parse_block(&block, index) {
            Ok(Some(entry)) => entries.push(entry),
            Ok(None) => {}
            Err(CorpusError::Entry { line, message, .. }) => skipped.push(SkippedEntry {
                index,
                line,
                message,
            }),
            Err(_) => unreachable!("block parsing only yields entry errors"),
        }
    }
    (entries, skipped)
}

/// A run of non-blank lines with its 1-based starting line number.
struct Block {
    line: usize,
    lines: Vec<String>,
}

fn blocks(text: &str) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::new();
    let mut open = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if !open {
            out.push(Block {
                line: i + 1,
                lines: Vec::new(),
            });
            open = true;
        }
        out.last_mut().unwrap().lines.push(line.to_string());
    }
    out
}

/// Parses one block. `Ok(None)` means the block held only `#` lines.
fn parse_block(block: &Block, index: usize) -> Result<Option<CorpusEntry>, CorpusError> {
    let mut metadata = Vec::new();
    let mut amr_lines: Vec<&str> = Vec::new();
    let mut amr_start = block.line;
    for (offset, line) in block.lines.iter().enumerate() {
        if amr_lines.is_empty() && line.trim_start().starts_with('#') {
            metadata.extend(parse_metadata_line(line));
            amr_start = block.line + offset + 1;
        } else {
            amr_lines.push(line);
        }
    }
    if amr_lines.is_empty() {
        return Ok(None);
    }
    let text = amr_lines.join("\n");
    let entry_error = |line: usize, message: String| CorpusError::Entry {
        number: index + 1,
        line,
        message,
    };
    let tree = parse(&text)
        .map_err(|e| entry_error(amr_start + e.line - 1, e.message.clone()))?;
    let (graph, layout) =
        tree_to_graph(&tree).map_err(|e| entry_error(amr_start, e.to_string()))?;
    Ok(Some(CorpusEntry {
        index,
        line: block.line,
        metadata,
        tree,
        graph,
        layout,
    }))
}

/// Extracts `(key, value)` pairs from a `#` line. Each `::key` token starts a
/// pair whose value runs to the next `::` token; stray `#` tokens between
/// pairs are tolerated, so `# ::id x ::snt y` and `# ::id x # ::snt y` read
/// the same.
fn parse_metadata_line(line: &str) -> Vec<(String, String)> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let body = line.trim_start().trim_start_matches('#');
    for token in body.split_whitespace() {
        if let Some(key) = token.strip_prefix("::") {
            pairs.push((key.to_string(), String::new()));
        } else if token == "#" {
            continue;
        } else if let Some((_, value)) = pairs.last_mut() {
            if !value.is_empty() {
                value.push(' ');
            }
            value.push_str(token);
        }
    }
    pairs
}

/// Renders entries in the corpus file format: metadata lines, the serialized
/// AMR, and a blank line between entries.
pub fn render_corpus(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (key, value) in &entry.metadata {
            out.push_str("# ::");
            out.push_str(key);
            if !value.is_empty() {
                out.push(' ');
                out.push_str(value);
            }
            out.push('\n');
        }
        out.push_str(&serialize(&entry.tree));
        out.push('\n');
    }
    out
}

/// Writes entries to a corpus file. Reading the file back yields the same
/// metadata, triples, and layouts.
pub fn write_corpus(entries: &[CorpusEntry], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, render_corpus(entries)).map_err(|source| CorpusError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Pairs test entries with gold entries for scoring.
///
/// When every entry on both sides carries an `id`, entries pair by id and
/// order does not matter; otherwise they pair by position and the corpora
/// must have equal lengths.
pub fn align<'a>(
    test: &'a [CorpusEntry],
    gold: &'a [CorpusEntry],
) -> Result<Vec<(&'a CorpusEntry, &'a CorpusEntry)>, CorpusError> {
    if all_have_ids(test) && all_have_ids(gold) {
        let gold_by_id = index_by_id(gold, "gold")?;
        check_unique_ids(test, "test")?;
        let mut pairs = Vec::with_capacity(test.len());
        for entry in test {
            let id = entry.id().unwrap();
            let gold_entry = gold_by_id.get(id).ok_or_else(|| CorpusError::MissingId {
                side: "gold",
                id: id.to_string(),
            })?;
            pairs.push((entry, *gold_entry));
        }
        if gold.len() > test.len() {
            let missing = gold
                .iter()
                .find(|g| !test.iter().any(|t| t.id() == g.id()))
                .unwrap();
            return Err(CorpusError::MissingId {
                side: "test",
                id: missing.id().unwrap().to_string(),
            });
        }
        Ok(pairs)
    } else {
        if test.len() != gold.len() {
            return Err(CorpusError::LengthMismatch {
                test: test.len(),
                gold: gold.len(),
            });
        }
        Ok(test.iter().zip(gold).collect())
    }
}

/// Scoring pairs plus the count of entries left without a partner.
pub type SkippingAlignment<'a> = (Vec<(&'a CorpusEntry, &'a CorpusEntry)>, usize);

/// Pairs entries for scoring after skip-mode reading: pairs whose partner was
/// skipped (or is absent) are dropped rather than an error. Returns the pairs
/// and the number of entries left unpaired. Positional pairing uses the
/// original entry indexes, so a skipped entry drops only its own pair.
pub fn align_skipping<'a>(
    test: &'a [CorpusEntry],
    gold: &'a [CorpusEntry],
) -> Result<SkippingAlignment<'a>, CorpusError> {
    if all_have_ids(test) && all_have_ids(gold) {
        let gold_by_id = index_by_id(gold, "gold")?;
        check_unique_ids(test, "test")?;
        let mut pairs = Vec::new();
        for entry in test {
            if let Some(gold_entry) = gold_by_id.get(entry.id().unwrap()) {
                pairs.push((entry, *gold_entry));
            }
        }
        let unpaired = (test.len() - pairs.len()) + (gold.len() - pairs.len());
        Ok((pairs, unpaired))
    } else {
        let gold_by_index: IndexMap<usize, &CorpusEntry> =
            gold.iter().map(|e| (e.index, e)).collect();
        let mut pairs = Vec::new();
        for entry in test {
            if let Some(gold_entry) = gold_by_index.get(&entry.index) {
                pairs.push((entry, *gold_entry));
            }
        }
        let unpaired = (test.len() - pairs.len()) + (gold.len() - pairs.len());
        Ok((pairs, unpaired))
    }
}

fn all_have_ids(entries: &[CorpusEntry]) -> bool {
    !entries.is_empty() && entries.iter().all(|e| e.id().is_some())
}

fn index_by_id<'a>(
    entries: &'a [CorpusEntry],
    side: &'static str,
) -> Result<IndexMap<&'a str, &'a CorpusEntry>, CorpusError> {
    let mut map = IndexMap::new();
    for entry in entries {
        let id = entry.id().unwrap();
        if map.insert(id, entry).is_some() {
            return Err(CorpusError::DuplicateId {
                side,
                id: id.to_string(),
            });
        }
    }
    Ok(map)
}

fn check_unique_ids(entries: &[CorpusEntry], side: &'static str) -> Result<(), CorpusError> {
    index_by_id(entries, side).map(|_| ())
}

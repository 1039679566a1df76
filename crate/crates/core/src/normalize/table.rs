//! The role reification table.
//!
//! Each row maps a role to the concept that reifies it, plus the two roles
//! that pick up the original relation's source and target. The default table
//! is compiled in; [`ReificationTable::from_path`] loads a replacement, since
//! the role inventory changes as the annotation guidelines evolve.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

/// One table row: `(a <role> b)` reifies to
/// `(c / <concept>)` with `(c <source_role> a)` and `(c <target_role> b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReificationEntry {
    pub role: String,
    pub concept: String,
    pub source_role: String,
    pub target_role: String,
    /// The reify pass may apply this row.
    pub reifies: bool,
    /// The dereify pass may collapse nodes of this concept back to the role.
    pub dereifies: bool,
    /// Shortcut roles abbreviate a richer concept; they reify but are never
    /// produced by dereification.
    pub shortcut: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ReificationTable {
    entries: Vec<ReificationEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("cannot read reification table {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("reification table line {line}: {message}")]
    Format { line: usize, message: String },
}

impl ReificationTable {
    /// Parse table text: one row per line, five tab-separated columns
    /// (role, concept, source role, target role, flags). Blank lines and
    /// lines starting with `#` are skipped. Flags are `R` (reify), `D`
    /// (dereify), `S` (shortcut), or `-` for an inert row.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let columns: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if columns.len() != 5 {
                return Err(TableError::Format {
                    line,
                    message: format!(
                        "expected 5 tab-separated columns, found {}",
                        columns.len()
                    ),
                });
            }
            for (what, value) in [
                ("role", columns[0]),
                ("source role", columns[2]),
                ("target role", columns[3]),
            ] {
                if !value.starts_with(':') || value.len() < 2 {
                    return Err(TableError::Format {
                        line,
                        message: format!("{what} '{value}' must start with ':'"),
                    });
                }
            }
            if columns[1].is_empty() {
                return Err(TableError::Format {
                    line,
                    message: "empty concept".to_string(),
                });
            }

            let mut entry = ReificationEntry {
                role: columns[0].to_string(),
                concept: columns[1].to_string(),
                source_role: columns[2].to_string(),
                target_role: columns[3].to_string(),
                reifies: false,
                dereifies: false,
                shortcut: false,
            };
            if columns[4] != "-" {
                for flag in columns[4].chars() {
                    match flag {
                        'R' => entry.reifies = true,
                        'D' => entry.dereifies = true,
                        'S' => entry.shortcut = true,
                        other => {
                            return Err(TableError::Format {
                                line,
                                message: format!("unknown flag '{other}' (expected R, D, S, or -)"),
                            });
                        }
                    }
                }
            }
            if entry.dereifies && !entry.reifies {
                return Err(TableError::Format {
                    line,
                    message: "flag D requires flag R".to_string(),
                });
            }
            if entry.dereifies && entry.shortcut {
                return Err(TableError::Format {
                    line,
                    message: "shortcut rows cannot carry flag D".to_string(),
                });
            }
            entries.push(entry);
        }
        Ok(ReificationTable { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, TableError> {
        let text = fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The compiled-in default table.
    pub fn builtin() -> &'static ReificationTable {
        static TABLE: OnceLock<ReificationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            ReificationTable::parse(include_str!("../../data/reifications.tsv"))
                .expect("builtin reification table parses")
        })
    }

    pub fn entries(&self) -> &[ReificationEntry] {
        &self.entries
    }

    /// The row the reify pass uses for `role`: the unique row with the reify
    /// flag. Roles with zero or several such rows (the ambiguous `:poss` and
    /// `:beneficiary`) are not reifiable and get `None`.
    pub fn reification_for(&self, role: &str) -> Option<&ReificationEntry> {
        let mut found = None;
        for entry in &self.entries {
            if entry.reifies && entry.role == role {
                if found.is_some() {
                    return None;
                }
                found = Some(entry);
            }
        }
        found
    }

    /// Rows that may collapse a node of `concept`, in table order.
    pub fn dereifications_for(&self, concept: &str) -> Vec<&ReificationEntry> {
        self.entries
            .iter()
            .filter(|entry| entry.dereifies && entry.concept == concept)
            .collect()
    }
}

//! Label ingestion and factorization into dense cluster indices.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;

use crate::error::{Error, Result};

/// Cluster assignments of `n` items, factorized to dense 0-based indices.
///
/// Every index in `0..num_clusters` occurs at least once, and indices are
/// numbered by first occurrence in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    assignments: Vec<u32>,
    num_clusters: usize,
}

impl LabelVector {
    /// Factorizes arbitrary hashable codes by first occurrence.
    pub fn from_codes<T: Eq + Hash>(codes: impl IntoIterator<Item = T>) -> Result<Self> {
        let mut ids: HashMap<T, u32> = HashMap::new();
        let assignments: Vec<u32> = codes
            .into_iter()
            .map(|code| {
                let next = ids.len() as u32;
                *ids.entry(code).or_insert(next)
            })
            .collect();
        if assignments.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(LabelVector {
            assignments,
            num_clusters: ids.len(),
        })
    }

    /// Factorizes small dense codes (each `< bound`) without hashing.
    pub(crate) fn from_bounded_codes(codes: &[u32], bound: usize) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut remap = vec![u32::MAX; bound];
        let mut next = 0u32;
        let assignments = codes
            .iter()
            .map(|&c| {
                let slot = &mut remap[c as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Ok(LabelVector {
            assignments,
            num_clusters: next as usize,
        })
    }

    pub fn assignments(&self) -> &[u32] {
        &self.assignments
    }

    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    /// Cluster sizes, indexed by cluster.
    pub fn cluster_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.num_clusters];
        for &a in &self.assignments {
            sizes[a as usize] += 1;
        }
        sizes
    }

    /// Returns a copy in which cluster `b` is fused into cluster `a`,
    /// refactorized so the result stays dense.
    pub fn merge_clusters(&self, a: u32, b: u32) -> LabelVector {
        let fused = self
            .assignments
            .iter()
            .map(|&c| if c == b { a } else { c });
        LabelVector::from_codes(fused).expect("non-empty")
    }
}

/// Factorizes raw label tokens. Tokens are trimmed; an empty token is an error.
pub fn factorize<S: AsRef<str>>(raw: &[S]) -> Result<LabelVector> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut tokens = Vec::with_capacity(raw.len());
    for (row, token) in raw.iter().enumerate() {
        let token = token.as_ref().trim();
        if token.is_empty() {
            return Err(Error::MissingLabel { row: row + 1 });
        }
        tokens.push(token);
    }
    LabelVector::from_codes(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelFormat {
    /// One label per line.
    SingleColumn,
    /// Two delimited columns, one clustering per column.
    TwoColumn,
}

#[derive(Debug, Clone, Copy)]
pub struct ReadOptions {
    pub format: LabelFormat,
    pub delimiter: char,
    /// Skip the first line.
    pub header: bool,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            format: LabelFormat::SingleColumn,
            delimiter: ',',
            header: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumns {
    One(LabelVector),
    Two(LabelVector, LabelVector),
}

/// Reads one or two label columns from a UTF-8 text file.
///
/// Row numbers in errors are 1-based file line numbers. Trailing blank
/// lines are ignored; a blank line before the last label is a missing label.
pub fn read_label_file(path: impl AsRef<Path>, options: &ReadOptions) -> Result<LabelColumns> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_labels(&text, options)
}

pub fn parse_labels(text: &str, options: &ReadOptions) -> Result<LabelColumns> {
    let mut lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .skip(usize::from(options.header))
        .collect();
    while lines.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Error::EmptyInput);
    }

    match options.format {
        LabelFormat::SingleColumn => {
            let mut tokens = Vec::with_capacity(lines.len());
            for (row, line) in lines {
                let token = line.trim();
                if token.is_empty() {
                    return Err(Error::MissingLabel { row });
                }
                tokens.push(token);
            }
            LabelVector::from_codes(tokens).map(LabelColumns::One)
        }
        LabelFormat::TwoColumn => {
            let mut first = Column::default();
            let mut second = Column::default();
            for (row, line) in lines {
                let mut fields = line.split(options.delimiter);
                let a = fields.next().unwrap_or("").trim();
                let b = fields.next().unwrap_or("").trim();
                if fields.next().is_some() {
                    return Err(Error::Parse {
                        row,
                        content: line.to_string(),
                        message: "expected at most two fields".to_string(),
                    });
                }
                first.push(row, a)?;
                second.push(row, b)?;
            }
            if first.tokens.len() != second.tokens.len() {
                return Err(Error::LengthMismatch {
                    first: first.tokens.len(),
                    second: second.tokens.len(),
                });
            }
            Ok(LabelColumns::Two(
                LabelVector::from_codes(first.tokens)?,
                LabelVector::from_codes(second.tokens)?,
            ))
        }
    }
}

/// One column of a two-column file. A column may end early (which yields a
/// length mismatch) but may not resume after a gap.
#[derive(Default)]
struct Column<'a> {
    tokens: Vec<&'a str>,
    gap_row: Option<usize>,
}

impl<'a> Column<'a> {
    fn push(&mut self, row: usize, token: &'a str) -> Result<()> {
        if token.is_empty() {
            self.gap_row.get_or_insert(row);
            return Ok(());
        }
        if let Some(gap) = self.gap_row {
            return Err(Error::MissingLabel { row: gap });
        }
        self.tokens.push(token);
        Ok(())
    }
}

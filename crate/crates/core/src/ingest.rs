//! Corpus ingestion from canonical CSV and XML files.
//!
//! Both readers produce the same [`Corpus`] for the same records. Records
//! whose body is empty (after trimming) are not fatal: they are collected in
//! a [`SkipReport`] so that `corpus.len() + skipped.len()` always equals the
//! number of input records.
//!
//! Canonical XML layout:
//!
//! ```xml
//! <corpus>
//!   <post>
//!     <id>1</id>
//!     <source>forum-a</source>
//!     <thread_id>t9</thread_id>      <!-- optional -->
//!     <author>jdoe</author>          <!-- optional -->
//!     <timestamp>2015-03-01T10:00:00Z</timestamp> <!-- optional -->
//!     <body>Started chemo today.</body>
//!   </post>
//! </corpus>
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One social-media message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub source: String,
    pub thread_id: Option<String>,
    pub author: Option<String>,
    pub timestamp: Option<String>,
    pub body: String,
}

/// An ordered, id-unique collection of posts. Post order defines the row
/// order of the document-term matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    posts: Vec<Post>,
    source_counts: BTreeMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids and posts with blank bodies.
    pub fn new(posts: Vec<Post>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut dups = Vec::new();
        for post in &posts {
            if post.body.trim().is_empty() {
                return Err(Error::Domain(format!("post `{}` has an empty body", post.id)));
            }
            if !seen.insert(post.id.as_str()) && !dups.contains(&post.id) {
                dups.push(post.id.clone());
            }
        }
        if !dups.is_empty() {
            return Err(Error::DuplicateIds(dups));
        }
        let mut source_counts = BTreeMap::new();
        for post in &posts {
            *source_counts.entry(post.source.clone()).or_insert(0) += 1;
        }
        Ok(Corpus { posts, source_counts })
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn source_counts(&self) -> &BTreeMap<String, usize> {
        &self.source_counts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Concatenates corpora in order. Ids must stay unique across parts.
    pub fn concat(parts: impl IntoIterator<Item = Corpus>) -> Result<Self> {
        Corpus::new(parts.into_iter().flat_map(|c| c.posts).collect())
    }
}

/// A record that was read but not turned into a post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRecord {
    /// 1-based record ordinal (data row for CSV, `<post>` element for XML).
    pub record: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipReport {
    pub skipped: Vec<SkippedRecord>,
}

impl SkipReport {
    pub fn len(&self) -> usize {
        self.skipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skipped.is_empty()
    }
}

/// Result of reading one input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub corpus: Corpus,
    pub skipped: SkipReport,
}

/// Column names used to map CSV headers onto [`Post`] fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub id: String,
    pub source: String,
    pub thread_id: String,
    pub author: String,
    pub timestamp: String,
    pub body: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id: "id".into(),
            source: "source".into(),
            thread_id: "thread_id".into(),
            author: "author".into(),
            timestamp: "timestamp".into(),
            body: "body".into(),
        }
    }
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn non_empty(value: Option<&str>) -> Option<String> {
    value.map(str::trim).filter(|v| !v.is_empty()).map(str::to_owned)
}

/// Parses a UTF-8, RFC-4180 CSV file with a header row.
///
/// Missing optional columns are tolerated: a missing id column yields
/// zero-based row ordinals as ids, a missing source column yields the file
/// stem as source label.
pub fn parse_csv(path: &Path, schema: &CsvSchema) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(Error::NoDocuments);
    }
    check_csv_quoting(&text).map_err(|(line, message)| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    })?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_error(path, &e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);

    let body_col = column(&schema.body).ok_or_else(|| Error::MissingColumn {
        path: path.to_owned(),
        column: schema.body.clone(),
    })?;
    let id_col = column(&schema.id);
    let source_col = column(&schema.source);
    let thread_col = column(&schema.thread_id);
    let author_col = column(&schema.author);
    let time_col = column(&schema.timestamp);
    let default_source = file_label(path);

    let mut posts = Vec::new();
    let mut skipped = SkipReport::default();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, &e))?;
        let field = |col: Option<usize>| col.and_then(|c| record.get(c));
        let body = record.get(body_col).unwrap_or("").trim();
        if body.is_empty() {
            skipped.skipped.push(SkippedRecord {
                record: row + 1,
                reason: "empty body".into(),
            });
            continue;
        }
        posts.push(Post {
            id: match id_col {
                Some(c) => record.get(c).unwrap_or("").trim().to_owned(),
                None => row.to_string(),
            },
            source: non_empty(field(source_col)).unwrap_or_else(|| default_source.clone()),
            thread_id: non_empty(field(thread_col)),
            author: non_empty(field(author_col)),
            timestamp: non_empty(field(time_col)),
            body: body.to_owned(),
        });
    }
    Ok(Ingested {
        corpus: Corpus::new(posts)?,
        skipped,
    })
}

fn csv_error(path: &Path, err: &csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        path: path.to_owned(),
        line,
        message: err.to_string(),
    }
}

/// Strict RFC-4180 quoting check. The `csv` crate silently recovers from
/// stray or unterminated quotes; we want those reported with a line number.
fn check_csv_quoting(text: &str) -> std::result::Result<(), (u64, String)> {
    #[derive(PartialEq)]
    enum State {
        FieldStart,
        Unquoted,
        Quoted,
        QuoteInQuoted,
    }
    let mut state = State::FieldStart;
    let mut line = 1u64;
    let mut quote_line = 1u64;
    for ch in text.chars() {
        state = match (state, ch) {
            (State::FieldStart, '"') => {
                quote_line = line;
                State::Quoted
            }
            (State::FieldStart | State::Unquoted, ',') => State::FieldStart,
            (State::FieldStart | State::Unquoted, '\n') => {
                line += 1;
                State::FieldStart
            }
            (State::Unquoted, '"') => {
                return Err((line, "quote inside unquoted field".into()));
            }
            (State::FieldStart | State::Unquoted, _) => State::Unquoted,
            (State::Quoted, '"') => State::QuoteInQuoted,
            (State::Quoted, c) => {
                if c == '\n' {
                    line += 1;
                }
                State::Quoted
            }
            (State::QuoteInQuoted, '"') => State::Quoted,
            (State::QuoteInQuoted, ',') => State::FieldStart,
            (State::QuoteInQuoted, '\n') => {
                line += 1;
                State::FieldStart
            }
            (State::QuoteInQuoted, '\r') => State::QuoteInQuoted,
            (State::QuoteInQuoted, _) => {
                return Err((line, "unexpected character after closing quote".into()));
            }
        };
    }
    if state == State::Quoted {
        return Err((quote_line, "unterminated quoted field".into()));
    }
    Ok(())
}

/// Parses a canonical XML corpus (`<corpus>` root with `<post>` children).
pub fn parse_xml(path: &Path) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(Error::NoDocuments);
    }
    let doc = roxmltree::Document::parse(&text).map_err(|e| Error::Parse {
        path: path.to_owned(),
        line: u64::from(e.pos().row),
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "corpus" {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: u64::from(doc.text_pos_at(root.range().start).row),
            message: format!("expected root <corpus>, found <{}>", root.tag_name().name()),
        });
    }
    let default_source = file_label(path);

    let mut posts = Vec::new();
    let mut skipped = SkipReport::default();
    let elements = root
        .children()
        .filter(|n| n.is_element() && n.tag_name().name() == "post");
    for (ordinal, element) in elements.enumerate() {
        let child = |name: &str| {
            element
                .children()
                .find(|n| n.is_element() && n.tag_name().name() == name)
        };
        let child_text = |name: &str| child(name).map(|n| n.text().unwrap_or("").trim().to_owned());
        let line = doc.text_pos_at(element.range().start).row;
        let body = match child_text("body") {
            None => {
                skipped.skipped.push(SkippedRecord {
                    record: ordinal + 1,
                    reason: format!("missing <body> (line {line})"),
                });
                continue;
            }
            Some(b) if b.is_empty() => {
                skipped.skipped.push(SkippedRecord {
                    record: ordinal + 1,
                    reason: "empty body".into(),
                });
                continue;
            }
            Some(b) => b,
        };
        posts.push(Post {
            id: child_text("id").unwrap_or_else(|| ordinal.to_string()),
            source: non_empty(child_text("source").as_deref()).unwrap_or_else(|| default_source.clone()),
            thread_id: non_empty(child_text("thread_id").as_deref()),
            author: non_empty(child_text("author").as_deref()),
            timestamp: non_empty(child_text("timestamp").as_deref()),
            body,
        });
    }
    Ok(Ingested {
        corpus: Corpus::new(posts)?,
        skipped,
    })
}

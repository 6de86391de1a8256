//! Corpus data model: posts, comments, unified documents, and the keyword
//! lexicon, together with JSONL parsing and candidate-selection filters.
//!
//! The on-disk corpus format is JSON Lines, one record per line, with the
//! exact field sets of [`RawPost`] and [`RawComment`]. Unknown fields are
//! rejected so schema drift surfaces as a parse error rather than silent loss.

mod lexicon;
mod parse;
mod transform;

pub use lexicon::{load_lexicon, match_keywords, Lexicon};
pub use parse::{
    parse_comments, parse_documents, parse_posts, write_comments, write_documents, write_posts,
    ParseError, ParseOutcome,
};
pub use transform::{filter_posts, to_documents, ToDocumentsResult};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A harvested post with the attributes the collector extracts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPost {
    pub post_id: String,
    pub subreddit: String,
    pub author_id: String,
    pub title: String,
    pub body: String,
    pub score: i64,
    pub num_comments: u64,
    pub url: String,
    pub created_ts: i64,
    pub nsfw: bool,
    pub archived: bool,
    /// The lexicon entry whose search surfaced this post. Always lowercase.
    pub matched_keyword: String,
}

/// A single comment in a post's thread, flattened out of the tree.
///
/// `depth` is 0 for top-level comments, which carry no `parent_id`; a reply's
/// `parent_id` references a comment whose depth is exactly one less.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComment {
    pub comment_id: String,
    pub post_id: String,
    pub author: String,
    pub depth: u32,
    pub parent_id: Option<String>,
    pub score: i64,
    pub text: String,
    pub created_ts: i64,
}

/// Whether a [`Document`] originated as a post or a comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Post,
    Comment,
}

/// The unified text unit the classification and graph stages consume.
///
/// Posts contribute their title and body joined by a single space; comments
/// contribute their text. `target_author` is the author this document replies
/// to: the parent comment's author, or the post author for top-level comments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub kind: DocKind,
    pub author: String,
    pub subreddit: String,
    pub text: String,
    pub created_ts: i64,
    /// Lexicon entries matched in `text` as whole words.
    pub keywords: BTreeSet<String>,
    /// The post this document belongs to (itself for posts).
    pub post_id: String,
    pub target_author: Option<String>,
}

/// Errors from corpus loading and validation.
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("empty lexicon")]
    EmptyLexicon,
    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: u64 },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("duplicate {kind} id '{id}' (line {line})")]
    DuplicateId { kind: &'static str, id: String, line: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

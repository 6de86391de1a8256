//! JSON Lines corpus parsing and serialization.
//!
//! Parsing is lenient by default: malformed records are collected as
//! [`ParseError`]s and valid records pass through in input order. With
//! `strict` set, the first malformed record aborts. Duplicate ids are an
//! error in both modes.

use super::{CorpusError, Document, RawComment, RawPost};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// A malformed record: the input line it came from and why it was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u64,
    pub reason: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Valid records in input order plus the rejects (empty under `strict`).
#[derive(Debug, Clone)]
pub struct ParseOutcome<T> {
    pub records: Vec<T>,
    pub errors: Vec<ParseError>,
}

/// Records paired with their 1-based line numbers, plus the rejected lines.
type NumberedRecords<T> = (Vec<(u64, T)>, Vec<ParseError>);

fn parse_lines<T, R, F>(
    reader: R,
    strict: bool,
    mut validate: F,
) -> Result<NumberedRecords<T>, CorpusError>
where
    T: DeserializeOwned,
    R: BufRead,
    F: FnMut(&T) -> Result<(), String>,
{
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut line_no: u64 = 0;
    let mut buf = Vec::new();
    let mut reader = reader;
    loop {
        buf.clear();
        let read = reader.read_until(b'\n', &mut buf)?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let trimmed = trim_ascii(&buf);
        if trimmed.is_empty() {
            continue;
        }
        let parsed: Result<T, String> = serde_json::from_slice(trimmed)
            .map_err(|e| e.to_string())
            .and_then(|record| validate(&record).map(|()| record));
        match parsed {
            Ok(record) => records.push((line_no, record)),
            Err(reason) => {
                if strict {
                    return Err(CorpusError::Malformed { line: line_no, reason });
                }
                errors.push(ParseError { line: line_no, reason });
            }
        }
    }
    Ok((records, errors))
}

fn trim_ascii(bytes: &[u8]) -> &[u8] {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(bytes.len());
    let end = bytes.iter().rposition(|b| !b.is_ascii_whitespace()).map_or(start, |i| i + 1);
    &bytes[start..end]
}

fn check_duplicates<T>(
    records: &[(u64, T)],
    kind: &'static str,
    id_of: impl Fn(&T) -> &str,
) -> Result<(), CorpusError> {
    let mut seen: HashMap<&str, u64> = HashMap::new();
    for (line, record) in records {
        if seen.insert(id_of(record), *line).is_some() {
            return Err(CorpusError::DuplicateId {
                kind,
                id: id_of(record).to_string(),
                line: *line,
            });
        }
    }
    Ok(())
}

/// Parse post records from a JSONL stream.
pub fn parse_posts<R: BufRead>(
    reader: R,
    strict: bool,
) -> Result<ParseOutcome<RawPost>, CorpusError> {
    let (records, errors) = parse_lines::<RawPost, _, _>(reader, strict, |post| {
        if post.post_id.is_empty() {
            return Err("empty post_id".to_string());
        }
        if post.matched_keyword != post.matched_keyword.to_lowercase() {
            return Err(format!("matched_keyword '{}' is not lowercase", post.matched_keyword));
        }
        Ok(())
    })?;
    check_duplicates(&records, "post", |p| &p.post_id)?;
    Ok(ParseOutcome { records: records.into_iter().map(|(_, r)| r).collect(), errors })
}

/// Parse comment records from a JSONL stream, then validate each post's
/// thread structure: depth 0 has no parent, replies reference a parent one
/// level up in the same post. Violations become [`ParseError`]s (or abort
/// under `strict`); a reply whose parent was rejected is rejected too.
pub fn parse_comments<R: BufRead>(
    reader: R,
    strict: bool,
) -> Result<ParseOutcome<RawComment>, CorpusError> {
    let (records, mut errors) = parse_lines::<RawComment, _, _>(reader, strict, |comment| {
        if comment.comment_id.is_empty() {
            return Err("empty comment_id".to_string());
        }
        Ok(())
    })?;
    check_duplicates(&records, "comment", |c| &c.comment_id)?;

    // Thread validation happens after the full read so parents may appear
    // anywhere in the file. Records are checked shallowest-first, which makes
    // parent validity known before any of its replies are examined.
    let by_id: HashMap<&str, &RawComment> =
        records.iter().map(|(_, c)| (c.comment_id.as_str(), c)).collect();
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| (records[i].1.depth, i));
    let mut valid: HashMap<&str, bool> = HashMap::new();
    let mut keep = vec![false; records.len()];
    let mut rejects: Vec<(u64, String)> = Vec::new();
    for i in order {
        let (line, comment) = &records[i];
        let verdict: Result<(), String> = match (&comment.parent_id, comment.depth) {
            (None, 0) => Ok(()),
            (Some(_), 0) => Err("depth-0 comment carries a parent_id".to_string()),
            (None, _) => Err("orphan reply: no parent_id".to_string()),
            (Some(parent_id), depth) => match by_id.get(parent_id.as_str()) {
                None => Err(format!("orphan reply: unknown parent '{parent_id}'")),
                Some(parent) if parent.post_id != comment.post_id => {
                    Err(format!("parent '{parent_id}' belongs to another post"))
                }
                Some(parent) if parent.depth + 1 != depth => Err(format!(
                    "depth gap: depth {} under parent at depth {}",
                    depth, parent.depth
                )),
                Some(parent)
                    if !valid.get(parent.comment_id.as_str()).copied().unwrap_or(false) =>
                {
                    Err(format!("parent '{parent_id}' was rejected"))
                }
                Some(_) => Ok(()),
            },
        };
        match verdict {
            Ok(()) => {
                valid.insert(comment.comment_id.as_str(), true);
                keep[i] = true;
            }
            Err(reason) => {
                valid.insert(comment.comment_id.as_str(), false);
                rejects.push((*line, reason));
            }
        }
    }
    if strict {
        if let Some((line, reason)) = rejects.iter().min_by_key(|(line, _)| *line) {
            return Err(CorpusError::Malformed { line: *line, reason: reason.clone() });
        }
    }
    errors.extend(rejects.into_iter().map(|(line, reason)| ParseError { line, reason }));
    errors.sort_by_key(|e| e.line);
    let records =
        records.into_iter().zip(keep).filter_map(|((_, c), kept)| kept.then_some(c)).collect();
    Ok(ParseOutcome { records, errors })
}

/// Parse unified documents from a JSONL stream.
pub fn parse_documents<R: BufRead>(
    reader: R,
    strict: bool,
) -> Result<ParseOutcome<Document>, CorpusError> {
    let (records, errors) = parse_lines::<Document, _, _>(reader, strict, |doc| {
        if doc.doc_id.is_empty() {
            return Err("empty doc_id".to_string());
        }
        Ok(())
    })?;
    check_duplicates(&records, "document", |d| &d.doc_id)?;
    Ok(ParseOutcome { records: records.into_iter().map(|(_, r)| r).collect(), errors })
}

fn write_jsonl<T: Serialize, W: Write>(mut writer: W, records: &[T]) -> Result<(), CorpusError> {
    for record in records {
        serde_json::to_writer(&mut writer, record)
            .map_err(|e| CorpusError::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_posts<W: Write>(writer: W, posts: &[RawPost]) -> Result<(), CorpusError> {
    write_jsonl(writer, posts)
}

pub fn write_comments<W: Write>(writer: W, comments: &[RawComment]) -> Result<(), CorpusError> {
    write_jsonl(writer, comments)
}

pub fn write_documents<W: Write>(writer: W, documents: &[Document]) -> Result<(), CorpusError> {
    write_jsonl(writer, documents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post_line(id: &str) -> String {
        format!(
            r#"{{"post_id":"{id}","subreddit":"r1","author_id":"a1","title":"t","body":"b","score":1,"num_comments":5,"url":"u","created_ts":10,"nsfw":false,"archived":false,"matched_keyword":"kw"}}"#
        )
    }

    fn comment_json(id: &str, post: &str, depth: u32, parent: Option<&str>) -> String {
        let parent = match parent {
            Some(p) => format!(r#""{p}""#),
            None => "null".to_string(),
        };
        format!(
            r#"{{"comment_id":"{id}","post_id":"{post}","author":"a","depth":{depth},"parent_id":{parent},"score":0,"text":"x","created_ts":5}}"#
        )
    }

    #[test]
    fn well_formed_posts_pass_through() {
        let input = format!("{}\n{}\n{}\n", post_line("p1"), post_line("p2"), post_line("p3"));
        let out = parse_posts(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 3);
        assert!(out.errors.is_empty());
        assert_eq!(out.records[0].post_id, "p1");
    }

    #[test]
    fn lenient_mode_collects_malformed_lines() {
        let bad = r#"{"subreddit":"r1"}"#;
        let input = format!("{}\n{bad}\n{}\n", post_line("p1"), post_line("p3"));
        let out = parse_posts(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.errors.len(), 1);
        assert_eq!(out.errors[0].line, 2);
    }

    #[test]
    fn strict_mode_aborts_on_first_malformed() {
        let input = format!("{}\nnot json\n", post_line("p1"));
        let err = parse_posts(input.as_bytes(), true).unwrap_err();
        match err {
            CorpusError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_post_id_errors_in_both_modes() {
        let input = format!("{}\n{}\n{}\n", post_line("p1"), post_line("p2"), post_line("p1"));
        for strict in [false, true] {
            let err = parse_posts(input.as_bytes(), strict).unwrap_err();
            match err {
                CorpusError::DuplicateId { id, line, .. } => {
                    assert_eq!(id, "p1");
                    assert_eq!(line, 3);
                }
                other => panic!("unexpected error: {other}"),
            }
        }
    }

    #[test]
    fn uppercase_matched_keyword_is_rejected() {
        let line =
            post_line("p1").replace(r#""matched_keyword":"kw""#, r#""matched_keyword":"KW""#);
        let out = parse_posts(format!("{line}\n").as_bytes(), false).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.errors.len(), 1);
        assert!(out.errors[0].reason.contains("lowercase"));
    }

    #[test]
    fn unknown_fields_are_schema_drift() {
        let line = post_line("p1").replace(r#""nsfw":false"#, r#""nsfw":false,"extra":1"#);
        let out = parse_posts(format!("{line}\n").as_bytes(), false).unwrap();
        assert_eq!(out.errors.len(), 1);
    }

    #[test]
    fn valid_comment_chain_passes() {
        let input = format!(
            "{}\n{}\n",
            comment_json("c1", "p1", 0, None),
            comment_json("c2", "p1", 1, Some("c1"))
        );
        let out = parse_comments(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.errors.is_empty());
    }

    #[test]
    fn reply_without_parent_is_orphan() {
        let input = format!("{}\n", comment_json("c2", "p1", 1, None));
        let out = parse_comments(input.as_bytes(), false).unwrap();
        assert!(out.records.is_empty());
        assert!(out.errors[0].reason.contains("orphan reply"));
    }

    #[test]
    fn depth_gap_is_rejected() {
        let input = format!(
            "{}\n{}\n",
            comment_json("c1", "p1", 0, None),
            comment_json("c2", "p1", 2, Some("c1"))
        );
        let out = parse_comments(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.errors[0].reason.contains("depth gap"));
    }

    #[test]
    fn reply_to_rejected_parent_cascades() {
        let input = format!(
            "{}\n{}\n{}\n",
            comment_json("c1", "p1", 0, None),
            comment_json("c2", "p1", 2, Some("c1")),
            comment_json("c3", "p1", 3, Some("c2"))
        );
        let out = parse_comments(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.errors.len(), 2);
    }

    #[test]
    fn strict_comment_validation_names_earliest_line() {
        let input = format!(
            "{}\n{}\n",
            comment_json("c1", "p1", 1, None),
            comment_json("c2", "p1", 0, None)
        );
        let err = parse_comments(input.as_bytes(), true).unwrap_err();
        match err {
            CorpusError::Malformed { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn forward_parent_reference_is_valid() {
        // Parent appears after the reply in the file; validation runs after
        // the full read, so this chain is intact.
        let input = format!(
            "{}\n{}\n",
            comment_json("c2", "p1", 1, Some("c1")),
            comment_json("c1", "p1", 0, None)
        );
        let out = parse_comments(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.errors.is_empty());
    }

    #[test]
    fn posts_round_trip() {
        let input = format!("{}\n{}\n", post_line("p1"), post_line("p2"));
        let first = parse_posts(input.as_bytes(), true).unwrap().records;
        let mut bytes = Vec::new();
        write_posts(&mut bytes, &first).unwrap();
        let second = parse_posts(bytes.as_slice(), true).unwrap().records;
        assert_eq!(first, second);
    }
}

//! Offensive-keyword lexicon and whole-word matching.

use super::CorpusError;
use aho_corasick::AhoCorasick;
use std::collections::{BTreeSet, HashSet};
use std::io::Read;

/// A deduplicated, ordered list of lowercase keywords with a prebuilt
/// multi-pattern matcher.
///
/// Entries preserve first-occurrence order. Matching is case-insensitive and
/// whole-word: an occurrence only counts when it does not extend an
/// alphanumeric run on either side, so `"ass"` does not match inside
/// `"assessment"`.
#[derive(Clone)]
pub struct Lexicon {
    entries: Vec<String>,
    matcher: AhoCorasick,
}

impl Lexicon {
    /// Build a lexicon from raw keyword strings. Entries are lowercased,
    /// trimmed, and deduplicated preserving first occurrence; empty strings
    /// are dropped. Errors if nothing remains.
    pub fn new<I, S>(raw: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for item in raw {
            let normalized = item.as_ref().trim().to_lowercase();
            if normalized.is_empty() {
                continue;
            }
            if seen.insert(normalized.clone()) {
                entries.push(normalized);
            }
        }
        if entries.is_empty() {
            return Err(CorpusError::EmptyLexicon);
        }
        let matcher = AhoCorasick::new(&entries).map_err(|e| CorpusError::Malformed {
            line: 0,
            reason: format!("failed to build keyword matcher: {e}"),
        })?;
        Ok(Self { entries, matcher })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.entries.iter().any(|e| e == keyword)
    }

    /// All entries occurring in `text` as whole words, case-insensitively.
    pub fn matches(&self, text: &str) -> BTreeSet<String> {
        let lowered = text.to_lowercase();
        let mut found = BTreeSet::new();
        for m in self.matcher.find_overlapping_iter(&lowered) {
            let entry = &self.entries[m.pattern().as_usize()];
            if found.contains(entry) {
                continue;
            }
            if is_whole_word(&lowered, m.start(), m.end(), entry) {
                found.insert(entry.clone());
            }
        }
        found
    }
}

impl std::fmt::Debug for Lexicon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lexicon").field("entries", &self.entries.len()).finish()
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

/// An occurrence is whole-word when it does not extend an alphanumeric run:
/// if the entry starts alphanumeric the preceding character must not be, and
/// symmetrically at the end. Word boundaries are exactly the transitions
/// between alphanumeric and non-alphanumeric characters.
fn is_whole_word(text: &str, start: usize, end: usize, entry: &str) -> bool {
    let entry_first_alnum = entry.chars().next().is_some_and(char::is_alphanumeric);
    let entry_last_alnum = entry.chars().next_back().is_some_and(char::is_alphanumeric);
    if entry_first_alnum {
        if let Some(prev) = text[..start].chars().next_back() {
            if prev.is_alphanumeric() {
                return false;
            }
        }
    }
    if entry_last_alnum {
        if let Some(next) = text[end..].chars().next() {
            if next.is_alphanumeric() {
                return false;
            }
        }
    }
    true
}

/// Load a lexicon from UTF-8 text, one keyword per line. Blank lines and
/// lines starting with `#` are ignored; entries are lowercased, trimmed, and
/// deduplicated preserving first-occurrence order.
pub fn load_lexicon<R: Read>(mut source: R) -> Result<Lexicon, CorpusError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut keywords = Vec::new();
    for (idx, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw_line)
            .map_err(|_| CorpusError::InvalidUtf8 { line: idx as u64 + 1 })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        keywords.push(trimmed.to_string());
    }
    Lexicon::new(keywords)
}

/// Lexicon entries occurring in `text` as whole words.
pub fn match_keywords(text: &str, lexicon: &Lexicon) -> BTreeSet<String> {
    lexicon.matches(text)
}

//! Tokenization and sparse feature extraction.
//!
//! Word-level tokenization feeds three representations: TF-IDF vectors over a
//! built [`Vocabulary`], raw count vectors (for multinomial Naive Bayes), and
//! seeded signed feature hashing for memory-bounded corpora. Shingling
//! supports shared-language similarity over in the graph stage.

mod vector;
mod vocab;

pub use vector::{count_vectorize, hash_vectorize, vectorize, SparseVector};
pub use vocab::{build_vocabulary, Vocabulary};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Errors from feature extraction.
#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
}

/// Tokenizer settings: lowercasing, the n-gram range, and the truncation
/// limit applied to the unigram stream before n-grams are formed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub max_tokens: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { lowercase: true, ngram_min: 1, ngram_max: 2, max_tokens: 128 }
    }
}

impl TokenizerConfig {
    /// Unigrams only, no truncation.
    pub fn unigrams_unbounded() -> Self {
        Self { lowercase: true, ngram_min: 1, ngram_max: 1, max_tokens: usize::MAX }
    }
}

/// Split `text` into word tokens and emit n-grams.
///
/// Tokens are maximal alphanumeric runs (lowercased when configured). The
/// unigram stream is truncated at `max_tokens` first; n-grams of each size in
/// the configured range are then emitted in stream order, smaller sizes
/// first, joined by `_`.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    assert!(config.ngram_min >= 1 && config.ngram_max >= config.ngram_min);
    assert!(config.max_tokens >= 1);
    let lowered;
    let source = if config.lowercase {
        lowered = text.to_lowercase();
        lowered.as_str()
    } else {
        text
    };
    let unigrams: Vec<&str> = source
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .take(config.max_tokens)
        .collect();
    let mut tokens = Vec::with_capacity(unigrams.len() * (config.ngram_max - config.ngram_min + 1));
    for n in config.ngram_min..=config.ngram_max {
        if n > unigrams.len() {
            break;
        }
        for window in unigrams.windows(n) {
            tokens.push(window.join("_"));
        }
    }
    tokens
}

/// The set of contiguous `k`-token windows over the untruncated unigram
/// stream, each joined by a single space. A text shorter than `k` tokens
/// yields its full token sequence as the one shingle; empty text yields the
/// empty set.
pub fn shingles(text: &str, k: usize) -> BTreeSet<String> {
    assert!(k >= 1);
    let config = TokenizerConfig::unigrams_unbounded();
    let tokens = tokenize(text, &config);
    let mut out = BTreeSet::new();
    if tokens.is_empty() {
        return out;
    }
    if tokens.len() < k {
        out.insert(tokens.join(" "));
        return out;
    }
    for window in tokens.windows(k) {
        out.insert(window.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unigram_config() -> TokenizerConfig {
        TokenizerConfig { ngram_max: 1, ..Default::default() }
    }

    #[test]
    fn lowercases_and_splits_on_non_alphanumeric() {
        let tokens = tokenize("Wow, SO impressed!", &unigram_config());
        assert_eq!(tokens, ["wow", "so", "impressed"]);
    }

    #[test]
    fn emits_unigrams_then_bigrams() {
        let tokens = tokenize("a b c", &TokenizerConfig::default());
        assert_eq!(tokens, ["a", "b", "c", "a_b", "b_c"]);
    }

    #[test]
    fn truncates_unigram_stream_at_max_tokens() {
        let text = (0..200).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let tokens = tokenize(&text, &unigram_config());
        assert_eq!(tokens.len(), 128);
        assert_eq!(tokens[127], "w127");
    }

    #[test]
    fn truncation_happens_before_ngram_formation() {
        let text = (0..200).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let tokens = tokenize(&text, &TokenizerConfig::default());
        // 128 unigrams + 127 bigrams; no bigram may bridge past the cut.
        assert_eq!(tokens.len(), 128 + 127);
        assert!(!tokens.iter().any(|t| t.contains("w128")));
    }

    #[test]
    fn tokenizing_rejoined_unigrams_is_idempotent() {
        let config = unigram_config();
        let first = tokenize("Some text, with Punctuation... and MORE", &config);
        let rejoined = first.join(" ");
        assert_eq!(tokenize(&rejoined, &config), first);
    }

    #[test]
    fn shingle_windows() {
        let got = shingles("a b c d", 3);
        let want: BTreeSet<String> = ["a b c", "b c d"].iter().map(|s| s.to_string()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn identical_texts_have_identical_shingles() {
        assert_eq!(shingles("one two three four", 2), shingles("one two three four", 2));
    }

    #[test]
    fn short_text_yields_single_full_shingle() {
        let got = shingles("a b", 3);
        assert_eq!(got.len(), 1);
        assert!(got.contains("a b"));
    }

    #[test]
    fn empty_text_yields_empty_shingle_set() {
        assert!(shingles("", 3).is_empty());
        assert!(shingles("...!!!", 3).is_empty());
    }
}

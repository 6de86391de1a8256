//! Vocabulary construction and inverse document frequency.

use super::FeatureError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A frozen term index with document frequencies and smoothed idf weights.
///
/// Indices are assigned in lexicographic term order, so the same term set
/// always produces the same layout. idf uses the smoothed form
/// `ln((1 + N) / (1 + df)) + 1`, which stays positive for every df <= N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    idf: Vec<f64>,
    total_docs: u64,
    #[allow(clippy::struct_field_names)]
    index: HashMap<String, u32>,
}

/// Serialized form; the index map is rebuilt on load.
#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    idf: Vec<f64>,
    total_docs: u64,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(repr: VocabularyRepr) -> Self {
        let index = repr.terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self {
            terms: repr.terms,
            doc_freq: repr.doc_freq,
            idf: repr.idf,
            total_docs: repr.total_docs,
            index,
        }
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(vocab: Vocabulary) -> Self {
        Self {
            terms: vocab.terms,
            doc_freq: vocab.doc_freq,
            idf: vocab.idf,
            total_docs: vocab.total_docs,
        }
    }
}

impl Vocabulary {
    /// Number of indexed terms; the dimensionality of vectors built from it.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of `term`, if it survived selection.
    pub fn term_index(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    /// Term at `idx`.
    pub fn term(&self, idx: u32) -> &str {
        &self.terms[idx as usize]
    }

    /// All terms in index order (lexicographic).
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Document frequency of the term at `idx`.
    pub fn doc_freq(&self, idx: u32) -> u64 {
        self.doc_freq[idx as usize]
    }

    /// idf weight of the term at `idx`.
    pub fn idf(&self, idx: u32) -> f64 {
        self.idf[idx as usize]
    }

    /// Number of documents the vocabulary was built from.
    pub fn total_docs(&self) -> u64 {
        self.total_docs
    }
}

/// Build a [`Vocabulary`] from tokenized documents.
///
/// Document frequency counts each document at most once per term. Terms with
/// df < `min_df` are dropped; when `max_features` is set, the survivors are
/// ranked by df descending (ties broken by term ascending) and the list is
/// cut there. Surviving terms are indexed lexicographically.
pub fn build_vocabulary(
    docs: &[Vec<String>],
    min_df: u64,
    max_features: Option<usize>,
) -> Result<Vocabulary, FeatureError> {
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for term in unique {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let mut survivors: Vec<(&str, u64)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
    if let Some(cap) = max_features {
        survivors.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        survivors.truncate(cap);
        survivors.sort_by(|a, b| a.0.cmp(b.0));
    }
    if survivors.is_empty() {
        return Err(FeatureError::EmptyVocabulary);
    }
    let total_docs = docs.len() as u64;
    let n = total_docs as f64;
    let mut terms = Vec::with_capacity(survivors.len());
    let mut doc_freq = Vec::with_capacity(survivors.len());
    let mut idf = Vec::with_capacity(survivors.len());
    let mut index = HashMap::with_capacity(survivors.len());
    for (i, (term, freq)) in survivors.into_iter().enumerate() {
        terms.push(term.to_string());
        doc_freq.push(freq);
        idf.push(((1.0 + n) / (1.0 + freq as f64)).ln() + 1.0);
        index.insert(term.to_string(), i as u32);
    }
    Ok(Vocabulary { terms, doc_freq, idf, total_docs, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&[&str]]) -> Vec<Vec<String>> {
        raw.iter().map(|d| d.iter().map(|t| t.to_string()).collect()).collect()
    }

    #[test]
    fn indexes_terms_lexicographically() {
        let vocab = build_vocabulary(&docs(&[&["dog", "cat"], &["bird"]]), 1, None).unwrap();
        assert_eq!(vocab.terms(), ["bird", "cat", "dog"]);
        assert_eq!(vocab.term_index("cat"), Some(1));
        assert_eq!(vocab.term_index("fish"), None);
    }

    #[test]
    fn df_counts_each_document_once() {
        let vocab = build_vocabulary(&docs(&[&["dog", "dog", "dog"], &["dog"]]), 1, None).unwrap();
        assert_eq!(vocab.doc_freq(vocab.term_index("dog").unwrap()), 2);
    }

    #[test]
    fn term_in_every_document_has_idf_one() {
        let vocab = build_vocabulary(&docs(&[&["the", "cat"], &["the"], &["the", "dog"]]), 1, None)
            .unwrap();
        let idx = vocab.term_index("the").unwrap();
        // df == N collapses the smoothed ratio to 1, leaving exactly ln(1) + 1.
        assert_eq!(vocab.idf(idx), 1.0);
    }

    #[test]
    fn rare_term_idf_matches_closed_form() {
        let vocab = build_vocabulary(&docs(&[&["the", "cat"], &["the"], &["the", "dog"]]), 1, None)
            .unwrap();
        let idx = vocab.term_index("cat").unwrap();
        // df = 1, N = 3: ln(4/2) + 1.
        assert_eq!(vocab.idf(idx), 1.6931471805599454);
    }

    #[test]
    fn min_df_drops_rare_terms() {
        let vocab =
            build_vocabulary(&docs(&[&["a", "b"], &["a", "c"], &["a", "b"]]), 2, None).unwrap();
        assert_eq!(vocab.terms(), ["a", "b"]);
    }

    #[test]
    fn max_features_keeps_highest_df_breaking_ties_lexicographically() {
        // df: a=3, b=2, c=2, d=1. cap of 2 keeps a and the tie-winner b.
        let corpus = docs(&[&["a", "b", "c"], &["a", "b", "c"], &["a", "d"]]);
        let vocab = build_vocabulary(&corpus, 1, Some(2)).unwrap();
        assert_eq!(vocab.terms(), ["a", "b"]);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(build_vocabulary(&[], 1, None), Err(FeatureError::EmptyCorpus)));
    }

    #[test]
    fn all_terms_filtered_is_an_error() {
        assert!(matches!(
            build_vocabulary(&docs(&[&["a"], &["b"]]), 5, None),
            Err(FeatureError::EmptyVocabulary)
        ));
    }

    #[test]
    fn serde_round_trip_rebuilds_index() {
        let vocab = build_vocabulary(&docs(&[&["x", "y"], &["y"]]), 1, None).unwrap();
        let json = serde_json::to_string(&vocab).unwrap();
        let back: Vocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vocab);
        assert_eq!(back.term_index("y"), vocab.term_index("y"));
    }
}

//! Adapter for externally computed per-document scores.
//!
//! Transformer predictions produced outside this toolkit enter the pipeline
//! as JSON Lines of `{doc_id, score, model_name}`. Scores are probabilities,
//! so anything outside [0, 1] is a hard error rather than something to clamp.

use super::ClassifierError;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};

/// Per-document scores from an external model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScores {
    pub model_name: String,
    scores: BTreeMap<String, f64>,
    duplicate_count: u64,
}

impl ExternalScores {
    pub fn score(&self, doc_id: &str) -> Option<f64> {
        self.scores.get(doc_id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// How many records were overwritten by a later record for the same
    /// doc_id. Nonzero values deserve a warning upstream.
    pub fn duplicate_count(&self) -> u64 {
        self.duplicate_count
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, &v)| (k.as_str(), v))
    }

    #[cfg(test)]
    pub(crate) fn from_map(model_name: &str, scores: BTreeMap<String, f64>) -> Self {
        Self { model_name: model_name.to_string(), scores, duplicate_count: 0 }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreRecord {
    doc_id: String,
    score: f64,
    model_name: String,
}

/// Read JSON Lines score records. Blank lines are skipped; a duplicate
/// doc_id keeps the last record and bumps the duplicate counter.
pub fn load_external_scores<R: Read>(reader: R) -> Result<ExternalScores, ClassifierError> {
    let mut scores = BTreeMap::new();
    let mut model_name = String::new();
    let mut duplicate_count = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ScoreRecord = serde_json::from_str(&line).map_err(|e| {
            ClassifierError::MalformedScore { line: line_no, reason: e.to_string() }
        })?;
        if !(0.0..=1.0).contains(&record.score) {
            return Err(ClassifierError::ScoreOutOfRange { line: line_no, score: record.score });
        }
        if model_name.is_empty() {
            model_name = record.model_name;
        }
        if scores.insert(record.doc_id, record.score).is_some() {
            duplicate_count += 1;
        }
    }
    Ok(ExternalScores { model_name, scores, duplicate_count })
}

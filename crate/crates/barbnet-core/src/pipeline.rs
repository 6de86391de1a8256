//! Staged document routing: keyword gate, sarcasm scoring, cyberbullying
//! scoring, and the four-quadrant verdict.
//!
//! Both probabilities are always computed; the sarcasm stage routes rather
//! than discards, since the downstream analysis needs all four quadrant
//! combinations. Each stage can score natively (an embedded linear model) or
//! from externally computed per-document scores, and the two may be mixed.

use crate::classifiers::{predict_proba, ExternalScores, LinearModel};
use crate::corpus::Document;
use crate::par;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// Errors from classification and verdict I/O.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("unscored document '{0}'")]
    Unscored(String),
    #[error("label '{label}' is not a class of the model (classes: {classes:?})")]
    UnknownLabel { label: String, classes: Vec<String> },
    #[error("default positive-class rule needs a binary model; this one has {0} classes")]
    NotBinary(usize),
    #[error("document '{doc_id}': {source}")]
    Document {
        doc_id: String,
        #[source]
        source: Box<PipelineError>,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error(transparent)]
    Classifier(#[from] crate::classifiers::ClassifierError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Verdict quadrant, the cross of the two boolean decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    Both,
    SarcasmOnly,
    BullyOnly,
    Neither,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] =
        [Quadrant::Both, Quadrant::SarcasmOnly, Quadrant::BullyOnly, Quadrant::Neither];

    pub fn from_flags(sarcastic: bool, bullying: bool) -> Self {
        match (sarcastic, bullying) {
            (true, true) => Quadrant::Both,
            (true, false) => Quadrant::SarcasmOnly,
            (false, true) => Quadrant::BullyOnly,
            (false, false) => Quadrant::Neither,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Both => "both",
            Quadrant::SarcasmOnly => "sarcasm_only",
            Quadrant::BullyOnly => "bully_only",
            Quadrant::Neither => "neither",
        }
    }
}

/// Where a probability came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    NativeModel,
    ExternalScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictSources {
    pub sarcasm: SourceKind,
    pub bully: SourceKind,
}

/// Per-document outcome of the full pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub doc_id: String,
    pub subreddit: String,
    pub author: String,
    /// Author the text replies to, when the document is a reply.
    pub target_author: Option<String>,
    pub p_sarcasm: f64,
    pub p_bully: f64,
    pub sarcastic: bool,
    pub bullying: bool,
    pub quadrant: Quadrant,
    pub sources: VerdictSources,
}

/// Decision thresholds and the keyword gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub threshold_s: f64,
    pub threshold_b: f64,
    pub require_keyword_match: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { threshold_s: 0.5, threshold_b: 0.5, require_keyword_match: true }
    }
}

impl PipelineConfig {
    fn validate(&self) {
        assert!(
            (0.0..=1.0).contains(&self.threshold_s) && (0.0..=1.0).contains(&self.threshold_b),
            "thresholds must lie in [0, 1]"
        );
    }
}

/// How a native model's class distribution collapses to the single
/// positive-class probability the pipeline thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositiveRule {
    /// Probability of the second class of a binary model (labels sort
    /// lexicographically at training, so e.g. "sarcastic" beats "neutral").
    SecondClass,
    /// Probability of the named class.
    Label(String),
    /// One minus the probability of the named class; the multi-class rule
    /// where every class except one ("none", "not_bullying", ...) counts.
    Complement(String),
}

/// One stage's probability source. The model is boxed to keep the variants
/// comparable in size.
pub enum ScoreSource {
    Native { model: Box<LinearModel>, rule: PositiveRule },
    External(ExternalScores),
}

impl ScoreSource {
    pub fn native(model: LinearModel) -> Self {
        ScoreSource::Native { model: Box::new(model), rule: PositiveRule::SecondClass }
    }

    fn kind(&self) -> SourceKind {
        match self {
            ScoreSource::Native { .. } => SourceKind::NativeModel,
            ScoreSource::External(_) => SourceKind::ExternalScores,
        }
    }

    fn score(&self, doc: &Document) -> Result<f64, PipelineError> {
        match self {
            ScoreSource::Native { model, rule } => {
                let x = model.featurize(&doc.text);
                let probs = predict_proba(model, &x)?;
                let class_pos = |label: &str| {
                    model.classes().iter().position(|c| c == label).ok_or_else(|| {
                        PipelineError::UnknownLabel {
                            label: label.to_string(),
                            classes: model.classes().to_vec(),
                        }
                    })
                };
                match rule {
                    PositiveRule::SecondClass => {
                        if model.classes().len() != 2 {
                            return Err(PipelineError::NotBinary(model.classes().len()));
                        }
                        Ok(probs[1])
                    }
                    PositiveRule::Label(label) => Ok(probs[class_pos(label)?]),
                    PositiveRule::Complement(label) => Ok(1.0 - probs[class_pos(label)?]),
                }
            }
            ScoreSource::External(scores) => {
                scores.score(&doc.doc_id).ok_or_else(|| PipelineError::Unscored(doc.doc_id.clone()))
            }
        }
    }
}

/// Score one document through both stages and derive its verdict. The
/// keyword gate is corpus selection, handled in [`run`]; it never alters the
/// verdict rule here.
pub fn classify_document(
    doc: &Document,
    sarcasm_source: &ScoreSource,
    bully_source: &ScoreSource,
    config: &PipelineConfig,
) -> Result<Verdict, PipelineError> {
    config.validate();
    let wrap = |e: PipelineError| PipelineError::Document {
        doc_id: doc.doc_id.clone(),
        source: Box::new(e),
    };
    let p_sarcasm = sarcasm_source.score(doc).map_err(wrap)?;
    let p_bully = bully_source.score(doc).map_err(wrap)?;
    let sarcastic = p_sarcasm >= config.threshold_s;
    let bullying = p_bully >= config.threshold_b;
    Ok(Verdict {
        doc_id: doc.doc_id.clone(),
        subreddit: doc.subreddit.clone(),
        author: doc.author.clone(),
        target_author: doc.target_author.clone(),
        p_sarcasm,
        p_bully,
        sarcastic,
        bullying,
        quadrant: Quadrant::from_flags(sarcastic, bullying),
        sources: VerdictSources { sarcasm: sarcasm_source.kind(), bully: bully_source.kind() },
    })
}

/// Verdicts plus the count of documents the keyword gate excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub verdicts: Vec<Verdict>,
    pub excluded_no_keyword: u64,
}

/// Classify a corpus, preserving document order. With the keyword gate on,
/// documents whose keyword set is empty are skipped and counted instead of
/// scored.
pub fn run(
    corpus: &[Document],
    sarcasm_source: &ScoreSource,
    bully_source: &ScoreSource,
    config: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    config.validate();
    let eligible: Vec<&Document> =
        corpus.iter().filter(|d| !config.require_keyword_match || !d.keywords.is_empty()).collect();
    let excluded_no_keyword = (corpus.len() - eligible.len()) as u64;
    let verdicts = par::try_map_slice(&eligible, |doc| {
        classify_document(doc, sarcasm_source, bully_source, config)
    })?;
    Ok(PipelineRun { verdicts, excluded_no_keyword })
}

/// Quadrant tally for one subreddit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantCounts {
    pub both: u64,
    pub sarcasm_only: u64,
    pub bully_only: u64,
    pub neither: u64,
}

impl QuadrantCounts {
    pub fn total(&self) -> u64 {
        self.both + self.sarcasm_only + self.bully_only + self.neither
    }

    pub fn get(&self, quadrant: Quadrant) -> u64 {
        match quadrant {
            Quadrant::Both => self.both,
            Quadrant::SarcasmOnly => self.sarcasm_only,
            Quadrant::BullyOnly => self.bully_only,
            Quadrant::Neither => self.neither,
        }
    }

    fn bump(&mut self, quadrant: Quadrant) {
        match quadrant {
            Quadrant::Both => self.both += 1,
            Quadrant::SarcasmOnly => self.sarcasm_only += 1,
            Quadrant::BullyOnly => self.bully_only += 1,
            Quadrant::Neither => self.neither += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub subreddit: String,
    pub count: u64,
}

/// Per-subreddit quadrant counts plus the top-k subreddits for each
/// quadrant. Rankings order by count descending with lexicographic
/// tie-breaks and keep only subreddits that actually hit the quadrant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub per_subreddit: BTreeMap<String, QuadrantCounts>,
    pub top_both: Vec<RankEntry>,
    pub top_sarcasm_only: Vec<RankEntry>,
    pub top_bully_only: Vec<RankEntry>,
    pub top_neither: Vec<RankEntry>,
}

/// Tally verdicts per subreddit and rank subreddits per quadrant.
pub fn aggregate(verdicts: &[Verdict], top_k: usize) -> AggregateReport {
    let mut per_subreddit: BTreeMap<String, QuadrantCounts> = BTreeMap::new();
    for v in verdicts {
        per_subreddit.entry(v.subreddit.clone()).or_default().bump(v.quadrant);
    }
    let rank = |quadrant: Quadrant| -> Vec<RankEntry> {
        let mut entries: Vec<RankEntry> = per_subreddit
            .iter()
            .filter(|(_, counts)| counts.get(quadrant) > 0)
            .map(|(s, counts)| RankEntry { subreddit: s.clone(), count: counts.get(quadrant) })
            .collect();
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.subreddit.cmp(&b.subreddit)));
        entries.truncate(top_k);
        entries
    };
    AggregateReport {
        top_both: rank(Quadrant::Both),
        top_sarcasm_only: rank(Quadrant::SarcasmOnly),
        top_bully_only: rank(Quadrant::BullyOnly),
        top_neither: rank(Quadrant::Neither),
        per_subreddit,
    }
}

impl AggregateReport {
    /// Aligned text table, one subreddit per row, quadrants as columns.
    pub fn render_text(&self) -> String {
        let mut width = "subreddit".len();
        for name in self.per_subreddit.keys() {
            width = width.max(name.len());
        }
        let mut out = String::new();
        out.push_str(&format!(
            "{:<width$}  {:>8}  {:>12}  {:>10}  {:>8}  {:>8}\n",
            "subreddit", "both", "sarcasm_only", "bully_only", "neither", "total",
        ));
        for (name, c) in &self.per_subreddit {
            out.push_str(&format!(
                "{name:<width$}  {:>8}  {:>12}  {:>10}  {:>8}  {:>8}\n",
                c.both,
                c.sarcasm_only,
                c.bully_only,
                c.neither,
                c.total(),
            ));
        }
        out
    }
}

/// Write verdicts as JSON Lines.
pub fn write_verdicts<W: Write>(mut writer: W, verdicts: &[Verdict]) -> Result<(), PipelineError> {
    for v in verdicts {
        serde_json::to_writer(&mut writer, v)
            .map_err(|e| PipelineError::Malformed { line: 0, reason: e.to_string() })?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Read verdicts back from JSON Lines, naming the line on any failure.
pub fn read_verdicts<R: BufRead>(reader: R) -> Result<Vec<Verdict>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let verdict: Verdict = serde_json::from_str(&line)
            .map_err(|e| PipelineError::Malformed { line: i as u64 + 1, reason: e.to_string() })?;
        out.push(verdict);
    }
    Ok(out)
}

//! Dataset splitting, classification metrics, and model comparison tables.

use crate::classifiers::{
    predict_label, train_logreg, train_nb, train_svm, ClassifierError, ExternalScores, ModelMeta,
    Task, TrainConfig,
};
use crate::features::{build_vocabulary, tokenize, FeatureError, TokenizerConfig, Vocabulary};
use crate::par;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("duplicate doc_id '{0}'")]
    DuplicateDocId(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("test fraction {0} outside (0, 1)")]
    BadFraction(f64),
    #[error("class '{class}' has only {count} record(s), need at least 2 to stratify")]
    ClassTooSmall { class: String, count: usize },
    #[error("{predictions} predictions vs {truth} truth labels")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("no labels to evaluate")]
    EmptyInput,
    #[error("no model specs given")]
    NoSpecs,
    #[error("model '{name}': {source}")]
    Model {
        name: String,
        #[source]
        source: ClassifierError,
    },
    #[error("model '{name}': {source}")]
    Features {
        name: String,
        #[source]
        source: FeatureError,
    },
    #[error("model '{name}' has no score for test document '{doc_id}'")]
    MissingScore { name: String, doc_id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One labeled text sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub doc_id: String,
    pub text: String,
    pub label: String,
}

/// A collection of labeled records with unique doc_ids. `source` is a free
/// provenance note naming where the rows came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    source: String,
    records: Vec<LabeledRecord>,
    labels: BTreeSet<String>,
}

impl LabeledDataset {
    pub fn from_records(source: &str, records: Vec<LabeledRecord>) -> Result<Self, EvalError> {
        if records.is_empty() {
            return Err(EvalError::EmptyDataset);
        }
        let mut seen = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.doc_id.as_str()) {
                return Err(EvalError::DuplicateDocId(r.doc_id.clone()));
            }
            labels.insert(r.label.clone());
        }
        Ok(Self { source: source.to_string(), records, labels })
    }

    /// Load from CSV with a header containing doc_id, text, and label
    /// columns. Extra columns are ignored.
    pub fn load_csv(path: &Path) -> Result<Self, EvalError> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut records = Vec::new();
        for (i, row) in reader.deserialize::<LabeledRecord>().enumerate() {
            // Line 1 is the header.
            let record =
                row.map_err(|e| EvalError::Malformed { line: i + 2, reason: e.to_string() })?;
            records.push(record);
        }
        let source = path.display().to_string();
        Self::from_records(&source, records)
    }

    /// Load from JSON Lines where each line is {"doc_id", "text", "label"}.
    /// Blank lines are skipped.
    pub fn load_jsonl(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: LabeledRecord = serde_json::from_str(line)
                .map_err(|e| EvalError::Malformed { line: i + 1, reason: e.to_string() })?;
            records.push(record);
        }
        let source = path.display().to_string();
        Self::from_records(&source, records)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[LabeledRecord] {
        &self.records
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    /// The most frequent label's share of all records, the floor any useful
    /// classifier has to beat. Ties resolve to the lexicographically first
    /// label.
    pub fn majority_fraction(&self) -> f64 {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.label.as_str()).or_insert(0) += 1;
        }
        let top = counts.values().copied().max().unwrap_or(0);
        top as f64 / self.records.len() as f64
    }
}

/// Splits into (train, test). The split is disjoint and exhaustive; the test
/// half comes back sorted by doc_id while the train half is shuffled by the
/// seed. When `stratified`, each class keeps its ratio within one record and
/// contributes at least one record to each side.
pub fn split(
    dataset: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<LabeledRecord>, Vec<LabeledRecord>), EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::BadFraction(test_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();

    if stratified {
        let mut by_class: BTreeMap<&str, Vec<&LabeledRecord>> = BTreeMap::new();
        for r in &dataset.records {
            by_class.entry(r.label.as_str()).or_default().push(r);
        }
        for (class, mut members) in by_class {
            if members.len() < 2 {
                return Err(EvalError::ClassTooSmall {
                    class: class.to_string(),
                    count: members.len(),
                });
            }
            members.shuffle(&mut rng);
            let want = (members.len() as f64 * test_fraction).round() as usize;
            let take = want.clamp(1, members.len() - 1);
            for (i, r) in members.into_iter().enumerate() {
                if i < take {
                    test.push(r.clone());
                } else {
                    train.push(r.clone());
                }
            }
        }
    } else {
        if dataset.records.len() < 2 {
            return Err(EvalError::ClassTooSmall {
                class: "<all>".to_string(),
                count: dataset.records.len(),
            });
        }
        let mut members: Vec<&LabeledRecord> = dataset.records.iter().collect();
        members.shuffle(&mut rng);
        let want = (members.len() as f64 * test_fraction).round() as usize;
        let take = want.clamp(1, members.len() - 1);
        for (i, r) in members.into_iter().enumerate() {
            if i < take {
                test.push(r.clone());
            } else {
                train.push(r.clone());
            }
        }
    }

    test.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    train.shuffle(&mut rng);
    Ok((train, test))
}

/// Precision, recall, F1, and support for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Full evaluation of one prediction run.
///
/// `classes` is the sorted union of truth and predicted labels; `confusion`
/// is row-major with rows as truth and columns as predictions in that class
/// order. Macro averages cover only classes with nonzero support; classes
/// seen only in predictions appear in the per-class list with zeroed metrics
/// and a warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub classes: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub confusion: Vec<Vec<u64>>,
    pub total: u64,
    pub warnings: Vec<String>,
}

/// Scores `predictions` against `truth` labels position by position.
pub fn evaluate(predictions: &[String], truth: &[String]) -> Result<MetricsReport, EvalError> {
    if predictions.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(EvalError::EmptyInput);
    }

    let classes: Vec<String> =
        truth.iter().chain(predictions).collect::<BTreeSet<_>>().into_iter().cloned().collect();
    let index: BTreeMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

    let k = classes.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (p, t) in predictions.iter().zip(truth) {
        confusion[index[t.as_str()]][index[p.as_str()]] += 1;
    }

    let total = truth.len() as u64;
    let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let accuracy = trace as f64 / total as f64;

    let mut warnings = Vec::new();
    let mut per_class = Vec::with_capacity(k);
    for (i, class) in classes.iter().enumerate() {
        let support: u64 = confusion[i].iter().sum();
        let predicted: u64 = (0..k).map(|r| confusion[r][i]).sum();
        let tp = confusion[i][i];
        if support == 0 {
            warnings.push(format!(
                "class '{class}' appears in predictions but never in truth; metrics set to 0"
            ));
        } else if predicted == 0 {
            warnings.push(format!("class '{class}' was never predicted; precision set to 0"));
        }
        let precision = if predicted > 0 { tp as f64 / predicted as f64 } else { 0.0 };
        let recall = if support > 0 { tp as f64 / support as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics { class: class.clone(), precision, recall, f1, support });
    }

    let observed: Vec<&ClassMetrics> = per_class.iter().filter(|m| m.support > 0).collect();
    let n = observed.len() as f64;
    let macro_precision = observed.iter().map(|m| m.precision).sum::<f64>() / n;
    let macro_recall = observed.iter().map(|m| m.recall).sum::<f64>() / n;
    let macro_f1 = observed.iter().map(|m| m.f1).sum::<f64>() / n;

    Ok(MetricsReport {
        accuracy,
        classes,
        per_class,
        macro_precision,
        macro_recall,
        macro_f1,
        confusion,
        total,
        warnings,
    })
}

/// A model entry for [`compare_models`].
#[derive(Debug, Clone)]
pub enum ModelSpec {
    NaiveBayes {
        name: String,
        alpha: f64,
    },
    LogReg {
        name: String,
    },
    LinearSvm {
        name: String,
    },
    /// Precomputed scores from an external system; a document is assigned
    /// `positive` when its score is at least 0.5.
    External {
        name: String,
        scores: ExternalScores,
        positive: String,
        negative: String,
    },
}

impl ModelSpec {
    pub fn naive_bayes() -> Self {
        Self::NaiveBayes { name: "Naive Bayes".to_string(), alpha: 1.0 }
    }

    pub fn logreg() -> Self {
        Self::LogReg { name: "Logistic Regression".to_string() }
    }

    pub fn svm() -> Self {
        Self::LinearSvm { name: "SVM".to_string() }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::NaiveBayes { name, .. }
            | Self::LogReg { name }
            | Self::LinearSvm { name }
            | Self::External { name, .. } => name,
        }
    }
}

/// Settings shared by every spec in one comparison run.
#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub task: Task,
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
    pub min_df: u64,
    pub max_features: Option<usize>,
    pub tokenizer: TokenizerConfig,
    pub train: TrainConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            task: Task::Sarcasm,
            test_fraction: 0.2,
            seed: 42,
            stratified: true,
            min_df: 2,
            max_features: Some(50_000),
            tokenizer: TokenizerConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// One comparison row: the spec's name and its test-set metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub report: MetricsReport,
}

/// Results of [`compare_models`]: rows in input-spec order plus the shared
/// test membership for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub dataset: String,
    pub train_size: usize,
    pub test_size: usize,
    pub majority_fraction: f64,
    pub test_doc_ids: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    /// Aligned two-column table: model name and accuracy as a percentage
    /// with two decimals, rows in input order.
    pub fn render_text(&self) -> String {
        let name_w =
            self.rows.iter().map(|r| r.model.len()).chain(["Model".len()]).max().unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<name_w$}  Accuracy(in percentage)", "Model");
        for row in &self.rows {
            let _ = writeln!(out, "{:<name_w$}  {:.2}", row.model, row.accuracy * 100.0);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Trains every spec on one shared split of `dataset` and evaluates all of
/// them on the same held-out test records. Trainable specs share a train-set
/// vocabulary; external specs just look up their scores.
pub fn compare_models(
    dataset: &LabeledDataset,
    specs: &[ModelSpec],
    config: &CompareConfig,
) -> Result<ComparisonReport, EvalError> {
    if specs.is_empty() {
        return Err(EvalError::NoSpecs);
    }
    let (train, test) = split(dataset, config.test_fraction, config.seed, config.stratified)?;

    let needs_training = specs.iter().any(|s| !matches!(s, ModelSpec::External { .. }));
    let trained_inputs = if needs_training {
        let tokens: Vec<Vec<String>> =
            par::map_slice(&train, |r| tokenize(&r.text, &config.tokenizer));
        let vocab = build_vocabulary(&tokens, config.min_df, config.max_features).map_err(|e| {
            EvalError::Features { name: "<shared vocabulary>".to_string(), source: e }
        })?;
        Some(vocab)
    } else {
        None
    };

    let truth: Vec<String> = test.iter().map(|r| r.label.clone()).collect();
    let train_labels: Vec<String> = train.iter().map(|r| r.label.clone()).collect();

    let rows: Vec<ComparisonRow> = par::try_map_slice(specs, |spec| {
        let predictions = match spec {
            ModelSpec::External { name, scores, positive, negative } => test
                .iter()
                .map(|r| {
                    let s = scores.score(&r.doc_id).ok_or_else(|| EvalError::MissingScore {
                        name: name.clone(),
                        doc_id: r.doc_id.clone(),
                    })?;
                    Ok(if s >= 0.5 { positive.clone() } else { negative.clone() })
                })
                .collect::<Result<Vec<String>, EvalError>>()?,
            trainable => {
                let vocab = trained_inputs.as_ref().expect("vocabulary built");
                let model = train_spec(trainable, vocab, &train, &train_labels, config)?;
                test.iter()
                    .map(|r| {
                        predict_label(&model, &model.featurize(&r.text))
                            .map(str::to_string)
                            .map_err(|e| EvalError::Model {
                                name: trainable.name().to_string(),
                                source: e,
                            })
                    })
                    .collect::<Result<Vec<String>, EvalError>>()?
            }
        };
        let report = evaluate(&predictions, &truth)?;
        Ok::<_, EvalError>(ComparisonRow {
            model: spec.name().to_string(),
            accuracy: report.accuracy,
            report,
        })
    })?;

    Ok(ComparisonReport {
        dataset: dataset.source.clone(),
        train_size: train.len(),
        test_size: test.len(),
        majority_fraction: dataset.majority_fraction(),
        test_doc_ids: test.into_iter().map(|r| r.doc_id).collect(),
        rows,
    })
}

fn train_spec(
    spec: &ModelSpec,
    vocab: &Vocabulary,
    train: &[LabeledRecord],
    train_labels: &[String],
    config: &CompareConfig,
) -> Result<crate::classifiers::LinearModel, EvalError> {
    let meta = ModelMeta {
        task: config.task,
        features: crate::classifiers::FeatureSpace::Vocabulary { vocab: vocab.clone() },
        tokenizer: config.tokenizer.clone(),
    };
    let wrap = |e: ClassifierError| EvalError::Model { name: spec.name().to_string(), source: e };
    match spec {
        ModelSpec::NaiveBayes { alpha, .. } => {
            let x: Vec<_> = train
                .iter()
                .map(|r| {
                    crate::features::count_vectorize(&tokenize(&r.text, &config.tokenizer), vocab)
                })
                .collect();
            train_nb(&x, train_labels, *alpha, meta).map_err(wrap)
        }
        ModelSpec::LogReg { .. } => {
            let x: Vec<_> = train
                .iter()
                .map(|r| crate::features::vectorize(&tokenize(&r.text, &config.tokenizer), vocab))
                .collect();
            train_logreg(&x, train_labels, &config.train, meta).map_err(wrap)
        }
        ModelSpec::LinearSvm { .. } => {
            let x: Vec<_> = train
                .iter()
                .map(|r| crate::features::vectorize(&tokenize(&r.text, &config.tokenizer), vocab))
                .collect();
            train_svm(&x, train_labels, &config.train, meta).map_err(wrap)
        }
        ModelSpec::External { .. } => unreachable!("external specs never train"),
    }
}

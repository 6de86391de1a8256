//! Linear text classifiers and model persistence.
//!
//! Three native trainers (multinomial Naive Bayes, logistic regression,
//! linear SVM) all produce the same [`LinearModel`] shape: one weight row and
//! one bias term per class, plus the embedded feature space needed to score
//! raw text after reload. Externally computed per-document scores can stand
//! in for a native model through [`ExternalScores`].

mod external;
mod linear;
mod nb;
mod persist;

pub use external::{load_external_scores, ExternalScores};
pub use linear::{
    fit_platt, hinge_loss_grad, logistic_loss_grad, train_logreg, train_logreg_traced, train_svm,
};
pub use nb::train_nb;
pub use persist::{load_model, save_model, SCHEMA_VERSION};

use crate::features::{
    count_vectorize, hash_vectorize, tokenize, vectorize, SparseVector, TokenizerConfig, Vocabulary,
};
use serde::{Deserialize, Serialize};

/// Errors from training, prediction, and model I/O.
#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("feature/label length mismatch: {x} vectors, {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("training data contains only the class '{0}'")]
    SingleClass(String),
    #[error(
        "negative feature value {value} at row {row}, index {index}: \
         multinomial NB needs raw term counts"
    )]
    NegativeFeature { row: usize, index: u32, value: f64 },
    #[error("feature dimension mismatch: model expects {expected}, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite training loss at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("line {line}: score {score} outside [0, 1]")]
    ScoreOutOfRange { line: u64, score: f64 },
    #[error("line {line}: {reason}")]
    MalformedScore { line: u64, reason: String },
    #[error("unsupported model schema version {got} (supported: {supported})")]
    UnsupportedVersion { got: u32, supported: u32 },
    #[error("model file failed integrity check: {0}")]
    Corrupted(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which pipeline stage a model serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sarcasm,
    Cyberbullying,
}

/// Trainer family behind a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    NaiveBayes,
    LogReg,
    LinearSvm,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::LogReg => "logreg",
            ModelKind::LinearSvm => "linear_svm",
        })
    }
}

/// The feature space a model scores in: a frozen vocabulary or a seeded
/// hashing configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeatureSpace {
    Vocabulary { vocab: Vocabulary },
    Hashing { dims: usize, seed: u64 },
}

impl FeatureSpace {
    pub fn dim(&self) -> usize {
        match self {
            FeatureSpace::Vocabulary { vocab } => vocab.len(),
            FeatureSpace::Hashing { dims, .. } => *dims,
        }
    }
}

/// Everything about a model other than the learned parameters: the stage it
/// serves, the feature space, and how raw text is tokenized into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub task: Task,
    pub features: FeatureSpace,
    pub tokenizer: TokenizerConfig,
}

impl ModelMeta {
    pub fn with_vocabulary(task: Task, vocab: Vocabulary) -> Self {
        Self {
            task,
            features: FeatureSpace::Vocabulary { vocab },
            tokenizer: TokenizerConfig::default(),
        }
    }

    pub fn with_hashing(task: Task, dims: usize, seed: u64) -> Self {
        Self {
            task,
            features: FeatureSpace::Hashing { dims, seed },
            tokenizer: TokenizerConfig::default(),
        }
    }
}

/// Logistic calibration of a raw margin: `p = sigmoid(slope * margin + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub slope: f64,
    pub intercept: f64,
}

impl PlattParams {
    pub fn apply(&self, margin: f64) -> f64 {
        sigmoid(self.slope * margin + self.intercept)
    }
}

/// Gradient-descent settings shared by the logistic-regression and SVM
/// trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Adam,
    Sgd,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 5,
            learning_rate: 1e-3,
            l2: 1e-4,
            batch_size: 32,
            optimizer: Optimizer::Adam,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 42,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), ClassifierError> {
        let ok =
            self.epochs >= 1 && self.learning_rate > 0.0 && self.l2 >= 0.0 && self.batch_size >= 1;
        if ok {
            Ok(())
        } else {
            Err(ClassifierError::InvalidModel(
                "train config violates its bounds (epochs >= 1, learning_rate > 0, \
                 l2 >= 0, batch_size >= 1)"
                    .into(),
            ))
        }
    }
}

/// A trained linear classifier in log-linear form.
///
/// `weights` has one row per class in `classes` order and `bias` one entry.
/// Binary discriminative models (logreg, SVM) store the zero row for the
/// first class and the learned parameters for the second, so class scores
/// reduce to the usual single margin. `calibration` is present only for SVM
/// models: one entry for binary, one per class for one-vs-rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    task: Task,
    kind: ModelKind,
    classes: Vec<String>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    features: FeatureSpace,
    tokenizer: TokenizerConfig,
    calibration: Vec<PlattParams>,
    schema_version: u32,
}

impl LinearModel {
    /// Assemble and validate a model. Training code and the loader both come
    /// through here, so an invalid shape can't circulate.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        task: Task,
        kind: ModelKind,
        classes: Vec<String>,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
        features: FeatureSpace,
        tokenizer: TokenizerConfig,
        calibration: Vec<PlattParams>,
    ) -> Result<Self, ClassifierError> {
        let invalid = |msg: &str| ClassifierError::InvalidModel(msg.to_string());
        if classes.is_empty() {
            return Err(invalid("no classes"));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !classes.iter().all(|c| seen.insert(c.as_str())) {
            return Err(invalid("duplicate class labels"));
        }
        if weights.len() != classes.len() || bias.len() != classes.len() {
            return Err(invalid("weight/bias row count differs from class count"));
        }
        let dim = features.dim();
        if weights.iter().any(|row| row.len() != dim) {
            return Err(invalid("weight row length differs from feature dimension"));
        }
        let finite = weights.iter().flatten().all(|w| w.is_finite())
            && bias.iter().all(|b| b.is_finite())
            && calibration.iter().all(|p| p.slope.is_finite() && p.intercept.is_finite());
        if !finite {
            return Err(invalid("non-finite parameter"));
        }
        match (kind, calibration.len()) {
            (ModelKind::LinearSvm, n) if n == 1 && classes.len() == 2 => {}
            (ModelKind::LinearSvm, n) if n == classes.len() && classes.len() > 2 => {}
            (ModelKind::LinearSvm, _) => {
                return Err(invalid("SVM calibration entry count is wrong"));
            }
            (_, 0) => {}
            (_, _) => return Err(invalid("calibration present on a non-SVM model")),
        }
        Ok(Self {
            task,
            kind,
            classes,
            weights,
            bias,
            features,
            tokenizer,
            calibration,
            schema_version: SCHEMA_VERSION,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Class labels in score order (sorted lexicographically at training time).
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn features(&self) -> &FeatureSpace {
        &self.features
    }

    pub fn tokenizer(&self) -> &TokenizerConfig {
        &self.tokenizer
    }

    pub fn calibration(&self) -> &[PlattParams] {
        &self.calibration
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn feature_dim(&self) -> usize {
        self.features.dim()
    }

    /// Raw per-class decision scores `W x + b`. For Naive Bayes these are
    /// unnormalized log joints; for logreg/SVM the second row of a binary
    /// model carries the margin.
    pub fn decision_scores(&self, x: &SparseVector) -> Result<Vec<f64>, ClassifierError> {
        if x.dim() != self.feature_dim() {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.feature_dim(),
                got: x.dim(),
            });
        }
        Ok(self.weights.iter().zip(&self.bias).map(|(row, b)| x.dot(row) + b).collect())
    }

    /// Vectorize raw text into this model's feature space: raw counts for
    /// Naive Bayes over a vocabulary, TF-IDF for the other vocabulary models,
    /// seeded signed hashing for a hashing space.
    pub fn featurize(&self, text: &str) -> SparseVector {
        let tokens = tokenize(text, &self.tokenizer);
        match &self.features {
            FeatureSpace::Vocabulary { vocab } => match self.kind {
                ModelKind::NaiveBayes => count_vectorize(&tokens, vocab),
                _ => vectorize(&tokens, vocab),
            },
            FeatureSpace::Hashing { dims, seed } => hash_vectorize(&tokens, *dims, *seed),
        }
    }
}

/// Probability distribution over the model's classes for one input.
///
/// Naive Bayes and binary logreg renormalize their log-linear scores
/// directly (softmax over two scores with a zero row is exactly the
/// sigmoid). One-vs-rest models squash each class margin independently and
/// normalize; SVM margins pass through their fitted calibration first.
pub fn predict_proba(model: &LinearModel, x: &SparseVector) -> Result<Vec<f64>, ClassifierError> {
    let scores = model.decision_scores(x)?;
    let probs = match model.kind {
        ModelKind::NaiveBayes => softmax(&scores),
        ModelKind::LogReg => {
            if model.classes.len() == 2 {
                softmax(&scores)
            } else {
                normalize(scores.iter().map(|&z| sigmoid(z)).collect())
            }
        }
        ModelKind::LinearSvm => {
            if model.classes.len() == 2 {
                let p = model.calibration[0].apply(scores[1]);
                vec![1.0 - p, p]
            } else {
                normalize(
                    scores
                        .iter()
                        .zip(&model.calibration)
                        .map(|(&z, platt)| platt.apply(z))
                        .collect(),
                )
            }
        }
    };
    Ok(probs)
}

/// Predicted class label: argmax of [`predict_proba`], earliest class on a tie.
pub fn predict_label<'m>(
    model: &'m LinearModel,
    x: &SparseVector,
) -> Result<&'m str, ClassifierError> {
    let probs = predict_proba(model, x)?;
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    Ok(&model.classes[best])
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow for large |z|.
pub(crate) fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / sum).collect()
}

/// Sorted, deduplicated class labels from a label column.
pub(crate) fn collect_classes(y: &[String]) -> Vec<String> {
    let set: std::collections::BTreeSet<&String> = y.iter().collect();
    set.into_iter().cloned().collect()
}

pub(crate) fn check_training_input(
    x: &[SparseVector],
    y: &[String],
) -> Result<Vec<String>, ClassifierError> {
    if x.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(ClassifierError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let dim = x[0].dim();
    for (row, v) in x.iter().enumerate() {
        if v.dim() != dim {
            return Err(ClassifierError::DimensionMismatch { expected: dim, got: v.dim() });
        }
        let _ = row;
    }
    let classes = collect_classes(y);
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClass(classes[0].clone()));
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_abs_diff_eq!(sigmoid(0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn softmax_sums_to_one_and_ignores_shifts() {
        let a = softmax(&[1.0, 2.0, 3.0]);
        let b = softmax(&[101.0, 102.0, 103.0]);
        assert_abs_diff_eq!(a.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn log1p_exp_matches_naive_form_in_safe_range() {
        for z in [-5.0, -0.5, 0.0, 0.5, 5.0] {
            assert_abs_diff_eq!(log1p_exp(z), (1.0 + f64::exp(z)).ln(), epsilon = 1e-12);
        }
        assert!(log1p_exp(800.0).is_finite());
    }

    #[test]
    fn from_parts_rejects_ragged_weights() {
        let err = LinearModel::from_parts(
            Task::Sarcasm,
            ModelKind::LogReg,
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.0], vec![0.0]],
            vec![0.0, 0.0],
            FeatureSpace::Hashing { dims: 2, seed: 0 },
            TokenizerConfig::default(),
            Vec::new(),
        );
        assert!(matches!(err, Err(ClassifierError::InvalidModel(_))));
    }

    #[test]
    fn from_parts_rejects_duplicate_classes() {
        let err = LinearModel::from_parts(
            Task::Sarcasm,
            ModelKind::LogReg,
            vec!["a".into(), "a".into()],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![0.0, 0.0],
            FeatureSpace::Hashing { dims: 2, seed: 0 },
            TokenizerConfig::default(),
            Vec::new(),
        );
        assert!(matches!(err, Err(ClassifierError::InvalidModel(_))));
    }

    #[test]
    fn from_parts_rejects_non_finite_weights() {
        let err = LinearModel::from_parts(
            Task::Sarcasm,
            ModelKind::LogReg,
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.0], vec![f64::NAN, 0.0]],
            vec![0.0, 0.0],
            FeatureSpace::Hashing { dims: 2, seed: 0 },
            TokenizerConfig::default(),
            Vec::new(),
        );
        assert!(matches!(err, Err(ClassifierError::InvalidModel(_))));
    }
}

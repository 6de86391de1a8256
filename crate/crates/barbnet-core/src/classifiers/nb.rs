//! Multinomial Naive Bayes in log-linear form.

use super::{check_training_input, ClassifierError, LinearModel, ModelKind, ModelMeta};
use crate::features::SparseVector;

/// Train multinomial Naive Bayes with Laplace smoothing `alpha`.
///
/// Inputs must be raw term counts (non-negative); normalized TF-IDF values
/// break the count semantics and negative values are rejected outright. The
/// result stores log conditional probabilities as weight rows and log priors
/// as biases, so prediction is the shared linear scoring path.
pub fn train_nb(
    x: &[SparseVector],
    y: &[String],
    alpha: f64,
    meta: ModelMeta,
) -> Result<LinearModel, ClassifierError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifierError::InvalidModel(
            "smoothing alpha must be a positive finite number".into(),
        ));
    }
    let classes = check_training_input(x, y)?;
    let dim = meta.features.dim();
    if x[0].dim() != dim {
        return Err(ClassifierError::DimensionMismatch { expected: dim, got: x[0].dim() });
    }
    for (row, v) in x.iter().enumerate() {
        for (index, value) in v.iter() {
            if value < 0.0 {
                return Err(ClassifierError::NegativeFeature { row, index, value });
            }
        }
    }

    let class_of = |label: &String| classes.binary_search(label).expect("label in classes");
    let mut term_counts = vec![vec![0.0f64; dim]; classes.len()];
    let mut doc_counts = vec![0u64; classes.len()];
    for (v, label) in x.iter().zip(y) {
        let c = class_of(label);
        doc_counts[c] += 1;
        for (index, value) in v.iter() {
            term_counts[c][index as usize] += value;
        }
    }

    let n = x.len() as f64;
    let mut weights = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    for (counts, &docs) in term_counts.iter().zip(&doc_counts) {
        let total: f64 = counts.iter().sum();
        let denom = total + alpha * dim as f64;
        weights.push(counts.iter().map(|&c| ((c + alpha) / denom).ln()).collect());
        bias.push((docs as f64 / n).ln());
    }
    LinearModel::from_parts(
        meta.task,
        ModelKind::NaiveBayes,
        classes,
        weights,
        bias,
        meta.features,
        meta.tokenizer,
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::super::{predict_label, predict_proba, Task};
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Two documents over the vocabulary {ham, spam} (sorted order):
    /// ("spam spam", A) and ("ham", B).
    fn spam_fixture() -> (Vec<SparseVector>, Vec<String>, ModelMeta) {
        let x = vec![
            SparseVector::from_sorted(2, vec![(1, 2.0)]),
            SparseVector::from_sorted(2, vec![(0, 1.0)]),
        ];
        let y = vec!["A".to_string(), "B".to_string()];
        (x, y, ModelMeta::with_hashing(Task::Cyberbullying, 2, 0))
    }

    #[test]
    fn smoothed_log_probabilities_match_hand_computation() {
        let (x, y, meta) = spam_fixture();
        let model = train_nb(&x, &y, 1.0, meta).unwrap();
        // Class A: p(spam|A) = (2+1)/(2+2) = 3/4, p(ham|A) = 1/4.
        assert_abs_diff_eq!(model.weights()[0][1], -0.2876820724517809, epsilon = 1e-12);
        assert_abs_diff_eq!(model.weights()[0][0], -1.3862943611198906, epsilon = 1e-12);
        // Equal priors: ln(1/2).
        assert_abs_diff_eq!(model.bias()[0], -std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(model.bias()[1], -std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn posterior_for_spam_matches_hand_computation() {
        let (x, y, meta) = spam_fixture();
        let model = train_nb(&x, &y, 1.0, meta).unwrap();
        let spam = SparseVector::from_sorted(2, vec![(1, 1.0)]);
        let probs = predict_proba(&model, &spam).unwrap();
        // p(A | "spam") = (1/2 * 3/4) / (1/2 * 3/4 + 1/2 * 1/3) = 9/13.
        assert_abs_diff_eq!(probs[0], 0.6923076923076923, epsilon = 1e-12);
        assert_eq!(predict_label(&model, &spam).unwrap(), "A");
    }

    #[test]
    fn identical_documents_with_balanced_labels_tie_break_to_first_class() {
        let doc = SparseVector::from_sorted(2, vec![(0, 1.0), (1, 1.0)]);
        let x = vec![doc.clone(), doc.clone()];
        let y = vec!["A".to_string(), "B".to_string()];
        let model = train_nb(&x, &y, 1.0, ModelMeta::with_hashing(Task::Sarcasm, 2, 0)).unwrap();
        let probs = predict_proba(&model, &doc).unwrap();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_eq!(predict_label(&model, &doc).unwrap(), "A");
    }

    #[test]
    fn huge_alpha_washes_out_conditionals_leaving_priors() {
        // Priors 2:1 for A; with alpha = 1e6 the conditionals are flat, so
        // even a document made entirely of B's token follows the prior.
        let x = vec![
            SparseVector::from_sorted(2, vec![(0, 3.0)]),
            SparseVector::from_sorted(2, vec![(0, 2.0)]),
            SparseVector::from_sorted(2, vec![(1, 3.0)]),
        ];
        let y = vec!["A".to_string(), "A".to_string(), "B".to_string()];
        let model = train_nb(&x, &y, 1e6, ModelMeta::with_hashing(Task::Sarcasm, 2, 0)).unwrap();
        let b_heavy = SparseVector::from_sorted(2, vec![(1, 5.0)]);
        assert_eq!(predict_label(&model, &b_heavy).unwrap(), "A");
        let probs = predict_proba(&model, &b_heavy).unwrap();
        assert_abs_diff_eq!(probs[0], 2.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn negative_feature_values_are_rejected() {
        let x = vec![
            SparseVector::from_sorted(2, vec![(0, 1.0)]),
            SparseVector::from_sorted(2, vec![(1, -0.5)]),
        ];
        let y = vec!["A".to_string(), "B".to_string()];
        let err = train_nb(&x, &y, 1.0, ModelMeta::with_hashing(Task::Sarcasm, 2, 0));
        match err {
            Err(ClassifierError::NegativeFeature { row, index, value }) => {
                assert_eq!((row, index), (1, 1));
                assert_eq!(value, -0.5);
            }
            other => panic!("expected NegativeFeature, got {other:?}"),
        }
    }

    #[test]
    fn single_class_input_is_rejected() {
        let x = vec![SparseVector::from_sorted(2, vec![(0, 1.0)]); 2];
        let y = vec!["A".to_string(), "A".to_string()];
        let err = train_nb(&x, &y, 1.0, ModelMeta::with_hashing(Task::Sarcasm, 2, 0));
        assert!(matches!(err, Err(ClassifierError::SingleClass(c)) if c == "A"));
    }
}

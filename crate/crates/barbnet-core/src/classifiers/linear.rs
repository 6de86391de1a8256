//! Gradient-trained linear models: logistic regression and linear SVM.
//!
//! Both share one mini-batch loop: per-epoch shuffling under a seeded
//! ChaCha8 stream, Adam or plain SGD updates, and a per-epoch finite-loss
//! check. Multi-class inputs train one-vs-rest, one binary submodel per
//! class with a per-class seed offset so parallel training stays
//! reproducible.

use super::{
    check_training_input, log1p_exp, sigmoid, ClassifierError, LinearModel, ModelKind, ModelMeta,
    Optimizer, PlattParams, TrainConfig,
};
use crate::features::SparseVector;
use crate::par;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mean cross-entropy loss and its analytic gradient for a binary logistic
/// model over the whole set. `y` holds 0/1 targets. The L2 term
/// `l2/2 * ||w||^2` applies to weights only, never the bias.
pub fn logistic_loss_grad(
    w: &[f64],
    b: f64,
    x: &[SparseVector],
    y: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let idx: Vec<usize> = (0..x.len()).collect();
    logistic_batch(w, b, x, y, l2, &idx)
}

/// Mean hinge loss and a subgradient for a binary linear SVM over the whole
/// set. `y` holds -1/+1 targets. Samples with margin >= 1 contribute no
/// data term, leaving only L2 shrinkage.
pub fn hinge_loss_grad(
    w: &[f64],
    b: f64,
    x: &[SparseVector],
    y: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let idx: Vec<usize> = (0..x.len()).collect();
    hinge_batch(w, b, x, y, l2, &idx)
}

fn logistic_batch(
    w: &[f64],
    b: f64,
    x: &[SparseVector],
    y: &[f64],
    l2: f64,
    idx: &[usize],
) -> (f64, Vec<f64>, f64) {
    let bn = idx.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for &i in idx {
        let z = x[i].dot(w) + b;
        let t = y[i];
        loss += log1p_exp(z) - t * z;
        let err = sigmoid(z) - t;
        for (j, val) in x[i].iter() {
            gw[j as usize] += err * val;
        }
        gb += err;
    }
    loss = loss / bn + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g = *g / bn + l2 * wi;
    }
    (loss, gw, gb / bn)
}

fn hinge_batch(
    w: &[f64],
    b: f64,
    x: &[SparseVector],
    y: &[f64],
    l2: f64,
    idx: &[usize],
) -> (f64, Vec<f64>, f64) {
    let bn = idx.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for &i in idx {
        let z = x[i].dot(w) + b;
        let margin = y[i] * z;
        if margin < 1.0 {
            loss += 1.0 - margin;
            for (j, val) in x[i].iter() {
                gw[j as usize] -= y[i] * val;
            }
            gb -= y[i];
        }
    }
    loss = loss / bn + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g = *g / bn + l2 * wi;
    }
    (loss, gw, gb / bn)
}

struct OptState {
    kind: Optimizer,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl OptState {
    fn new(kind: Optimizer, len: usize) -> Self {
        Self { kind, m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    /// One update over the packed parameter layout [w..., b].
    fn step(&mut self, w: &mut [f64], b: &mut f64, grad: &[f64], config: &TrainConfig) {
        let dim = w.len();
        match self.kind {
            Optimizer::Sgd => {
                for (i, &g) in grad.iter().enumerate() {
                    let delta = config.learning_rate * g;
                    if i < dim {
                        w[i] -= delta;
                    } else {
                        *b -= delta;
                    }
                }
            }
            Optimizer::Adam => {
                self.t += 1;
                let bc1 = 1.0 - config.adam_beta1.powi(self.t);
                let bc2 = 1.0 - config.adam_beta2.powi(self.t);
                for (i, &g) in grad.iter().enumerate() {
                    self.m[i] = config.adam_beta1 * self.m[i] + (1.0 - config.adam_beta1) * g;
                    self.v[i] = config.adam_beta2 * self.v[i] + (1.0 - config.adam_beta2) * g * g;
                    let m_hat = self.m[i] / bc1;
                    let v_hat = self.v[i] / bc2;
                    let delta = config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_eps);
                    if i < dim {
                        w[i] -= delta;
                    } else {
                        *b -= delta;
                    }
                }
            }
        }
    }
}

/// (weights, bias, per-epoch mean loss) for one binary fit.
type BinaryFit = (Vec<f64>, f64, Vec<f64>);

fn fit_binary<G>(
    dim: usize,
    n: usize,
    config: &TrainConfig,
    seed: u64,
    batch_grad: G,
) -> Result<BinaryFit, ClassifierError>
where
    G: Fn(&[f64], f64, &[usize]) -> (f64, Vec<f64>, f64),
{
    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;
    let mut opt = OptState::new(config.optimizer, dim + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(config.epochs);
    let mut grad_buf = vec![0.0f64; dim + 1];
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut weighted_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let (loss, gw, gb) = batch_grad(&w, b, chunk);
            weighted_loss += loss * chunk.len() as f64;
            grad_buf[..dim].copy_from_slice(&gw);
            grad_buf[dim] = gb;
            opt.step(&mut w, &mut b, &grad_buf, config);
        }
        let epoch_loss = weighted_loss / n as f64;
        if !epoch_loss.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch });
        }
        trace.push(epoch_loss);
    }
    Ok((w, b, trace))
}

fn binary_targets(y: &[String], positive: &str) -> Vec<f64> {
    y.iter().map(|l| if l == positive { 1.0 } else { 0.0 }).collect()
}

fn check_meta_dim(x: &[SparseVector], meta: &ModelMeta) -> Result<usize, ClassifierError> {
    let dim = meta.features.dim();
    if x[0].dim() != dim {
        return Err(ClassifierError::DimensionMismatch { expected: dim, got: x[0].dim() });
    }
    Ok(dim)
}

/// Train logistic regression; see [`train_logreg_traced`] for the loss trace.
pub fn train_logreg(
    x: &[SparseVector],
    y: &[String],
    config: &TrainConfig,
    meta: ModelMeta,
) -> Result<LinearModel, ClassifierError> {
    train_logreg_traced(x, y, config, meta).map(|(model, _)| model)
}

/// Train logistic regression and return the per-epoch mean training loss
/// alongside the model (averaged across submodels in the one-vs-rest case).
pub fn train_logreg_traced(
    x: &[SparseVector],
    y: &[String],
    config: &TrainConfig,
    meta: ModelMeta,
) -> Result<(LinearModel, Vec<f64>), ClassifierError> {
    config.validate()?;
    let classes = check_training_input(x, y)?;
    let dim = check_meta_dim(x, &meta)?;

    if classes.len() == 2 {
        let targets = binary_targets(y, &classes[1]);
        let (w, b, trace) = fit_binary(dim, x.len(), config, config.seed, |w, bb, idx| {
            logistic_batch(w, bb, x, &targets, config.l2, idx)
        })?;
        let model = LinearModel::from_parts(
            meta.task,
            ModelKind::LogReg,
            classes,
            vec![vec![0.0; dim], w],
            vec![0.0, b],
            meta.features,
            meta.tokenizer,
            Vec::new(),
        )?;
        return Ok((model, trace));
    }

    let fits = par::try_map_slice(&class_indices(classes.len()), |&ci| {
        let targets = binary_targets(y, &classes[ci]);
        fit_binary(dim, x.len(), config, config.seed + ci as u64, |w, bb, idx| {
            logistic_batch(w, bb, x, &targets, config.l2, idx)
        })
    })?;
    let (weights, bias, trace) = unzip_fits(fits, config.epochs);
    let model = LinearModel::from_parts(
        meta.task,
        ModelKind::LogReg,
        classes,
        weights,
        bias,
        meta.features,
        meta.tokenizer,
        Vec::new(),
    )?;
    Ok((model, trace))
}

/// Train a linear SVM by subgradient descent on the L2-regularized hinge
/// loss, then fit a logistic calibration of the training margins so the
/// pipeline can threshold on [0, 1] probabilities.
pub fn train_svm(
    x: &[SparseVector],
    y: &[String],
    config: &TrainConfig,
    meta: ModelMeta,
) -> Result<LinearModel, ClassifierError> {
    config.validate()?;
    let classes = check_training_input(x, y)?;
    let dim = check_meta_dim(x, &meta)?;

    if classes.len() == 2 {
        let y01 = binary_targets(y, &classes[1]);
        let signed: Vec<f64> = y01.iter().map(|&t| if t > 0.5 { 1.0 } else { -1.0 }).collect();
        let (w, b, _) = fit_binary(dim, x.len(), config, config.seed, |w, bb, idx| {
            hinge_batch(w, bb, x, &signed, config.l2, idx)
        })?;
        let margins: Vec<f64> = x.iter().map(|v| v.dot(&w) + b).collect();
        let platt = fit_platt(&margins, &y01);
        return LinearModel::from_parts(
            meta.task,
            ModelKind::LinearSvm,
            classes,
            vec![vec![0.0; dim], w],
            vec![0.0, b],
            meta.features,
            meta.tokenizer,
            vec![platt],
        );
    }

    let fits = par::try_map_slice(&class_indices(classes.len()), |&ci| {
        let y01 = binary_targets(y, &classes[ci]);
        let signed: Vec<f64> = y01.iter().map(|&t| if t > 0.5 { 1.0 } else { -1.0 }).collect();
        let (w, b, _) = fit_binary(dim, x.len(), config, config.seed + ci as u64, |w, bb, idx| {
            hinge_batch(w, bb, x, &signed, config.l2, idx)
        })?;
        let margins: Vec<f64> = x.iter().map(|v| v.dot(&w) + b).collect();
        let platt = fit_platt(&margins, &y01);
        Ok::<_, ClassifierError>(((w, b), platt))
    })?;
    let mut weights = Vec::with_capacity(fits.len());
    let mut bias = Vec::with_capacity(fits.len());
    let mut calibration = Vec::with_capacity(fits.len());
    for ((w, b), platt) in fits {
        weights.push(w);
        bias.push(b);
        calibration.push(platt);
    }
    LinearModel::from_parts(
        meta.task,
        ModelKind::LinearSvm,
        classes,
        weights,
        bias,
        meta.features,
        meta.tokenizer,
        calibration,
    )
}

fn class_indices(k: usize) -> Vec<usize> {
    (0..k).collect()
}

fn unzip_fits(fits: Vec<BinaryFit>, epochs: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let k = fits.len() as f64;
    let mut weights = Vec::with_capacity(fits.len());
    let mut bias = Vec::with_capacity(fits.len());
    let mut trace = vec![0.0; epochs];
    for (w, b, t) in fits {
        weights.push(w);
        bias.push(b);
        for (acc, loss) in trace.iter_mut().zip(&t) {
            *acc += loss / k;
        }
    }
    (weights, bias, trace)
}

/// Fit Platt calibration `p = sigmoid(slope * margin + intercept)` on
/// training margins with 0/1 targets. Targets are regularized the standard
/// way (`(n+ + 1)/(n+ + 2)` and `1/(n- + 2)`) so separable data cannot push
/// the slope to infinity; the two-parameter fit runs full-batch Adam, which
/// is deterministic.
pub fn fit_platt(margins: &[f64], y01: &[f64]) -> PlattParams {
    assert_eq!(margins.len(), y01.len());
    let n_pos = y01.iter().filter(|&&t| t > 0.5).count() as f64;
    let n_neg = margins.len() as f64 - n_pos;
    let t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    let t_neg = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = y01.iter().map(|&t| if t > 0.5 { t_pos } else { t_neg }).collect();

    let mut slope = 0.0f64;
    let mut intercept = ((n_pos + 1.0) / (n_neg + 1.0)).ln();
    let (b1, b2, eps, lr): (f64, f64, f64, f64) = (0.9, 0.999, 1e-8, 0.05);
    let mut m = [0.0f64; 2];
    let mut v = [0.0f64; 2];
    let n = margins.len() as f64;
    for t in 1..=1000i32 {
        let mut gs = 0.0;
        let mut gi = 0.0;
        for (&z, &target) in margins.iter().zip(&targets) {
            let err = sigmoid(slope * z + intercept) - target;
            gs += err * z;
            gi += err;
        }
        gs /= n;
        gi /= n;
        let grad = [gs, gi];
        let (bc1, bc2) = (1.0 - b1.powi(t), 1.0 - b2.powi(t));
        for (i, &g) in grad.iter().enumerate() {
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            let delta = lr * (m[i] / bc1) / ((v[i] / bc2).sqrt() + eps);
            if i == 0 {
                slope -= delta;
            } else {
                intercept -= delta;
            }
        }
    }
    PlattParams { slope, intercept }
}

#[cfg(test)]
mod tests {
    use super::super::{predict_label, predict_proba, FeatureSpace, Task};
    use super::*;
    use crate::features::TokenizerConfig;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    /// 20 separable 2D points: "neg" clustered near (-2, -2), "pos" near (2, 2).
    fn separable_fixture() -> (Vec<SparseVector>, Vec<String>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..10 {
            let jitter = 0.05 * i as f64;
            x.push(SparseVector::from_sorted(2, vec![(0, -2.0 + jitter), (1, -2.0 - jitter)]));
            y.push("neg".to_string());
            x.push(SparseVector::from_sorted(2, vec![(0, 2.0 - jitter), (1, 2.0 + jitter)]));
            y.push("pos".to_string());
        }
        (x, y)
    }

    fn full_batch_config(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            learning_rate: 0.05,
            l2: 1e-4,
            batch_size: 64,
            ..TrainConfig::default()
        }
    }

    fn meta2() -> ModelMeta {
        ModelMeta::with_hashing(Task::Sarcasm, 2, 0)
    }

    #[test]
    fn untrained_model_predicts_exactly_half() {
        let model = LinearModel::from_parts(
            Task::Sarcasm,
            ModelKind::LogReg,
            vec!["neg".into(), "pos".into()],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![0.0, 0.0],
            FeatureSpace::Hashing { dims: 2, seed: 0 },
            TokenizerConfig::default(),
            Vec::new(),
        )
        .unwrap();
        let x = SparseVector::from_sorted(2, vec![(0, 3.0)]);
        assert_eq!(predict_proba(&model, &x).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn logreg_separates_the_toy_set_within_200_epochs() {
        let (x, y) = separable_fixture();
        let model = train_logreg(&x, &y, &full_batch_config(200), meta2()).unwrap();
        for (v, label) in x.iter().zip(&y) {
            assert_eq!(predict_label(&model, v).unwrap(), label);
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dim = 5;
        let x: Vec<SparseVector> = (0..8)
            .map(|_| {
                let entries: Vec<(u32, f64)> =
                    (0..dim).map(|j| (j as u32, rng.gen_range(-1.0..1.0))).collect();
                SparseVector::from_sorted(dim, entries)
            })
            .collect();
        let y: Vec<f64> = (0..8).map(|_| f64::from(rng.gen_range(0..2))).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b = rng.gen_range(-0.5..0.5);
        let l2 = 0.01;
        let h = 1e-5;

        let (_, gw, gb) = logistic_loss_grad(&w, b, &x, &y, l2);
        let rel = |a: f64, n: f64| (a - n).abs() / f64::max(1e-6, a.abs().max(n.abs()));
        for j in 0..dim {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let (lp, _, _) = logistic_loss_grad(&wp, b, &x, &y, l2);
            let (lm, _, _) = logistic_loss_grad(&wm, b, &x, &y, l2);
            assert!(rel(gw[j], (lp - lm) / (2.0 * h)) < 1e-5);
        }
        let (lp, _, _) = logistic_loss_grad(&w, b + h, &x, &y, l2);
        let (lm, _, _) = logistic_loss_grad(&w, b - h, &x, &y, l2);
        assert!(rel(gb, (lp - lm) / (2.0 * h)) < 1e-5);
    }

    #[test]
    fn full_batch_sgd_loss_is_non_increasing() {
        let (x, y) = separable_fixture();
        let config = TrainConfig {
            epochs: 50,
            learning_rate: 0.1,
            l2: 1e-4,
            batch_size: 64,
            optimizer: Optimizer::Sgd,
            ..TrainConfig::default()
        };
        let (_, trace) = train_logreg_traced(&x, &y, &config, meta2()).unwrap();
        assert_eq!(trace.len(), 50);
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "loss rose: {pair:?}");
        }
    }

    #[test]
    fn identical_seed_gives_identical_weights() {
        let (x, y) = separable_fixture();
        let config = TrainConfig { epochs: 5, batch_size: 4, ..TrainConfig::default() };
        let a = train_logreg(&x, &y, &config, meta2()).unwrap();
        let b = train_logreg(&x, &y, &config, meta2()).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.bias(), b.bias());
    }

    #[test]
    fn zero_vector_prediction_is_sigmoid_of_bias() {
        let (x, y) = separable_fixture();
        let model = train_logreg(&x, &y, &full_batch_config(20), meta2()).unwrap();
        let probs = predict_proba(&model, &SparseVector::empty(2)).unwrap();
        assert_eq!(probs[1], sigmoid(model.bias()[1]));
    }

    #[test]
    fn single_class_input_is_rejected() {
        let x = vec![SparseVector::from_sorted(2, vec![(0, 1.0)]); 3];
        let y = vec!["only".to_string(); 3];
        let err = train_logreg(&x, &y, &TrainConfig::default(), meta2());
        assert!(matches!(err, Err(ClassifierError::SingleClass(_))));
    }

    #[test]
    fn huge_learning_rate_overflows_into_a_diagnostic() {
        let (x, y) = separable_fixture();
        let config = TrainConfig {
            epochs: 40,
            learning_rate: 1e155,
            l2: 0.0,
            batch_size: 64,
            optimizer: Optimizer::Sgd,
            ..TrainConfig::default()
        };
        let err = train_logreg(&x, &y, &config, meta2());
        assert!(matches!(err, Err(ClassifierError::NonFiniteLoss { .. })));
    }

    #[test]
    fn svm_training_margins_are_all_positive_on_separable_data() {
        let (x, y) = separable_fixture();
        let model = train_svm(&x, &y, &full_batch_config(200), meta2()).unwrap();
        for (v, label) in x.iter().zip(&y) {
            let scores = model.decision_scores(v).unwrap();
            let signed = if label == "pos" { scores[1] } else { -scores[1] };
            assert!(signed > 0.0, "margin not positive for {label}: {}", scores[1]);
        }
    }

    #[test]
    fn flipping_labels_negates_svm_decision_scores() {
        let (x, y) = separable_fixture();
        let flipped: Vec<String> = y
            .iter()
            .map(|l| if l == "pos" { "neg".to_string() } else { "pos".to_string() })
            .collect();
        let config = full_batch_config(50);
        let a = train_svm(&x, &y, &config, meta2()).unwrap();
        let b = train_svm(&x, &flipped, &config, meta2()).unwrap();
        for v in &x {
            let za = a.decision_scores(v).unwrap()[1];
            let zb = b.decision_scores(v).unwrap()[1];
            assert_abs_diff_eq!(za, -zb, epsilon = 1e-12);
        }
    }

    #[test]
    fn hinge_subgradient_is_pure_shrinkage_past_the_margin() {
        let w = vec![2.0, 0.0];
        let x = vec![SparseVector::from_sorted(2, vec![(0, 1.0)])];
        // Margin is y * (w.x + b) = 2 > 1, so the data term vanishes.
        let (loss, gw, gb) = hinge_loss_grad(&w, 0.0, &x, &[1.0], 0.1);
        assert_eq!(gw, vec![0.1 * 2.0, 0.0]);
        assert_eq!(gb, 0.0);
        assert_abs_diff_eq!(loss, 0.5 * 0.1 * 4.0, epsilon = 1e-12);
    }

    #[test]
    fn svm_probabilities_track_the_label_on_separable_data() {
        let (x, y) = separable_fixture();
        let model = train_svm(&x, &y, &full_batch_config(200), meta2()).unwrap();
        for (v, label) in x.iter().zip(&y) {
            let p_pos = predict_proba(&model, v).unwrap()[1];
            if label == "pos" {
                assert!(p_pos > 0.5, "p_pos = {p_pos}");
            } else {
                assert!(p_pos < 0.5, "p_pos = {p_pos}");
            }
        }
    }

    /// Three well-separated one-hot clusters exercise the one-vs-rest path.
    fn three_class_fixture() -> (Vec<SparseVector>, Vec<String>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..6 {
            let bump = 0.01 * i as f64;
            for (c, label) in ["alpha", "beta", "gamma"].iter().enumerate() {
                x.push(SparseVector::from_sorted(3, vec![(c as u32, 1.0 + bump)]));
                y.push(label.to_string());
            }
        }
        (x, y)
    }

    #[test]
    fn one_vs_rest_recovers_three_clusters() {
        let (x, y) = three_class_fixture();
        let config = TrainConfig {
            epochs: 150,
            learning_rate: 0.05,
            batch_size: 64,
            ..TrainConfig::default()
        };
        let meta = ModelMeta::with_hashing(Task::Cyberbullying, 3, 0);
        for model in [
            train_logreg(&x, &y, &config, meta.clone()).unwrap(),
            train_svm(&x, &y, &config, meta).unwrap(),
        ] {
            assert_eq!(model.classes(), ["alpha", "beta", "gamma"]);
            for (v, label) in x.iter().zip(&y) {
                assert_eq!(predict_label(&model, v).unwrap(), label);
            }
        }
    }

    #[test]
    fn ovr_argmax_is_invariant_under_uniform_score_shifts() {
        let (x, y) = three_class_fixture();
        let config = TrainConfig { epochs: 50, learning_rate: 0.05, ..TrainConfig::default() };
        let meta = ModelMeta::with_hashing(Task::Cyberbullying, 3, 0);
        let model = train_logreg(&x, &y, &config, meta).unwrap();
        let shifted = LinearModel::from_parts(
            model.task(),
            model.kind(),
            model.classes().to_vec(),
            model.weights().to_vec(),
            model.bias().iter().map(|b| b + 10.0).collect(),
            model.features().clone(),
            model.tokenizer().clone(),
            Vec::new(),
        )
        .unwrap();
        for v in &x {
            assert_eq!(predict_label(&model, v).unwrap(), predict_label(&shifted, v).unwrap());
        }
    }

    #[test]
    fn predicted_distributions_are_valid() {
        let (x, y) = three_class_fixture();
        let config = TrainConfig { epochs: 20, ..TrainConfig::default() };
        let meta = ModelMeta::with_hashing(Task::Cyberbullying, 3, 0);
        for model in [
            train_logreg(&x, &y, &config, meta.clone()).unwrap(),
            train_svm(&x, &y, &config, meta).unwrap(),
        ] {
            for v in &x {
                let probs = predict_proba(&model, v).unwrap();
                assert!(probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
                assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (x, y) = separable_fixture();
        let model = train_logreg(&x, &y, &full_batch_config(5), meta2()).unwrap();
        let wide = SparseVector::from_sorted(9, vec![(0, 1.0)]);
        assert!(matches!(
            predict_proba(&model, &wide),
            Err(ClassifierError::DimensionMismatch { expected: 2, got: 9 })
        ));
    }

    #[test]
    fn platt_calibration_is_monotone_and_oriented() {
        // Margins correlate with the labels, so the fitted slope is positive
        // and larger margins map to larger probabilities.
        let margins = vec![-2.0, -1.5, -0.4, 0.3, 1.2, 2.5];
        let y01 = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let platt = fit_platt(&margins, &y01);
        assert!(platt.slope > 0.0);
        assert!(platt.apply(-2.0) < 0.5);
        assert!(platt.apply(2.5) > 0.5);
        assert!(platt.apply(0.0) > platt.apply(-1.0));
    }
}

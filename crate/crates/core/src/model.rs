//! The desk-scale classifier: mean-of-word-vectors features into a linear
//! layer with softmax, trained by seeded mini-batch gradient descent on a
//! joint hard-label + soft-label cross-entropy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{is_marker_token, TrainingSample};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::label::{self, validate_simplex, GrayscaleLabel, LabelMethod};
use crate::metrics;

/// Default clip applied inside logarithms.
pub const DEFAULT_EPSILON_LOG: f64 = 1e-12;

/// Weights and biases of the linear layer. Weights are row-major: row `i`
/// holds the input weights of class `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    k: usize,
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(k: usize, dim: usize) -> Result<Self> {
        if k < 2 || dim == 0 {
            return Err(Error::InvalidInput(format!(
                "parameter shape needs k >= 2 and dim >= 1, got k={k}, dim={dim}"
            )));
        }
        Ok(ModelParams {
            k,
            dim,
            weights: vec![0.0; k * dim],
            bias: vec![0.0; k],
        })
    }

    pub fn from_parts(k: usize, dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if k < 2 || dim == 0 {
            return Err(Error::InvalidInput(format!(
                "parameter shape needs k >= 2 and dim >= 1, got k={k}, dim={dim}"
            )));
        }
        if weights.len() != k * dim {
            return Err(Error::InvalidInput(format!(
                "weight vector has length {}, expected {}",
                weights.len(),
                k * dim
            )));
        }
        if bias.len() != k {
            return Err(Error::InvalidInput(format!(
                "bias vector has length {}, expected {k}",
                bias.len()
            )));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "parameters contain non-finite values".into(),
            ));
        }
        Ok(ModelParams {
            k,
            dim,
            weights,
            bias,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major weights, length `k * dim`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn logits(&self, features: &[f64]) -> Vec<f64> {
        (0..self.k)
            .map(|i| {
                let row = &self.weights[i * self.dim..(i + 1) * self.dim];
                self.bias[i] + row.iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
            })
            .collect()
    }
}

/// Model output for one sample.
#[derive(Clone, Debug)]
pub struct Prediction {
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Prediction {
    /// Lowest index attaining the maximum probability.
    pub fn argmax(&self) -> usize {
        label::argmax(&self.probs)
    }
}

/// Mean of the embedding vectors of the rendered input's lowercased
/// whitespace tokens, skipping marker tokens; the zero vector when no token
/// is in the table.
pub fn featurize(sample: &TrainingSample, table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    let mut found = 0usize;
    for token in sample.rendered.split_whitespace() {
        if is_marker_token(token) {
            continue;
        }
        if let Some(v) = table.get(&token.to_lowercase()) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            found += 1;
        }
    }
    if found > 0 {
        for s in &mut sum {
            *s /= found as f64;
        }
    }
    sum
}

/// Runs the linear layer and stable softmax on a feature vector.
pub fn forward(params: &ModelParams, features: &[f64]) -> Result<Prediction> {
    if features.len() != params.dim() {
        return Err(Error::InvalidInput(format!(
            "feature vector has length {}, model expects {}",
            features.len(),
            params.dim()
        )));
    }
    if features.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "feature vector contains non-finite values".into(),
        ));
    }
    let logits = params.logits(features);
    let probs = label::softmax(&logits);
    Ok(Prediction { logits, probs })
}

/// Loss weighting and clipping configuration.
#[derive(Clone, Debug)]
pub struct LossConfig {
    /// Weight of the soft-label term.
    pub alpha: f64,
    /// The method used to construct the soft labels this run trains on.
    pub label_method: LabelMethod,
    /// Clip applied inside logarithms, in (0, 1e-6].
    pub epsilon_log: f64,
}

impl LossConfig {
    pub fn new(alpha: f64, label_method: LabelMethod) -> Result<Self> {
        let config = LossConfig {
            alpha,
            label_method,
            epsilon_log: DEFAULT_EPSILON_LOG,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Config(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon_log > 0.0 && self.epsilon_log <= 1e-6) {
            return Err(Error::Config(format!(
                "epsilon_log must lie in (0, 1e-6], got {}",
                self.epsilon_log
            )));
        }
        Ok(())
    }
}

/// Optimizer and rendering hyperparameters for one training run.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Context window used when rendering inputs.
    pub window: usize,
    /// Future turns requested when rendering teacher inputs (0 or 2).
    pub future_turns: usize,
    /// Keep the epoch parameters with the best dev weighted F1 instead of
    /// the final ones.
    pub select_best_dev: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            epochs: 100,
            batch_size: 8,
            seed: 42,
            window: 12,
            future_turns: 0,
            select_best_dev: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.future_turns != 0 && self.future_turns != 2 {
            return Err(Error::Config(format!(
                "future turns must be 0 or 2, got {}",
                self.future_turns
            )));
        }
        Ok(())
    }
}

fn checked_probs<'a>(probs: &'a [f64], what: &str) -> Result<&'a [f64]> {
    validate_simplex(probs).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))?;
    Ok(probs)
}

/// Hard-label cross-entropy `-log p[gold]`, with the probability clipped at
/// `epsilon_log`.
pub fn loss_onehot(probs: &[f64], gold: usize, epsilon_log: f64) -> Result<f64> {
    let probs = checked_probs(probs, "predicted distribution")?;
    if gold >= probs.len() {
        return Err(Error::InvalidInput(format!(
            "gold index {gold} out of range for {} classes",
            probs.len()
        )));
    }
    Ok(-probs[gold].max(epsilon_log).ln())
}

/// Soft-label cross-entropy `-sum_i g_i log p_i`, with probabilities
/// clipped at `epsilon_log`.
pub fn loss_grayscale(probs: &[f64], target: &GrayscaleLabel, epsilon_log: f64) -> Result<f64> {
    let probs = checked_probs(probs, "predicted distribution")?;
    if probs.len() != target.k() {
        return Err(Error::InvalidInput(format!(
            "prediction has {} classes, label has {}",
            probs.len(),
            target.k()
        )));
    }
    Ok(-target
        .probs()
        .iter()
        .zip(probs)
        .map(|(g, p)| g * p.max(epsilon_log).ln())
        .sum::<f64>())
}

/// The joint loss: hard-label term plus `alpha` times the soft-label term.
pub fn loss_total(
    probs: &[f64],
    gold: usize,
    target: &GrayscaleLabel,
    alpha: f64,
    epsilon_log: f64,
) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidInput(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    let hard = loss_onehot(probs, gold, epsilon_log)?;
    if alpha == 0.0 {
        // Skip the soft term entirely so alpha = 0 reduces exactly.
        loss_grayscale(probs, target, epsilon_log)?;
        return Ok(hard);
    }
    Ok(hard + alpha * loss_grayscale(probs, target, epsilon_log)?)
}

/// A gradient with the same shape as [`ModelParams`].
#[derive(Clone, Debug)]
pub struct ParamGradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ParamGradient {
    fn zeros(k: usize, dim: usize) -> Self {
        ParamGradient {
            weights: vec![0.0; k * dim],
            bias: vec![0.0; k],
        }
    }

    fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            *w *= factor;
        }
        for b in &mut self.bias {
            *b *= factor;
        }
    }
}

fn logit_gradient(
    probs: &[f64],
    gold: usize,
    target: Option<&GrayscaleLabel>,
    alpha: f64,
) -> Result<Vec<f64>> {
    if gold >= probs.len() {
        return Err(Error::InvalidInput(format!(
            "gold index {gold} out of range for {} classes",
            probs.len()
        )));
    }
    if alpha > 0.0 && target.is_none() {
        return Err(Error::InvalidInput(
            "alpha is positive but no soft label was provided".into(),
        ));
    }
    let mut d: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(i, p)| p - if i == gold { 1.0 } else { 0.0 })
        .collect();
    if alpha > 0.0 {
        let g = target.expect("checked above").probs();
        if g.len() != probs.len() {
            return Err(Error::InvalidInput(format!(
                "prediction has {} classes, label has {}",
                probs.len(),
                g.len()
            )));
        }
        for (di, (p, gi)) in d.iter_mut().zip(probs.iter().zip(g)) {
            *di += alpha * (p - gi);
        }
    }
    Ok(d)
}

/// Analytic gradient of [`loss_total`] with respect to the parameters at one
/// sample: `(p - onehot(gold)) + alpha * (p - g)` through the linear layer.
pub fn loss_gradient(
    params: &ModelParams,
    features: &[f64],
    gold: usize,
    target: Option<&GrayscaleLabel>,
    alpha: f64,
) -> Result<ParamGradient> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidInput(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    let prediction = forward(params, features)?;
    let dlogits = logit_gradient(&prediction.probs, gold, target, alpha)?;
    let mut grad = ParamGradient::zeros(params.k(), params.dim());
    for (i, dl) in dlogits.iter().enumerate() {
        grad.bias[i] = *dl;
        let row = &mut grad.weights[i * params.dim()..(i + 1) * params.dim()];
        for (w, x) in row.iter_mut().zip(features) {
            *w = dl * x;
        }
    }
    Ok(grad)
}

/// Per-epoch training trace and the resulting parameters.
#[derive(Clone, Debug)]
pub struct TrainReport {
    pub params: ModelParams,
    /// Mean per-sample loss of each epoch, in epoch order.
    pub epoch_mean_loss: Vec<f64>,
    /// The epoch whose parameters were kept (0-based), when dev selection
    /// was on.
    pub selected_epoch: Option<usize>,
}

/// Trains the linear-softmax classifier with plain mini-batch gradient
/// descent from zero-initialized parameters, shuffling sample order every
/// epoch with a seeded generator. Soft labels must be supplied exactly when
/// the soft-loss weight is positive. With `select_best_dev`, the epoch with
/// the best dev weighted F1 wins (earliest on ties); otherwise the final
/// epoch's parameters are returned.
pub fn train(
    samples: &[TrainingSample],
    labels: Option<&[GrayscaleLabel]>,
    table: &EmbeddingTable,
    k: usize,
    dev: Option<&[TrainingSample]>,
    config: &TrainConfig,
    loss: &LossConfig,
) -> Result<TrainReport> {
    config.validate()?;
    loss.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("no training samples".into()));
    }
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 classes, got {k}"
        )));
    }
    match labels {
        Some(ls) => {
            if loss.alpha == 0.0 {
                return Err(Error::InvalidInput(
                    "soft labels supplied but alpha is 0".into(),
                ));
            }
            if ls.len() != samples.len() {
                return Err(Error::InvalidInput(format!(
                    "{} labels for {} samples",
                    ls.len(),
                    samples.len()
                )));
            }
            if let Some(l) = ls.iter().find(|l| l.k() != k) {
                return Err(Error::InvalidInput(format!(
                    "label has {} classes, expected {k}",
                    l.k()
                )));
            }
        }
        None => {
            if loss.alpha > 0.0 {
                return Err(Error::InvalidInput(format!(
                    "alpha is {} but no soft labels were supplied",
                    loss.alpha
                )));
            }
        }
    }
    for s in samples {
        if s.gold >= k {
            return Err(Error::InvalidInput(format!(
                "sample {} has gold index {} out of range for k={k}",
                s.sample_id, s.gold
            )));
        }
    }
    if config.select_best_dev && dev.is_none() {
        return Err(Error::Config(
            "dev-based selection requested but no dev split given".into(),
        ));
    }

    let features: Vec<Vec<f64>> = samples.iter().map(|s| featurize(s, table)).collect();
    let dev_data: Option<(Vec<Vec<f64>>, Vec<usize>)> = match dev {
        Some(dev) if config.select_best_dev => {
            if dev.is_empty() {
                return Err(Error::Config("dev split is empty".into()));
            }
            Some((
                dev.iter().map(|s| featurize(s, table)).collect(),
                dev.iter().map(|s| s.gold).collect(),
            ))
        }
        _ => None,
    };

    let mut params = ModelParams::zeros(k, table.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_mean_loss = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, ModelParams)> = None;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grad = ParamGradient::zeros(k, params.dim());
            for &idx in batch {
                let x = &features[idx];
                let prediction = forward(&params, x)?;
                let sample_loss = match labels {
                    Some(ls) => loss_total(
                        &prediction.probs,
                        samples[idx].gold,
                        &ls[idx],
                        loss.alpha,
                        loss.epsilon_log,
                    )?,
                    None => loss_onehot(&prediction.probs, samples[idx].gold, loss.epsilon_log)?,
                };
                epoch_loss += sample_loss;
                let dlogits = logit_gradient(
                    &prediction.probs,
                    samples[idx].gold,
                    labels.map(|ls| &ls[idx]),
                    loss.alpha,
                )?;
                for (i, dl) in dlogits.iter().enumerate() {
                    grad.bias[i] += dl;
                    let row = &mut grad.weights[i * params.dim..(i + 1) * params.dim];
                    for (w, xj) in row.iter_mut().zip(x) {
                        *w += dl * xj;
                    }
                }
            }
            grad.scale(1.0 / batch.len() as f64);
            for (w, g) in params.weights.iter_mut().zip(&grad.weights) {
                *w -= config.learning_rate * g;
            }
            for (b, g) in params.bias.iter_mut().zip(&grad.bias) {
                *b -= config.learning_rate * g;
            }
        }
        epoch_mean_loss.push(epoch_loss / samples.len() as f64);

        if let Some((dev_features, dev_gold)) = &dev_data {
            let pred: Vec<usize> = dev_features
                .iter()
                .map(|x| forward(&params, x).map(|p| p.argmax()))
                .collect::<Result<_>>()?;
            let confusion = metrics::ConfusionMatrix::from_pairs(dev_gold, &pred, k)?;
            let score = metrics::weighted_f1(&confusion)?;
            let improved = best.as_ref().is_none_or(|(b, _, _)| score > *b);
            if improved {
                best = Some((score, epoch, params.clone()));
            }
        }
    }

    let (params, selected_epoch) = match best {
        Some((_, epoch, p)) => (p, Some(epoch)),
        None => (params, None),
    };
    Ok(TrainReport {
        params,
        epoch_mean_loss,
        selected_epoch,
    })
}

/// Teacher logits for one training sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleLogits {
    pub sample_id: String,
    pub logits: Vec<f64>,
}

/// A trained teacher plus its frozen logits for every training sample.
#[derive(Clone, Debug)]
pub struct TeacherRun {
    pub report: TrainReport,
    pub logits: Vec<SampleLogits>,
}

/// Trains the teacher: hard labels only, inputs rendered with
/// `future_turns` turns of lookahead (0 or 2). The returned logits were
/// computed once on the teacher's own rendering and never change
/// afterwards; downstream students train on past-only renderings and join
/// on sample id.
pub fn teacher_pipeline(
    corpus: &[crate::corpus::Dialogue],
    inventory: &crate::inventory::EmotionInventory,
    table: &EmbeddingTable,
    dev: Option<&[crate::corpus::Dialogue]>,
    config: &TrainConfig,
    future_turns: usize,
) -> Result<TeacherRun> {
    let samples = crate::corpus::enumerate_samples(corpus, future_turns, config.window)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty training corpus".into()));
    }
    let dev_samples = match dev {
        Some(d) => Some(crate::corpus::enumerate_samples(d, future_turns, config.window)?),
        None => None,
    };
    let loss = LossConfig::new(0.0, LabelMethod::OneHot)?;
    let report = train(
        &samples,
        None,
        table,
        inventory.k(),
        dev_samples.as_deref(),
        config,
        &loss,
    )?;
    let logits = samples
        .iter()
        .map(|s| {
            let features = featurize(s, table);
            forward(&report.params, &features).map(|p| SampleLogits {
                sample_id: s.sample_id.clone(),
                logits: p.logits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TeacherRun { report, logits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dialogue, Utterance};
    use crate::inventory::{EmotionInventory, Sentiment};
    use crate::label::one_hot_label;

    fn sample(rendered: &str, gold: usize) -> TrainingSample {
        TrainingSample {
            sample_id: format!("t:{gold}"),
            dialogue_id: "t".into(),
            turn_index: 0,
            rendered: rendered.to_string(),
            gold,
            future_turns_used: 0,
        }
    }

    fn tiny_table() -> EmbeddingTable {
        EmbeddingTable::from_entries(vec![
            ("apple".into(), vec![1.0, 0.0, 0.0]),
            ("banana".into(), vec![0.0, 1.0, 0.0]),
            ("cherry".into(), vec![0.0, 0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn featurize_single_known_token() {
        let t = tiny_table();
        let s = sample("<cls> <spk:0> apple", 0);
        assert_eq!(featurize(&s, &t), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn featurize_means_known_tokens() {
        let t = tiny_table();
        let s = sample("<cls> <spk:0> apple banana unknown", 0);
        assert_eq!(featurize(&s, &t), vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn featurize_all_unknown_is_zero_vector() {
        let t = tiny_table();
        let s = sample("<cls> <spk:0> nothing matches here", 0);
        assert_eq!(featurize(&s, &t), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn featurize_is_case_insensitive() {
        let t = tiny_table();
        let s = sample("<cls> <spk:0> Apple APPLE", 0);
        assert_eq!(featurize(&s, &t), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn forward_zero_params_is_uniform() {
        let params = ModelParams::zeros(3, 2).unwrap();
        let p = forward(&params, &[0.4, -0.3]).unwrap();
        for prob in &p.probs {
            assert!((prob - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_bias_only() {
        let params =
            ModelParams::from_parts(2, 1, vec![0.0, 0.0], vec![std::f64::consts::LN_2, 0.0])
                .unwrap();
        let p = forward(&params, &[0.0]).unwrap();
        assert!((p.probs[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.probs[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_dim_mismatch() {
        let params = ModelParams::zeros(2, 3).unwrap();
        assert!(forward(&params, &[1.0]).is_err());
    }

    #[test]
    fn loss_onehot_at_certain_prediction_is_zero() {
        assert_eq!(loss_onehot(&[1.0, 0.0], 0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn loss_onehot_clips_zero_probability() {
        let loss = loss_onehot(&[1.0, 0.0], 1, 1e-12).unwrap();
        assert!((loss - (-(1e-12f64).ln())).abs() < 1e-9);
    }

    #[test]
    fn loss_grayscale_uniform_target() {
        let target = GrayscaleLabel::new(vec![0.25; 4], LabelMethod::SelfModel).unwrap();
        let loss = loss_grayscale(&[0.25; 4], &target, 1e-12).unwrap();
        assert!((loss - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn grayscale_loss_is_bounded_below_by_target_entropy() {
        let target =
            GrayscaleLabel::new(vec![0.5, 0.3, 0.2], LabelMethod::SelfModel).unwrap();
        let entropy = target.entropy();
        // At p = g the bound is met exactly.
        let at_target = loss_grayscale(target.probs(), &target, 1e-12).unwrap();
        assert!((at_target - entropy).abs() < 1e-12);
        for probs in [[0.6, 0.2, 0.2], [0.2, 0.5, 0.3], [1.0 / 3.0; 3]] {
            let loss = loss_grayscale(&probs, &target, 1e-12).unwrap();
            assert!(loss + 1e-12 >= entropy);
        }
    }

    #[test]
    fn loss_total_reduces_at_alpha_zero() {
        let target = GrayscaleLabel::new(vec![0.5, 0.5], LabelMethod::Category).unwrap();
        let probs = vec![0.7, 0.3];
        let total = loss_total(&probs, 0, &target, 0.0, 1e-12).unwrap();
        assert_eq!(total, loss_onehot(&probs, 0, 1e-12).unwrap());
    }

    #[test]
    fn loss_total_with_onehot_target_scales() {
        let target = one_hot_label(0, 2).unwrap();
        let probs = vec![0.7, 0.3];
        let total = loss_total(&probs, 0, &target, 1.0, 1e-12).unwrap();
        let hard = loss_onehot(&probs, 0, 1e-12).unwrap();
        assert!((total - 2.0 * hard).abs() < 1e-12);
    }

    #[test]
    fn gradient_zero_at_exact_fit() {
        // With p = onehot(gold) = g the logit gradient vanishes.
        let params = ModelParams::from_parts(2, 1, vec![500.0, -500.0], vec![0.0, 0.0]).unwrap();
        let target = one_hot_label(0, 2).unwrap();
        let grad = loss_gradient(&params, &[1.0], 0, Some(&target), 1.0).unwrap();
        for g in grad.weights.iter().chain(&grad.bias) {
            assert!(g.abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_alpha_zero_hand_value() {
        // Zero params give p = (0.5, 0.5); gold 0 makes dlogits (-0.5, 0.5);
        // features (1,) copy that into the weight gradient.
        let params = ModelParams::zeros(2, 1).unwrap();
        let grad = loss_gradient(&params, &[1.0], 0, None, 0.0).unwrap();
        assert!((grad.bias[0] + 0.5).abs() < 1e-15);
        assert!((grad.bias[1] - 0.5).abs() < 1e-15);
        assert!((grad.weights[0] + 0.5).abs() < 1e-15);
        assert!((grad.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_requires_label_when_alpha_positive() {
        let params = ModelParams::zeros(2, 1).unwrap();
        assert!(loss_gradient(&params, &[1.0], 0, None, 1.0).is_err());
    }

    fn separable_fixture() -> (Vec<TrainingSample>, EmbeddingTable) {
        let table = tiny_table();
        let samples: Vec<TrainingSample> = (0..8)
            .map(|i| {
                let (text, gold) = if i % 2 == 0 {
                    ("<cls> <spk:0> apple apple", 0)
                } else {
                    ("<cls> <spk:1> banana banana", 1)
                };
                TrainingSample {
                    sample_id: format!("d:{i}"),
                    dialogue_id: "d".into(),
                    turn_index: i,
                    rendered: text.to_string(),
                    gold,
                    future_turns_used: 0,
                }
            })
            .collect();
        (samples, table)
    }

    #[test]
    fn training_fits_separable_data() {
        let (samples, table) = separable_fixture();
        let config = TrainConfig {
            epochs: 200,
            learning_rate: 0.5,
            ..TrainConfig::default()
        };
        let loss = LossConfig::new(0.0, LabelMethod::OneHot).unwrap();
        let report = train(&samples, None, &table, 2, None, &config, &loss).unwrap();
        for s in &samples {
            let p = forward(&report.params, &featurize(s, &table)).unwrap();
            assert_eq!(p.argmax(), s.gold, "misclassified {}", s.sample_id);
        }
        // Loss decreases over training.
        let first = report.epoch_mean_loss[0];
        let last = *report.epoch_mean_loss.last().unwrap();
        assert!(last < first);
    }

    #[test]
    fn single_step_decreases_loss() {
        let (samples, table) = separable_fixture();
        let config = TrainConfig {
            epochs: 1,
            learning_rate: 1e-3,
            batch_size: samples.len(),
            ..TrainConfig::default()
        };
        let loss_cfg = LossConfig::new(0.0, LabelMethod::OneHot).unwrap();
        let report = train(&samples, None, &table, 2, None, &config, &loss_cfg).unwrap();
        let mean_loss_after: f64 = samples
            .iter()
            .map(|s| {
                let p = forward(&report.params, &featurize(s, &table)).unwrap();
                loss_onehot(&p.probs, s.gold, 1e-12).unwrap()
            })
            .sum::<f64>()
            / samples.len() as f64;
        assert!(mean_loss_after < report.epoch_mean_loss[0]);
    }

    #[test]
    fn training_is_deterministic() {
        let (samples, table) = separable_fixture();
        let config = TrainConfig {
            epochs: 17,
            seed: 9,
            batch_size: 3,
            ..TrainConfig::default()
        };
        let loss = LossConfig::new(0.0, LabelMethod::OneHot).unwrap();
        let a = train(&samples, None, &table, 2, None, &config, &loss).unwrap();
        let b = train(&samples, None, &table, 2, None, &config, &loss).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.epoch_mean_loss, b.epoch_mean_loss);
    }

    #[test]
    fn onehot_soft_labels_match_scaled_learning_rate() {
        // L_b + alpha * L_b doubles the gradient at alpha = 1, so halving
        // the learning rate reproduces the alpha = 0 trajectory.
        let (samples, table) = separable_fixture();
        let labels: Vec<GrayscaleLabel> = samples
            .iter()
            .map(|s| one_hot_label(s.gold, 2).unwrap())
            .collect();
        let base = TrainConfig {
            epochs: 40,
            learning_rate: 0.4,
            seed: 5,
            ..TrainConfig::default()
        };
        let halved = TrainConfig {
            learning_rate: 0.2,
            ..base.clone()
        };
        let plain = train(
            &samples,
            None,
            &table,
            2,
            None,
            &base,
            &LossConfig::new(0.0, LabelMethod::OneHot).unwrap(),
        )
        .unwrap();
        let joint = train(
            &samples,
            Some(&labels),
            &table,
            2,
            None,
            &halved,
            &LossConfig::new(1.0, LabelMethod::OneHot).unwrap(),
        )
        .unwrap();
        for (a, b) in plain
            .params
            .weights()
            .iter()
            .zip(joint.params.weights())
        {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in plain.params.bias().iter().zip(joint.params.bias()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn train_validates_label_presence() {
        let (samples, table) = separable_fixture();
        let labels: Vec<GrayscaleLabel> = samples
            .iter()
            .map(|s| one_hot_label(s.gold, 2).unwrap())
            .collect();
        let config = TrainConfig::default();
        // alpha > 0 without labels.
        let loss = LossConfig::new(1.0, LabelMethod::OneHot).unwrap();
        assert!(train(&samples, None, &table, 2, None, &config, &loss).is_err());
        // alpha = 0 with labels.
        let loss = LossConfig::new(0.0, LabelMethod::OneHot).unwrap();
        assert!(train(&samples, Some(&labels), &table, 2, None, &config, &loss).is_err());
    }

    #[test]
    fn train_requires_dev_for_selection() {
        let (samples, table) = separable_fixture();
        let config = TrainConfig {
            select_best_dev: true,
            ..TrainConfig::default()
        };
        let loss = LossConfig::new(0.0, LabelMethod::OneHot).unwrap();
        assert!(train(&samples, None, &table, 2, None, &config, &loss).is_err());
        let report = train(&samples, None, &table, 2, Some(&samples), &config, &loss).unwrap();
        assert!(report.selected_epoch.is_some());
    }

    fn mini_corpus() -> (Vec<Dialogue>, EmotionInventory, EmbeddingTable) {
        let inventory = EmotionInventory::new(&[
            ("happy", Sentiment::Positive),
            ("sad", Sentiment::Negative),
        ])
        .unwrap();
        let table = tiny_table();
        let corpus = vec![
            Dialogue {
                dialogue_id: "d1".into(),
                turns: vec![
                    Utterance {
                        speaker_id: "a".into(),
                        text: "apple apple".into(),
                        gold: 0,
                    },
                    Utterance {
                        speaker_id: "b".into(),
                        text: "banana banana".into(),
                        gold: 1,
                    },
                ],
            },
            Dialogue {
                dialogue_id: "d2".into(),
                turns: vec![Utterance {
                    speaker_id: "a".into(),
                    text: "apple cherry".into(),
                    gold: 0,
                }],
            },
        ];
        (corpus, inventory, table)
    }

    #[test]
    fn teacher_pipeline_emits_logits_for_every_sample() {
        let (corpus, inventory, table) = mini_corpus();
        let config = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let run = teacher_pipeline(&corpus, &inventory, &table, None, &config, 0).unwrap();
        assert_eq!(run.logits.len(), 3);
        assert_eq!(run.logits[0].sample_id, "d1:0");
        assert_eq!(run.logits[2].sample_id, "d2:0");
        for row in &run.logits {
            assert_eq!(row.logits.len(), 2);
        }
    }

    #[test]
    fn teacher_future_rendering_only_differs_with_real_futures() {
        // On single-turn dialogues there is nothing to look ahead to, so
        // lookahead and past-only teachers coincide bit for bit.
        let (_, inventory, table) = mini_corpus();
        let corpus = vec![
            Dialogue {
                dialogue_id: "d1".into(),
                turns: vec![Utterance {
                    speaker_id: "a".into(),
                    text: "apple".into(),
                    gold: 0,
                }],
            },
            Dialogue {
                dialogue_id: "d2".into(),
                turns: vec![Utterance {
                    speaker_id: "b".into(),
                    text: "banana".into(),
                    gold: 1,
                }],
            },
        ];
        let config = TrainConfig {
            epochs: 8,
            ..TrainConfig::default()
        };
        let past = teacher_pipeline(&corpus, &inventory, &table, None, &config, 0).unwrap();
        let future = teacher_pipeline(&corpus, &inventory, &table, None, &config, 2).unwrap();
        assert_eq!(past.logits, future.logits);
    }

    #[test]
    fn teacher_pipeline_rejects_empty_corpus() {
        let (_, inventory, table) = mini_corpus();
        let config = TrainConfig::default();
        assert!(teacher_pipeline(&[], &inventory, &table, None, &config, 0).is_err());
    }
}

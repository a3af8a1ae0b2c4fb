//! Soft ("grayscale") label construction.
//!
//! A grayscale label spreads probability mass over emotion classes instead
//! of putting all of it on the annotated class. Methods:
//!
//! * `one-hot` — the degenerate hard label, kept so baselines share a code path;
//! * `category` — mass shared with emotions in the annotated class's sentiment category;
//! * `word-embedding` — mass proportional to clamped cosine similarity between emotion words;
//! * `self` — softmax of a trained teacher's logits;
//! * `self-adjust` — `self`, re-anchored on the annotated class whenever the
//!   teacher's top class disagrees with it;
//! * `future-self-adjust` — `self-adjust` where the teacher saw up to two
//!   future turns when producing its logits.

use std::fmt;
use std::str::FromStr;

use crate::embeddings::{cosine, emotion_vector, AliasMap, EmbeddingTable};
use crate::error::{Error, Result};
use crate::inventory::EmotionInventory;

/// Tolerance used when validating that label entries sum to one.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;
/// Rounding slack absorbed by re-normalization after an adjustment.
const RENORM_TOLERANCE: f64 = 1e-12;

/// How a grayscale label was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabelMethod {
    OneHot,
    Category,
    WordEmbedding,
    SelfModel,
    SelfAdjust,
    FutureSelfAdjust,
}

impl LabelMethod {
    pub const ALL: [LabelMethod; 6] = [
        LabelMethod::OneHot,
        LabelMethod::Category,
        LabelMethod::WordEmbedding,
        LabelMethod::SelfModel,
        LabelMethod::SelfAdjust,
        LabelMethod::FutureSelfAdjust,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LabelMethod::OneHot => "one-hot",
            LabelMethod::Category => "category",
            LabelMethod::WordEmbedding => "word-embedding",
            LabelMethod::SelfModel => "self",
            LabelMethod::SelfAdjust => "self-adjust",
            LabelMethod::FutureSelfAdjust => "future-self-adjust",
        }
    }

    /// Whether the method needs teacher logits as input.
    pub fn needs_teacher(self) -> bool {
        matches!(
            self,
            LabelMethod::SelfModel | LabelMethod::SelfAdjust | LabelMethod::FutureSelfAdjust
        )
    }

    /// Whether the method guarantees labels whose argmax is the gold index.
    pub fn anchors_gold(self) -> bool {
        matches!(
            self,
            LabelMethod::OneHot
                | LabelMethod::Category
                | LabelMethod::WordEmbedding
                | LabelMethod::SelfAdjust
                | LabelMethod::FutureSelfAdjust
        )
    }
}

impl fmt::Display for LabelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-hot" => Ok(LabelMethod::OneHot),
            "category" => Ok(LabelMethod::Category),
            "word-embedding" => Ok(LabelMethod::WordEmbedding),
            "self" => Ok(LabelMethod::SelfModel),
            "self-adjust" => Ok(LabelMethod::SelfAdjust),
            "future-self-adjust" => Ok(LabelMethod::FutureSelfAdjust),
            other => Err(Error::Config(format!(
                "unknown label method {other:?} (expected one of: one-hot, category, \
                 word-embedding, self, self-adjust, future-self-adjust)"
            ))),
        }
    }
}

/// Nonnegative per-emotion scores before normalization. At least one entry
/// must be strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidInput("empty score vector".into()));
        }
        for (i, s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "score {i} is not finite: {s}"
                )));
            }
            if *s < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "score {i} is negative: {s}"
                )));
            }
        }
        if scores.iter().all(|s| *s == 0.0) {
            return Err(Error::DegenerateInput(
                "all-zero score vector cannot be normalized".into(),
            ));
        }
        Ok(ScoreVector(scores))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A probability distribution over emotion classes, tagged with the method
/// that produced it. Entries lie in [0, 1] and sum to one within 1e-9.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayscaleLabel {
    probs: Vec<f64>,
    method: LabelMethod,
}

impl GrayscaleLabel {
    pub fn new(probs: Vec<f64>, method: LabelMethod) -> Result<Self> {
        validate_simplex(&probs)?;
        let probs = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(GrayscaleLabel { probs, method })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn method(&self) -> LabelMethod {
        self.method
    }

    /// Same distribution, re-tagged with a different construction method.
    pub fn with_method(mut self, method: LabelMethod) -> Self {
        self.method = method;
        self
    }

    /// Lowest index attaining the maximum probability.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }

    /// Whether `index` attains the maximum probability (ties included).
    pub fn is_argmax_at(&self, index: usize) -> bool {
        let max = self.probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.probs.get(index).is_some_and(|p| *p >= max)
    }

    /// Shannon entropy in nats, with 0·ln 0 taken as 0.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }
}

/// Checks that `probs` is a valid probability vector: nonempty, finite,
/// entries in [0, 1], summing to one within 1e-9.
pub fn validate_simplex(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidInput("empty probability vector".into()));
    }
    let mut sum = 0.0;
    for (i, p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "probability {i} is not finite: {p}"
            )));
        }
        if *p < -RENORM_TOLERANCE || *p > 1.0 + RENORM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "probability {i} is outside [0, 1]: {p}"
            )));
        }
        sum += *p;
    }
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "probabilities sum to {sum}, expected 1 within {SIMPLEX_TOLERANCE}"
        )));
    }
    Ok(())
}

/// Lowest index attaining the maximum value. Empty slices map to 0.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn check_gt(gt_index: usize, k: usize) -> Result<()> {
    if gt_index >= k {
        return Err(Error::InvalidInput(format!(
            "gold index {gt_index} out of range for {k} emotions"
        )));
    }
    Ok(())
}

/// Category scores: 1 for the annotated emotion, 0.5 for other emotions in
/// the same sentiment category, 0 elsewhere.
pub fn category_scores(gt_index: usize, inventory: &EmotionInventory) -> Result<ScoreVector> {
    check_gt(gt_index, inventory.k())?;
    let gt_category = inventory.category(gt_index).expect("checked index");
    let scores = (0..inventory.k())
        .map(|i| {
            if i == gt_index {
                1.0
            } else if inventory.category(i) == Some(gt_category) {
                0.5
            } else {
                0.0
            }
        })
        .collect();
    ScoreVector::new(scores)
}

/// Word-embedding scores: cosine similarity to the annotated emotion's word
/// vector, clamped at zero; the annotated emotion itself scores exactly 1.
pub fn word_embedding_scores(
    gt_index: usize,
    inventory: &EmotionInventory,
    table: &EmbeddingTable,
    aliases: &AliasMap,
) -> Result<ScoreVector> {
    check_gt(gt_index, inventory.k())?;
    let gt_name = inventory.name(gt_index).expect("checked index");
    let gt_vec = emotion_vector(gt_name, table, aliases)?;
    let mut scores = Vec::with_capacity(inventory.k());
    for i in 0..inventory.k() {
        if i == gt_index {
            scores.push(1.0);
            continue;
        }
        let name = inventory.name(i).expect("checked index");
        let vec = emotion_vector(name, table, aliases)?;
        scores.push(cosine(vec, gt_vec)?.max(0.0));
    }
    ScoreVector::new(scores)
}

/// Divides scores by their sum, producing a label tagged with `method`.
pub fn normalize_linear(scores: &ScoreVector, method: LabelMethod) -> Result<GrayscaleLabel> {
    let sum: f64 = scores.values().iter().sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateInput(
            "score vector sums to zero".into(),
        ));
    }
    let probs = scores.values().iter().map(|s| s / sum).collect();
    GrayscaleLabel::new(probs, method)
}

/// Numerically stable softmax of teacher logits, tagged as the `self` method.
/// The argmax of the logits and of the resulting label coincide.
pub fn softmax_label(logits: &[f64]) -> Result<GrayscaleLabel> {
    if logits.is_empty() {
        return Err(Error::InvalidInput("empty logit vector".into()));
    }
    if let Some((i, l)) = logits.iter().enumerate().find(|(_, l)| !l.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "logit {i} is not finite: {l}"
        )));
    }
    let probs = softmax(logits);
    GrayscaleLabel::new(probs, LabelMethod::SelfModel)
}

/// Stable softmax over a finite, nonempty slice.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Re-anchors a label on the annotated class when the label's top class
/// disagrees with it: the annotated class gets probability 0.5 and the
/// remaining mass is scaled to preserve the other classes' ratios. Labels
/// whose lowest-index argmax is already the annotated class pass through
/// unchanged. The result is tagged `self-adjust`.
pub fn self_adjust(label: &GrayscaleLabel, gt_index: usize) -> Result<GrayscaleLabel> {
    let g = label.probs();
    check_gt(gt_index, g.len())?;
    if argmax(g) == gt_index {
        return GrayscaleLabel::new(g.to_vec(), LabelMethod::SelfAdjust);
    }
    // Scale the other entries by their measured mass (equal to 1 - g[gt]
    // on an exact simplex, but immune to its rounding error): this keeps
    // every rescaled entry <= 1/2, so the anchor stays a top class even in
    // floating point. argmax != gt implies the mass is positive.
    let rest: f64 = g
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != gt_index)
        .map(|(_, p)| p)
        .sum();
    let mut adjusted: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == gt_index {
                0.5
            } else {
                0.5 * p / rest
            }
        })
        .collect();
    let sum: f64 = adjusted.iter().sum();
    if (sum - 1.0).abs() > RENORM_TOLERANCE {
        for p in &mut adjusted {
            *p /= sum;
        }
    }
    GrayscaleLabel::new(adjusted, LabelMethod::SelfAdjust)
}

/// The hard label: probability 1 on the annotated class.
pub fn one_hot_label(gt_index: usize, k: usize) -> Result<GrayscaleLabel> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 emotions, got {k}"
        )));
    }
    check_gt(gt_index, k)?;
    let mut probs = vec![0.0; k];
    probs[gt_index] = 1.0;
    GrayscaleLabel::new(probs, LabelMethod::OneHot)
}

/// Method-specific inputs for [`build_label`]: an embedding table with alias
/// map for `word-embedding`, teacher logits for the self methods.
#[derive(Clone, Copy, Default)]
pub struct LabelDeps<'a> {
    pub embeddings: Option<(&'a EmbeddingTable, &'a AliasMap)>,
    pub teacher_logits: Option<&'a [f64]>,
}

/// Builds one label for one sample with the requested method, dispatching to
/// the method-specific constructors.
pub fn build_label(
    method: LabelMethod,
    gt_index: usize,
    inventory: &EmotionInventory,
    deps: &LabelDeps<'_>,
) -> Result<GrayscaleLabel> {
    check_gt(gt_index, inventory.k())?;
    match method {
        LabelMethod::OneHot => one_hot_label(gt_index, inventory.k()),
        LabelMethod::Category => {
            normalize_linear(&category_scores(gt_index, inventory)?, LabelMethod::Category)
        }
        LabelMethod::WordEmbedding => {
            let (table, aliases) = deps.embeddings.ok_or_else(|| {
                Error::Config("word-embedding labels need an embedding table".into())
            })?;
            normalize_linear(
                &word_embedding_scores(gt_index, inventory, table, aliases)?,
                LabelMethod::WordEmbedding,
            )
        }
        LabelMethod::SelfModel | LabelMethod::SelfAdjust | LabelMethod::FutureSelfAdjust => {
            let logits = deps.teacher_logits.ok_or_else(|| {
                Error::Config(format!("{method} labels need teacher logits"))
            })?;
            if logits.len() != inventory.k() {
                return Err(Error::InvalidInput(format!(
                    "teacher logits have length {}, inventory has {} emotions",
                    logits.len(),
                    inventory.k()
                )));
            }
            let soft = softmax_label(logits)?;
            if method == LabelMethod::SelfModel {
                Ok(soft)
            } else {
                Ok(self_adjust(&soft, gt_index)?.with_method(method))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
            assert!(
                (a - e).abs() < tol,
                "entry {i}: got {a}, expected {e} (tol {tol})"
            );
        }
    }

    #[test]
    fn method_names_round_trip() {
        for method in LabelMethod::ALL {
            assert_eq!(method.as_str().parse::<LabelMethod>().unwrap(), method);
        }
        assert!("softmax".parse::<LabelMethod>().is_err());
    }

    #[test]
    fn category_scores_iemocap_happy() {
        let inv = EmotionInventory::iemocap();
        let s = category_scores(0, &inv).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn category_scores_iemocap_neutral_is_isolated() {
        let inv = EmotionInventory::iemocap();
        let s = category_scores(5, &inv).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let label = normalize_linear(&s, LabelMethod::Category).unwrap();
        assert_eq!(label.probs(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn category_scores_meld_anger() {
        let inv = EmotionInventory::meld();
        let gt = inv.index_of("anger").unwrap();
        let s = category_scores(gt, &inv).unwrap();
        assert_eq!(s.values(), &[1.0, 0.5, 0.5, 0.0, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn category_label_golden_values() {
        let inv = EmotionInventory::iemocap();
        let label = build_label(LabelMethod::Category, 0, &inv, &LabelDeps::default()).unwrap();
        assert_close(
            label.probs(),
            &[2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0],
            1e-12,
        );

        let meld = EmotionInventory::meld();
        let label = build_label(LabelMethod::Category, 0, &meld, &LabelDeps::default()).unwrap();
        assert_close(label.probs(), &[0.4, 0.2, 0.2, 0.0, 0.0, 0.2, 0.0], 1e-12);
    }

    #[test]
    fn normalize_two_equal_scores() {
        let s = ScoreVector::new(vec![1.0, 1.0]).unwrap();
        let label = normalize_linear(&s, LabelMethod::Category).unwrap();
        assert_eq!(label.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn score_vector_rejects_bad_input() {
        assert!(ScoreVector::new(vec![]).is_err());
        assert!(ScoreVector::new(vec![0.0, 0.0]).is_err());
        assert!(ScoreVector::new(vec![1.0, -0.1]).is_err());
        assert!(ScoreVector::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn softmax_uniform_on_equal_logits() {
        let label = softmax_label(&[0.0, 0.0, 0.0]).unwrap();
        assert_close(label.probs(), &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1e-15);
        assert_eq!(label.method(), LabelMethod::SelfModel);
    }

    #[test]
    fn softmax_ln2_gap() {
        let label = softmax_label(&[std::f64::consts::LN_2, 0.0]).unwrap();
        assert_close(label.probs(), &[2.0 / 3.0, 1.0 / 3.0], 1e-12);
    }

    #[test]
    fn softmax_shift_invariance() {
        let logits = [1.5, -0.25, 0.75, 3.0];
        let a = softmax_label(&logits).unwrap();
        let shifted: Vec<f64> = logits.iter().map(|l| l + 123.456).collect();
        let b = softmax_label(&shifted).unwrap();
        assert_close(a.probs(), b.probs(), 1e-12);
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert!(softmax_label(&[1.0, f64::INFINITY]).is_err());
        assert!(softmax_label(&[f64::NAN, 0.0]).is_err());
        assert!(softmax_label(&[]).is_err());
    }

    #[test]
    fn self_adjust_mismatch_re_anchors() {
        let g = GrayscaleLabel::new(vec![0.3, 0.4, 0.2, 0.1], LabelMethod::SelfModel).unwrap();
        let adjusted = self_adjust(&g, 0).unwrap();
        assert_close(
            adjusted.probs(),
            &[0.5, 0.5 * 0.4 / 0.7, 0.5 * 0.2 / 0.7, 0.5 * 0.1 / 0.7],
            1e-15,
        );
        assert_eq!(adjusted.method(), LabelMethod::SelfAdjust);
        assert_eq!(adjusted.argmax(), 0);
    }

    #[test]
    fn self_adjust_match_passes_through() {
        let g = GrayscaleLabel::new(vec![0.7, 0.2, 0.1], LabelMethod::SelfModel).unwrap();
        let adjusted = self_adjust(&g, 0).unwrap();
        assert_eq!(adjusted.probs(), &[0.7, 0.2, 0.1]);
    }

    #[test]
    fn self_adjust_tie_at_gold_passes_through() {
        let g = GrayscaleLabel::new(vec![0.5, 0.5], LabelMethod::SelfModel).unwrap();
        let adjusted = self_adjust(&g, 0).unwrap();
        assert_eq!(adjusted.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn self_adjust_preserves_ratios() {
        let g = GrayscaleLabel::new(vec![0.1, 0.5, 0.15, 0.25], LabelMethod::SelfModel).unwrap();
        let adjusted = self_adjust(&g, 0).unwrap();
        let p = adjusted.probs();
        assert!((p[1] / p[2] - 0.5 / 0.15).abs() < 1e-9);
        assert!((p[1] / p[3] - 0.5 / 0.25).abs() < 1e-9);
        assert!((p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn self_adjust_is_idempotent() {
        let g = GrayscaleLabel::new(vec![0.3, 0.4, 0.2, 0.1], LabelMethod::SelfModel).unwrap();
        let once = self_adjust(&g, 0).unwrap();
        let twice = self_adjust(&once, 0).unwrap();
        assert_close(once.probs(), twice.probs(), 1e-15);
    }

    #[test]
    fn one_hot_label_basics() {
        let label = one_hot_label(2, 4).unwrap();
        assert_eq!(label.probs(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(label.method(), LabelMethod::OneHot);
        assert!(one_hot_label(4, 4).is_err());
        assert!(one_hot_label(0, 1).is_err());
    }

    #[test]
    fn build_label_self_adjust_uniform_logits() {
        let inv = EmotionInventory::new(&[
            ("happy", crate::inventory::Sentiment::Positive),
            ("sad", crate::inventory::Sentiment::Negative),
            ("angry", crate::inventory::Sentiment::Negative),
            ("neutral", crate::inventory::Sentiment::Neutral),
        ])
        .unwrap();
        let logits = [0.0, 0.0, 0.0, 0.0];
        let deps = LabelDeps {
            teacher_logits: Some(&logits),
            ..LabelDeps::default()
        };
        // Uniform softmax has its lowest-index argmax at 0, which differs
        // from gt=1, so the adjustment applies.
        let label = build_label(LabelMethod::SelfAdjust, 1, &inv, &deps).unwrap();
        assert_close(
            label.probs(),
            &[1.0 / 6.0, 0.5, 1.0 / 6.0, 1.0 / 6.0],
            1e-12,
        );
        assert_eq!(label.method(), LabelMethod::SelfAdjust);
    }

    #[test]
    fn build_label_composes_category() {
        let inv = EmotionInventory::iemocap();
        let direct = normalize_linear(&category_scores(3, &inv).unwrap(), LabelMethod::Category)
            .unwrap();
        let built = build_label(LabelMethod::Category, 3, &inv, &LabelDeps::default()).unwrap();
        assert_eq!(direct.probs(), built.probs());
    }

    #[test]
    fn build_label_missing_deps_is_config_error() {
        let inv = EmotionInventory::iemocap();
        let err = build_label(LabelMethod::SelfModel, 0, &inv, &LabelDeps::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err =
            build_label(LabelMethod::WordEmbedding, 0, &inv, &LabelDeps::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn build_label_future_self_adjust_tag() {
        let inv = EmotionInventory::iemocap();
        let logits = [0.2, -0.3, 0.9, 0.0, 0.1, -0.5];
        let deps = LabelDeps {
            teacher_logits: Some(&logits),
            ..LabelDeps::default()
        };
        let label = build_label(LabelMethod::FutureSelfAdjust, 1, &inv, &deps).unwrap();
        assert_eq!(label.method(), LabelMethod::FutureSelfAdjust);
        assert_eq!(label.argmax(), 1);
        assert!((label.probs()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn validate_simplex_rejects_bad_vectors() {
        assert!(validate_simplex(&[]).is_err());
        assert!(validate_simplex(&[0.5, 0.6]).is_err());
        assert!(validate_simplex(&[1.2, -0.2]).is_err());
        assert!(validate_simplex(&[f64::NAN, 1.0]).is_err());
        assert!(validate_simplex(&[0.25; 4]).is_ok());
    }

    #[test]
    fn entropy_of_uniform_and_onehot() {
        let uniform = GrayscaleLabel::new(vec![0.25; 4], LabelMethod::SelfModel).unwrap();
        assert!((uniform.entropy() - 4.0f64.ln()).abs() < 1e-12);
        let hard = one_hot_label(1, 4).unwrap();
        assert_eq!(hard.entropy(), 0.0);
    }
}

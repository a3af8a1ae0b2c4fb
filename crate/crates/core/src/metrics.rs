//! Classification metrics: confusion matrices and weighted / macro / micro
//! F1, with optional class exclusion for corpora whose dominant class would
//! otherwise swamp the averages.

use crate::error::{Error, Result};

/// A k×k contingency table; rows are gold classes, columns predictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Tallies aligned gold/prediction index slices.
    pub fn from_pairs(gold: &[usize], pred: &[usize], k: usize) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::InvalidInput(format!(
                "gold and prediction lists differ in length: {} vs {}",
                gold.len(),
                pred.len()
            )));
        }
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 classes, got {k}"
            )));
        }
        let mut counts = vec![0u64; k * k];
        for (i, (&g, &p)) in gold.iter().zip(pred).enumerate() {
            if g >= k || p >= k {
                return Err(Error::InvalidInput(format!(
                    "pair {i} has class index out of range: gold {g}, pred {p}, k {k}"
                )));
            }
            counts[g * k + p] += 1;
        }
        Ok(ConfusionMatrix { k, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.k + pred]
    }

    /// Number of gold instances of `class`.
    pub fn support(&self, class: usize) -> u64 {
        (0..self.k).map(|p| self.count(class, p)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn true_positives(&self, class: usize) -> u64 {
        self.count(class, class)
    }

    pub fn false_positives(&self, class: usize) -> u64 {
        (0..self.k)
            .filter(|g| *g != class)
            .map(|g| self.count(g, class))
            .sum()
    }

    pub fn false_negatives(&self, class: usize) -> u64 {
        (0..self.k)
            .filter(|p| *p != class)
            .map(|p| self.count(class, p))
            .sum()
    }
}

fn f1_from_counts(tp: u64, fp: u64, fn_: u64) -> Option<f64> {
    if tp + fp + fn_ == 0 {
        // The class never occurred and was never predicted: undefined.
        return None;
    }
    if tp == 0 {
        return Some(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    Some(2.0 * precision * recall / (precision + recall))
}

/// Per-class F1; `None` marks classes that are absent from both gold and
/// predictions.
pub fn per_class_f1(confusion: &ConfusionMatrix) -> Vec<Option<f64>> {
    (0..confusion.k())
        .map(|c| {
            f1_from_counts(
                confusion.true_positives(c),
                confusion.false_positives(c),
                confusion.false_negatives(c),
            )
        })
        .collect()
}

/// Support-weighted mean of per-class F1. Absent classes carry weight zero;
/// zero total support is an undefined-result error.
pub fn weighted_f1(confusion: &ConfusionMatrix) -> Result<f64> {
    let f1s = per_class_f1(confusion);
    let mut weighted_sum = 0.0;
    let mut total_support = 0u64;
    for (c, f1) in f1s.iter().enumerate() {
        let support = confusion.support(c);
        total_support += support;
        if let Some(f1) = f1 {
            weighted_sum += support as f64 * f1;
        }
    }
    if total_support == 0 {
        return Err(Error::Undefined(
            "weighted F1 over zero total support".into(),
        ));
    }
    Ok(weighted_sum / total_support as f64)
}

fn check_excluded(confusion: &ConfusionMatrix, excluded: &[usize]) -> Result<()> {
    for &c in excluded {
        if c >= confusion.k() {
            return Err(Error::InvalidInput(format!(
                "excluded class {c} out of range for k={}",
                confusion.k()
            )));
        }
    }
    Ok(())
}

fn is_excluded(class: usize, excluded: &[usize]) -> bool {
    excluded.contains(&class)
}

/// Unweighted mean of per-class F1 over classes that are neither excluded
/// nor absent. Undefined when no class qualifies.
pub fn macro_f1(confusion: &ConfusionMatrix, excluded: &[usize]) -> Result<f64> {
    check_excluded(confusion, excluded)?;
    let f1s = per_class_f1(confusion);
    let mut sum = 0.0;
    let mut n = 0usize;
    for (c, f1) in f1s.iter().enumerate() {
        if is_excluded(c, excluded) {
            continue;
        }
        if let Some(f1) = f1 {
            sum += f1;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Undefined(
            "macro F1 with every class excluded or absent".into(),
        ));
    }
    Ok(sum / n as f64)
}

/// F1 of pooled true/false positives and negatives over non-excluded
/// classes. With nothing excluded this equals plain accuracy for
/// single-label multiclass data.
pub fn micro_f1(confusion: &ConfusionMatrix, excluded: &[usize]) -> Result<f64> {
    check_excluded(confusion, excluded)?;
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for c in 0..confusion.k() {
        if is_excluded(c, excluded) {
            continue;
        }
        tp += confusion.true_positives(c);
        fp += confusion.false_positives(c);
        fn_ += confusion.false_negatives(c);
    }
    if tp + fp + fn_ == 0 {
        return Err(Error::Undefined(
            "micro F1 over zero pooled counts".into(),
        ));
    }
    Ok(2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64))
}

/// A full evaluation: the confusion matrix, per-class F1, the three
/// aggregate F1 scores (None when undefined), and the excluded class set
/// used for the macro and micro aggregates.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub confusion: ConfusionMatrix,
    pub per_class_f1: Vec<Option<f64>>,
    pub weighted_f1: Option<f64>,
    pub macro_f1: Option<f64>,
    pub micro_f1: Option<f64>,
    pub excluded: Vec<usize>,
}

fn undefined_to_none(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Computes every metric for aligned gold/prediction slices. `excluded`
/// classes are left out of the macro and micro aggregates (weighted F1
/// always covers all classes).
pub fn evaluate(
    gold: &[usize],
    pred: &[usize],
    k: usize,
    excluded: &[usize],
) -> Result<EvalResult> {
    let confusion = ConfusionMatrix::from_pairs(gold, pred, k)?;
    check_excluded(&confusion, excluded)?;
    let mut excluded: Vec<usize> = excluded.to_vec();
    excluded.sort_unstable();
    excluded.dedup();
    let per_class = per_class_f1(&confusion);
    let weighted = undefined_to_none(weighted_f1(&confusion))?;
    let macro_ = undefined_to_none(macro_f1(&confusion, &excluded))?;
    let micro = undefined_to_none(micro_f1(&confusion, &excluded))?;
    Ok(EvalResult {
        confusion,
        per_class_f1: per_class,
        weighted_f1: weighted,
        macro_f1: macro_,
        micro_f1: micro,
        excluded,
    })
}

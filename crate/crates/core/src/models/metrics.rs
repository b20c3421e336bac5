//! Evaluation metrics. Patients are the positive class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// `truth[i]` / `predicted[i]` are true for patients. Precision and recall
/// with an empty denominator count as zero.
pub fn classification_metrics(truth: &[bool], predicted: &[bool]) -> Result<ClassificationMetrics> {
    if truth.len() != predicted.len() || truth.is_empty() {
        return Err(Error::Domain(format!(
            "metric inputs must be equal and non-empty ({} vs {})",
            truth.len(),
            predicted.len()
        )));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (true, true) => tp += 1.0,
            (false, true) => fp += 1.0,
            (true, false) => fn_ += 1.0,
            (false, false) => tn += 1.0,
        }
    }
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok(ClassificationMetrics {
        accuracy: (tp + tn) / truth.len() as f64,
        precision,
        recall,
        f1: ratio(2.0 * precision * recall, precision + recall),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mae: f64,
    pub rmse: f64,
    /// Largest absolute error.
    pub me: f64,
}

pub fn regression_metrics(predicted: &[f64], truth: &[f64]) -> Result<RegressionMetrics> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::Domain(format!(
            "metric inputs must be equal and non-empty ({} vs {})",
            predicted.len(),
            truth.len()
        )));
    }
    let n = truth.len() as f64;
    let errs: Vec<f64> = predicted.iter().zip(truth).map(|(p, t)| (p - t).abs()).collect();
    Ok(RegressionMetrics {
        mae: errs.iter().sum::<f64>() / n,
        rmse: (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt(),
        me: errs.iter().copied().fold(0.0, f64::max),
    })
}

//! Classification metrics and multi-seed aggregation.
//!
//! Multi-class tasks report macro averages of class-wise F1, precision, and
//! recall; binary tasks report the positive class only. Accuracy is overall
//! in both modes. Per-class F1 is defined as 0 whenever precision and recall
//! are both 0, which matters for macro averages on small splits.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::task::{MetricMode, TaskSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("gold and prediction lists differ in length: {gold} vs {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("empty label lists")]
    Empty,
    #[error("label {label} invalid for task with {num_classes} classes")]
    InvalidLabel { label: usize, num_classes: usize },
    #[error("cannot aggregate an empty report list")]
    EmptyAggregation,
    #[error("reports disagree on metric mode or class count")]
    ModeMismatch,
}

/// Per-class precision/recall/F1 with gold support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold instances of this class (averaged under aggregation).
    pub support: f64,
}

/// Metrics for one evaluation, or the mean over several runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub mode: MetricMode,
    /// Number of runs averaged into this report.
    pub n_runs: u32,
}

/// Compute metrics for one run according to the task's metric mode.
pub fn compute_metrics(
    gold: &[usize],
    pred: &[usize],
    task: &TaskSpec,
) -> Result<MetricsReport, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(MetricsError::Empty);
    }
    let classes = task.num_classes();
    for &label in gold.iter().chain(pred) {
        if label >= classes {
            return Err(MetricsError::InvalidLabel {
                label,
                num_classes: classes,
            });
        }
    }

    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    let mut support = vec![0usize; classes];
    let mut correct = 0usize;
    for (&g, &p) in gold.iter().zip(pred) {
        support[g] += 1;
        if g == p {
            tp[g] += 1;
            correct += 1;
        } else {
            fp[p] += 1;
            fn_[g] += 1;
        }
    }

    let per_class: Vec<ClassMetrics> = (0..classes)
        .map(|c| {
            let precision = ratio(tp[c], tp[c] + fp[c]);
            let recall = ratio(tp[c], tp[c] + fn_[c]);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                precision,
                recall,
                f1,
                support: support[c] as f64,
            }
        })
        .collect();

    let accuracy = correct as f64 / gold.len() as f64;
    let (f1, precision, recall) = match task.metric_mode() {
        MetricMode::Macro => {
            let n = classes as f64;
            (
                per_class.iter().map(|m| m.f1).sum::<f64>() / n,
                per_class.iter().map(|m| m.precision).sum::<f64>() / n,
                per_class.iter().map(|m| m.recall).sum::<f64>() / n,
            )
        }
        MetricMode::BinaryPositive => {
            let positive = task
                .positive_class()
                .expect("binary-positive task has a positive class");
            let m = &per_class[positive];
            (m.f1, m.precision, m.recall)
        }
    };

    Ok(MetricsReport {
        f1,
        precision,
        recall,
        accuracy,
        per_class,
        mode: task.metric_mode(),
        n_runs: 1,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Arithmetic mean of several runs' reports. All inputs must share the
/// metric mode and class count; `n_runs` adds up.
pub fn aggregate_runs(reports: &[MetricsReport]) -> Result<MetricsReport, MetricsError> {
    let first = reports.first().ok_or(MetricsError::EmptyAggregation)?;
    if reports
        .iter()
        .any(|r| r.mode != first.mode || r.per_class.len() != first.per_class.len())
    {
        return Err(MetricsError::ModeMismatch);
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let per_class = (0..first.per_class.len())
        .map(|c| ClassMetrics {
            precision: reports.iter().map(|r| r.per_class[c].precision).sum::<f64>() / n,
            recall: reports.iter().map(|r| r.per_class[c].recall).sum::<f64>() / n,
            f1: reports.iter().map(|r| r.per_class[c].f1).sum::<f64>() / n,
            support: reports.iter().map(|r| r.per_class[c].support).sum::<f64>() / n,
        })
        .collect();
    Ok(MetricsReport {
        f1: mean(&|r| r.f1),
        precision: mean(&|r| r.precision),
        recall: mean(&|r| r.recall),
        accuracy: mean(&|r| r.accuracy),
        per_class,
        mode: first.mode,
        n_runs: reports.iter().map(|r| r.n_runs).sum(),
    })
}

//! Classification task definitions.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How a task's headline metrics are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricMode {
    /// Unweighted mean of per-class F1/precision/recall.
    Macro,
    /// F1/precision/recall for the designated positive class only.
    BinaryPositive,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskSpecError {
    #[error("a task needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("duplicate class label `{0}`")]
    DuplicateClass(String),
    #[error("binary-positive mode requires a positive class index")]
    PositiveClassMissing,
    #[error("positive class index {index} out of range for {num_classes} classes")]
    PositiveClassOutOfRange { index: usize, num_classes: usize },
    #[error("positive class is only meaningful in binary-positive mode")]
    PositiveClassForbidden,
}

/// A classification task: its ordered class labels and metric convention.
///
/// Labels are stored as indices into `classes`; the label-name mapping lives
/// here rather than in per-language data so label strings cannot drift
/// between dataset versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    name: String,
    classes: Vec<String>,
    metric_mode: MetricMode,
    positive_class: Option<usize>,
}

impl TaskSpec {
    pub fn new(
        name: impl Into<String>,
        classes: Vec<String>,
        metric_mode: MetricMode,
        positive_class: Option<usize>,
    ) -> Result<Self, TaskSpecError> {
        if classes.len() < 2 {
            return Err(TaskSpecError::TooFewClasses(classes.len()));
        }
        for (i, class) in classes.iter().enumerate() {
            if classes[..i].contains(class) {
                return Err(TaskSpecError::DuplicateClass(class.clone()));
            }
        }
        match (metric_mode, positive_class) {
            (MetricMode::BinaryPositive, None) => return Err(TaskSpecError::PositiveClassMissing),
            (MetricMode::BinaryPositive, Some(index)) if index >= classes.len() => {
                return Err(TaskSpecError::PositiveClassOutOfRange {
                    index,
                    num_classes: classes.len(),
                })
            }
            (MetricMode::Macro, Some(_)) => return Err(TaskSpecError::PositiveClassForbidden),
            _ => {}
        }
        Ok(TaskSpec {
            name: name.into(),
            classes,
            metric_mode,
            positive_class,
        })
    }

    /// The crisis humanitarianism task: 5 classes, macro metrics.
    pub fn crisis() -> TaskSpec {
        TaskSpec::new(
            "crisis",
            [
                "infrastructure_and_utility_damage",
                "rescue_volunteering_or_donation_effort",
                "affected_individuals",
                "other_relevant_information",
                "not_humanitarian",
            ]
            .iter()
            .map(|s| String::from(*s))
            .collect(),
            MetricMode::Macro,
            None,
        )
        .expect("builtin task is valid")
    }

    /// The fake news task: binary, metrics reported for the fake class
    /// (label 1).
    pub fn fake_news() -> TaskSpec {
        TaskSpec::new(
            "fake-news",
            [
                "real", // label 0
                "fake", // label 1, the positive class
            ]
            .iter()
            .map(|s| String::from(*s))
            .collect(),
            MetricMode::BinaryPositive,
            Some(1),
        )
        .expect("builtin task is valid")
    }

    /// The emotion task: 4 classes, macro metrics.
    pub fn emotion() -> TaskSpec {
        TaskSpec::new(
            "emotion",
            ["creepy", "gore", "happy", "rage"]
                .iter()
                .map(|s| String::from(*s))
                .collect(),
            MetricMode::Macro,
            None,
        )
        .expect("builtin task is valid")
    }

    /// Look up one of the built-in tasks by name.
    pub fn builtin(name: &str) -> Option<TaskSpec> {
        match name {
            "crisis" => Some(TaskSpec::crisis()),
            "fake-news" => Some(TaskSpec::fake_news()),
            "emotion" => Some(TaskSpec::emotion()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn metric_mode(&self) -> MetricMode {
        self.metric_mode
    }

    pub fn positive_class(&self) -> Option<usize> {
        self.positive_class
    }

    pub fn is_valid_label(&self, label: usize) -> bool {
        label < self.classes.len()
    }
}

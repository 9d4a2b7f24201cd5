//! Multimodal examples, dataset versions, and the language-parallelism check.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::LanguageCode;
use crate::task::TaskSpec;

/// Dataset partition an example belongs to. Membership is stored per example
/// rather than derived, so fixed splits are a property of the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown split `{0}` (expected train, validation, or test)")]
pub struct UnknownSplit(pub String);

impl FromStr for Split {
    type Err = UnknownSplit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(UnknownSplit(String::from(other))),
        }
    }
}

/// How a dataset version's text came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Original,
    MachineTranslated,
    HumanTranslated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::MachineTranslated => "machine-translated",
            Provenance::HumanTranslated => "human-translated",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown provenance `{0}`")]
pub struct UnknownProvenance(pub String);

impl FromStr for Provenance {
    type Err = UnknownProvenance;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Provenance::Original),
            "machine-translated" => Ok(Provenance::MachineTranslated),
            "human-translated" => Ok(Provenance::HumanTranslated),
            other => Err(UnknownProvenance(String::from(other))),
        }
    }
}

/// One (text, image, label) record: the atomic unit of every dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultimodalExample {
    pub id: String,
    pub text: String,
    /// Path or URI of the example's image, relative to the dataset's image
    /// root. Resolvability is checked by consumers that actually read pixels.
    pub image_ref: String,
    /// Class index into the task's class list.
    pub label: usize,
    pub language: LanguageCode,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("no examples")]
    Empty,
    #[error("duplicate example id `{0}`")]
    DuplicateId(String),
    #[error("example `{id}`: label {label} out of range for {num_classes} classes")]
    LabelOutOfRange {
        id: String,
        label: usize,
        num_classes: usize,
    },
    #[error("example `{id}`: language {found} does not match dataset language {expected}")]
    LanguageMismatch {
        id: String,
        expected: LanguageCode,
        found: LanguageCode,
    },
    #[error("dataset versions do not share a task spec: `{0}` vs `{1}`")]
    TaskMismatch(String, String),
}

/// Per-split example counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }

    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Validation => self.validation,
            Split::Test => self.test,
        }
    }
}

/// One language's version of a task dataset.
///
/// Validated on construction and immutable afterwards, so values are safe to
/// share across concurrent readers. Across the versions of one task only the
/// text may differ; ids, splits, and labels must agree (see
/// [`check_parallel`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetVersion {
    task: TaskSpec,
    language: LanguageCode,
    provenance: Provenance,
    examples: Vec<MultimodalExample>,
}

impl DatasetVersion {
    pub fn new(
        task: TaskSpec,
        language: LanguageCode,
        provenance: Provenance,
        examples: Vec<MultimodalExample>,
    ) -> Result<Self, DataError> {
        if examples.is_empty() {
            return Err(DataError::Empty);
        }
        let mut seen = BTreeSet::new();
        for example in &examples {
            if !seen.insert(example.id.as_str()) {
                return Err(DataError::DuplicateId(example.id.clone()));
            }
            if !task.is_valid_label(example.label) {
                return Err(DataError::LabelOutOfRange {
                    id: example.id.clone(),
                    label: example.label,
                    num_classes: task.num_classes(),
                });
            }
            if example.language != language {
                return Err(DataError::LanguageMismatch {
                    id: example.id.clone(),
                    expected: language,
                    found: example.language,
                });
            }
        }
        Ok(DatasetVersion {
            task,
            language,
            provenance,
            examples,
        })
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn language(&self) -> LanguageCode {
        self.language
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn examples(&self) -> &[MultimodalExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &MultimodalExample> {
        self.examples.iter().filter(move |e| e.split == split)
    }

    pub fn split_counts(&self) -> SplitCounts {
        let mut counts = SplitCounts::default();
        for example in &self.examples {
            match example.split {
                Split::Train => counts.train += 1,
                Split::Validation => counts.validation += 1,
                Split::Test => counts.test += 1,
            }
        }
        counts
    }

    /// (text, label) pairs for one split, in stored order.
    pub fn labeled_text(&self, split: Split) -> Vec<(&str, usize)> {
        self.split(split)
            .map(|e| (e.text.as_str(), e.label))
            .collect()
    }

    /// Class frequencies over one split as fractions that sum to 1.
    pub fn class_proportions(&self, split: Split) -> Vec<f64> {
        let mut counts = alloc::vec![0usize; self.task.num_classes()];
        let mut total = 0usize;
        for example in self.split(split) {
            counts[example.label] += 1;
            total += 1;
        }
        counts
            .into_iter()
            .map(|c| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / total as f64
                }
            })
            .collect()
    }
}

/// Why an example disagrees with the reference version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MismatchKind {
    /// Present in the reference version but missing here.
    Missing,
    /// Present here but not in the reference version.
    Unexpected,
    SplitDiffers { expected: Split, found: Split },
    LabelDiffers { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub id: String,
    pub language: LanguageCode,
    pub kind: MismatchKind,
}

/// Result of [`check_parallel`]: empty iff all versions agree.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParallelReport {
    pub mismatches: Vec<Mismatch>,
}

impl ParallelReport {
    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Check that the (id, split, label) triples agree across all versions of a
/// task, taking the first version as reference. A single version (or none)
/// vacuously passes. Mismatches are the return value, not an error.
pub fn check_parallel(versions: &[DatasetVersion]) -> Result<ParallelReport, DataError> {
    let mut report = ParallelReport::default();
    let Some(reference) = versions.first() else {
        return Ok(report);
    };
    for version in &versions[1..] {
        if version.task() != reference.task() {
            return Err(DataError::TaskMismatch(
                String::from(reference.task().name()),
                String::from(version.task().name()),
            ));
        }
    }

    let ref_index: BTreeMap<&str, (Split, usize)> = reference
        .examples()
        .iter()
        .map(|e| (e.id.as_str(), (e.split, e.label)))
        .collect();

    for version in &versions[1..] {
        let mut seen = BTreeSet::new();
        for example in version.examples() {
            seen.insert(example.id.as_str());
            match ref_index.get(example.id.as_str()) {
                None => report.mismatches.push(Mismatch {
                    id: example.id.clone(),
                    language: version.language(),
                    kind: MismatchKind::Unexpected,
                }),
                Some(&(split, label)) => {
                    if split != example.split {
                        report.mismatches.push(Mismatch {
                            id: example.id.clone(),
                            language: version.language(),
                            kind: MismatchKind::SplitDiffers {
                                expected: split,
                                found: example.split,
                            },
                        });
                    }
                    if label != example.label {
                        report.mismatches.push(Mismatch {
                            id: example.id.clone(),
                            language: version.language(),
                            kind: MismatchKind::LabelDiffers {
                                expected: label,
                                found: example.label,
                            },
                        });
                    }
                }
            }
        }
        for example in reference.examples() {
            if !seen.contains(example.id.as_str()) {
                report.mismatches.push(Mismatch {
                    id: example.id.clone(),
                    language: version.language(),
                    kind: MismatchKind::Missing,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;

    fn example(id: &str, label: usize, language: LanguageCode, split: Split) -> MultimodalExample {
        MultimodalExample {
            id: id.to_string(),
            text: format!("text for {id}"),
            image_ref: format!("images/{id}.png"),
            label,
            language,
            split,
        }
    }

    fn small_version(language: LanguageCode) -> DatasetVersion {
        let examples = alloc::vec![
            example("a", 0, language, Split::Train),
            example("b", 1, language, Split::Validation),
            example("c", 2, language, Split::Test),
        ];
        DatasetVersion::new(TaskSpec::crisis(), language, Provenance::Original, examples).unwrap()
    }

    #[test]
    fn rejects_empty_dataset() {
        let err = DatasetVersion::new(
            TaskSpec::crisis(),
            LanguageCode::En,
            Provenance::Original,
            alloc::vec![],
        )
        .unwrap_err();
        assert_eq!(err, DataError::Empty);
        assert_eq!(err.to_string(), "no examples");
    }

    #[test]
    fn rejects_duplicate_ids() {
        let examples = alloc::vec![
            example("a", 0, LanguageCode::En, Split::Train),
            example("a", 1, LanguageCode::En, Split::Train),
        ];
        assert!(matches!(
            DatasetVersion::new(
                TaskSpec::crisis(),
                LanguageCode::En,
                Provenance::Original,
                examples
            ),
            Err(DataError::DuplicateId(_))
        ));
    }

    #[test]
    fn rejects_label_out_of_range() {
        let examples = alloc::vec![example("a", 5, LanguageCode::En, Split::Train)];
        assert!(matches!(
            DatasetVersion::new(
                TaskSpec::crisis(),
                LanguageCode::En,
                Provenance::Original,
                examples
            ),
            Err(DataError::LabelOutOfRange { label: 5, .. })
        ));
    }

    #[test]
    fn rejects_language_mismatch() {
        let examples = alloc::vec![example("a", 0, LanguageCode::Es, Split::Train)];
        assert!(matches!(
            DatasetVersion::new(
                TaskSpec::crisis(),
                LanguageCode::En,
                Provenance::Original,
                examples
            ),
            Err(DataError::LanguageMismatch { .. })
        ));
    }

    #[test]
    fn split_counts_and_proportions() {
        let version = small_version(LanguageCode::En);
        let counts = version.split_counts();
        assert_eq!((counts.train, counts.validation, counts.test), (1, 1, 1));
        assert_eq!(counts.total(), 3);
        let props = version.class_proportions(Split::Train);
        assert_eq!(props[0], 1.0);
        assert_eq!(props.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn parallel_versions_produce_empty_report() {
        let en = small_version(LanguageCode::En);
        let es = small_version(LanguageCode::Es);
        let report = check_parallel(&[en, es]).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn single_version_is_vacuously_parallel() {
        let report = check_parallel(&[small_version(LanguageCode::En)]).unwrap();
        assert!(report.is_empty());
        assert!(check_parallel(&[]).unwrap().is_empty());
    }

    #[test]
    fn dropped_example_is_reported() {
        let en = small_version(LanguageCode::En);
        let examples = alloc::vec![
            example("a", 0, LanguageCode::Es, Split::Train),
            example("b", 1, LanguageCode::Es, Split::Validation),
        ];
        let es = DatasetVersion::new(
            TaskSpec::crisis(),
            LanguageCode::Es,
            Provenance::MachineTranslated,
            examples,
        )
        .unwrap();
        let report = check_parallel(&[en, es]).unwrap();
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].id, "c");
        assert_eq!(report.mismatches[0].kind, MismatchKind::Missing);
    }

    #[test]
    fn split_and_label_drift_are_reported() {
        let en = small_version(LanguageCode::En);
        let examples = alloc::vec![
            example("a", 1, LanguageCode::Es, Split::Train),
            example("b", 1, LanguageCode::Es, Split::Train),
            example("c", 2, LanguageCode::Es, Split::Test),
        ];
        let es = DatasetVersion::new(
            TaskSpec::crisis(),
            LanguageCode::Es,
            Provenance::MachineTranslated,
            examples,
        )
        .unwrap();
        let report = check_parallel(&[en, es]).unwrap();
        let kinds: Vec<_> = report.mismatches.iter().map(|m| &m.kind).collect();
        assert!(kinds.contains(&&MismatchKind::LabelDiffers {
            expected: 0,
            found: 1
        }));
        assert!(kinds.contains(&&MismatchKind::SplitDiffers {
            expected: Split::Validation,
            found: Split::Train
        }));
    }

    #[test]
    fn task_mismatch_is_an_error() {
        let crisis = small_version(LanguageCode::En);
        let emotion = DatasetVersion::new(
            TaskSpec::emotion(),
            LanguageCode::Es,
            Provenance::Original,
            alloc::vec![example("a", 0, LanguageCode::Es, Split::Train)],
        )
        .unwrap();
        assert!(matches!(
            check_parallel(&[crisis, emotion]),
            Err(DataError::TaskMismatch(_, _))
        ));
    }
}

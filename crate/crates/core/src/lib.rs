//! Core data model and algorithms for multilingual multimodal classification
//! experiments.
//!
//! The crate covers the compute side of the pipeline: language-parallel
//! dataset validation, deterministic text cleaning and image standardization,
//! small dense networks trained with Adam and early stopping, penultimate
//! embedding extraction, late fusion, classification metrics, agreement
//! statistics, the cross-language disparity measures, and a controlled
//! synthetic benchmark generator.
//!
//! Everything here is deterministic given explicit seeds and free of IO.
//! The crate is `no_std`-compatible (it requires `alloc`); file formats,
//! translation clients, checkpoints, orchestration, and the CLI live in the
//! companion `crossmodal-pipeline` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod agreement;
pub mod clean;
pub mod data;
pub mod disparity;
pub mod embedding;
pub mod fusion;
pub mod image_model;
pub mod imageproc;
pub mod lang;
pub mod metrics;
pub mod nn;
pub mod synth;
pub mod task;
pub mod text_model;
pub mod train;
pub mod util;

pub use data::{check_parallel, DatasetVersion, MultimodalExample, Provenance, Split};
pub use embedding::{fuse, EmbeddingVector, FusedVector, Modality};
pub use lang::LanguageCode;
pub use metrics::{aggregate_runs, compute_metrics, MetricsReport};
pub use task::{MetricMode, TaskSpec};
pub use train::TrainingConfig;

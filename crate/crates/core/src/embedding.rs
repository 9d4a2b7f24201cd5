//! Modality-tagged embedding vectors and late-fusion concatenation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Text embedding width (penultimate layer of the text classifiers).
pub const TEXT_DIM: usize = 768;
/// Image embedding width (penultimate layer of the image head).
pub const IMAGE_DIM: usize = 256;
/// Fused width: text block then image block.
pub const FUSED_DIM: usize = TEXT_DIM + IMAGE_DIM;

/// Which channel a vector (or a classifier) works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Text,
    Image,
    Fused,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Image => "image",
            Modality::Fused => "fused",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuseError {
    #[error("expected {expected} embedding, got {found}")]
    ModalityMismatch { expected: Modality, found: Modality },
    #[error("{modality} embedding has dimension {got}, expected {expected}")]
    DimensionMismatch {
        modality: Modality,
        expected: usize,
        got: usize,
    },
}

/// A real vector tagged with the modality it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    modality: Modality,
    values: Vec<f32>,
}

impl EmbeddingVector {
    pub fn new(modality: Modality, values: Vec<f32>) -> Self {
        EmbeddingVector { modality, values }
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }
}

/// The 1024-dim concatenation of a text and an image embedding, text first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedVector {
    values: Vec<f32>,
}

impl FusedVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

/// Concatenate text and image embeddings into the fusion input, text block
/// first. Both vectors must carry the right modality and dimension.
pub fn fuse(text: &EmbeddingVector, image: &EmbeddingVector) -> Result<FusedVector, FuseError> {
    if text.modality() != Modality::Text {
        return Err(FuseError::ModalityMismatch {
            expected: Modality::Text,
            found: text.modality(),
        });
    }
    if image.modality() != Modality::Image {
        return Err(FuseError::ModalityMismatch {
            expected: Modality::Image,
            found: image.modality(),
        });
    }
    if text.dim() != TEXT_DIM {
        return Err(FuseError::DimensionMismatch {
            modality: Modality::Text,
            expected: TEXT_DIM,
            got: text.dim(),
        });
    }
    if image.dim() != IMAGE_DIM {
        return Err(FuseError::DimensionMismatch {
            modality: Modality::Image,
            expected: IMAGE_DIM,
            got: image.dim(),
        });
    }
    let mut values = Vec::with_capacity(FUSED_DIM);
    values.extend_from_slice(text.values());
    values.extend_from_slice(image.values());
    Ok(FusedVector { values })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingSetError {
    #[error("embedding for `{id}` has dimension {got}, expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate embedding id `{0}`")]
    DuplicateId(String),
}

/// A keyed collection of same-modality, same-dimension embeddings — the
/// in-memory form of an embedding cache file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSet {
    modality: Modality,
    dim: usize,
    entries: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingSet {
    pub fn new(modality: Modality, dim: usize) -> Self {
        EmbeddingSet {
            modality,
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f32>) -> Result<(), EmbeddingSetError> {
        let id = id.into();
        if values.len() != self.dim {
            return Err(EmbeddingSetError::DimensionMismatch {
                id,
                expected: self.dim,
                got: values.len(),
            });
        }
        if self.entries.contains_key(&id) {
            return Err(EmbeddingSetError::DuplicateId(id));
        }
        self.entries.insert(id, values);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn vector(&self, id: &str) -> Option<EmbeddingVector> {
        self.entries
            .get(id)
            .map(|v| EmbeddingVector::new(self.modality, v.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

//! Language codes covered by the pipeline.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six languages the pipeline covers. English is the reference language
/// every other language is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageCode {
    En,
    Es,
    Fr,
    Pt,
    Zh,
    Hi,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown language code `{0}` (expected one of en, es, fr, pt, zh, hi)")]
pub struct UnknownLanguage(pub String);

impl LanguageCode {
    /// All six languages, in canonical order.
    pub const ALL: [LanguageCode; 6] = [
        LanguageCode::En,
        LanguageCode::Es,
        LanguageCode::Fr,
        LanguageCode::Pt,
        LanguageCode::Zh,
        LanguageCode::Hi,
    ];

    /// The five translation targets.
    pub const NON_ENGLISH: [LanguageCode; 5] = [
        LanguageCode::Es,
        LanguageCode::Fr,
        LanguageCode::Pt,
        LanguageCode::Zh,
        LanguageCode::Hi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LanguageCode::En => "en",
            LanguageCode::Es => "es",
            LanguageCode::Fr => "fr",
            LanguageCode::Pt => "pt",
            LanguageCode::Zh => "zh",
            LanguageCode::Hi => "hi",
        }
    }

    /// Whether this is the reference language (English).
    pub fn is_reference(self) -> bool {
        self == LanguageCode::En
    }

    /// Position in the fixed pretraining-corpus-size order
    /// en > fr > es > pt > zh > hi (0 = largest corpus).
    ///
    /// Trend lines over languages are fit against this rank.
    pub fn corpus_rank(self) -> usize {
        match self {
            LanguageCode::En => 0,
            LanguageCode::Fr => 1,
            LanguageCode::Es => 2,
            LanguageCode::Pt => 3,
            LanguageCode::Zh => 4,
            LanguageCode::Hi => 5,
        }
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageCode {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(LanguageCode::En),
            "es" => Ok(LanguageCode::Es),
            "fr" => Ok(LanguageCode::Fr),
            "pt" => Ok(LanguageCode::Pt),
            "zh" => Ok(LanguageCode::Zh),
            "hi" => Ok(LanguageCode::Hi),
            other => Err(UnknownLanguage(String::from(other))),
        }
    }
}

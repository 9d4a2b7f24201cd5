//! Deterministic text cleaning applied before translation and encoding.
//!
//! Six rules run in a fixed order: strip URLs, strip emoticons, strip
//! platform tokens (a leading retweet marker and the mentions after it),
//! strip `@`/`#` symbols, expand negation contractions, collapse whitespace.
//! The pass is repeated until the text is stable, which makes the whole
//! operation idempotent even on inputs where one rule exposes material for
//! an earlier one.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

const DEFAULT_CONTRACTIONS: &str = include_str!("../data/contractions.tsv");
const DEFAULT_EMOTICONS: &str = include_str!("../data/emoticons.txt");

/// Codepoint ranges removed by the emoticon rule, alongside the ASCII
/// emoticon token list.
const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x1F1E6, 0x1F1FF), // regional indicators (flags)
    (0x1F300, 0x1F5FF), // symbols & pictographs
    (0x1F600, 0x1F64F), // emoticons
    (0x1F680, 0x1F6FF), // transport & map
    (0x1F900, 0x1F9FF), // supplemental symbols
    (0x1FA70, 0x1FAFF), // extended symbols
    (0x2600, 0x26FF),   // miscellaneous symbols
    (0x2700, 0x27BF),   // dingbats
    (0xFE00, 0xFE0F),   // variation selectors
    (0x200D, 0x200D),   // zero-width joiner
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CleanError {
    #[error("contraction table line {0}: expected `<form>\\t<expansion>`")]
    BadContractionLine(usize),
    #[error("contraction table is empty")]
    EmptyContractionTable,
}

/// The ordered cleaning rules together with their data tables.
///
/// The contraction table and the ASCII emoticon list are plain-text data
/// files; defaults are compiled in, and custom tables can be supplied via
/// [`CleaningRuleSet::from_tables`].
#[derive(Debug, Clone)]
pub struct CleaningRuleSet {
    contractions: BTreeMap<String, String>,
    emoticon_tokens: BTreeSet<String>,
}

impl Default for CleaningRuleSet {
    fn default() -> Self {
        CleaningRuleSet::from_tables(DEFAULT_CONTRACTIONS, DEFAULT_EMOTICONS)
            .expect("builtin tables are valid")
    }
}

impl CleaningRuleSet {
    /// Build a rule set from a tab-separated contraction table and a
    /// one-per-line emoticon list. Blank lines and `#` comments are ignored.
    pub fn from_tables(contractions_tsv: &str, emoticons: &str) -> Result<Self, CleanError> {
        let mut contractions = BTreeMap::new();
        for (lineno, line) in contractions_tsv.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (form, expansion) = line
                .split_once('\t')
                .ok_or(CleanError::BadContractionLine(lineno + 1))?;
            if form.is_empty() || expansion.is_empty() {
                return Err(CleanError::BadContractionLine(lineno + 1));
            }
            contractions.insert(form.to_lowercase(), expansion.to_owned());
        }
        if contractions.is_empty() {
            return Err(CleanError::EmptyContractionTable);
        }
        let emoticon_tokens = emoticons
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        Ok(CleaningRuleSet {
            contractions,
            emoticon_tokens,
        })
    }

    /// Apply the six cleaning rules. Idempotent: `clean(clean(s)) == clean(s)`.
    pub fn clean(&self, raw: &str) -> String {
        let mut current = self.clean_pass(raw);
        // Iterate to a fixed point: a pass can expose material for an earlier
        // rule (e.g. symbol stripping uncovering a URL prefix). Each changing
        // pass removes characters or resolves a contraction, so this
        // terminates quickly; the cap is belt and braces.
        for _ in 0..8 {
            let next = self.clean_pass(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn clean_pass(&self, raw: &str) -> String {
        let s = strip_urls(raw);
        let s = self.strip_emoticons(&s);
        let s = strip_platform_tokens(&s);
        let s = strip_symbols(&s);
        let s = self.expand_negations(&s);
        collapse_whitespace(&s)
    }

    fn strip_emoticons(&self, text: &str) -> String {
        let without_emoji: String = text
            .chars()
            .filter(|&c| {
                let cp = c as u32;
                !EMOJI_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp))
            })
            .collect();
        let tokens: Vec<&str> = without_emoji
            .split_whitespace()
            .filter(|t| !self.emoticon_tokens.contains(*t))
            .collect();
        tokens.join(" ")
    }

    fn expand_negations(&self, text: &str) -> String {
        let tokens: Vec<String> = text
            .split_whitespace()
            .map(|token| self.expand_token(token))
            .collect();
        tokens.join(" ")
    }

    fn expand_token(&self, token: &str) -> String {
        let (lead, core, trail) = split_punctuation(token);
        // Typographic apostrophes count as apostrophes for table lookup.
        let normalized: String = core.chars().map(|c| if c == '\u{2019}' { '\'' } else { c }).collect();
        let lower = normalized.to_lowercase();
        let Some(expansion) = self.contractions.get(&lower) else {
            return token.to_owned();
        };
        let adapted = adapt_case(&normalized, expansion);
        let mut out = String::with_capacity(lead.len() + adapted.len() + trail.len());
        out.push_str(lead);
        out.push_str(&adapted);
        out.push_str(trail);
        out
    }
}

/// Drop whitespace-delimited tokens that look like URLs: a scheme prefix or
/// a leading `www.`.
fn strip_urls(text: &str) -> String {
    let tokens: Vec<&str> = text
        .split_whitespace()
        .filter(|t| {
            let lower = t.to_lowercase();
            !(lower.starts_with("http://")
                || lower.starts_with("https://")
                || lower.starts_with("ftp://")
                || lower.starts_with("www."))
        })
        .collect();
    tokens.join(" ")
}

/// Drop a leading retweet marker and the mention tokens that follow it.
/// The marker comparison ignores `@`/`#` so symbol stripping cannot
/// resurrect a marker on a second pass.
fn strip_platform_tokens(text: &str) -> String {
    let mut tokens: Vec<&str> = text.split_whitespace().collect();
    let marker_core = |t: &str| -> String { t.chars().filter(|c| *c != '@' && *c != '#').collect() };
    if tokens.first().map(|t| marker_core(t) == "RT") == Some(true) {
        tokens.remove(0);
        while tokens.first().map(|t| t.starts_with('@')) == Some(true) {
            tokens.remove(0);
        }
    }
    tokens.join(" ")
}

/// Remove `@` and `#` characters, keeping the token that follows them.
fn strip_symbols(text: &str) -> String {
    text.chars().filter(|&c| c != '@' && c != '#').collect()
}

fn collapse_whitespace(text: &str) -> String {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    tokens.join(" ")
}

/// Split a token into leading punctuation, core, and trailing punctuation so
/// contraction lookup sees the bare word.
fn split_punctuation(token: &str) -> (&str, &str, &str) {
    let is_edge = |c: char| matches!(c, '.' | ',' | '!' | '?' | ';' | ':' | '"' | '(' | ')' | '[' | ']');
    let start = token
        .char_indices()
        .find(|(_, c)| !is_edge(*c))
        .map(|(i, _)| i)
        .unwrap_or(token.len());
    let trimmed = &token[start..];
    let end = trimmed
        .char_indices()
        .rev()
        .find(|(_, c)| !is_edge(*c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    (&token[..start], &trimmed[..end], &trimmed[end..])
}

/// Carry the case pattern of the matched form over to its expansion:
/// all-caps stays all-caps, a capitalized first letter stays capitalized.
fn adapt_case(original: &str, expansion: &str) -> String {
    let mut letters = original.chars().filter(|c| c.is_alphabetic());
    let first_upper = letters.next().map(|c| c.is_uppercase()).unwrap_or(false);
    let all_upper = first_upper
        && original
            .chars()
            .filter(|c| c.is_alphabetic())
            .all(|c| c.is_uppercase())
        && original.chars().filter(|c| c.is_alphabetic()).count() > 1;
    if all_upper {
        expansion.to_uppercase()
    } else if first_upper {
        let mut chars = expansion.chars();
        match chars.next() {
            Some(first) => {
                let mut out: String = first.to_uppercase().collect();
                out.push_str(chars.as_str());
                out
            }
            None => String::new(),
        }
    } else {
        expansion.to_owned()
    }
}

//! Expert expectations as regular expressions over solution encodings.
//!
//! A planner writes down what they expect good solutions to look like, e.g.
//! `C2B` ("customer 2 is served by bike") or `,D2\D` ("depot 2 is in use").
//! Each archived solution gets a confidence factor: the fraction of those
//! expectations its encoding matches. Confidence is for display only and is
//! never fed back into fitness.

pub mod regex;

use alloc::string::String;
use alloc::vec::Vec;

use crate::archive::BinKey;
pub use regex::{Regex, RegexError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern label is empty")]
    EmptyLabel,
    #[error("pattern {label:?}: {source}")]
    Regex { label: String, source: RegexError },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternEntry {
    label: String,
    regex: Regex,
}

impl PatternEntry {
    pub fn new(label: &str, pattern: &str) -> Result<Self, PatternError> {
        if label.trim().is_empty() {
            return Err(PatternError::EmptyLabel);
        }
        let regex = Regex::new(pattern).map_err(|source| PatternError::Regex {
            label: label.into(),
            source,
        })?;
        Ok(Self {
            label: label.into(),
            regex,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pattern(&self) -> &str {
        self.regex.as_str()
    }

    pub fn is_match(&self, encoding: &str) -> bool {
        self.regex.is_match(encoding)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PatternCatalogue {
    pub entries: Vec<PatternEntry>,
}

impl PatternCatalogue {
    pub fn new(entries: Vec<PatternEntry>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Entry `i` is true iff pattern `i` occurs anywhere in `encoding`.
pub fn match_solution(catalogue: &PatternCatalogue, encoding: &str) -> Vec<bool> {
    catalogue.entries.iter().map(|e| e.is_match(encoding)).collect()
}

fn fraction(matches: &[bool]) -> f64 {
    if matches.is_empty() {
        // no expectations, nothing violated
        return 1.0;
    }
    matches.iter().filter(|&&m| m).count() as f64 / matches.len() as f64
}

/// Share of catalogue entries the encoding matches; 1.0 for an empty catalogue.
pub fn confidence(catalogue: &PatternCatalogue, encoding: &str) -> f64 {
    fraction(&match_solution(catalogue, encoding))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Annotation {
    pub bin: BinKey,
    pub confidence: f64,
    pub matches: Vec<bool>,
}

impl Annotation {
    pub fn matched_labels<'c>(&self, catalogue: &'c PatternCatalogue) -> Vec<&'c str> {
        catalogue
            .entries
            .iter()
            .zip(&self.matches)
            .filter(|(_, &m)| m)
            .map(|(e, _)| e.label())
            .collect()
    }
}

/// Scores every `(bin, encoding)` pair against the catalogue.
pub fn annotate_archive<'a>(
    catalogue: &PatternCatalogue,
    cells: impl IntoIterator<Item = (BinKey, &'a str)>,
) -> Vec<Annotation> {
    cells
        .into_iter()
        .map(|(bin, encoding)| {
            let matches = match_solution(catalogue, encoding);
            Annotation {
                bin,
                confidence: fraction(&matches),
                matches,
            }
        })
        .collect()
}

/// Bins whose solution matches entry `entry`.
pub fn matching(annotations: &[Annotation], entry: usize) -> Vec<BinKey> {
    annotations.iter().filter(|a| a.matches[entry]).map(|a| a.bin).collect()
}

/// Bins whose solution does *not* match entry `entry`: the alternatives to
/// the planner's expectation.
pub fn complement(annotations: &[Annotation], entry: usize) -> Vec<BinKey> {
    annotations
        .iter()
        .filter(|a| !a.matches[entry])
        .map(|a| a.bin)
        .collect()
}

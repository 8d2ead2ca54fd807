//! Pattern catalogue files and the annotation export.
//!
//! A catalogue has one `label<TAB>regex` entry per line. Blank lines and
//! lines starting with `#` are ignored. Everything after the first tab is
//! the pattern, verbatim.

use std::io::Write;
use std::path::Path;

use mdelites_core::patterns::{Annotation, PatternCatalogue, PatternEntry};

use crate::error::{Error, Result};
use crate::numfmt::shortest;

pub fn parse_catalogue(text: &str, path: &Path) -> Result<PatternCatalogue> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Line {
            path: path.into(),
            line: i + 1,
            message,
        };
        let (label, pattern) = line
            .split_once('\t')
            .ok_or_else(|| err("expected `label<TAB>regex`".into()))?;
        entries.push(PatternEntry::new(label.trim(), pattern).map_err(|e| err(e.to_string()))?);
    }
    Ok(PatternCatalogue::new(entries))
}

pub fn read_catalogue(path: &Path) -> Result<PatternCatalogue> {
    let text = std::fs::read_to_string(path).map_err(Error::read(path))?;
    parse_catalogue(&text, path)
}

/// `bin,confidence,matched_labels`, labels joined with `;`.
pub fn write_annotations_csv<W: Write>(
    catalogue: &PatternCatalogue,
    annotations: &[Annotation],
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin", "confidence", "matched_labels"])?;
    for a in annotations {
        w.write_record([
            a.bin.to_string(),
            shortest(a.confidence),
            a.matched_labels(catalogue).join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cell counts by number of matched entries, `0..=catalogue.len()`.
pub fn match_histogram(catalogue: &PatternCatalogue, annotations: &[Annotation]) -> Vec<usize> {
    let mut counts = vec![0; catalogue.len() + 1];
    for a in annotations {
        counts[a.matches.iter().filter(|&&m| m).count()] += 1;
    }
    counts
}

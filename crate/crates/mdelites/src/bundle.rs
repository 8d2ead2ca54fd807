//! `map.json` (schema version 1): a run packaged for the visualiser.
//!
//! The bundle is rebuilt from the run directory: the log is replayed to
//! recover exact cell values and the chromosomes come from `archive.csv`,
//! which must agree with the replay. The JSON schema is
//! `schema/map.v1.schema.json` and is available as [`SCHEMA`].

use std::collections::BTreeMap;

use mdelites_core::archive::{ArchiveConfig, DIMENSIONS};
use mdelites_core::history::ReplayError;
use mdelites_core::patterns::{annotate_archive, PatternCatalogue};
use mdelites_core::{replay, BinKey, Characteristics, Chromosome, HistoryRecord};
use serde::{Deserialize, Serialize};

use crate::archive_csv::ArchiveRow;
use crate::manifest::RunManifest;
use crate::numfmt::significant;

pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA: &str = include_str!("../schema/map.v1.schema.json");

const UNITS: [&str; DIMENSIONS] = ["count", "g CO2", "km", "h"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapBundle {
    pub schema_version: u32,
    /// The run manifest without its wall time, so bundles are reproducible.
    pub manifest: RunManifest,
    pub axes: Vec<Axis>,
    pub cells: Vec<Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalogue: Option<Vec<CatalogueEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Vec<CellAnnotation>>,
    /// Every logged change, grouped by bin.
    pub timelines: BTreeMap<BinKey, Vec<TimelineEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub bin: BinKey,
    pub characteristics: Characteristics,
    pub fitness: f64,
    pub encoding: String,
    pub updates: u32,
    pub last_update_time: u64,
    pub chromosome: Chromosome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogueEntry {
    pub label: String,
    pub pattern: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellAnnotation {
    pub bin: BinKey,
    pub confidence: f64,
    /// One flag per catalogue entry, in catalogue order.
    pub matches: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEntry {
    pub time: u64,
    /// `-`, `a:b:c:d` or `a:b:c:d/e:f:g:h`.
    pub origin: String,
    pub updates: u32,
    pub fitness: f64,
    pub characteristics: Characteristics,
    pub encoding: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error(transparent)]
    Config(#[from] mdelites_core::archive::ConfigError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("archive.csv disagrees with the log: {0}")]
    Mismatch(String),
}

pub fn build_bundle(
    manifest: &RunManifest,
    records: &[HistoryRecord],
    rows: &[ArchiveRow],
    catalogue: Option<&PatternCatalogue>,
) -> Result<MapBundle, BundleError> {
    let config = ArchiveConfig::new(manifest.config.scale, manifest.bounds)?;
    let archive = replay(records, config)?;

    let mut by_bin: BTreeMap<BinKey, &ArchiveRow> = BTreeMap::new();
    for row in rows {
        if by_bin.insert(row.bin, row).is_some() {
            return Err(BundleError::Mismatch(format!("bin {} listed twice", row.bin)));
        }
    }
    if by_bin.len() != archive.len() {
        return Err(BundleError::Mismatch(format!(
            "{} rows for {} occupied bins",
            by_bin.len(),
            archive.len()
        )));
    }
    let mut cells = Vec::with_capacity(archive.len());
    for cell in archive.snapshot() {
        let row = by_bin
            .get(&cell.key)
            .ok_or_else(|| BundleError::Mismatch(format!("bin {} missing", cell.key)))?;
        let same_fitness = significant(row.fitness, 6) == significant(cell.fitness(), 6);
        if row.updates != cell.updates || row.encoding != cell.encoding || !same_fitness {
            return Err(BundleError::Mismatch(format!("bin {} differs", cell.key)));
        }
        cells.push(Cell {
            bin: cell.key,
            characteristics: cell.evaluation.characteristics,
            fitness: cell.fitness(),
            encoding: cell.encoding.clone(),
            updates: cell.updates,
            last_update_time: cell.last_update_time,
            chromosome: row.chromosome.clone(),
        });
    }

    let mut timelines: BTreeMap<BinKey, Vec<TimelineEntry>> = BTreeMap::new();
    for r in records {
        timelines.entry(r.bin).or_default().push(TimelineEntry {
            time: r.time,
            origin: r.origin.to_string(),
            updates: r.updates,
            fitness: r.fitness,
            characteristics: r.characteristics,
            encoding: r.encoding.clone(),
        });
    }

    let (catalogue, annotations) = match catalogue {
        None => (None, None),
        Some(cat) => {
            let entries = cat
                .entries
                .iter()
                .map(|e| CatalogueEntry {
                    label: e.label().into(),
                    pattern: e.pattern().into(),
                })
                .collect();
            let annotations = annotate_archive(cat, cells.iter().map(|c| (c.bin, c.encoding.as_str())))
                .into_iter()
                .map(|a| CellAnnotation {
                    bin: a.bin,
                    confidence: a.confidence,
                    matches: a.matches,
                })
                .collect();
            (Some(entries), Some(annotations))
        }
    };

    let axes = Characteristics::NAMES
        .iter()
        .zip(UNITS)
        .zip(manifest.bounds)
        .map(|((name, unit), b)| Axis {
            name: (*name).into(),
            unit: unit.into(),
            lo: b.lo,
            hi: b.hi,
        })
        .collect();

    Ok(MapBundle {
        schema_version: SCHEMA_VERSION,
        manifest: RunManifest {
            wall_time_seconds: None,
            ..manifest.clone()
        },
        axes,
        cells,
        catalogue,
        annotations,
        timelines,
    })
}

impl MapBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }
}

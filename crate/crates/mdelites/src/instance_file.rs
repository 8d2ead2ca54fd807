//! The instance JSON format (`"schema": 1`).
//!
//! ```json
//! { "schema": 1,
//!   "origin": {"x": 0, "y": 0},
//!   "customers": [{"id": 1, "x": 1.5, "y": 2.0, "demand": 2}],
//!   "depots": [{"id": 1, "x": 1.0, "y": 1.0}],
//!   "modes": [{"name": "VAN", "letter": "V", "speed": 30, "emission_rate": 180,
//!              "fixed_cost": 50, "cost_per_km": 0.5, "capacity": 200}] }
//! ```
//!
//! `demand` defaults to 1 and `max_range` (km) to unbounded.

use std::fs;
use std::path::Path;

use mdelites_core::instance::{CourierMode, Customer, MicroDepot, ModeKind, Point, ProblemInstance};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    pub origin: Xy,
    pub customers: Vec<CustomerRow>,
    pub depots: Vec<DepotRow>,
    pub modes: Vec<ModeRow>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Xy {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerRow {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepotRow {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRow {
    pub name: String,
    pub letter: String,
    pub speed: f64,
    pub emission_rate: f64,
    pub fixed_cost: f64,
    pub cost_per_km: f64,
    pub capacity: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_range: Option<f64>,
}

impl From<&CourierMode> for ModeRow {
    fn from(m: &CourierMode) -> Self {
        Self {
            name: m.kind.name().into(),
            letter: m.letter().to_string(),
            speed: m.speed,
            emission_rate: m.emission_rate,
            fixed_cost: m.fixed_cost,
            cost_per_km: m.cost_per_km,
            capacity: m.capacity,
            max_range: m.max_range,
        }
    }
}

/// A validated instance together with where it came from.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub instance: ProblemInstance,
    /// File name without directories.
    pub name: String,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

impl InstanceFile {
    pub fn into_instance(self) -> std::result::Result<ProblemInstance, String> {
        if self.schema != SCHEMA_VERSION {
            return Err(format!(
                "schema: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema
            ));
        }
        let mut modes = Vec::with_capacity(self.modes.len());
        for (i, row) in self.modes.into_iter().enumerate() {
            let kind = ModeKind::from_name(&row.name)
                .ok_or_else(|| format!("modes[{i}].name: unknown mode {:?}", row.name))?;
            let mut letters = row.letter.chars();
            let letter = match (letters.next(), letters.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(format!(
                        "modes[{i}].letter: expected one character, got {:?}",
                        row.letter
                    ))
                }
            };
            match ModeKind::from_letter(letter) {
                Some(k) if k == kind => {}
                Some(_) => return Err(format!("modes[{i}].letter: {letter:?} does not belong to {kind}")),
                None => return Err(format!("modes[{i}].letter: unknown mode letter {letter:?}")),
            }
            modes.push(CourierMode {
                kind,
                speed: row.speed,
                emission_rate: row.emission_rate,
                fixed_cost: row.fixed_cost,
                cost_per_km: row.cost_per_km,
                capacity: row.capacity,
                max_range: row.max_range,
            });
        }
        let customers = self
            .customers
            .into_iter()
            .map(|c| Customer {
                id: c.id,
                location: Point::new(c.x, c.y),
                demand: c.demand.unwrap_or(1),
            })
            .collect();
        let depots = self
            .depots
            .into_iter()
            .map(|d| MicroDepot {
                id: d.id,
                location: Point::new(d.x, d.y),
            })
            .collect();
        ProblemInstance::new(customers, depots, modes, Point::new(self.origin.x, self.origin.y))
            .map_err(|e| e.to_string())
    }
}

pub fn parse_instance(text: &str, path: &Path) -> Result<ProblemInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    file.into_instance().map_err(|message| Error::Invalid {
        path: path.into(),
        message,
    })
}

/// Reads, validates and builds the grand tour of an instance file.
pub fn load_instance(path: &Path) -> Result<LoadedInstance> {
    let bytes = fs::read(path).map_err(Error::read(path))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Invalid {
        path: path.into(),
        message: format!("not UTF-8: {e}"),
    })?;
    let instance = parse_instance(text, path)?;
    Ok(LoadedInstance {
        instance,
        name: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

//! `manifest.json`: everything needed to repeat a run.

use std::path::Path;

use mdelites_core::archive::{Interval, DIMENSIONS};
use mdelites_core::solver::RunStats;
use mdelites_core::{BoundsPolicy, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance_file::LoadedInstance;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: ConfigEcho,
    /// Bounds actually used, one per characteristic.
    pub bounds: [Interval; DIMENSIONS],
    pub instance: InstanceInfo,
    /// Unit of the `time` column of the log.
    pub time_unit: String,
    pub stats: RunStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub evaluations: u64,
    pub init_population: u64,
    pub crossover_rate: f64,
    pub scale: u16,
    pub bounds_policy: BoundsPolicy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceInfo {
    pub name: String,
    pub sha256: String,
    pub customers: usize,
    pub depots: usize,
}

impl RunManifest {
    pub fn new(
        config: &SolverConfig,
        bounds: [Interval; DIMENSIONS],
        instance: &LoadedInstance,
        stats: RunStats,
        wall_time_seconds: Option<f64>,
    ) -> Self {
        Self {
            tool: TOOL.into(),
            tool_version: VERSION.into(),
            seed: config.seed,
            config: ConfigEcho {
                evaluations: config.evaluations,
                init_population: config.init_population,
                crossover_rate: config.crossover_rate,
                scale: config.scale,
                bounds_policy: config.bounds.clone(),
            },
            bounds,
            instance: InstanceInfo {
                name: instance.name.clone(),
                sha256: instance.sha256.clone(),
                customers: instance.instance.customers().len(),
                depots: instance.instance.depots().len(),
            },
            time_unit: "evaluations".into(),
            stats,
            wall_time_seconds,
        }
    }

    /// The solver configuration that reproduces this run.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            evaluations: self.config.evaluations,
            init_population: self.config.init_population,
            crossover_rate: self.config.crossover_rate,
            scale: self.config.scale,
            bounds: BoundsPolicy::Fixed(self.bounds),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(Error::read(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}

//! The elite archive: one cheapest-known solution per bin.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::evaluate::{Characteristics, Evaluation};
use crate::genome::Chromosome;
use crate::history::{HistoryRecord, Origin};

/// Number of archive dimensions (couriers, emissions, distance, time span).
pub const DIMENSIONS: usize = Characteristics::DIMENSIONS;

pub const DEFAULT_SCALE: u16 = 20;

/// `s^d`, saturating at `u64::MAX`.
pub fn bin_count(scale: u16, dimensions: u32) -> u64 {
    (scale as u64).saturating_pow(dimensions)
}

/// A closed interval `[lo, hi]` used to normalise one characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// 1-based bin index of `v` among `scale` equal-width bins, clamped to
    /// `[1, scale]`. `hi` itself lands in the top bin; NaN lands in bin 1.
    pub fn index(&self, scale: u16, v: f64) -> u16 {
        let t = scale as f64 * (v - self.lo) / (self.hi - self.lo);
        let raw = libm::floor(t);
        if raw.is_nan() || raw < 0.0 {
            1
        } else if raw >= (scale - 1) as f64 {
            scale
        } else {
            raw as u16 + 1
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("scale must be at least 2, got {0}")]
    ScaleTooSmall(u16),
    #[error("bounds for {dimension}: need finite lo < hi, got [{lo}, {hi}]")]
    BadBounds { dimension: &'static str, lo: f64, hi: f64 },
}

/// Grid resolution and normalisation bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveConfig {
    /// Points per scale (`s`).
    pub scale: u16,
    /// Per-dimension bounds in (couriers, emissions, distance, time) order.
    pub bounds: [Interval; DIMENSIONS],
}

impl ArchiveConfig {
    pub fn new(scale: u16, bounds: [Interval; DIMENSIONS]) -> Result<Self, ConfigError> {
        if scale < 2 {
            return Err(ConfigError::ScaleTooSmall(scale));
        }
        for (b, dimension) in bounds.iter().zip(Characteristics::NAMES) {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                return Err(ConfigError::BadBounds {
                    dimension,
                    lo: b.lo,
                    hi: b.hi,
                });
            }
        }
        Ok(Self { scale, bounds })
    }

    pub fn bin_count(&self) -> u64 {
        bin_count(self.scale, DIMENSIONS as u32)
    }

    pub fn bin_key(&self, c: &Characteristics) -> BinKey {
        let v = c.as_array();
        let mut idx = [0u16; DIMENSIONS];
        for d in 0..DIMENSIONS {
            idx[d] = self.bounds[d].index(self.scale, v[d]);
        }
        BinKey(idx)
    }
}

/// Archive cell coordinates, each in `1..=scale`, written `a:b:c:d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BinKey(pub [u16; DIMENSIONS]);

impl BinKey {
    /// Parses `a:b:c:d` and checks each component is in `1..=scale`.
    pub fn parse_in_range(s: &str, scale: u16) -> Result<Self, BinKeyError> {
        let key: BinKey = s.parse()?;
        if key.0.iter().any(|&i| i == 0 || i > scale) {
            return Err(BinKeyError::OutOfRange { key, scale });
        }
        Ok(key)
    }
}

impl fmt::Display for BinKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}:{b}:{c}:{d}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BinKeyError {
    #[error("bin key {0:?}: expected four ':'-separated integers")]
    Format(String),
    #[error("bin key {key}: components must lie in 1..={scale}")]
    OutOfRange { key: BinKey, scale: u16 },
}

impl FromStr for BinKey {
    type Err = BinKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BinKeyError::Format(s.into());
        let mut idx = [0u16; DIMENSIONS];
        let mut parts = s.split(':');
        for slot in &mut idx {
            let part = parts.next().ok_or_else(bad)?;
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            *slot = part.parse().map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(BinKey(idx))
    }
}

impl From<BinKey> for String {
    fn from(k: BinKey) -> String {
        alloc::format!("{k}")
    }
}

impl TryFrom<String> for BinKey {
    type Error = BinKeyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// An occupied bin. `P` is the stored genotype; archives rebuilt from a log
/// carry no genotype and use `()`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveCell<P = Chromosome> {
    pub key: BinKey,
    pub chromosome: P,
    pub evaluation: Evaluation,
    pub encoding: String,
    /// Replacements since the bin was first filled.
    pub updates: u32,
    /// Evaluation counter at the last change.
    pub last_update_time: u64,
}

impl<P> ArchiveCell<P> {
    pub fn fitness(&self) -> f64 {
        self.evaluation.fitness
    }

    /// The same cell without its genotype.
    pub fn summary(&self) -> ArchiveCell<()> {
        ArchiveCell {
            key: self.key,
            chromosome: (),
            evaluation: self.evaluation,
            encoding: self.encoding.clone(),
            updates: self.updates,
            last_update_time: self.last_update_time,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OfferOutcome {
    Inserted(HistoryRecord),
    Replaced {
        previous_fitness: f64,
        record: HistoryRecord,
    },
    Rejected,
}

impl OfferOutcome {
    pub fn record(&self) -> Option<&HistoryRecord> {
        match self {
            OfferOutcome::Inserted(r) | OfferOutcome::Replaced { record: r, .. } => Some(r),
            OfferOutcome::Rejected => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        !matches!(self, OfferOutcome::Rejected)
    }
}

#[derive(Clone, Debug)]
pub struct Archive<P = Chromosome> {
    config: ArchiveConfig,
    cells: BTreeMap<BinKey, ArchiveCell<P>>,
    /// Occupied keys in first-occupancy order; parent selection indexes this.
    occupied: Vec<BinKey>,
    eval_counter: u64,
}

impl<P> Archive<P> {
    pub fn new(config: ArchiveConfig) -> Self {
        Self {
            config,
            cells: BTreeMap::new(),
            occupied: Vec::new(),
            eval_counter: 0,
        }
    }

    pub fn config(&self) -> &ArchiveConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn eval_counter(&self) -> u64 {
        self.eval_counter
    }

    /// Counts one evaluation and returns the new counter value, which is the
    /// timestamp the next offer will carry.
    pub fn tick(&mut self) -> u64 {
        self.eval_counter += 1;
        self.eval_counter
    }

    pub(crate) fn set_eval_counter(&mut self, t: u64) {
        self.eval_counter = t;
    }

    pub fn get(&self, key: &BinKey) -> Option<&ArchiveCell<P>> {
        self.cells.get(key)
    }

    /// The `i`-th occupied bin in first-occupancy order.
    pub fn occupied_at(&self, i: usize) -> Option<&ArchiveCell<P>> {
        self.occupied.get(i).and_then(|k| self.cells.get(k))
    }

    /// All cells in ascending key order.
    pub fn snapshot(&self) -> Vec<&ArchiveCell<P>> {
        self.cells.values().collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = &ArchiveCell<P>> {
        self.cells.values()
    }

    pub fn best(&self) -> Option<&ArchiveCell<P>> {
        self.cells.values().min_by(|a, b| a.fitness().total_cmp(&b.fitness()))
    }

    /// Genotype-free view of every cell, keyed by bin.
    pub fn summary(&self) -> BTreeMap<BinKey, ArchiveCell<()>> {
        self.cells.iter().map(|(k, c)| (*k, c.summary())).collect()
    }

    /// Places a candidate. An empty bin takes it; an occupied bin takes it
    /// only on a strict fitness improvement. Non-finite fitness is rejected.
    /// The update time is the current evaluation counter.
    pub fn offer(&mut self, chromosome: P, evaluation: Evaluation, encoding: String, origin: Origin) -> OfferOutcome {
        if !evaluation.is_feasible() {
            return OfferOutcome::Rejected;
        }
        let key = self.config.bin_key(&evaluation.characteristics);
        self.place(key, chromosome, evaluation, encoding, origin)
    }

    fn place(
        &mut self,
        key: BinKey,
        chromosome: P,
        evaluation: Evaluation,
        encoding: String,
        origin: Origin,
    ) -> OfferOutcome {
        let time = self.eval_counter;
        let make_record = |updates: u32, encoding: &str| HistoryRecord {
            time,
            bin: key,
            origin,
            updates,
            fitness: evaluation.fitness,
            characteristics: evaluation.characteristics,
            encoding: encoding.into(),
        };
        match self.cells.get_mut(&key) {
            None => {
                let record = make_record(0, &encoding);
                self.cells.insert(
                    key,
                    ArchiveCell {
                        key,
                        chromosome,
                        evaluation,
                        encoding,
                        updates: 0,
                        last_update_time: time,
                    },
                );
                self.occupied.push(key);
                OfferOutcome::Inserted(record)
            }
            Some(cell) if evaluation.fitness < cell.evaluation.fitness => {
                let previous_fitness = cell.evaluation.fitness;
                let record = make_record(cell.updates + 1, &encoding);
                cell.chromosome = chromosome;
                cell.evaluation = evaluation;
                cell.encoding = encoding;
                cell.updates += 1;
                cell.last_update_time = time;
                OfferOutcome::Replaced {
                    previous_fitness,
                    record,
                }
            }
            Some(_) => OfferOutcome::Rejected,
        }
    }
}

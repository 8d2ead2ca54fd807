//! Append-only record of archive changes and per-bin timelines.
//!
//! Every accepted offer produces one [`HistoryRecord`]. The records describe
//! the history of a *cell* (who occupied it, when, and which bins the
//! occupant's parents came from), not the lineage of a solution.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::archive::{Archive, ArchiveConfig, BinKey, BinKeyError};
use crate::evaluate::{Characteristics, Evaluation};

/// How the occupant of a bin was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Random initial individual.
    Seed,
    /// Copy of the elite in the given bin, then mutated.
    CloneMutate(BinKey),
    /// Crossover of the elites in two bins, then mutated.
    CrossoverMutate(BinKey, BinKey),
}

impl Origin {
    pub fn parents(&self) -> Vec<BinKey> {
        match *self {
            Origin::Seed => Vec::new(),
            Origin::CloneMutate(a) => alloc::vec![a],
            Origin::CrossoverMutate(a, b) => alloc::vec![a, b],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Origin::Seed => "SEED",
            Origin::CloneMutate(_) => "CLONE_MUTATE",
            Origin::CrossoverMutate(..) => "CROSSOVER_MUTATE",
        }
    }
}

/// `-`, `a:b:c:d` or `a:b:c:d/e:f:g:h`.
impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Seed => f.write_str("-"),
            Origin::CloneMutate(a) => write!(f, "{a}"),
            Origin::CrossoverMutate(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

impl FromStr for Origin {
    type Err = BinKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(Origin::Seed);
        }
        match s.split_once('/') {
            Some((a, b)) => Ok(Origin::CrossoverMutate(a.parse()?, b.parse()?)),
            None => Ok(Origin::CloneMutate(s.parse()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRecord {
    /// Evaluation counter when the change happened.
    pub time: u64,
    pub bin: BinKey,
    pub origin: Origin,
    /// Replacement count of the bin after this change.
    pub updates: u32,
    pub fitness: f64,
    pub characteristics: Characteristics,
    pub encoding: String,
}

/// Destination for history records as the search produces them.
pub trait HistorySink {
    type Error;

    fn record(&mut self, record: &HistoryRecord) -> Result<(), Self::Error>;
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HistoryError {
    #[error("record time {got} is not after the previous record's time {last}")]
    OutOfOrder { last: u64, got: u64 },
}

/// In-memory log enforcing strictly increasing record times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HistoryLog {
    records: Vec<HistoryRecord>,
}

impl HistoryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&mut self, record: HistoryRecord) -> Result<(), HistoryError> {
        if let Some(last) = self.records.last() {
            if record.time <= last.time {
                return Err(HistoryError::OutOfOrder {
                    last: last.time,
                    got: record.time,
                });
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Every record for `bin`, oldest first.
    pub fn bin_timeline(&self, bin: BinKey) -> Vec<&HistoryRecord> {
        bin_timeline(&self.records, bin)
    }

    pub fn into_records(self) -> Vec<HistoryRecord> {
        self.records
    }
}

impl HistorySink for HistoryLog {
    type Error = HistoryError;

    fn record(&mut self, record: &HistoryRecord) -> Result<(), HistoryError> {
        self.append(record.clone())
    }
}

pub fn bin_timeline(records: &[HistoryRecord], bin: BinKey) -> Vec<&HistoryRecord> {
    records.iter().filter(|r| r.bin == bin).collect()
}

/// Why a sequence of records cannot be replayed. `index` is 0-based.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("record {index}: time {time} is not after the previous record")]
    OutOfOrder { index: usize, time: u64 },
    #[error("record {index}: characteristics map to bin {computed}, not the logged {logged}")]
    KeyMismatch {
        index: usize,
        logged: BinKey,
        computed: BinKey,
    },
    #[error("record {index}: fitness {fitness} does not improve on {incumbent} in bin {bin}")]
    NotAnImprovement {
        index: usize,
        bin: BinKey,
        fitness: f64,
        incumbent: f64,
    },
    #[error("record {index}: updates {got} in bin {bin}, expected {expected}")]
    UpdatesMismatch {
        index: usize,
        bin: BinKey,
        got: u32,
        expected: u32,
    },
    #[error("record {index}: fitness is not finite")]
    NonFinite { index: usize },
}

impl ReplayError {
    /// Position of the offending record.
    pub fn index(&self) -> usize {
        match *self {
            ReplayError::OutOfOrder { index, .. }
            | ReplayError::KeyMismatch { index, .. }
            | ReplayError::NotAnImprovement { index, .. }
            | ReplayError::UpdatesMismatch { index, .. }
            | ReplayError::NonFinite { index } => index,
        }
    }
}

/// Rebuilds the archive state implied by a log. Every record is checked
/// against the archive rules: times increase, the logged bin is the one the
/// characteristics map to, and each change is a strict improvement with the
/// next updates count.
pub fn replay(records: &[HistoryRecord], config: ArchiveConfig) -> Result<Archive<()>, ReplayError> {
    let mut archive = Archive::new(config);
    let mut last_time = 0;
    for (index, r) in records.iter().enumerate() {
        if index > 0 && r.time <= last_time {
            return Err(ReplayError::OutOfOrder { index, time: r.time });
        }
        last_time = r.time;
        if !r.fitness.is_finite() {
            return Err(ReplayError::NonFinite { index });
        }
        let computed = archive.config().bin_key(&r.characteristics);
        if computed != r.bin {
            return Err(ReplayError::KeyMismatch {
                index,
                logged: r.bin,
                computed,
            });
        }
        let expected = match archive.get(&r.bin) {
            None => 0,
            Some(cell) => {
                if r.fitness >= cell.fitness() {
                    return Err(ReplayError::NotAnImprovement {
                        index,
                        bin: r.bin,
                        fitness: r.fitness,
                        incumbent: cell.fitness(),
                    });
                }
                cell.updates + 1
            }
        };
        if r.updates != expected {
            return Err(ReplayError::UpdatesMismatch {
                index,
                bin: r.bin,
                got: r.updates,
                expected,
            });
        }
        archive.set_eval_counter(r.time);
        let evaluation = Evaluation {
            characteristics: r.characteristics,
            fitness: r.fitness,
        };
        let outcome = archive.offer((), evaluation, r.encoding.clone(), r.origin);
        debug_assert!(outcome.is_accepted());
    }
    Ok(archive)
}

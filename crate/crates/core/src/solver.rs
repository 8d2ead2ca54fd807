//! The MAP-Elites loop.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::archive::{Archive, ArchiveConfig, ConfigError, Interval, DEFAULT_SCALE, DIMENSIONS};
use crate::evaluate::{evaluate, Evaluation};
use crate::genome::{decode, encode_solution, mutate, random_chromosome, recombine, Chromosome};
use crate::history::{HistorySink, Origin};
use crate::instance::ProblemInstance;
use crate::rng::{calibration_rng, search_rng, Draw};

/// Where the normalisation bounds come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsPolicy {
    Fixed([Interval; DIMENSIONS]),
    /// Evaluate `samples` random chromosomes and take the observed range per
    /// dimension, padded by `margin` of its width on each side.
    Calibrate {
        samples: usize,
        margin: f64,
    },
}

impl Default for BoundsPolicy {
    fn default() -> Self {
        BoundsPolicy::Calibrate {
            samples: 1000,
            margin: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    /// Total evaluation budget, seeding included.
    pub evaluations: u64,
    pub init_population: u64,
    pub crossover_rate: f64,
    pub scale: u16,
    pub bounds: BoundsPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            evaluations: 10_000,
            init_population: 100,
            crossover_rate: 0.5,
            scale: DEFAULT_SCALE,
            bounds: BoundsPolicy::default(),
        }
    }
}

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum SolverError<E> {
    #[error("budget below init population ({evaluations} < {init_population})")]
    BudgetBelowInit { evaluations: u64, init_population: u64 },
    #[error("crossover rate must lie in [0, 1], got {0}")]
    BadRate(f64),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("calibration produced no feasible solution")]
    CalibrationFailed,
    #[error("history sink failed: {0}")]
    Sink(E),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub evaluations: u64,
    pub accepted: u64,
    pub infeasible: u64,
    /// Best fitness in the archive once seeding finished.
    pub seed_best_fitness: Option<f64>,
    pub best_fitness: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub archive: Archive,
    pub stats: RunStats,
}

impl RunOutcome {
    /// The archive configuration with the bounds actually used.
    pub fn archive_config(&self) -> &ArchiveConfig {
        self.archive.config()
    }
}

/// Decodes, evaluates and encodes a chromosome.
pub fn assess(instance: &ProblemInstance, chrom: &Chromosome) -> (Evaluation, String) {
    let sol = decode(instance, chrom).expect("operators only produce well-formed genes");
    (evaluate(instance, &sol), encode_solution(&sol))
}

/// Observed per-dimension range over `samples` random chromosomes, each side
/// padded by `margin` times the range. A degenerate range is padded by 0.5.
pub fn calibrate_bounds(
    instance: &ProblemInstance,
    seed: u64,
    samples: usize,
    margin: f64,
) -> Option<[Interval; DIMENSIONS]> {
    let mut rng = calibration_rng(seed);
    let mut lo = [f64::INFINITY; DIMENSIONS];
    let mut hi = [f64::NEG_INFINITY; DIMENSIONS];
    let mut any = false;
    for _ in 0..samples {
        let chrom = random_chromosome(instance, &mut rng);
        let (ev, _) = assess(instance, &chrom);
        if !ev.is_feasible() {
            continue;
        }
        any = true;
        for (d, v) in ev.characteristics.as_array().into_iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    if !any {
        return None;
    }
    Some(core::array::from_fn(|d| {
        let width = hi[d] - lo[d];
        let pad = if width > 0.0 { margin * width } else { 0.5 };
        Interval::new(lo[d] - pad, hi[d] + pad)
    }))
}

/// Runs MAP-Elites on `instance`, sending every archive change to `sink`.
///
/// Seeding evaluates `init_population` random chromosomes. After that each
/// step picks a parent uniformly from the occupied bins and, with probability
/// `crossover_rate`, a second one; the child is the mutated crossover of the
/// two, or a mutated clone of the first.
pub fn run<S: HistorySink>(
    instance: &ProblemInstance,
    config: &SolverConfig,
    sink: &mut S,
) -> Result<RunOutcome, SolverError<S::Error>> {
    if config.evaluations < config.init_population {
        return Err(SolverError::BudgetBelowInit {
            evaluations: config.evaluations,
            init_population: config.init_population,
        });
    }
    if !(0.0..=1.0).contains(&config.crossover_rate) {
        return Err(SolverError::BadRate(config.crossover_rate));
    }
    let bounds = match &config.bounds {
        BoundsPolicy::Fixed(b) => *b,
        BoundsPolicy::Calibrate { samples, margin } => {
            calibrate_bounds(instance, config.seed, *samples, *margin).ok_or(SolverError::CalibrationFailed)?
        }
    };
    let mut archive = Archive::new(ArchiveConfig::new(config.scale, bounds)?);
    let mut rng = search_rng(config.seed);
    let mut stats = RunStats::default();

    let mut submit = |archive: &mut Archive, chrom: Chromosome, origin: Origin, stats: &mut RunStats| {
        archive.tick();
        let (ev, encoding) = assess(instance, &chrom);
        if !ev.is_feasible() {
            stats.infeasible += 1;
            return Ok(());
        }
        match archive.offer(chrom, ev, encoding, origin).record() {
            Some(rec) => {
                stats.accepted += 1;
                sink.record(rec).map_err(SolverError::Sink)
            }
            None => Ok(()),
        }
    };

    for _ in 0..config.init_population {
        let chrom = random_chromosome(instance, &mut rng);
        submit(&mut archive, chrom, Origin::Seed, &mut stats)?;
    }
    stats.seed_best_fitness = archive.best().map(|c| c.fitness());

    while archive.eval_counter() < config.evaluations {
        if archive.is_empty() {
            let chrom = random_chromosome(instance, &mut rng);
            submit(&mut archive, chrom, Origin::Seed, &mut stats)?;
            continue;
        }
        let a = archive.occupied_at(rng.index(archive.len())).expect("index below len");
        let (child, origin) = if rng.chance(config.crossover_rate) {
            let b = archive.occupied_at(rng.index(archive.len())).expect("index below len");
            let mixed = recombine(&a.chromosome, &b.chromosome, &mut rng);
            (mutate(mixed, instance, &mut rng), Origin::CrossoverMutate(a.key, b.key))
        } else {
            let key = a.key;
            (
                mutate(a.chromosome.clone(), instance, &mut rng),
                Origin::CloneMutate(key),
            )
        };
        submit(&mut archive, child, origin, &mut stats)?;
    }

    stats.evaluations = archive.eval_counter();
    stats.best_fitness = archive.best().map(|c| c.fitness());
    Ok(RunOutcome { archive, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{replay, HistoryLog};
    use crate::instance::fixtures::line;
    use alloc::collections::BTreeSet;

    fn small(seed: u64, evaluations: u64) -> SolverConfig {
        SolverConfig {
            seed,
            evaluations,
            init_population: 50,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn budget_below_init_is_rejected() {
        let cfg = SolverConfig {
            evaluations: 10,
            init_population: 100,
            ..SolverConfig::default()
        };
        let err = run(&line(8), &cfg, &mut HistoryLog::new()).unwrap_err();
        assert!(matches!(err, SolverError::BudgetBelowInit { .. }));
        assert!(alloc::format!("{err}").contains("budget below init population"));
    }

    #[test]
    fn seeding_only_run_is_all_seed_records() {
        let mut log = HistoryLog::new();
        let out = run(&line(12), &small(3, 50), &mut log).unwrap();
        assert_eq!(out.stats.evaluations, 50);
        assert!(!log.is_empty());
        assert!(log.records().iter().all(|r| r.origin == Origin::Seed));
    }

    #[test]
    fn no_crossover_means_clone_origins() {
        let mut log = HistoryLog::new();
        let cfg = SolverConfig {
            crossover_rate: 0.0,
            ..small(4, 2000)
        };
        run(&line(15), &cfg, &mut log).unwrap();
        let later: alloc::vec::Vec<_> = log.records().iter().filter(|r| r.time > 50).collect();
        assert!(!later.is_empty());
        assert!(later.iter().all(|r| matches!(r.origin, Origin::CloneMutate(_))));
    }

    #[test]
    fn same_seed_same_log() {
        let inst = line(15);
        let mut a = HistoryLog::new();
        let mut b = HistoryLog::new();
        run(&inst, &small(9, 3000), &mut a).unwrap();
        run(&inst, &small(9, 3000), &mut b).unwrap();
        assert_eq!(a, b);
        let mut c = HistoryLog::new();
        run(&inst, &small(10, 3000), &mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn replay_reproduces_final_archive() {
        let inst = line(15);
        let mut log = HistoryLog::new();
        let out = run(&inst, &small(21, 5000), &mut log).unwrap();
        let rebuilt = replay(log.records(), out.archive.config().clone()).unwrap();
        assert_eq!(rebuilt.summary(), out.archive.summary());
    }

    #[test]
    fn parents_were_occupied_when_used() {
        let inst = line(15);
        let mut log = HistoryLog::new();
        run(&inst, &small(5, 4000), &mut log).unwrap();
        let mut occupied = BTreeSet::new();
        for r in log.records() {
            for p in r.origin.parents() {
                assert!(occupied.contains(&p), "parent {p} unoccupied at {}", r.time);
            }
            occupied.insert(r.bin);
        }
    }

    #[test]
    fn explicit_bounds_are_used_verbatim() {
        let bounds = [
            Interval::new(0.0, 6.0),
            Interval::new(0.0, 5000.0),
            Interval::new(0.0, 60.0),
            Interval::new(0.0, 3.0),
        ];
        let cfg = SolverConfig {
            bounds: BoundsPolicy::Fixed(bounds),
            ..small(1, 500)
        };
        let out = run(&line(15), &cfg, &mut HistoryLog::new()).unwrap();
        assert_eq!(out.archive_config().bounds, bounds);
    }
}

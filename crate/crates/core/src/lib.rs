//! Quality-diversity search for the two-tier micro-depot delivery problem.
//!
//! A supply vehicle follows a fixed nearest-neighbour *grand tour* over all
//! customers. A chromosome is a list of instructions that lift contiguous
//! segments of that tour out of the van's route and hand them to walking,
//! cycle or electric couriers based at micro-depots. Solutions are mapped
//! onto a four-dimensional grid of characteristics (couriers, emissions,
//! distance, time span) and MAP-Elites keeps the cheapest solution found for
//! every cell, logging each cell update so the history of any bin can be
//! replayed and audited afterwards.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line tool and all other IO live in the `mdelites` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod archive;
pub mod evaluate;
pub mod genome;
pub mod history;
pub mod instance;
pub mod patterns;
pub mod rng;
pub mod solver;

pub use archive::{bin_count, Archive, ArchiveCell, ArchiveConfig, BinKey, Interval, OfferOutcome};
pub use evaluate::{evaluate, Characteristics, Evaluation};
pub use genome::{decode, encode_solution, Chromosome, CourierTrip, DecodedSolution, Gene, Stop};
pub use history::{replay, HistoryLog, HistoryRecord, HistorySink, Origin};
pub use instance::{
    distance, nearest_neighbour_tour, CourierMode, Customer, MicroDepot, ModeKind, Point, ProblemInstance,
};
pub use patterns::{confidence, match_solution, PatternCatalogue, PatternEntry};
pub use solver::{run, BoundsPolicy, RunOutcome, SolverConfig};

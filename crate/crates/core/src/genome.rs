//! Chromosomes, decoding into two-tier delivery plans, and variation operators.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::instance::{ModeKind, ProblemInstance};
use crate::rng::Draw;
use rand_core::RngCore;

/// Longest segment a freshly drawn gene may claim.
pub const MAX_NEW_GENE_QTY: u32 = 5;
/// Upper bound on the gene count of a random chromosome.
pub const MAX_RANDOM_GENES: u64 = 5;

/// One courier: take `qty` consecutive grand-tour customers starting at
/// 1-based position `tour_point` and serve them from `depot` by `mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gene {
    pub tour_point: u32,
    pub qty: u32,
    pub depot: u32,
    pub mode: ModeKind,
}

impl Gene {
    pub const fn new(tour_point: u32, qty: u32, depot: u32, mode: ModeKind) -> Self {
        Self {
            tour_point,
            qty,
            depot,
            mode,
        }
    }

    /// 0-based grand-tour index range claimed by this gene.
    pub fn span(&self) -> core::ops::Range<usize> {
        let start = self.tour_point as usize - 1;
        start..start + self.qty as usize
    }

    /// Whether the gene satisfies all per-gene invariants against `instance`.
    pub fn is_valid_for(&self, instance: &ProblemInstance) -> bool {
        if self.mode == ModeKind::Van || instance.depot(self.depot).is_none() || self.qty == 0 {
            return false;
        }
        let Some(mode) = instance.mode(self.mode) else {
            return false;
        };
        instance
            .span_demand(self.tour_point, self.qty)
            .is_some_and(|d| d <= mode.capacity)
    }
}

/// An ordered list of genes. Empty is valid and means "van delivers everything".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

impl From<Vec<Gene>> for Chromosome {
    fn from(genes: Vec<Gene>) -> Self {
        Self { genes }
    }
}

/// A stop on the supply vehicle's route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stop {
    Customer(u32),
    Depot(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CourierTrip {
    pub depot: u32,
    pub mode: ModeKind,
    /// In grand-tour order.
    pub customers: Vec<u32>,
}

/// The phenotype: the van's route plus the last-mile courier trips.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecodedSolution {
    /// Stops between leaving and returning to the origin.
    pub supply_route: Vec<Stop>,
    /// In supply-route order.
    pub courier_trips: Vec<CourierTrip>,
    /// Indices into the chromosome of the genes that were applied.
    pub applied_genes: Vec<usize>,
}

impl DecodedSolution {
    /// Equality of the delivery plan itself, ignoring which genes produced it.
    pub fn same_plan(&self, other: &Self) -> bool {
        self.supply_route == other.supply_route && self.courier_trips == other.courier_trips
    }

    pub fn van_customers(&self) -> impl Iterator<Item = u32> + '_ {
        self.supply_route.iter().filter_map(|s| match s {
            Stop::Customer(id) => Some(*id),
            Stop::Depot(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("gene {index}: unknown depot {depot}")]
    UnknownDepot { index: usize, depot: u32 },
    #[error("gene {index}: mode {mode} is not a courier mode of this instance")]
    UnknownMode { index: usize, mode: ModeKind },
    #[error("gene {index}: span {tour_point}+{qty} does not fit a tour of {tour_len} customers")]
    SpanOutOfRange {
        index: usize,
        tour_point: u32,
        qty: u32,
        tour_len: usize,
    },
}

/// Applies `chrom` to the instance's grand tour.
///
/// Genes are applied in list order. A gene is skipped when any position it
/// claims is already taken by an earlier gene, or when its customers' demand
/// exceeds the mode's capacity. An applied gene's customers leave the van's
/// route and a single visit to the gene's depot takes the place of the first
/// of them; back-to-back visits to the same depot are merged.
pub fn decode(instance: &ProblemInstance, chrom: &Chromosome) -> Result<DecodedSolution, DecodeError> {
    let tour = instance.grand_tour();
    let n = tour.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut applied = Vec::new();

    for (index, gene) in chrom.genes.iter().enumerate() {
        if instance.depot(gene.depot).is_none() {
            return Err(DecodeError::UnknownDepot {
                index,
                depot: gene.depot,
            });
        }
        let mode = match instance.mode(gene.mode) {
            Some(m) if gene.mode != ModeKind::Van => m,
            _ => return Err(DecodeError::UnknownMode { index, mode: gene.mode }),
        };
        let demand = match instance.span_demand(gene.tour_point, gene.qty) {
            Some(d) if gene.qty > 0 => d,
            _ => {
                return Err(DecodeError::SpanOutOfRange {
                    index,
                    tour_point: gene.tour_point,
                    qty: gene.qty,
                    tour_len: n,
                })
            }
        };
        let span = gene.span();
        if owner[span.clone()].iter().any(Option::is_some) || demand > mode.capacity {
            continue;
        }
        owner[span].fill(Some(index));
        applied.push(index);
    }

    let mut supply_route = Vec::with_capacity(n);
    let mut courier_trips = Vec::with_capacity(applied.len());
    for (pos, slot) in owner.iter().enumerate() {
        match *slot {
            None => supply_route.push(Stop::Customer(tour[pos])),
            Some(g) => {
                let gene = &chrom.genes[g];
                if gene.span().start != pos {
                    continue;
                }
                let visit = Stop::Depot(gene.depot);
                if supply_route.last() != Some(&visit) {
                    supply_route.push(visit);
                }
                courier_trips.push(CourierTrip {
                    depot: gene.depot,
                    mode: gene.mode,
                    customers: tour[gene.span()].to_vec(),
                });
            }
        }
    }

    Ok(DecodedSolution {
        supply_route,
        courier_trips,
        applied_genes: applied,
    })
}

/// Canonical string form of a solution.
///
/// Van-served customers come first as `C<id>V`, then each courier trip as
/// `,D<depot>` followed by `C<id><mode letter>` for its customers.
pub fn encode_solution(sol: &DecodedSolution) -> String {
    let mut out = String::new();
    for id in sol.van_customers() {
        let _ = write!(out, "C{id}{}", ModeKind::Van.letter());
    }
    for trip in &sol.courier_trips {
        let _ = write!(out, ",D{}", trip.depot);
        for id in &trip.customers {
            let _ = write!(out, "C{id}{}", trip.mode.letter());
        }
    }
    out
}

/// The three mutation sub-operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Add,
    Delete,
    Alter,
}

/// Draws a fresh gene: uniform tour point, uniform length up to
/// [`MAX_NEW_GENE_QTY`], uniform depot, uniform mode among those with enough
/// capacity. Returns `None` if no courier mode can carry the drawn segment.
pub fn random_gene<R: RngCore + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> Option<Gene> {
    let n = instance.grand_tour().len() as u64;
    let tour_point = rng.between(1, n) as u32;
    let remaining = n - tour_point as u64 + 1;
    let qty = rng.between(1, remaining.min(MAX_NEW_GENE_QTY as u64)) as u32;
    let depot = rng.between(1, instance.depots().len() as u64) as u32;
    let demand = instance.span_demand(tour_point, qty)?;
    let modes: Vec<ModeKind> = instance
        .courier_modes()
        .filter(|m| m.capacity >= demand)
        .map(|m| m.kind)
        .collect();
    if modes.is_empty() {
        return None;
    }
    let mode = modes[rng.index(modes.len())];
    Some(Gene::new(tour_point, qty, depot, mode))
}

/// A chromosome of between 0 and [`MAX_RANDOM_GENES`] random genes.
pub fn random_chromosome<R: RngCore + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> Chromosome {
    let count = rng.between(0, MAX_RANDOM_GENES);
    let genes = (0..count).filter_map(|_| random_gene(instance, rng)).collect();
    Chromosome { genes }
}

/// Applies one uniformly chosen mutation sub-operator.
pub fn mutate<R: RngCore + ?Sized>(chrom: Chromosome, instance: &ProblemInstance, rng: &mut R) -> Chromosome {
    let op = match rng.below(3) {
        0 => Mutation::Add,
        1 => Mutation::Delete,
        _ => Mutation::Alter,
    };
    mutate_with(op, chrom, instance, rng)
}

pub fn mutate_with<R: RngCore + ?Sized>(
    op: Mutation,
    mut chrom: Chromosome,
    instance: &ProblemInstance,
    rng: &mut R,
) -> Chromosome {
    match op {
        Mutation::Add => {
            if let Some(g) = random_gene(instance, rng) {
                chrom.genes.push(g);
            }
        }
        Mutation::Delete => {
            if !chrom.genes.is_empty() {
                let i = rng.index(chrom.genes.len());
                chrom.genes.remove(i);
            }
        }
        Mutation::Alter => {
            if !chrom.genes.is_empty() {
                let i = rng.index(chrom.genes.len());
                chrom.genes[i] = alter_gene(chrom.genes[i], instance, rng);
            }
        }
    }
    chrom
}

/// Re-draws one field of `gene`, choosing uniformly among the values that
/// differ from the current one and keep the gene valid. If no such value
/// exists the gene is returned unchanged.
fn alter_gene<R: RngCore + ?Sized>(gene: Gene, instance: &ProblemInstance, rng: &mut R) -> Gene {
    let n = instance.grand_tour().len() as u32;
    let fits = |g: &Gene| g.is_valid_for(instance);
    let candidates: Vec<Gene> = match rng.below(4) {
        0 => (1..=n.saturating_sub(gene.qty) + 1)
            .filter(|&tp| tp != gene.tour_point)
            .map(|tour_point| Gene { tour_point, ..gene })
            .filter(fits)
            .collect(),
        1 => {
            let max_qty = (n - gene.tour_point + 1).min(MAX_NEW_GENE_QTY.max(gene.qty));
            (1..=max_qty)
                .filter(|&q| q != gene.qty)
                .map(|qty| Gene { qty, ..gene })
                .filter(fits)
                .collect()
        }
        2 => instance
            .depots()
            .iter()
            .map(|d| d.id)
            .filter(|&d| d != gene.depot)
            .map(|depot| Gene { depot, ..gene })
            .collect(),
        _ => instance
            .courier_modes()
            .map(|m| m.kind)
            .filter(|&m| m != gene.mode)
            .map(|mode| Gene { mode, ..gene })
            .filter(fits)
            .collect(),
    };
    if candidates.is_empty() {
        gene
    } else {
        candidates[rng.index(candidates.len())]
    }
}

/// Uniform gene-wise crossover: for each index up to the longer parent's
/// length, flip a coin for the parent and copy its gene at that index if it
/// has one.
pub fn recombine<R: RngCore + ?Sized>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> Chromosome {
    let len = a.len().max(b.len());
    let mut genes = Vec::with_capacity(len);
    for i in 0..len {
        let parent = if rng.below(2) == 0 { a } else { b };
        if let Some(g) = parent.genes.get(i) {
            genes.push(*g);
        }
    }
    Chromosome { genes }
}

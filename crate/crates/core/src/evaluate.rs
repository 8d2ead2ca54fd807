//! Solution characteristics and financial-cost fitness.

use serde::{Deserialize, Serialize};

use crate::genome::{DecodedSolution, Stop};
use crate::instance::{distance, CourierMode, Point, ProblemInstance};

/// The four descriptor dimensions used to place a solution in the archive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Characteristics {
    /// Last-mile courier trips; the supply vehicle is not counted.
    pub couriers: u32,
    /// g CO2
    pub emissions: f64,
    /// km
    pub distance: f64,
    /// hours
    pub time_span: f64,
}

impl Characteristics {
    pub const DIMENSIONS: usize = 4;
    pub const NAMES: [&'static str; 4] = ["couriers", "emissions", "distance", "time"];

    /// Values in archive-dimension order.
    pub fn as_array(&self) -> [f64; 4] {
        [self.couriers as f64, self.emissions, self.distance, self.time_span]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub characteristics: Characteristics,
    /// Financial cost; lower is better. `+inf` marks an infeasible solution.
    pub fitness: f64,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.fitness.is_finite()
    }
}

struct Leg {
    length: f64,
}

impl Leg {
    fn cost(&self, mode: &CourierMode) -> f64 {
        mode.fixed_cost + mode.cost_per_km * self.length
    }

    fn emissions(&self, mode: &CourierMode) -> f64 {
        mode.emission_rate * self.length
    }
}

fn path_length(points: impl IntoIterator<Item = Point>) -> f64 {
    let mut it = points.into_iter();
    let Some(mut prev) = it.next() else {
        return 0.0;
    };
    let mut total = 0.0;
    for p in it {
        total += distance(prev, p);
        prev = p;
    }
    total
}

/// Computes the characteristics and fitness of a decoded solution.
///
/// The van runs origin → route → origin. Each courier leaves its depot when
/// the van first arrives there, visits its customers in order and returns.
/// A trip longer than its mode's range makes the whole solution infeasible
/// (fitness `+inf`).
///
/// Panics if the solution references ids missing from `instance`; decoded
/// solutions never do.
pub fn evaluate(instance: &ProblemInstance, sol: &DecodedSolution) -> Evaluation {
    let van = instance.van();
    let customer_at = |id: u32| instance.customer(id).expect("customer id in instance").location;
    let depot_at = |id: u32| instance.depot(id).expect("depot id in instance").location;
    let stop_at = |s: &Stop| match *s {
        Stop::Customer(id) => customer_at(id),
        Stop::Depot(id) => depot_at(id),
    };

    // Van leg, remembering when it first reaches each depot.
    let mut first_arrival: alloc::collections::BTreeMap<u32, f64> = Default::default();
    let mut here = instance.origin();
    let mut van_km = 0.0;
    for stop in &sol.supply_route {
        let next = stop_at(stop);
        van_km += distance(here, next);
        here = next;
        if let Stop::Depot(id) = *stop {
            first_arrival.entry(id).or_insert(van_km / van.speed);
        }
    }
    van_km += distance(here, instance.origin());
    let van_leg = Leg { length: van_km };

    let mut total_km = van_leg.length;
    let mut emissions = van_leg.emissions(van);
    let mut fitness = van_leg.cost(van);
    let mut time_span = van_leg.length / van.speed;
    let mut feasible = true;

    for trip in &sol.courier_trips {
        let mode = instance.mode(trip.mode).expect("courier mode in instance");
        let base = depot_at(trip.depot);
        let stops = core::iter::once(base)
            .chain(trip.customers.iter().map(|&id| customer_at(id)))
            .chain(core::iter::once(base));
        let leg = Leg {
            length: path_length(stops),
        };
        if mode.max_range.is_some_and(|r| leg.length > r) {
            feasible = false;
        }
        let depart = first_arrival.get(&trip.depot).copied().unwrap_or(0.0);
        time_span = time_span.max(depart + leg.length / mode.speed);
        total_km += leg.length;
        emissions += leg.emissions(mode);
        fitness += leg.cost(mode);
    }

    Evaluation {
        characteristics: Characteristics {
            couriers: sol.courier_trips.len() as u32,
            emissions,
            distance: total_km,
            time_span,
        },
        fitness: if feasible { fitness } else { f64::INFINITY },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{decode, random_chromosome, Chromosome, CourierTrip, Gene};
    use crate::instance::fixtures::{default_modes, line, square4};
    use crate::instance::{Customer, MicroDepot, ModeKind};
    use crate::rng::search_rng;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn van_only_square() {
        let inst = square4();
        let sol = decode(&inst, &Chromosome::default()).unwrap();
        let ev = evaluate(&inst, &sol);
        // origin (0,0) = customer 1, then three unit edges, then back from (0,1)
        let d = 3.0 + 1.0;
        let c = ev.characteristics;
        assert_eq!(c.couriers, 0);
        assert!((c.distance - d).abs() < 1e-12);
        assert!((c.emissions - 180.0 * d).abs() < 1e-9);
        assert!((ev.fitness - (50.0 + 0.5 * d)).abs() < 1e-12);
        assert!((c.time_span - d / 30.0).abs() < 1e-12);
    }

    #[test]
    fn empty_route_costs_only_the_van() {
        let inst = square4();
        let sol = DecodedSolution {
            supply_route: vec![],
            courier_trips: vec![],
            applied_genes: vec![],
        };
        let ev = evaluate(&inst, &sol);
        assert_eq!(ev.characteristics.distance, 0.0);
        assert_eq!(ev.characteristics.time_span, 0.0);
        assert_eq!(ev.fitness, 50.0);
    }

    #[test]
    fn courier_departs_when_van_arrives() {
        // Van reaches the depot 6 km out (0.2 h at 30 km/h); the walker loops
        // 2.5 km at 5 km/h and finishes at 0.7 h. The van's own return takes
        // 12 km / 30 = 0.4 h, so the walker sets the span.
        let customers = vec![Customer {
            id: 1,
            location: Point::new(6.0, 1.25),
            demand: 1,
        }];
        let depots = vec![MicroDepot {
            id: 1,
            location: Point::new(6.0, 0.0),
        }];
        let inst = ProblemInstance::new(customers, depots, default_modes(), Point::new(0.0, 0.0)).unwrap();
        let sol = DecodedSolution {
            supply_route: vec![Stop::Depot(1)],
            courier_trips: vec![CourierTrip {
                depot: 1,
                mode: ModeKind::Walk,
                customers: vec![1],
            }],
            applied_genes: vec![0],
        };
        let ev = evaluate(&inst, &sol);
        assert!((ev.characteristics.time_span - 0.7).abs() < 1e-12);
        assert!((ev.characteristics.distance - 14.5).abs() < 1e-12);
        assert_eq!(ev.characteristics.couriers, 1);
        // van 12 km, walker 2.5 km
        let expected = 50.0 + 0.5 * 12.0 + 10.0 + 0.05 * 2.5;
        assert!((ev.fitness - expected).abs() < 1e-12);
        assert!((ev.characteristics.emissions - 180.0 * 12.0).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_trip_is_infeasible() {
        let mut modes = default_modes();
        modes[1].max_range = Some(1.0);
        let customers = (1..=4)
            .map(|id| Customer {
                id,
                location: Point::new(id as f64 * 2.0, 0.0),
                demand: 1,
            })
            .collect();
        let depots = vec![MicroDepot {
            id: 1,
            location: Point::new(0.0, 3.0),
        }];
        let inst = ProblemInstance::new(customers, depots, modes, Point::new(0.0, 0.0)).unwrap();
        let sol = decode(&inst, &Chromosome::new(vec![Gene::new(1, 2, 1, ModeKind::Walk)])).unwrap();
        let ev = evaluate(&inst, &sol);
        assert!(!ev.is_feasible());
        assert_eq!(ev.fitness, f64::INFINITY);
    }

    /// Straight re-summation of every leg, written without the evaluator's helpers.
    fn resum(inst: &ProblemInstance, sol: &DecodedSolution) -> f64 {
        let loc = |s: &Stop| match *s {
            Stop::Customer(id) => inst.customers()[id as usize - 1].location,
            Stop::Depot(id) => inst.depots()[id as usize - 1].location,
        };
        let mut pts: Vec<Point> = vec![inst.origin()];
        pts.extend(sol.supply_route.iter().map(loc));
        pts.push(inst.origin());
        let mut total: f64 = pts
            .windows(2)
            .map(|w| libm::hypot(w[1].x - w[0].x, w[1].y - w[0].y))
            .sum();
        for t in &sol.courier_trips {
            let mut pts = vec![loc(&Stop::Depot(t.depot))];
            pts.extend(t.customers.iter().map(|&c| loc(&Stop::Customer(c))));
            pts.push(loc(&Stop::Depot(t.depot)));
            total += pts
                .windows(2)
                .map(|w| libm::hypot(w[1].x - w[0].x, w[1].y - w[0].y))
                .sum::<f64>();
        }
        total
    }

    #[test]
    fn distance_matches_independent_resummation() {
        let inst = line(25);
        let mut rng = search_rng(8);
        for _ in 0..1000 {
            let sol = decode(&inst, &random_chromosome(&inst, &mut rng)).unwrap();
            let got = evaluate(&inst, &sol).characteristics.distance;
            let want = resum(&inst, &sol);
            assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn appending_a_trip_never_lowers_fitness() {
        let inst = line(25);
        let mut rng = search_rng(9);
        for _ in 0..500 {
            let mut sol = decode(&inst, &random_chromosome(&inst, &mut rng)).unwrap();
            let before = evaluate(&inst, &sol).fitness;
            sol.courier_trips.push(CourierTrip {
                depot: 1,
                mode: ModeKind::Walk,
                customers: vec![],
            });
            let after = evaluate(&inst, &sol).fitness;
            assert!(after >= before + 10.0 - 1e-9);
        }
    }

    #[test]
    fn zero_emission_couriers_add_no_emissions() {
        let inst = line(25);
        let mut rng = search_rng(10);
        for _ in 0..500 {
            let mut chrom = random_chromosome(&inst, &mut rng);
            for g in &mut chrom.genes {
                if g.mode == ModeKind::Ev {
                    g.mode = ModeKind::Bike;
                }
            }
            let sol = decode(&inst, &chrom).unwrap();
            let van_only = DecodedSolution {
                courier_trips: vec![],
                ..sol.clone()
            };
            let a = evaluate(&inst, &sol).characteristics.emissions;
            let b = evaluate(&inst, &van_only).characteristics.emissions;
            assert_eq!(a, b);
        }
    }
}

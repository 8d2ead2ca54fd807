//! Problem instances: customers, micro-depots, courier modes and the grand tour.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A location in the plane, in kilometres.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance in km.
pub fn distance(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    libm::sqrt(dx * dx + dy * dy)
}

/// The vehicle types available. `Van` is reserved for the supply vehicle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModeKind {
    Van,
    Walk,
    Bike,
    Ev,
}

impl ModeKind {
    pub const ALL: [ModeKind; 4] = [ModeKind::Van, ModeKind::Walk, ModeKind::Bike, ModeKind::Ev];

    /// Single-letter tag used in solution encodings.
    pub const fn letter(self) -> char {
        match self {
            ModeKind::Van => 'V',
            ModeKind::Walk => 'W',
            ModeKind::Bike => 'B',
            ModeKind::Ev => 'E',
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            ModeKind::Van => "VAN",
            ModeKind::Walk => "WALK",
            ModeKind::Bike => "BIKE",
            ModeKind::Ev => "EV",
        }
    }

    pub fn from_letter(letter: char) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.letter() == letter)
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(name))
    }

    /// Walking and cycling produce no tailpipe emissions.
    pub const fn is_zero_emission(self) -> bool {
        matches!(self, ModeKind::Walk | ModeKind::Bike)
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Operating parameters of one vehicle type.
#[derive(Clone, Debug, PartialEq)]
pub struct CourierMode {
    pub kind: ModeKind,
    /// km/h
    pub speed: f64,
    /// g CO2 per km
    pub emission_rate: f64,
    pub fixed_cost: f64,
    pub cost_per_km: f64,
    /// parcels
    pub capacity: u32,
    /// km per trip; `None` is unbounded
    pub max_range: Option<f64>,
}

impl CourierMode {
    pub fn letter(&self) -> char {
        self.kind.letter()
    }

    /// The parameter set shipped with the bundled instances.
    pub fn default_for(kind: ModeKind) -> Self {
        let (speed, emission_rate, fixed_cost, cost_per_km, capacity) = match kind {
            ModeKind::Van => (30.0, 180.0, 50.0, 0.5, 200),
            ModeKind::Ev => (25.0, 40.0, 30.0, 0.3, 60),
            ModeKind::Bike => (15.0, 0.0, 15.0, 0.1, 25),
            ModeKind::Walk => (5.0, 0.0, 10.0, 0.05, 10),
        };
        Self {
            kind,
            speed,
            emission_rate,
            fixed_cost,
            cost_per_km,
            capacity,
            max_range: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Customer {
    /// 1-based, dense
    pub id: u32,
    pub location: Point,
    /// parcels
    pub demand: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicroDepot {
    /// 1-based, dense
    pub id: u32,
    pub location: Point,
}

impl MicroDepot {
    pub fn label(&self) -> alloc::string::String {
        alloc::format!("D{}", self.id)
    }
}

/// Reasons an instance is rejected. Each variant names the offending field.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("customers: instance has no customers")]
    NoCustomers,
    #[error("depots: instance has no micro-depots")]
    NoDepots,
    #[error("customers: duplicate id {0}")]
    DuplicateCustomer(u32),
    #[error("customers: ids not dense (expected 1..={count}, found {id})")]
    CustomerIdsNotDense { id: u32, count: usize },
    #[error("depots: duplicate id {0}")]
    DuplicateDepot(u32),
    #[error("depots: ids not dense (expected 1..={count}, found {id})")]
    DepotIdsNotDense { id: u32, count: usize },
    #[error("customers[{id}].demand: must be at least 1")]
    ZeroDemand { id: u32 },
    #[error("{field}: coordinate is not finite")]
    NonFiniteCoordinate { field: &'static str },
    #[error("modes: required mode {0} is missing")]
    MissingMode(ModeKind),
    #[error("modes: mode {0} declared twice")]
    DuplicateMode(ModeKind),
    #[error("modes[{mode}].{field}: {reason}")]
    InvalidModeParameter {
        mode: ModeKind,
        field: &'static str,
        reason: &'static str,
    },
}

/// An immutable problem instance. The grand tour is computed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    customers: Vec<Customer>,
    depots: Vec<MicroDepot>,
    modes: Vec<CourierMode>,
    origin: Point,
    grand_tour: Vec<u32>,
}

impl ProblemInstance {
    /// Validates the parts, sorts customers and depots by id and builds the
    /// nearest-neighbour grand tour starting from `origin`.
    pub fn new(
        mut customers: Vec<Customer>,
        mut depots: Vec<MicroDepot>,
        modes: Vec<CourierMode>,
        origin: Point,
    ) -> Result<Self, InstanceError> {
        if customers.is_empty() {
            return Err(InstanceError::NoCustomers);
        }
        if depots.is_empty() {
            return Err(InstanceError::NoDepots);
        }
        check_point(origin, "origin")?;

        customers.sort_by_key(|c| c.id);
        for w in customers.windows(2) {
            if w[0].id == w[1].id {
                return Err(InstanceError::DuplicateCustomer(w[0].id));
            }
        }
        for (i, c) in customers.iter().enumerate() {
            if c.id as usize != i + 1 {
                return Err(InstanceError::CustomerIdsNotDense {
                    id: c.id,
                    count: customers.len(),
                });
            }
            if c.demand == 0 {
                return Err(InstanceError::ZeroDemand { id: c.id });
            }
            check_point(c.location, "customers")?;
        }

        depots.sort_by_key(|d| d.id);
        for w in depots.windows(2) {
            if w[0].id == w[1].id {
                return Err(InstanceError::DuplicateDepot(w[0].id));
            }
        }
        for (i, d) in depots.iter().enumerate() {
            if d.id as usize != i + 1 {
                return Err(InstanceError::DepotIdsNotDense {
                    id: d.id,
                    count: depots.len(),
                });
            }
            check_point(d.location, "depots")?;
        }

        validate_modes(&modes)?;

        let grand_tour = nearest_neighbour_tour(origin, &customers);
        Ok(Self {
            customers,
            depots,
            modes,
            origin,
            grand_tour,
        })
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn depots(&self) -> &[MicroDepot] {
        &self.depots
    }

    pub fn modes(&self) -> &[CourierMode] {
        &self.modes
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Customer ids in supply-vehicle visiting order.
    pub fn grand_tour(&self) -> &[u32] {
        &self.grand_tour
    }

    pub fn customer(&self, id: u32) -> Option<&Customer> {
        id.checked_sub(1).and_then(|i| self.customers.get(i as usize))
    }

    pub fn depot(&self, id: u32) -> Option<&MicroDepot> {
        id.checked_sub(1).and_then(|i| self.depots.get(i as usize))
    }

    pub fn mode(&self, kind: ModeKind) -> Option<&CourierMode> {
        self.modes.iter().find(|m| m.kind == kind)
    }

    /// The supply vehicle's parameters. Always present after validation.
    pub fn van(&self) -> &CourierMode {
        self.mode(ModeKind::Van).expect("validated instance has a VAN mode")
    }

    /// Last-mile modes (everything except the van), in declaration order.
    pub fn courier_modes(&self) -> impl Iterator<Item = &CourierMode> {
        self.modes.iter().filter(|m| m.kind != ModeKind::Van)
    }

    /// Total demand of `qty` customers starting at 1-based tour position
    /// `tour_point`, or `None` if the span leaves the tour.
    pub fn span_demand(&self, tour_point: u32, qty: u32) -> Option<u32> {
        let start = tour_point.checked_sub(1)? as usize;
        let end = start.checked_add(qty as usize)?;
        let span = self.grand_tour.get(start..end)?;
        Some(span.iter().map(|&id| self.customers[id as usize - 1].demand).sum())
    }
}

fn check_point(p: Point, field: &'static str) -> Result<(), InstanceError> {
    if p.x.is_finite() && p.y.is_finite() {
        Ok(())
    } else {
        Err(InstanceError::NonFiniteCoordinate { field })
    }
}

fn validate_modes(modes: &[CourierMode]) -> Result<(), InstanceError> {
    let mut seen = [false; 4];
    for m in modes {
        let slot = &mut seen[m.kind as usize];
        if *slot {
            return Err(InstanceError::DuplicateMode(m.kind));
        }
        *slot = true;

        let bad = |field, reason| InstanceError::InvalidModeParameter {
            mode: m.kind,
            field,
            reason,
        };
        if !(m.speed.is_finite() && m.speed > 0.0) {
            return Err(bad("speed", "must be a positive number"));
        }
        if !(m.emission_rate.is_finite() && m.emission_rate >= 0.0) {
            return Err(bad("emission_rate", "must be non-negative"));
        }
        if m.kind.is_zero_emission() && m.emission_rate != 0.0 {
            return Err(bad("emission_rate", "walking and cycling modes must be zero-emission"));
        }
        if !(m.fixed_cost.is_finite() && m.fixed_cost >= 0.0) {
            return Err(bad("fixed_cost", "must be non-negative"));
        }
        if !(m.cost_per_km.is_finite() && m.cost_per_km >= 0.0) {
            return Err(bad("cost_per_km", "must be non-negative"));
        }
        if m.capacity == 0 {
            return Err(bad("capacity", "must be at least 1"));
        }
        if let Some(r) = m.max_range {
            if r.is_nan() || r <= 0.0 {
                return Err(bad("max_range", "must be positive"));
            }
        }
    }
    for required in [ModeKind::Van, ModeKind::Walk] {
        if !seen[required as usize] {
            return Err(InstanceError::MissingMode(required));
        }
    }
    let van_cap = modes.iter().find(|m| m.kind == ModeKind::Van).map(|m| m.capacity);
    if let Some(van_cap) = van_cap {
        if modes.iter().any(|m| m.capacity > van_cap) {
            return Err(InstanceError::InvalidModeParameter {
                mode: ModeKind::Van,
                field: "capacity",
                reason: "must be at least every other mode's capacity",
            });
        }
    }
    Ok(())
}

/// Greedy tour from `origin`: repeatedly visit the closest unvisited
/// customer. Ties go to the lowest customer id.
pub fn nearest_neighbour_tour(origin: Point, customers: &[Customer]) -> Vec<u32> {
    let mut order: Vec<&Customer> = customers.iter().collect();
    order.sort_by_key(|c| c.id);

    let mut visited = vec![false; order.len()];
    let mut tour = Vec::with_capacity(order.len());
    let mut here = origin;
    for _ in 0..order.len() {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in order.iter().enumerate() {
            if visited[i] {
                continue;
            }
            let d = distance(here, c.location);
            // strict `<` keeps the earlier (lower) id on ties
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, _) = best.expect("an unvisited customer remains");
        visited[i] = true;
        tour.push(order[i].id);
        here = order[i].location;
    }
    tour
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn default_modes() -> Vec<CourierMode> {
        ModeKind::ALL.into_iter().map(CourierMode::default_for).collect()
    }

    /// Customers at the corners of the unit square, origin at (0,0).
    pub fn square4() -> ProblemInstance {
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let customers = corners
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Customer {
                id: i as u32 + 1,
                location: Point::new(x, y),
                demand: 1,
            })
            .collect();
        let depots = vec![MicroDepot {
            id: 1,
            location: Point::new(0.5, 0.5),
        }];
        ProblemInstance::new(customers, depots, default_modes(), Point::new(0.0, 0.0)).unwrap()
    }

    /// `n` customers on the x axis at 1..=n km, two depots.
    pub fn line(n: u32) -> ProblemInstance {
        let customers = (1..=n)
            .map(|id| Customer {
                id,
                location: Point::new(id as f64, 0.0),
                demand: 1,
            })
            .collect();
        let depots = vec![
            MicroDepot {
                id: 1,
                location: Point::new(2.0, 1.0),
            },
            MicroDepot {
                id: 2,
                location: Point::new(n as f64 - 1.0, 1.0),
            },
        ];
        ProblemInstance::new(customers, depots, default_modes(), Point::new(0.0, 0.0)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn customer(id: u32, x: f64, y: f64) -> Customer {
        Customer {
            id,
            location: Point::new(x, y),
            demand: 1,
        }
    }

    fn depot1() -> Vec<MicroDepot> {
        vec![MicroDepot {
            id: 1,
            location: Point::new(0.0, 0.0),
        }]
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        let p = Point::new(2.5, -7.0);
        assert_eq!(distance(p, p), 0.0);
        let d = distance(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert!((d - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn square_tour_visits_corners_in_order() {
        assert_eq!(square4().grand_tour(), &[1, 2, 3, 4]);
    }

    #[test]
    fn single_customer_tour() {
        let tour = nearest_neighbour_tour(Point::new(0.0, 0.0), &[customer(1, 5.0, 5.0)]);
        assert_eq!(tour, vec![1]);
    }

    #[test]
    fn equidistant_tie_goes_to_lower_id() {
        let cs = [customer(7, -1.0, 0.0), customer(2, 1.0, 0.0)];
        let tour = nearest_neighbour_tour(Point::new(0.0, 0.0), &cs);
        assert_eq!(tour, vec![2, 7]);
    }

    #[test]
    fn rejects_empty_customers() {
        let err = ProblemInstance::new(vec![], depot1(), default_modes(), Point::default()).unwrap_err();
        assert_eq!(err, InstanceError::NoCustomers);
    }

    #[test]
    fn rejects_sparse_ids() {
        let cs = vec![customer(1, 0.0, 1.0), customer(3, 1.0, 1.0)];
        let err = ProblemInstance::new(cs, depot1(), default_modes(), Point::default()).unwrap_err();
        assert!(matches!(err, InstanceError::CustomerIdsNotDense { id: 3, .. }));
        assert!(alloc::format!("{err}").contains("ids not dense"));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let cs = vec![customer(1, 0.0, 1.0), customer(1, 1.0, 1.0)];
        let err = ProblemInstance::new(cs, depot1(), default_modes(), Point::default()).unwrap_err();
        assert_eq!(err, InstanceError::DuplicateCustomer(1));
    }

    #[test]
    fn requires_van_and_walk() {
        let modes = vec![CourierMode::default_for(ModeKind::Van)];
        let err = ProblemInstance::new(vec![customer(1, 1.0, 0.0)], depot1(), modes, Point::default()).unwrap_err();
        assert_eq!(err, InstanceError::MissingMode(ModeKind::Walk));
    }

    #[test]
    fn walking_must_be_zero_emission() {
        let mut modes = default_modes();
        modes[1].emission_rate = 3.0;
        let err = ProblemInstance::new(vec![customer(1, 1.0, 0.0)], depot1(), modes, Point::default()).unwrap_err();
        assert!(matches!(
            err,
            InstanceError::InvalidModeParameter {
                mode: ModeKind::Walk,
                field: "emission_rate",
                ..
            }
        ));
    }

    #[test]
    fn van_capacity_dominates() {
        let mut modes = default_modes();
        modes[3].capacity = 500;
        let err = ProblemInstance::new(vec![customer(1, 1.0, 0.0)], depot1(), modes, Point::default()).unwrap_err();
        assert!(matches!(
            err,
            InstanceError::InvalidModeParameter { field: "capacity", .. }
        ));
    }

    #[test]
    fn span_demand_bounds() {
        let inst = line(10);
        assert_eq!(inst.span_demand(5, 3), Some(3));
        assert_eq!(inst.span_demand(8, 3), Some(3));
        assert_eq!(inst.span_demand(9, 3), None);
        assert_eq!(inst.span_demand(0, 1), None);
    }

    #[test]
    fn mode_letters_are_unique() {
        for a in ModeKind::ALL {
            for b in ModeKind::ALL {
                assert_eq!(a == b, a.letter() == b.letter());
            }
            assert_eq!(ModeKind::from_letter(a.letter()), Some(a));
            assert_eq!(ModeKind::from_name(a.name()), Some(a));
        }
    }
}

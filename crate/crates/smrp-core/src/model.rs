//! Domain types, instance validation, objective evaluation and an
//! independent feasibility checker.
//!
//! Node indexing convention: places of interest are `0..n_pois`, the common
//! start node is `n_pois` and the terminal node is `n_pois + 1`. Travel
//! tables are indexed over all `n_pois + 2` nodes; diagonal entries are
//! unused (a tour never travels an `i -> i` edge).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::stochastic;

/// A Gaussian travel or visit time in seconds. `std == 0` encodes a
/// deterministic time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDist {
    pub mean: f64,
    pub std: f64,
}

impl TimeDist {
    pub const ZERO: TimeDist = TimeDist {
        mean: 0.0,
        std: 0.0,
    };

    pub fn new(mean: f64, std: f64) -> Self {
        TimeDist { mean, std }
    }

    pub fn deterministic(mean: f64) -> Self {
        TimeDist { mean, std: 0.0 }
    }

    pub fn variance(self) -> f64 {
        self.std * self.std
    }
}

/// A full problem instance.
///
/// `requests[l][i]` says whether human `l` asked to visit POI `i`.
/// `travel[k][i][j]` is the time for robot `k` (with its team) to travel the
/// edge `i -> j` over the extended node set, and `visit[k][i]` the time to
/// visit POI `i`. Every robot has a hard expected-time limit `time_limit[k]`
/// and a soft margin `time_margin[k]` below it where the overtime penalty
/// starts; `team_cap[k]` bounds the team size. `weight_dropped` and
/// `weight_time` weigh dropped requests against expected overtime in the
/// objective (dropping must dominate, see [`validate_instance`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n_robots: usize,
    pub n_humans: usize,
    pub n_pois: usize,
    pub requests: Vec<Vec<bool>>,
    pub travel: Vec<Vec<Vec<TimeDist>>>,
    pub visit: Vec<Vec<TimeDist>>,
    pub time_limit: Vec<f64>,
    pub time_margin: Vec<f64>,
    pub team_cap: Vec<usize>,
    pub weight_dropped: f64,
    pub weight_time: f64,
}

impl Instance {
    /// Index of the common start node in the travel tables.
    pub fn start_node(&self) -> usize {
        self.n_pois
    }

    /// Index of the common terminal node in the travel tables.
    pub fn terminal_node(&self) -> usize {
        self.n_pois + 1
    }

    /// Number of nodes in the travel tables (`n_pois + 2`).
    pub fn n_nodes(&self) -> usize {
        self.n_pois + 2
    }

    /// Soft penalty threshold for robot `k`: `time_limit - time_margin`.
    pub fn penalty_threshold(&self, k: usize) -> f64 {
        self.time_limit[k] - self.time_margin[k]
    }

    /// Total number of (human, POI) requests.
    pub fn total_requests(&self) -> u64 {
        self.requests
            .iter()
            .map(|row| row.iter().filter(|&&r| r).count() as u64)
            .sum()
    }

    /// Copy of the instance with every std zeroed (deterministic
    /// formulation on the same nominal means).
    pub fn deterministic_copy(&self) -> Instance {
        let mut out = self.clone();
        for table in &mut out.travel {
            for row in table {
                for t in row {
                    t.std = 0.0;
                }
            }
        }
        for row in &mut out.visit {
            for t in row {
                t.std = 0.0;
            }
        }
        out
    }
}

/// One robot's tour: the ordered POIs it visits between the start and
/// terminal nodes. An empty `pois` means the robot conducts no tour at all
/// (tour time 0, not a bare start-to-terminal trip).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub robot: usize,
    pub pois: Vec<usize>,
}

impl Route {
    pub fn empty(robot: usize) -> Self {
        Route {
            robot,
            pois: Vec::new(),
        }
    }

    pub fn new(robot: usize, pois: Vec<usize>) -> Self {
        Route { robot, pois }
    }

    pub fn is_empty(&self) -> bool {
        self.pois.is_empty()
    }
}

/// The human-to-robot assignment: `assignment[l]` is the robot guiding
/// human `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub assignment: Vec<usize>,
}

impl Matching {
    /// Team size of every robot.
    pub fn team_sizes(&self, n_robots: usize) -> Vec<usize> {
        let mut sizes = vec![0usize; n_robots];
        for &k in &self.assignment {
            if k < n_robots {
                sizes[k] += 1;
            }
        }
        sizes
    }
}

/// Routes for all robots plus the matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub matching: Matching,
}

impl Solution {
    /// All-empty routes with the given matching.
    pub fn empty_routes(n_robots: usize, matching: Matching) -> Self {
        Solution {
            routes: (0..n_robots).map(Route::empty).collect(),
            matching,
        }
    }
}

/// Objective value split into its two terms:
/// `total = weight_dropped * dropped_requests + weight_time * expected_overtime_penalty`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown {
    pub dropped_requests: u64,
    pub expected_overtime_penalty: f64,
    pub total: f64,
}

/// Structural mismatch between a solution (or route) and its instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralError {
    RouteCountMismatch { got: usize, expected: usize },
    RouteRobotMismatch { index: usize, robot: usize },
    PoiOutOfRange { robot: usize, poi: usize, n_pois: usize },
    DuplicatePoi { robot: usize, poi: usize },
    AssignmentLengthMismatch { got: usize, expected: usize },
    RobotOutOfRange { human: usize, robot: usize, n_robots: usize },
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralError::RouteCountMismatch { got, expected } => {
                write!(f, "solution has {got} routes, instance has {expected} robots")
            }
            StructuralError::RouteRobotMismatch { index, robot } => {
                write!(f, "route at position {index} claims robot {robot}")
            }
            StructuralError::PoiOutOfRange { robot, poi, n_pois } => {
                write!(f, "robot {robot}: POI {poi} out of range (instance has {n_pois} POIs)")
            }
            StructuralError::DuplicatePoi { robot, poi } => {
                write!(f, "robot {robot}: POI {poi} appears more than once on the route")
            }
            StructuralError::AssignmentLengthMismatch { got, expected } => {
                write!(f, "assignment covers {got} humans, instance has {expected}")
            }
            StructuralError::RobotOutOfRange { human, robot, n_robots } => {
                write!(f, "human {human} assigned to robot {robot}, instance has {n_robots} robots")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

/// One violated instance invariant, as reported by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn error(message: String) -> Self {
        Violation {
            severity: Severity::Error,
            message,
        }
    }

    fn warning(message: String) -> Self {
        Violation {
            severity: Severity::Warning,
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Warning => write!(f, "warning: {}", self.message),
            Severity::Error => write!(f, "error: {}", self.message),
        }
    }
}

fn check_time_dist(out: &mut Vec<Violation>, what: &str, t: TimeDist) {
    if !t.mean.is_finite() || t.mean < 0.0 {
        out.push(Violation::error(format!(
            "{what}: mean must be finite and non-negative, got {}",
            t.mean
        )));
    }
    if !t.std.is_finite() || t.std < 0.0 {
        out.push(Violation::error(format!(
            "{what}: std must be finite and non-negative, got {}",
            t.std
        )));
    }
}

/// Checks every structural invariant of an instance and returns the list of
/// violations (empty means valid). The dropped-vs-time weight ratio check
/// (`weight_dropped >= 100 * weight_time`, so that dropping a request always
/// dominates time shaping) is reported as a warning, not an error.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    if inst.n_robots == 0 {
        out.push(Violation::error("n_robots must be positive".into()));
    }
    if inst.n_humans == 0 {
        out.push(Violation::error("n_humans must be positive".into()));
    }
    if inst.n_pois == 0 {
        out.push(Violation::error("n_pois must be positive".into()));
    }

    if inst.requests.len() != inst.n_humans {
        out.push(Violation::error(format!(
            "requests matrix has {} rows, expected n_humans = {}",
            inst.requests.len(),
            inst.n_humans
        )));
    }
    for (l, row) in inst.requests.iter().enumerate() {
        if row.len() != inst.n_pois {
            out.push(Violation::error(format!(
                "requests row {l} has {} entries, expected n_pois = {}",
                row.len(),
                inst.n_pois
            )));
        }
    }

    let n_nodes = inst.n_nodes();
    if inst.travel.len() != inst.n_robots {
        out.push(Violation::error(format!(
            "travel table has {} robot layers, expected {}",
            inst.travel.len(),
            inst.n_robots
        )));
    }
    for (k, table) in inst.travel.iter().enumerate() {
        if table.len() != n_nodes {
            out.push(Violation::error(format!(
                "travel[{k}] has {} rows, expected {n_nodes}",
                table.len()
            )));
            continue;
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n_nodes {
                out.push(Violation::error(format!(
                    "travel[{k}][{i}] has {} entries, expected {n_nodes}",
                    row.len()
                )));
                continue;
            }
            for (j, &t) in row.iter().enumerate() {
                if i == j {
                    continue; // diagonal is unused
                }
                check_time_dist(&mut out, &format!("travel[{k}][{i}][{j}]"), t);
            }
        }
    }

    if inst.visit.len() != inst.n_robots {
        out.push(Violation::error(format!(
            "visit table has {} robot rows, expected {}",
            inst.visit.len(),
            inst.n_robots
        )));
    }
    for (k, row) in inst.visit.iter().enumerate() {
        if row.len() != inst.n_pois {
            out.push(Violation::error(format!(
                "visit[{k}] has {} entries, expected n_pois = {}",
                row.len(),
                inst.n_pois
            )));
            continue;
        }
        for (i, &t) in row.iter().enumerate() {
            check_time_dist(&mut out, &format!("visit[{k}][{i}]"), t);
        }
    }

    for (name, v) in [("time_limit", &inst.time_limit), ("time_margin", &inst.time_margin)] {
        if v.len() != inst.n_robots {
            out.push(Violation::error(format!(
                "{name} has {} entries, expected n_robots = {}",
                v.len(),
                inst.n_robots
            )));
        }
    }
    if inst.team_cap.len() != inst.n_robots {
        out.push(Violation::error(format!(
            "team_cap has {} entries, expected n_robots = {}",
            inst.team_cap.len(),
            inst.n_robots
        )));
    }

    for k in 0..inst.time_limit.len().min(inst.time_margin.len()) {
        let lim = inst.time_limit[k];
        let margin = inst.time_margin[k];
        if !lim.is_finite() || lim <= 0.0 {
            out.push(Violation::error(format!(
                "robot {k}: time_limit must be finite and positive, got {lim}"
            )));
        }
        if !margin.is_finite() || margin < 0.0 {
            out.push(Violation::error(format!(
                "robot {k}: time_margin must be finite and non-negative, got {margin}"
            )));
        }
        if margin >= lim {
            out.push(Violation::error(format!(
                "robot {k}: time_margin {margin} must be strictly below time_limit {lim}"
            )));
        }
    }
    for (k, &cap) in inst.team_cap.iter().enumerate() {
        if cap == 0 {
            out.push(Violation::error(format!("robot {k}: team_cap must be positive")));
        }
    }

    if !inst.weight_dropped.is_finite() || inst.weight_dropped <= 0.0 {
        out.push(Violation::error(format!(
            "weight_dropped must be finite and positive, got {}",
            inst.weight_dropped
        )));
    }
    if !inst.weight_time.is_finite() || inst.weight_time <= 0.0 {
        out.push(Violation::error(format!(
            "weight_time must be finite and positive, got {}",
            inst.weight_time
        )));
    }
    if inst.weight_dropped.is_finite()
        && inst.weight_time.is_finite()
        && inst.weight_dropped < 100.0 * inst.weight_time
    {
        out.push(Violation::warning(format!(
            "weight_dropped ({}) below 100 x weight_time ({}); dropped requests may no longer dominate the time term",
            inst.weight_dropped, inst.weight_time
        )));
    }

    out
}

/// True when the violation list contains no errors (warnings allowed).
pub fn is_valid(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.severity != Severity::Error)
}

fn check_route(inst: &Instance, k: usize, route: &Route) -> Result<(), StructuralError> {
    let mut seen = vec![false; inst.n_pois];
    for &p in &route.pois {
        if p >= inst.n_pois {
            return Err(StructuralError::PoiOutOfRange {
                robot: k,
                poi: p,
                n_pois: inst.n_pois,
            });
        }
        if seen[p] {
            return Err(StructuralError::DuplicatePoi { robot: k, poi: p });
        }
        seen[p] = true;
    }
    Ok(())
}

/// Mean and variance of the tour time along `start -> pois... -> terminal`,
/// accumulated in path order (travel leg, then visit, for every POI, then
/// the terminal leg). Every consumer of tour times walks the path in this
/// exact order so that equal paths produce bit-identical sums.
///
/// An empty path has time zero: no tour is conducted at all.
pub(crate) fn path_time_moments(inst: &Instance, k: usize, pois: &[usize]) -> (f64, f64) {
    if pois.is_empty() {
        return (0.0, 0.0);
    }
    let mut mean = 0.0;
    let mut var = 0.0;
    let mut prev = inst.start_node();
    for &p in pois {
        let leg = inst.travel[k][prev][p];
        mean += leg.mean;
        var += leg.variance();
        let visit = inst.visit[k][p];
        mean += visit.mean;
        var += visit.variance();
        prev = p;
    }
    let last = inst.travel[k][prev][inst.terminal_node()];
    mean += last.mean;
    var += last.variance();
    (mean, var)
}

/// Distribution of robot `k`'s tour time for the given route: the sum of all
/// traveling and visiting times along the path, with independent Gaussian
/// components (mean and variance add). Empty route gives `TimeDist(0, 0)`.
pub fn route_time_distribution(
    inst: &Instance,
    k: usize,
    route: &Route,
) -> Result<TimeDist, StructuralError> {
    check_route(inst, k, route)?;
    let (mean, var) = path_time_moments(inst, k, &route.pois);
    Ok(TimeDist::new(mean, libm::sqrt(var)))
}

fn check_solution(inst: &Instance, sol: &Solution) -> Result<(), StructuralError> {
    if sol.routes.len() != inst.n_robots {
        return Err(StructuralError::RouteCountMismatch {
            got: sol.routes.len(),
            expected: inst.n_robots,
        });
    }
    for (k, route) in sol.routes.iter().enumerate() {
        if route.robot != k {
            return Err(StructuralError::RouteRobotMismatch {
                index: k,
                robot: route.robot,
            });
        }
        check_route(inst, k, route)?;
    }
    if sol.matching.assignment.len() != inst.n_humans {
        return Err(StructuralError::AssignmentLengthMismatch {
            got: sol.matching.assignment.len(),
            expected: inst.n_humans,
        });
    }
    for (l, &k) in sol.matching.assignment.iter().enumerate() {
        if k >= inst.n_robots {
            return Err(StructuralError::RobotOutOfRange {
                human: l,
                robot: k,
                n_robots: inst.n_robots,
            });
        }
    }
    Ok(())
}

/// Evaluates the objective: dropped requests are the (human, POI) pairs
/// where the requested POI is missing from the assigned robot's route;
/// the time term sums every robot's expected overtime beyond
/// `time_limit - time_margin`.
pub fn evaluate_objective(
    inst: &Instance,
    sol: &Solution,
) -> Result<ObjectiveBreakdown, StructuralError> {
    check_solution(inst, sol)?;

    let mut on_route = vec![vec![false; inst.n_pois]; inst.n_robots];
    for (k, route) in sol.routes.iter().enumerate() {
        for &p in &route.pois {
            on_route[k][p] = true;
        }
    }

    let mut dropped: u64 = 0;
    for (l, row) in inst.requests.iter().enumerate() {
        let k = sol.matching.assignment[l];
        for (i, &wanted) in row.iter().enumerate() {
            if wanted && !on_route[k][i] {
                dropped += 1;
            }
        }
    }

    let mut penalty = 0.0;
    for k in 0..inst.n_robots {
        let (mean, var) = path_time_moments(inst, k, &sol.routes[k].pois);
        let dist = TimeDist::new(mean, libm::sqrt(var));
        penalty += stochastic::expected_overtime(dist, inst.penalty_threshold(k));
    }

    Ok(ObjectiveBreakdown {
        dropped_requests: dropped,
        expected_overtime_penalty: penalty,
        total: inst.weight_dropped * dropped as f64 + inst.weight_time * penalty,
    })
}

/// One violated solution constraint, as reported by [`check_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintViolation {
    /// Structural defect: the route/matching encoding itself is broken
    /// (wrong shapes, duplicate POIs, out-of-range indices). The flow
    /// constraints hold by construction for well-formed path encodings, so
    /// this is what the checker verifies in their place.
    Structure(StructuralError),
    /// Expected tour time exceeds the robot's hard limit.
    ExpectedTimeOverLimit { robot: usize, expected: f64, limit: f64 },
    /// More humans follow the robot than its cap allows.
    TeamCapExceeded { robot: usize, size: usize, cap: usize },
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintViolation::Structure(e) => write!(f, "structure: {e}"),
            ConstraintViolation::ExpectedTimeOverLimit { robot, expected, limit } => {
                write!(
                    f,
                    "robot {robot}: expected tour time {expected} exceeds limit {limit}"
                )
            }
            ConstraintViolation::TeamCapExceeded { robot, size, cap } => {
                write!(f, "robot {robot}: team size {size} exceeds cap {cap}")
            }
        }
    }
}

/// Checks a solution against every constraint and reports each violation:
/// route encoding well-formedness (which subsumes the network-flow
/// constraints), the expected-time limit per robot, full human assignment
/// and team caps. Independent of the solvers, so their outputs can be
/// audited.
pub fn check_feasibility(inst: &Instance, sol: &Solution) -> Vec<ConstraintViolation> {
    let mut out = Vec::new();

    if sol.routes.len() != inst.n_robots {
        out.push(ConstraintViolation::Structure(StructuralError::RouteCountMismatch {
            got: sol.routes.len(),
            expected: inst.n_robots,
        }));
    }
    for (k, route) in sol.routes.iter().enumerate().take(inst.n_robots) {
        if route.robot != k {
            out.push(ConstraintViolation::Structure(StructuralError::RouteRobotMismatch {
                index: k,
                robot: route.robot,
            }));
            continue;
        }
        match check_route(inst, k, route) {
            Err(e) => out.push(ConstraintViolation::Structure(e)),
            Ok(()) => {
                let (mean, _) = path_time_moments(inst, k, &route.pois);
                if mean > inst.time_limit[k] {
                    out.push(ConstraintViolation::ExpectedTimeOverLimit {
                        robot: k,
                        expected: mean,
                        limit: inst.time_limit[k],
                    });
                }
            }
        }
    }

    if sol.matching.assignment.len() != inst.n_humans {
        out.push(ConstraintViolation::Structure(StructuralError::AssignmentLengthMismatch {
            got: sol.matching.assignment.len(),
            expected: inst.n_humans,
        }));
    }
    for (l, &k) in sol.matching.assignment.iter().enumerate() {
        if k >= inst.n_robots {
            out.push(ConstraintViolation::Structure(StructuralError::RobotOutOfRange {
                human: l,
                robot: k,
                n_robots: inst.n_robots,
            }));
        }
    }
    let sizes = sol.matching.team_sizes(inst.n_robots);
    for (k, (&size, &cap)) in sizes.iter().zip(&inst.team_cap).enumerate() {
        if size > cap {
            out.push(ConstraintViolation::TeamCapExceeded { robot: k, size, cap });
        }
    }

    out
}

//! Exhaustive solver for tiny instances.
//!
//! Enumerates every cap-feasible assignment in lexicographic order and
//! routes each robot optimally for its team demand. Given the matching,
//! the objective separates per robot, so per-robot optimal routes give the
//! global optimum over the whole candidate space; the routing DP tables
//! depend only on the robot, so they are built once and reused across all
//! assignments (demand vectors repeat heavily, and the table answers any
//! of them by a final scan).
//!
//! The `stop` callback makes the budget policy the caller's business: it is
//! polled between candidates, and an exhausted budget returns the best
//! candidate seen so far (or the trivial all-dropped solution) flagged
//! non-optimal.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matching::{first_fit_matching, CapacityShortfall};
use crate::model::{evaluate_objective, Instance, Matching, ObjectiveBreakdown, Route, Solution};
use crate::routing::{best_route_from_table, build_dp, Demand, RouteEval};

/// Enumeration guards: the assignment space is `n_robots ^ n_humans` and
/// each routing table is `2^n_pois * n_pois`.
pub const EXACT_MAX_ROBOTS: usize = 3;
pub const EXACT_MAX_HUMANS: usize = 6;
pub const EXACT_MAX_POIS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    TooLarge {
        n_robots: usize,
        n_humans: usize,
        n_pois: usize,
    },
    Infeasible(CapacityShortfall),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::TooLarge {
                n_robots,
                n_humans,
                n_pois,
            } => write!(
                f,
                "instance ({n_robots} robots, {n_humans} humans, {n_pois} POIs) exceeds the \
                 exact-solver guard ({EXACT_MAX_ROBOTS}, {EXACT_MAX_HUMANS}, {EXACT_MAX_POIS})"
            ),
            ExactError::Infeasible(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub solution: Solution,
    pub objective: ObjectiveBreakdown,
    /// True when the enumeration completed; the solution is then a global
    /// optimum. False means the budget ran out and this is best-found.
    pub optimal: bool,
    /// Number of cap-feasible assignments evaluated.
    pub enumerated: u64,
}

/// Exhaustively solves the instance. `stop` is polled between candidates;
/// return `true` to abandon the enumeration.
pub fn exact_solve(
    inst: &Instance,
    mut stop: impl FnMut() -> bool,
) -> Result<ExactOutcome, ExactError> {
    if inst.n_robots > EXACT_MAX_ROBOTS
        || inst.n_humans > EXACT_MAX_HUMANS
        || inst.n_pois > EXACT_MAX_POIS
    {
        return Err(ExactError::TooLarge {
            n_robots: inst.n_robots,
            n_humans: inst.n_humans,
            n_pois: inst.n_pois,
        });
    }
    let trivial_matching =
        first_fit_matching(inst.n_humans, &inst.team_cap).map_err(ExactError::Infeasible)?;

    let tables: Vec<_> = (0..inst.n_robots).map(|k| build_dp(inst, k)).collect();
    // Demand vectors repeat heavily across assignments; cache the per-robot
    // optimal route for each one.
    let mut route_cache: Vec<BTreeMap<Vec<u32>, (Route, RouteEval)>> =
        vec![BTreeMap::new(); inst.n_robots];

    // Lexicographic DFS over assignment vectors, pruning on team caps.
    let mut assignment = vec![0usize; inst.n_humans];
    let mut load = vec![0usize; inst.n_robots];
    let mut best: Option<(f64, Solution)> = None;
    let mut enumerated = 0u64;
    let mut aborted = false;

    let mut depth = 0usize;
    let mut next_robot = vec![0usize; inst.n_humans + 1];
    loop {
        if depth == inst.n_humans {
            if stop() {
                aborted = true;
                break;
            }
            enumerated += 1;
            let matching = Matching {
                assignment: assignment.clone(),
            };
            let mut routes = Vec::with_capacity(inst.n_robots);
            let mut dropped = 0u64;
            let mut penalty = 0.0;
            for k in 0..inst.n_robots {
                let demand = build_demand_from(inst, &assignment, k);
                let (route, eval) = route_cache[k]
                    .entry(demand.per_poi.clone())
                    .or_insert_with(|| best_route_from_table(inst, k, &tables[k], &demand))
                    .clone();
                dropped += eval.dropped_demand;
                penalty += eval.penalty;
                routes.push(route);
            }
            let total = inst.weight_dropped * dropped as f64 + inst.weight_time * penalty;
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, Solution { routes, matching }));
            }
            // Backtrack.
            if depth == 0 {
                break;
            }
            depth -= 1;
            load[assignment[depth]] -= 1;
            next_robot[depth] = assignment[depth] + 1;
            continue;
        }

        let mut k = next_robot[depth];
        while k < inst.n_robots && load[k] >= inst.team_cap[k] {
            k += 1;
        }
        if k == inst.n_robots {
            // No robot left for this human: backtrack.
            next_robot[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            load[assignment[depth]] -= 1;
            next_robot[depth] = assignment[depth] + 1;
            continue;
        }
        assignment[depth] = k;
        load[k] += 1;
        depth += 1;
        next_robot[depth] = 0;
    }

    let solution = match best {
        Some((_, sol)) => sol,
        None => Solution::empty_routes(inst.n_robots, trivial_matching),
    };
    let objective = evaluate_objective(inst, &solution).expect("enumerated solutions are valid");
    Ok(ExactOutcome {
        solution,
        objective,
        optimal: !aborted,
        enumerated,
    })
}

fn build_demand_from(inst: &Instance, assignment: &[usize], k: usize) -> Demand {
    let mut per_poi = vec![0u32; inst.n_pois];
    for (l, &robot) in assignment.iter().enumerate() {
        if robot == k {
            for (i, &wanted) in inst.requests[l].iter().enumerate() {
                if wanted {
                    per_poi[i] += 1;
                }
            }
        }
    }
    Demand { per_poi }
}

//! Per-robot tour selection and ordering.
//!
//! With the matching fixed, each robot solves its own prize-collecting
//! problem: pick a subset of POIs and an order that minimize
//! `weight_dropped * (unserved team demand) + weight_time * expected overtime`
//! subject to the hard expected-time limit. Two solvers share the same
//! route evaluation:
//!
//! - [`solve_routing`] — greedy best-insertion (candidates ranked by demand
//!   per marginal expected second) followed by first-improvement local
//!   search over insert / remove / relocate / segment-reversal moves, with
//!   the scan order shuffled by the seed. Deterministic per seed.
//! - [`exact_routing`] — exhaustive dynamic program over (visited-subset,
//!   last-POI) states. Each state keeps the Pareto frontier of
//!   (mean, variance) pairs of the elapsed-time distribution; the overtime
//!   penalty is monotone in both coordinates, so dominated pairs can never
//!   win and the frontier suffices for global optimality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{self, Instance, Matching, Route, TimeDist};
use crate::stochastic;

/// Improvements smaller than this are treated as noise; every accepted
/// local-search move must beat it, which bounds the number of moves.
const COST_EPS: f64 = 1e-9;

/// Per-POI demand of one robot's team: `per_poi[i]` humans on the team
/// requested POI `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    pub per_poi: Vec<u32>,
}

impl Demand {
    pub fn total(&self) -> u64 {
        self.per_poi.iter().map(|&d| d as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.per_poi.iter().all(|&d| d == 0)
    }
}

/// Aggregates the requests of every human assigned to robot `k`.
pub fn build_demand(inst: &Instance, m: &Matching, k: usize) -> Demand {
    let mut per_poi = vec![0u32; inst.n_pois];
    for (l, &robot) in m.assignment.iter().enumerate() {
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

/// Cost breakdown of one robot's route against its team demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteEval {
    pub time: TimeDist,
    pub dropped_demand: u64,
    pub penalty: f64,
    pub cost: f64,
    pub feasible: bool,
}

/// Evaluates a POI sequence for robot `k` (assumed structurally valid).
pub fn evaluate_route(inst: &Instance, k: usize, demand: &Demand, pois: &[usize]) -> RouteEval {
    let (mean, var) = model::path_time_moments(inst, k, pois);
    let time = TimeDist::new(mean, libm::sqrt(var));
    let served: u64 = pois.iter().map(|&p| demand.per_poi[p] as u64).sum();
    let dropped = demand.total() - served;
    let penalty = stochastic::expected_overtime(time, inst.penalty_threshold(k));
    RouteEval {
        time,
        dropped_demand: dropped,
        penalty,
        cost: inst.weight_dropped * dropped as f64 + inst.weight_time * penalty,
        feasible: mean <= inst.time_limit[k],
    }
}

/// Heuristic solver for robot `k`'s sub-problem. The returned route always
/// respects the expected-time limit (the empty route is the fallback) and
/// is identical for identical `(instance, demand, seed)`.
pub fn solve_routing(inst: &Instance, k: usize, demand: &Demand, seed: u64) -> Route {
    if demand.is_zero() {
        return Route::empty(k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pois = Vec::new();
    greedy_insert(inst, k, demand, &mut pois);
    local_search(inst, k, demand, &mut pois, &mut rng);
    Route::new(k, pois)
}

fn greedy_insert(inst: &Instance, k: usize, demand: &Demand, pois: &mut Vec<usize>) {
    let mut in_route = vec![false; inst.n_pois];
    loop {
        let current = evaluate_route(inst, k, demand, pois);
        // (demand density, poi, position); first-found wins density ties.
        let mut best: Option<(f64, usize, usize)> = None;
        for poi in 0..inst.n_pois {
            if in_route[poi] || demand.per_poi[poi] == 0 {
                continue;
            }
            for pos in 0..=pois.len() {
                let mut cand = pois.clone();
                cand.insert(pos, poi);
                let eval = evaluate_route(inst, k, demand, &cand);
                if !eval.feasible || eval.cost >= current.cost - COST_EPS {
                    continue;
                }
                let marginal = (eval.time.mean - current.time.mean).max(1e-9);
                let density = demand.per_poi[poi] as f64 / marginal;
                if best.is_none_or(|(d, _, _)| density > d) {
                    best = Some((density, poi, pos));
                }
            }
        }
        match best {
            Some((_, poi, pos)) => {
                pois.insert(pos, poi);
                in_route[poi] = true;
            }
            None => break,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Insert { poi: usize, pos: usize },
    Remove { pos: usize },
    Relocate { from: usize, to: usize },
    Reverse { a: usize, b: usize },
}

fn apply_move(pois: &[usize], mv: Move) -> Vec<usize> {
    let mut out = pois.to_vec();
    match mv {
        Move::Insert { poi, pos } => out.insert(pos, poi),
        Move::Remove { pos } => {
            out.remove(pos);
        }
        Move::Relocate { from, to } => {
            let poi = out.remove(from);
            out.insert(to, poi);
        }
        Move::Reverse { a, b } => out[a..=b].reverse(),
    }
    out
}

/// First-improvement local search to a fixpoint. Every pass enumerates the
/// whole neighborhood, shuffles it with the call's generator and commits
/// the first strictly improving feasible move.
fn local_search(
    inst: &Instance,
    k: usize,
    demand: &Demand,
    pois: &mut Vec<usize>,
    rng: &mut ChaCha8Rng,
) {
    let mut moves = Vec::new();
    loop {
        let current = evaluate_route(inst, k, demand, pois);
        let len = pois.len();

        moves.clear();
        let mut in_route = vec![false; inst.n_pois];
        for &p in pois.iter() {
            in_route[p] = true;
        }
        for poi in 0..inst.n_pois {
            if !in_route[poi] && demand.per_poi[poi] > 0 {
                for pos in 0..=len {
                    moves.push(Move::Insert { poi, pos });
                }
            }
        }
        for pos in 0..len {
            moves.push(Move::Remove { pos });
        }
        for from in 0..len {
            for to in 0..len {
                if to != from {
                    moves.push(Move::Relocate { from, to });
                }
            }
        }
        for a in 0..len {
            for b in (a + 1)..len {
                moves.push(Move::Reverse { a, b });
            }
        }
        moves.shuffle(rng);

        let mut improved = false;
        for &mv in &moves {
            let cand = apply_move(pois, mv);
            let eval = evaluate_route(inst, k, demand, &cand);
            if eval.feasible && eval.cost < current.cost - COST_EPS {
                *pois = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
}

/// Too many POIs for the exact dynamic program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TooManyPois {
    pub n_pois: usize,
    pub max: usize,
}

impl fmt::Display for TooManyPois {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exact routing handles at most {} POIs, instance has {}",
            self.max, self.n_pois
        )
    }
}

/// State-space guard for [`exact_routing`] (the table has `2^n * n` states).
pub const EXACT_ROUTING_MAX_POIS: usize = 12;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DpEntry {
    mean: f64,
    var: f64,
}

/// Pareto frontiers of elapsed (mean, variance) per (visited-set, last-POI)
/// state. Independent of the demand vector, so one table answers every
/// demand for the same robot.
pub(crate) struct DpTable {
    n: usize,
    frontiers: Vec<Vec<Vec<DpEntry>>>,
}

/// Inserts an entry unless a stored one dominates it (mean and variance
/// both no larger); drops stored entries the new one dominates. Exact
/// moment ties keep the first-seen entry (route tie-breaking happens in a
/// separate pass, see [`best_route_from_table`]).
fn frontier_insert(table: &mut DpTable, mask: usize, last: usize, new: DpEntry) {
    let mut i = 0;
    while i < table.frontiers[mask][last].len() {
        let e = table.frontiers[mask][last][i];
        let e_dominates = e.mean <= new.mean && e.var <= new.var;
        let new_dominates = new.mean <= e.mean && new.var <= e.var;
        if e_dominates {
            return;
        } else if new_dominates {
            table.frontiers[mask][last].swap_remove(i);
        } else {
            i += 1;
        }
    }
    table.frontiers[mask][last].push(new);
}

/// Builds the DP table for robot `k`. Partial states whose mean plus the
/// cheapest possible exit leg already exceed the time limit are pruned;
/// they cannot complete into a feasible tour because every extension only
/// adds non-negative means.
pub(crate) fn build_dp(inst: &Instance, k: usize) -> DpTable {
    let n = inst.n_pois;
    let start = inst.start_node();
    let terminal = inst.terminal_node();
    let limit = inst.time_limit[k];
    let min_exit = (0..n)
        .map(|p| inst.travel[k][p][terminal].mean)
        .fold(f64::INFINITY, f64::min);

    let mut table = DpTable {
        n,
        frontiers: vec![vec![Vec::new(); n]; 1 << n],
    };

    for p in 0..n {
        let leg = inst.travel[k][start][p];
        let visit = inst.visit[k][p];
        let mean = leg.mean + visit.mean;
        let var = leg.variance() + visit.variance();
        if mean + min_exit > limit {
            continue;
        }
        frontier_insert(&mut table, 1 << p, p, DpEntry { mean, var });
    }

    for mask in 1usize..(1 << n) {
        for last in 0..n {
            if mask & (1 << last) == 0 {
                continue;
            }
            for idx in 0..table.frontiers[mask][last].len() {
                let e = table.frontiers[mask][last][idx];
                for next in 0..n {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let leg = inst.travel[k][last][next];
                    let visit = inst.visit[k][next];
                    let mean = e.mean + leg.mean + visit.mean;
                    let var = e.var + leg.variance() + visit.variance();
                    if mean + min_exit > limit {
                        continue;
                    }
                    frontier_insert(&mut table, mask | (1 << next), next, DpEntry { mean, var });
                }
            }
        }
    }

    table
}

/// Best route and cost for the given demand, read off a prebuilt table.
/// Ties resolve to fewer POIs, then the lexicographically smaller route.
///
/// The table answers the optimal cost and the fewest POIs attaining it
/// (dominated states share their mask, so pruning never loses a shorter
/// optimum). It cannot answer the lexicographic tie-break, because a
/// dominated state may still carry the lexicographically smallest of the
/// cost-tied routes; a bounded depth-first pass recovers that one.
pub(crate) fn best_route_from_table(
    inst: &Instance,
    k: usize,
    table: &DpTable,
    demand: &Demand,
) -> (Route, RouteEval) {
    let n = table.n;
    let terminal = inst.terminal_node();
    let limit = inst.time_limit[k];
    let threshold = inst.penalty_threshold(k);
    let total = demand.total();

    let mut served = vec![0u64; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        served[mask] = served[mask & (mask - 1)] + demand.per_poi[low] as u64;
    }

    // The empty route (no tour at all) is always feasible.
    let empty = evaluate_route(inst, k, demand, &[]);
    let mut best_cost = empty.cost;
    let mut best_len = 0usize;

    for mask in 1usize..(1 << n) {
        let dropped = total - served[mask];
        let len = mask.count_ones() as usize;
        for last in 0..n {
            if mask & (1 << last) == 0 {
                continue;
            }
            for e in &table.frontiers[mask][last] {
                let exit = inst.travel[k][last][terminal];
                let mean = e.mean + exit.mean;
                if mean > limit {
                    continue;
                }
                let var = e.var + exit.variance();
                let time = TimeDist::new(mean, libm::sqrt(var));
                let penalty = stochastic::expected_overtime(time, threshold);
                let cost = inst.weight_dropped * dropped as f64 + inst.weight_time * penalty;
                if cost < best_cost || (cost == best_cost && len < best_len) {
                    best_cost = cost;
                    best_len = len;
                }
            }
        }
    }

    if best_len == 0 {
        return (Route::empty(k), empty);
    }
    let pois = lex_min_route(inst, k, demand, best_cost, best_len);
    let eval = evaluate_route(inst, k, demand, &pois);
    debug_assert_eq!(eval.cost, best_cost);
    (Route::new(k, pois), eval)
}

/// Lexicographically smallest route of exactly `opt_len` POIs whose cost
/// equals `opt_cost`. Prefixes are explored in ascending POI order, pruned
/// by time feasibility and a cost lower bound, so the first complete hit
/// is the answer. The bound assumes the best case for every open slot: the
/// largest remaining demands get served and only the cheapest possible
/// exit leg is added.
fn lex_min_route(
    inst: &Instance,
    k: usize,
    demand: &Demand,
    opt_cost: f64,
    opt_len: usize,
) -> Vec<usize> {
    let n = inst.n_pois;
    let terminal = inst.terminal_node();
    let limit = inst.time_limit[k];
    let threshold = inst.penalty_threshold(k);
    let total = demand.total();
    let min_exit = (0..n)
        .map(|p| inst.travel[k][p][terminal].mean)
        .fold(f64::INFINITY, f64::min);
    // Pruning slack: the bound mixes sums from different accumulation
    // orders, so exact comparisons could over-prune by a rounding error.
    let slack = 1e-9 * (1.0 + opt_cost.abs());

    struct Dfs<'a> {
        inst: &'a Instance,
        k: usize,
        demand: &'a Demand,
        opt_cost: f64,
        opt_len: usize,
        limit: f64,
        threshold: f64,
        terminal: usize,
        min_exit: f64,
        total: u64,
        slack: f64,
        used: Vec<bool>,
        prefix: Vec<usize>,
    }

    impl Dfs<'_> {
        /// Upper bound on demand servable by the remaining open slots: the
        /// largest demands among the POIs still off the route.
        fn max_extra_served(&self, slots: usize) -> u64 {
            let mut ds: Vec<u32> = (0..self.inst.n_pois)
                .filter(|&i| !self.used[i])
                .map(|i| self.demand.per_poi[i])
                .collect();
            ds.sort_unstable_by(|a, b| b.cmp(a));
            ds.iter().take(slots).map(|&d| d as u64).sum()
        }

        fn rec(&mut self, mean: f64, var: f64, served: u64) -> Option<Vec<usize>> {
            if self.prefix.len() == self.opt_len {
                let last = *self.prefix.last().expect("opt_len > 0");
                let exit = self.inst.travel[self.k][last][self.terminal];
                let fmean = mean + exit.mean;
                if fmean > self.limit {
                    return None;
                }
                let fvar = var + exit.variance();
                let penalty = stochastic::expected_overtime(
                    TimeDist::new(fmean, libm::sqrt(fvar)),
                    self.threshold,
                );
                let cost = self.inst.weight_dropped * (self.total - served) as f64
                    + self.inst.weight_time * penalty;
                if cost == self.opt_cost {
                    return Some(self.prefix.clone());
                }
                return None;
            }

            let from = self
                .prefix
                .last()
                .copied()
                .unwrap_or_else(|| self.inst.start_node());
            for next in 0..self.inst.n_pois {
                if self.used[next] {
                    continue;
                }
                let leg = self.inst.travel[self.k][from][next];
                let visit = self.inst.visit[self.k][next];
                let nm = mean + leg.mean + visit.mean;
                let nv = var + leg.variance() + visit.variance();
                if nm + self.min_exit > self.limit {
                    continue;
                }

                self.used[next] = true;
                let served_next = served + self.demand.per_poi[next] as u64;
                let slots = self.opt_len - self.prefix.len() - 1;
                let min_dropped = self
                    .total
                    .saturating_sub(served_next + self.max_extra_served(slots));
                let lb_penalty = stochastic::expected_overtime(
                    TimeDist::new(nm + self.min_exit, libm::sqrt(nv)),
                    self.threshold,
                );
                let lb = self.inst.weight_dropped * min_dropped as f64
                    + self.inst.weight_time * lb_penalty;
                if lb > self.opt_cost + self.slack {
                    self.used[next] = false;
                    continue;
                }

                self.prefix.push(next);
                let hit = self.rec(nm, nv, served_next);
                self.prefix.pop();
                self.used[next] = false;
                if hit.is_some() {
                    return hit;
                }
            }
            None
        }
    }

    let mut dfs = Dfs {
        inst,
        k,
        demand,
        opt_cost,
        opt_len,
        limit,
        threshold,
        terminal,
        min_exit,
        total,
        slack,
        used: vec![false; n],
        prefix: Vec::with_capacity(opt_len),
    };
    dfs.rec(0.0, 0.0, 0)
        .expect("the DP optimum is reachable by the lexicographic search")
}

/// Globally optimal route for robot `k`'s sub-problem, by dynamic
/// programming over (visited-subset, last-POI) states.
pub fn exact_routing(inst: &Instance, k: usize, demand: &Demand) -> Result<Route, TooManyPois> {
    if inst.n_pois > EXACT_ROUTING_MAX_POIS {
        return Err(TooManyPois {
            n_pois: inst.n_pois,
            max: EXACT_ROUTING_MAX_POIS,
        });
    }
    if demand.is_zero() {
        return Ok(Route::empty(k));
    }
    let table = build_dp(inst, k);
    Ok(best_route_from_table(inst, k, &table, demand).0)
}

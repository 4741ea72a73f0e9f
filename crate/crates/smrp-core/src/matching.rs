//! Exact matching of humans to robot guides.
//!
//! With routes fixed, assigning each human to the robot whose route misses
//! the fewest of their requested POIs is a capacitated bipartite
//! transportation problem: humans supply one unit each, robot `k` absorbs up
//! to `team_cap[k]`. Costs are integral drop counts, so the problem is
//! solved exactly in polynomial time by successive shortest augmenting
//! paths with Johnson potentials (one Dijkstra per human, no LP solver).
//!
//! Determinism: humans are augmented in index order and Dijkstra breaks
//! distance ties by the lowest node index, so equal-cost matchings always
//! resolve to the same assignment (lowest robot index wins).

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::model::{Instance, Matching, Route};

/// Drop-count cost of assigning each human to each robot:
/// `costs[l][k]` = number of human `l`'s requested POIs missing from robot
/// `k`'s route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    pub costs: Vec<Vec<u32>>,
}

impl CostMatrix {
    pub fn n_humans(&self) -> usize {
        self.costs.len()
    }

    pub fn n_robots(&self) -> usize {
        self.costs.first().map_or(0, Vec::len)
    }
}

/// Builds the cost matrix for the given routes (one per robot, in robot
/// order).
pub fn build_cost_matrix(inst: &Instance, routes: &[Route]) -> CostMatrix {
    let mut on_route = vec![vec![false; inst.n_pois]; inst.n_robots];
    for (k, route) in routes.iter().enumerate() {
        for &p in &route.pois {
            on_route[k][p] = true;
        }
    }
    let costs = inst
        .requests
        .iter()
        .map(|row| {
            (0..inst.n_robots)
                .map(|k| {
                    row.iter()
                        .enumerate()
                        .filter(|&(i, &wanted)| wanted && !on_route[k][i])
                        .count() as u32
                })
                .collect()
        })
        .collect();
    CostMatrix { costs }
}

/// Total team capacity cannot hold every human.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityShortfall {
    pub required: usize,
    pub available: usize,
}

impl fmt::Display for CapacityShortfall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "team caps hold {} humans but {} must be assigned (short by {})",
            self.available,
            self.required,
            self.required - self.available
        )
    }
}

/// Assigns humans to robots in index order, lowest robot with spare
/// capacity first. Ignores costs; used for trivial/baseline solutions.
pub fn first_fit_matching(n_humans: usize, caps: &[usize]) -> Result<Matching, CapacityShortfall> {
    check_capacity(n_humans, caps)?;
    let mut load = vec![0usize; caps.len()];
    let mut assignment = Vec::with_capacity(n_humans);
    for _ in 0..n_humans {
        let k = (0..caps.len())
            .find(|&k| load[k] < caps[k])
            .expect("total capacity was checked");
        load[k] += 1;
        assignment.push(k);
    }
    Ok(Matching { assignment })
}

fn check_capacity(n_humans: usize, caps: &[usize]) -> Result<(), CapacityShortfall> {
    let available: usize = caps.iter().sum();
    if available < n_humans {
        Err(CapacityShortfall {
            required: n_humans,
            available,
        })
    } else {
        Ok(())
    }
}

const INF: i64 = i64::MAX / 4;

/// Finds a cap-feasible assignment minimizing the total drop count.
/// The optimum is exact; see the module notes for the tie-break.
pub fn solve_matching(c: &CostMatrix, caps: &[usize]) -> Result<Matching, CapacityShortfall> {
    let n_humans = c.n_humans();
    let n_robots = caps.len();
    check_capacity(n_humans, caps)?;

    // Node ids: humans 0..n_humans, robots n_humans..n_humans+n_robots.
    let n_nodes = n_humans + n_robots;
    let robot_node = |k: usize| n_humans + k;

    let mut assignment: Vec<Option<usize>> = vec![None; n_humans];
    let mut load = vec![0usize; n_robots];
    let mut pot = vec![0i64; n_nodes];

    let mut dist = vec![INF; n_nodes];
    let mut settled = vec![false; n_nodes];
    // For a robot node, the human whose forward edge reached it.
    let mut parent_human = vec![usize::MAX; n_robots];

    for source in 0..n_humans {
        dist.fill(INF);
        settled.fill(false);
        dist[source] = 0;

        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, source)));

        let mut target: Option<(usize, i64)> = None;
        while let Some(Reverse((d, v))) = heap.pop() {
            if settled[v] || d > dist[v] {
                continue;
            }
            settled[v] = true;

            if v >= n_humans {
                let k = v - n_humans;
                if load[k] < caps[k] {
                    target = Some((k, d));
                    break;
                }
                // Backward edges: unassign one of this robot's humans.
                for (l, assigned) in assignment.iter().enumerate() {
                    if *assigned != Some(k) {
                        continue;
                    }
                    let reduced = -(c.costs[l][k] as i64) + pot[v] - pot[l];
                    debug_assert!(reduced >= 0, "negative reduced cost on backward edge");
                    let nd = d + reduced;
                    if nd < dist[l] {
                        dist[l] = nd;
                        heap.push(Reverse((nd, l)));
                    }
                }
            } else {
                // Forward edges: assign human v to any robot it is not on.
                for k in 0..n_robots {
                    if assignment[v] == Some(k) {
                        continue;
                    }
                    let w = robot_node(k);
                    let reduced = c.costs[v][k] as i64 + pot[v] - pot[w];
                    debug_assert!(reduced >= 0, "negative reduced cost on forward edge");
                    let nd = d + reduced;
                    if nd < dist[w] {
                        dist[w] = nd;
                        parent_human[k] = v;
                        heap.push(Reverse((nd, w)));
                    }
                }
            }
        }

        let (target_robot, target_dist) =
            target.expect("a robot with spare capacity is always reachable");

        for v in 0..n_nodes {
            pot[v] += dist[v].min(target_dist);
        }

        // Flip assignments along the augmenting path back to the source.
        let mut k = target_robot;
        load[k] += 1;
        loop {
            let l = parent_human[k];
            let previous = assignment[l];
            assignment[l] = Some(k);
            match previous {
                None => break, // reached the source human
                Some(prev_robot) => k = prev_robot,
            }
        }
    }

    Ok(Matching {
        assignment: assignment
            .into_iter()
            .map(|a| a.expect("every human augmented"))
            .collect(),
    })
}

/// Total drop count of an assignment under a cost matrix.
pub fn matching_cost(c: &CostMatrix, m: &Matching) -> u64 {
    m.assignment
        .iter()
        .enumerate()
        .map(|(l, &k)| c.costs[l][k] as u64)
        .sum()
}

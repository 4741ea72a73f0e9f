//! Randomized instance generator.
//!
//! POIs plus the start and terminal nodes are placed uniformly in the unit
//! square; travel means are Euclidean distances scaled by `speed_factor`
//! seconds per unit, identical for every robot. Visit means are drawn
//! uniformly per (robot, POI), requests are independent Bernoulli draws,
//! and every std is `std_frac` times its mean (`std_frac = 0` produces a
//! fully deterministic instance). Team caps are `ceil(humans / robots)`
//! plus a slack seat. A fixed seed reproduces the instance exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smrp_core::model::{Instance, TimeDist};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Std of every travel/visit time as a fraction of its mean.
    pub std_frac: f64,
    /// Probability that a human requests any given POI.
    pub req_prob: f64,
    /// Seconds of travel per unit of distance in the unit square.
    pub speed_factor: f64,
    pub visit_min: f64,
    pub visit_max: f64,
    pub time_limit: f64,
    /// Penalty margin as a fraction of the time limit.
    pub margin_frac: f64,
    /// Extra team seats beyond the even split.
    pub cap_slack: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            std_frac: 0.0,
            req_prob: 0.2,
            speed_factor: 100.0,
            visit_min: 60.0,
            visit_max: 300.0,
            time_limit: 1800.0,
            margin_frac: 0.1,
            cap_slack: 1,
        }
    }
}

pub fn generate_instance(
    n_robots: usize,
    n_humans: usize,
    n_pois: usize,
    seed: u64,
    params: &GenParams,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_nodes = n_pois + 2;

    // Draw order is part of the format: coordinates (POIs, then start,
    // then terminal), visit means robot-major, then requests human-major.
    let coords: Vec<(f64, f64)> = (0..n_nodes)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let mut base_travel = vec![vec![TimeDist::ZERO; n_nodes]; n_nodes];
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            if i == j {
                continue;
            }
            let dx = coords[i].0 - coords[j].0;
            let dy = coords[i].1 - coords[j].1;
            let mean = params.speed_factor * (dx * dx + dy * dy).sqrt();
            base_travel[i][j] = TimeDist::new(mean, params.std_frac * mean);
        }
    }
    let travel = vec![base_travel; n_robots];

    let visit = (0..n_robots)
        .map(|_| {
            (0..n_pois)
                .map(|_| {
                    let mean = rng.random_range(params.visit_min..=params.visit_max);
                    TimeDist::new(mean, params.std_frac * mean)
                })
                .collect()
        })
        .collect();

    let requests = (0..n_humans)
        .map(|_| (0..n_pois).map(|_| rng.random_bool(params.req_prob)).collect())
        .collect();

    let cap = n_humans.div_ceil(n_robots) + params.cap_slack;

    Instance {
        n_robots,
        n_humans,
        n_pois,
        requests,
        travel,
        visit,
        time_limit: vec![params.time_limit; n_robots],
        time_margin: vec![params.margin_frac * params.time_limit; n_robots],
        team_cap: vec![cap; n_robots],
        weight_dropped: 1000.0,
        weight_time: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smrp_core::model::{is_valid, validate_instance};

    #[test]
    fn fixed_seed_reproduces_the_instance() {
        let p = GenParams {
            std_frac: 0.3,
            ..GenParams::default()
        };
        let a = generate_instance(3, 7, 5, 1234, &p);
        let b = generate_instance(3, 7, 5, 1234, &p);
        assert_eq!(a, b);
        let c = generate_instance(3, 7, 5, 1235, &p);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_std_frac_gives_a_deterministic_instance() {
        let inst = generate_instance(2, 4, 6, 7, &GenParams::default());
        assert!(inst
            .travel
            .iter()
            .flatten()
            .flatten()
            .all(|t| t.std == 0.0));
        assert!(inst.visit.iter().flatten().all(|t| t.std == 0.0));
    }

    #[test]
    fn all_benchmark_sizes_generate_valid_instances() {
        for &(r, h, p) in &[
            (4usize, 10usize, 10usize),
            (4, 10, 50),
            (10, 50, 20),
            (20, 100, 30),
            (50, 250, 50),
        ] {
            let inst = generate_instance(r, h, p, 42, &GenParams::default());
            let violations = validate_instance(&inst);
            assert!(is_valid(&violations), "({r},{h},{p}): {violations:?}");
            assert!(violations.is_empty(), "({r},{h},{p}): {violations:?}");
            let total_cap: usize = inst.team_cap.iter().sum();
            assert!(total_cap >= h);
        }
    }

    #[test]
    fn travel_tables_are_symmetric_and_shared_across_robots() {
        let inst = generate_instance(3, 5, 6, 9, &GenParams::default());
        for k in 0..3 {
            assert_eq!(inst.travel[k], inst.travel[0]);
        }
        let n = inst.n_nodes();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert_eq!(inst.travel[0][i][j].mean, inst.travel[0][j][i].mean);
                }
            }
        }
    }
}

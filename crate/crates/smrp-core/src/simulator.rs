//! Stochastic execution of a planned solution.
//!
//! Execution noise has two independent sources. Travel legs are inflated by
//! wasted robot actions: a leg with nominal mean `m` needs `ceil(m)` useful
//! action steps, each attempt succeeds with probability
//! `correct_action_rate`, and the realized leg time is
//! `m * (1 + wasted / needed)`. The expected inflation is
//! `(1/rate - 1) * m`, so the correct-action rate is the single knob for
//! environmental disturbance. Visit times are drawn from a Gaussian around
//! the nominal mean with std `visit_std_fraction * mean`, truncated at
//! zero.
//!
//! Trials use derived per-trial seeds and robots are walked in index order
//! within a trial, so results are reproducible regardless of how trials
//! would be scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::{Instance, Solution};
use crate::seeding::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Fraction of robot actions that advance the tour, in `[0, 1]`.
    pub correct_action_rate: f64,
    /// Visit-time std as a fraction of the nominal visit mean.
    pub visit_std_fraction: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Realized tour times (seconds) and time-limit satisfaction per robot and
/// trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// `tour_times[k][t]` = robot `k`'s realized tour time in trial `t`.
    pub tour_times: Vec<Vec<f64>>,
    /// `satisfied[k][t]` = realized time within the robot's time limit.
    pub satisfied: Vec<Vec<bool>>,
}

impl SimResult {
    pub fn mean_time(&self, k: usize) -> f64 {
        let times = &self.tour_times[k];
        times.iter().sum::<f64>() / times.len() as f64
    }

    pub fn std_time(&self, k: usize) -> f64 {
        let times = &self.tour_times[k];
        let mean = self.mean_time(k);
        let var = times.iter().map(|&t| (t - mean) * (t - mean)).sum::<f64>() / times.len() as f64;
        libm::sqrt(var)
    }

    pub fn satisfaction_fraction(&self, k: usize) -> f64 {
        let flags = &self.satisfied[k];
        flags.iter().filter(|&&s| s).count() as f64 / flags.len() as f64
    }
}

fn realized_leg(mean: f64, rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    if rate >= 1.0 {
        return mean;
    }
    if rate <= 0.0 {
        // The robot never advances; the leg never completes.
        return f64::INFINITY;
    }
    let needed = libm::ceil(mean) as u64;
    let mut successes = 0u64;
    let mut wasted = 0u64;
    loop {
        if rng.random::<f64>() < rate {
            successes += 1;
            if successes == needed {
                break;
            }
        } else {
            wasted += 1;
        }
    }
    mean * (1.0 + wasted as f64 / needed as f64)
}

fn realized_visit(mean: f64, std_fraction: f64, rng: &mut ChaCha8Rng) -> f64 {
    if std_fraction == 0.0 || mean == 0.0 {
        return mean;
    }
    let z: f64 = StandardNormal.sample(rng);
    (mean + std_fraction * mean * z).max(0.0)
}

/// Walks one robot's route, accumulating realized leg and visit times in
/// path order (same order as the planner's tour-time evaluation, so the
/// zero-noise case reproduces the planned mean bit for bit). Empty routes
/// take no time and draw nothing.
fn simulate_tour(
    inst: &Instance,
    k: usize,
    pois: &[usize],
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> f64 {
    if pois.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut prev = inst.start_node();
    for &p in pois {
        acc += realized_leg(inst.travel[k][prev][p].mean, cfg.correct_action_rate, rng);
        acc += realized_visit(inst.visit[k][p].mean, cfg.visit_std_fraction, rng);
        prev = p;
    }
    acc += realized_leg(
        inst.travel[k][prev][inst.terminal_node()].mean,
        cfg.correct_action_rate,
        rng,
    );
    acc
}

/// Executes the solution `cfg.trials` times and records realized tour
/// times. Deterministic for a fixed seed.
pub fn simulate(inst: &Instance, sol: &Solution, cfg: &SimConfig) -> SimResult {
    let mut tour_times = alloc::vec![Vec::with_capacity(cfg.trials); inst.n_robots];
    let mut satisfied = alloc::vec![Vec::with_capacity(cfg.trials); inst.n_robots];
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, trial as u64, 0));
        for k in 0..inst.n_robots {
            let time = simulate_tour(inst, k, &sol.routes[k].pois, cfg, &mut rng);
            tour_times[k].push(time);
            satisfied[k].push(time <= inst.time_limit[k]);
        }
    }
    SimResult {
        tour_times,
        satisfied,
    }
}

/// One summary row of a correct-action-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub rate: f64,
    pub robot: usize,
    pub mean_time: f64,
    pub std_time: f64,
    pub satisfy_fraction: f64,
}

/// Runs [`simulate`] once per rate (same seed and trial count from the
/// template) and summarizes per robot, rates in the given order.
pub fn parametric_study(
    inst: &Instance,
    sol: &Solution,
    rates: &[f64],
    template: &SimConfig,
) -> Vec<StudyRow> {
    let mut rows = Vec::with_capacity(rates.len() * inst.n_robots);
    for &rate in rates {
        let cfg = SimConfig {
            correct_action_rate: rate,
            ..*template
        };
        let result = simulate(inst, sol, &cfg);
        for k in 0..inst.n_robots {
            rows.push(StudyRow {
                rate,
                robot: k,
                mean_time: result.mean_time(k),
                std_time: result.std_time(k),
                satisfy_fraction: result.satisfaction_fraction(k),
            });
        }
    }
    rows
}

//! Benchmark harness: a grid of instance sizes crossed with solvers and
//! seeds, one CSV row per cell.
//!
//! Rows run in parallel up to a job limit but are reported in grid order
//! (sizes nested robots, humans, POIs; then solver; then seed), so the
//! report layout is independent of scheduling. Each row re-generates its
//! instance from the seed, times the solve, and evaluates the objective
//! under the formulation the solver addressed. Exact solvers outside
//! their size guard are recorded as skipped rather than failing the run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smrp_core::model::evaluate_objective;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::gen::{generate_instance, GenParams};
use crate::solvers::{run_solver, SolveError, SolverKind};

fn default_req_prob() -> f64 {
    0.2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkGrid {
    pub robot_counts: Vec<usize>,
    pub human_counts: Vec<usize>,
    pub poi_counts: Vec<usize>,
    pub solvers: Vec<SolverKind>,
    /// Seconds granted to each exact solve before it returns best-found.
    pub time_budget: f64,
    pub seeds: Vec<u64>,
    /// Generator noise level for the instances (0 = deterministic).
    #[serde(default)]
    pub std_frac: f64,
    #[serde(default = "default_req_prob")]
    pub req_prob: f64,
}

pub fn validate_grid(grid: &BenchmarkGrid) -> Vec<String> {
    let mut out = Vec::new();
    for (name, empty) in [
        ("robot_counts", grid.robot_counts.is_empty()),
        ("human_counts", grid.human_counts.is_empty()),
        ("poi_counts", grid.poi_counts.is_empty()),
        ("seeds", grid.seeds.is_empty()),
        ("solvers", grid.solvers.is_empty()),
    ] {
        if empty {
            out.push(format!("{name} must be non-empty"));
        }
    }
    if grid.time_budget.is_nan() || grid.time_budget <= 0.0 {
        out.push(format!("time_budget must be positive, got {}", grid.time_budget));
    }
    if grid.robot_counts.contains(&0)
        || grid.human_counts.contains(&0)
        || grid.poi_counts.contains(&0)
    {
        out.push("all sizes must be positive".to_string());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Solved {
        objective: f64,
        dropped: u64,
        wall_ms: u64,
        nontrivial: bool,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub robots: usize,
    pub humans: usize,
    pub pois: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub outcome: RowOutcome,
}

fn run_row(grid: &BenchmarkGrid, row: (usize, usize, usize, SolverKind, u64)) -> BenchRow {
    let (robots, humans, pois, solver, seed) = row;
    let params = GenParams {
        std_frac: grid.std_frac,
        req_prob: grid.req_prob,
        ..GenParams::default()
    };
    let inst = generate_instance(robots, humans, pois, seed, &params);

    let budget = Duration::from_secs_f64(grid.time_budget);
    let started = Instant::now();
    let outcome = match run_solver(&inst, solver, seed, 50, budget) {
        Ok(out) => {
            let wall_ms = started.elapsed().as_millis() as u64;
            // Objective under the formulation the solver addressed.
            let eval_inst = if solver.deterministic_formulation() {
                inst.deterministic_copy()
            } else {
                inst
            };
            let obj = evaluate_objective(&eval_inst, &out.solution)
                .expect("solver output is structurally valid");
            let served = eval_inst.total_requests() - obj.dropped_requests;
            RowOutcome::Solved {
                objective: obj.total,
                dropped: obj.dropped_requests,
                wall_ms,
                nontrivial: served >= 1,
            }
        }
        Err(SolveError::SizeGuard(_)) => RowOutcome::Skipped {
            reason: "skipped_size_guard".to_string(),
        },
        Err(SolveError::Infeasible(_)) => RowOutcome::Skipped {
            reason: "skipped_infeasible".to_string(),
        },
    };

    BenchRow {
        robots,
        humans,
        pois,
        seed,
        solver,
        outcome,
    }
}

/// Runs every grid cell and returns the rows in grid order regardless of
/// how the parallel pool schedules them.
pub fn run_benchmark(grid: &BenchmarkGrid, jobs: usize) -> Vec<BenchRow> {
    let mut cells = Vec::new();
    for &r in &grid.robot_counts {
        for &h in &grid.human_counts {
            for &p in &grid.poi_counts {
                for &solver in &grid.solvers {
                    for &seed in &grid.seeds {
                        cells.push((r, h, p, solver, seed));
                    }
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool construction");
    pool.install(|| cells.par_iter().map(|&cell| run_row(grid, cell)).collect())
}

pub const REPORT_HEADER: &str = "robots,humans,pois,seed,solver,objective,dropped,wall_ms,nontrivial";

pub fn render_report(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},",
            row.robots, row.humans, row.pois, row.seed, row.solver
        );
        match &row.outcome {
            RowOutcome::Solved {
                objective,
                dropped,
                wall_ms,
                nontrivial,
            } => {
                let _ = writeln!(out, "{objective},{dropped},{wall_ms},{nontrivial}");
            }
            RowOutcome::Skipped { reason } => {
                let _ = writeln!(out, ",,,{reason}");
            }
        }
    }
    out
}

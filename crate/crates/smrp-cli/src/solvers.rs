//! Solver dispatch shared by the `solve` command and the benchmark
//! harness.
//!
//! The `d-` variants solve the deterministic formulation: they plan on a
//! copy of the instance with every std zeroed, which leaves expected times
//! and hence feasibility untouched. The `s-` variants use the stds as
//! given. `*-lns` run the alternating large neighborhood search, `*-es`
//! the exhaustive solver (only within its size guard).

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use smrp_core::exact::{exact_solve, ExactError};
use smrp_core::lns::{lns_solve, LnsConfig};
use smrp_core::matching::CapacityShortfall;
use smrp_core::model::{Instance, Solution};
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum SolverKind {
    #[serde(rename = "d-lns")]
    #[value(name = "d-lns")]
    DLns,
    #[serde(rename = "s-lns")]
    #[value(name = "s-lns")]
    SLns,
    #[serde(rename = "d-es")]
    #[value(name = "d-es")]
    DEs,
    #[serde(rename = "s-es")]
    #[value(name = "s-es")]
    SEs,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::DLns => "d-lns",
            SolverKind::SLns => "s-lns",
            SolverKind::DEs => "d-es",
            SolverKind::SEs => "s-es",
        }
    }

    pub fn deterministic_formulation(self) -> bool {
        matches!(self, SolverKind::DLns | SolverKind::DEs)
    }

    pub fn exact(self) -> bool {
        matches!(self, SolverKind::DEs | SolverKind::SEs)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    Infeasible(CapacityShortfall),
    SizeGuard(String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Infeasible(e) => write!(f, "{e}"),
            SolveError::SizeGuard(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub solution: Solution,
    /// LNS iterations, when an LNS solver ran.
    pub iterations: Option<usize>,
    /// Whether the exact enumeration completed, when an exact solver ran.
    pub optimal: Option<bool>,
}

/// Runs the requested solver. `max_iter` applies to the LNS solvers,
/// `budget` to the exact ones.
pub fn run_solver(
    inst: &Instance,
    kind: SolverKind,
    seed: u64,
    max_iter: usize,
    budget: Duration,
) -> Result<SolveOutput, SolveError> {
    let planning;
    let plan_inst = if kind.deterministic_formulation() {
        planning = inst.deterministic_copy();
        &planning
    } else {
        inst
    };

    if kind.exact() {
        let deadline = Instant::now() + budget;
        let outcome = exact_solve(plan_inst, || Instant::now() >= deadline).map_err(|e| match e {
            ExactError::TooLarge { .. } => SolveError::SizeGuard(e.to_string()),
            ExactError::Infeasible(c) => SolveError::Infeasible(c),
        })?;
        Ok(SolveOutput {
            solution: outcome.solution,
            iterations: None,
            optimal: Some(outcome.optimal),
        })
    } else {
        let cfg = LnsConfig {
            max_iterations: max_iter,
            seed,
            accept_only_improving: true,
        };
        let outcome = lns_solve(plan_inst, &cfg).map_err(SolveError::Infeasible)?;
        Ok(SolveOutput {
            solution: outcome.solution,
            iterations: Some(outcome.iterations),
            optimal: None,
        })
    }
}

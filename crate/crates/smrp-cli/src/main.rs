use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use smrp_cli::bench::{render_report, run_benchmark, validate_grid, BenchmarkGrid};
use smrp_cli::formats::{
    instance_from_json, instance_to_json, solution_from_json, solution_to_json, EvalReport,
    InstanceJson, SolutionJson, SolveLog, FORMAT_VERSION,
};
use smrp_cli::gen::{generate_instance, GenParams};
use smrp_cli::sig6;
use smrp_cli::solvers::{run_solver, SolveError, SolverKind};
use smrp_core::model::{
    check_feasibility, evaluate_objective, is_valid, validate_instance, Instance, Severity,
    Solution,
};
use smrp_core::simulator::{parametric_study, SimConfig, StudyRow};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SIZE_GUARD: u8 = 4;

#[derive(Parser)]
#[command(
    name = "smrp",
    about = "Match humans to robot tour guides and plan robot routes under uncertain times",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance
    Gen {
        #[arg(long)]
        robots: usize,
        #[arg(long)]
        humans: usize,
        #[arg(long)]
        pois: usize,
        #[arg(long)]
        seed: u64,
        /// Std of every time as a fraction of its mean (0 = deterministic)
        #[arg(long = "std-frac", default_value_t = 0.0)]
        std_frac: f64,
        /// Probability that a human requests a POI
        #[arg(long = "req-prob", default_value_t = 0.2)]
        req_prob: f64,
        #[arg(short = 'o', value_name = "FILE")]
        out: PathBuf,
    },
    /// Solve an instance and write the solution
    Solve {
        #[arg(long)]
        solver: SolverKind,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Iteration cap for the LNS solvers
        #[arg(long = "max-iter", default_value_t = 50)]
        max_iter: usize,
        #[arg(short = 'o', value_name = "FILE")]
        out: PathBuf,
    },
    /// Evaluate a solution: objective breakdown plus feasibility report
    Eval {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        sol: PathBuf,
    },
    /// Simulate a solution under execution noise
    Sim {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        sol: PathBuf,
        /// Correct-action rate in [0, 1]
        #[arg(long)]
        rate: f64,
        /// Visit std as a fraction of the nominal visit mean
        #[arg(long = "visit-std")]
        visit_std: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', value_name = "FILE")]
        out: PathBuf,
    },
    /// Sweep the correct-action rate and summarize per robot
    Study {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        sol: PathBuf,
        /// Comma-separated correct-action rates
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        #[arg(long = "visit-std", default_value_t = 0.0)]
        visit_std: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', value_name = "FILE")]
        out: PathBuf,
    },
    /// Run a benchmark grid and write the CSV report
    Bench {
        #[arg(long, value_name = "FILE")]
        grid: PathBuf,
        #[arg(short = 'o', value_name = "FILE")]
        out: PathBuf,
        /// Parallel row workers
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read_text(path)?;
    let json: InstanceJson = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let inst = instance_from_json(json)
        .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let violations = validate_instance(&inst);
    for v in violations.iter().filter(|v| v.severity == Severity::Warning) {
        eprintln!("{}: {v}", path.display());
    }
    if !is_valid(&violations) {
        let mut message = format!("{} failed validation:", path.display());
        for v in violations.iter().filter(|v| v.severity == Severity::Error) {
            message.push_str(&format!("\n  {v}"));
        }
        return Err(fail(EXIT_VALIDATION, message));
    }
    Ok(inst)
}

fn load_solution(path: &Path) -> Result<Solution, Failure> {
    let text = read_text(path)?;
    let json: SolutionJson = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    solution_from_json(json).map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("rate,robot,mean_time,std_time,satisfy_fraction\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig6(row.rate),
            row.robot,
            sig6(row.mean_time),
            sig6(row.std_time),
            sig6(row.satisfy_fraction),
        ));
    }
    out
}

fn check_rate(rate: f64) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(fail(
            EXIT_VALIDATION,
            format!("correct-action rate must be in [0, 1], got {rate}"),
        ));
    }
    Ok(())
}

/// Seconds granted to an exact solve launched from the CLI; the benchmark
/// harness takes its budget from the grid file instead.
const CLI_EXACT_BUDGET: Duration = Duration::from_secs(120);

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            robots,
            humans,
            pois,
            seed,
            std_frac,
            req_prob,
            out,
        } => {
            if robots == 0 || humans == 0 || pois == 0 {
                return Err(fail(EXIT_VALIDATION, "sizes must be positive"));
            }
            if !(0.0..=1.0).contains(&req_prob) {
                return Err(fail(EXIT_VALIDATION, "req-prob must be in [0, 1]"));
            }
            if std_frac.is_nan() || std_frac < 0.0 {
                return Err(fail(EXIT_VALIDATION, "std-frac must be non-negative"));
            }
            let params = GenParams {
                std_frac,
                req_prob,
                ..GenParams::default()
            };
            let inst = generate_instance(robots, humans, pois, seed, &params);
            write_text(&out, &pretty(&instance_to_json(&inst)))
        }
        Command::Solve {
            solver,
            input,
            seed,
            max_iter,
            out,
        } => {
            let inst = load_instance(&input)?;
            let output =
                run_solver(&inst, solver, seed, max_iter, CLI_EXACT_BUDGET).map_err(|e| match e {
                    SolveError::Infeasible(_) => fail(EXIT_INFEASIBLE, e.to_string()),
                    SolveError::SizeGuard(_) => fail(EXIT_SIZE_GUARD, e.to_string()),
                })?;
            let objective = evaluate_objective(&inst, &output.solution)
                .expect("solver output is structurally valid");
            write_text(&out, &pretty(&solution_to_json(&output.solution)))?;
            print!(
                "{}",
                pretty(&SolveLog {
                    solver: solver.name().to_string(),
                    dropped_requests: objective.dropped_requests,
                    expected_overtime_penalty: objective.expected_overtime_penalty,
                    total: objective.total,
                    iterations: output.iterations,
                    optimal: output.optimal,
                })
            );
            Ok(())
        }
        Command::Eval { input, sol } => {
            let inst = load_instance(&input)?;
            let solution = load_solution(&sol)?;
            let objective = evaluate_objective(&inst, &solution)
                .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", sol.display())))?;
            let violations = check_feasibility(&inst, &solution);
            print!(
                "{}",
                pretty(&EvalReport {
                    format_version: FORMAT_VERSION,
                    dropped_requests: objective.dropped_requests,
                    expected_overtime_penalty: objective.expected_overtime_penalty,
                    total: objective.total,
                    feasible: violations.is_empty(),
                    violations: violations.iter().map(|v| v.to_string()).collect(),
                })
            );
            Ok(())
        }
        Command::Sim {
            input,
            sol,
            rate,
            visit_std,
            trials,
            seed,
            out,
        } => {
            let inst = load_instance(&input)?;
            let solution = load_solution(&sol)?;
            evaluate_objective(&inst, &solution)
                .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", sol.display())))?;
            check_rate(rate)?;
            if trials == 0 {
                return Err(fail(EXIT_VALIDATION, "trials must be positive"));
            }
            let cfg = SimConfig {
                correct_action_rate: rate,
                visit_std_fraction: visit_std,
                trials,
                seed,
            };
            let rows = parametric_study(&inst, &solution, &[rate], &cfg);
            write_text(&out, &study_csv(&rows))
        }
        Command::Study {
            input,
            sol,
            rates,
            visit_std,
            trials,
            seed,
            out,
        } => {
            let inst = load_instance(&input)?;
            let solution = load_solution(&sol)?;
            evaluate_objective(&inst, &solution)
                .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", sol.display())))?;
            for &rate in &rates {
                check_rate(rate)?;
            }
            if trials == 0 {
                return Err(fail(EXIT_VALIDATION, "trials must be positive"));
            }
            let cfg = SimConfig {
                correct_action_rate: 1.0,
                visit_std_fraction: visit_std,
                trials,
                seed,
            };
            let rows = parametric_study(&inst, &solution, &rates, &cfg);
            write_text(&out, &study_csv(&rows))
        }
        Command::Bench { grid, out, jobs } => {
            let text = read_text(&grid)?;
            let parsed: BenchmarkGrid = serde_json::from_str(&text)
                .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", grid.display())))?;
            let problems = validate_grid(&parsed);
            if !problems.is_empty() {
                return Err(fail(
                    EXIT_VALIDATION,
                    format!("{}: {}", grid.display(), problems.join("; ")),
                ));
            }
            let rows = run_benchmark(&parsed, jobs);
            write_text(&out, &render_report(&rows))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

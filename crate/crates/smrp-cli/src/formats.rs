//! Versioned JSON schemas for instances and solutions.
//!
//! Instance files carry the fields of [`Instance`] verbatim: matrices as
//! nested arrays (`requests` as 0/1 integers), every time as
//! `{"mean": m, "std": s}` seconds. Travel tables are indexed over the
//! extended node set: POIs `0..n_pois`, then the start node at index
//! `n_pois` and the terminal node at `n_pois + 1`; diagonal entries are
//! ignored. Solution files hold one POI array per robot (array position =
//! robot index) plus the human-to-robot `assignment`. Both formats are
//! versioned with a top-level `format_version`.

use serde::{Deserialize, Serialize};
use smrp_core::model::{Instance, Matching, Route, Solution, TimeDist};
use std::fmt;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimeDistJson {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub format_version: u32,
    pub n_robots: usize,
    pub n_humans: usize,
    pub n_pois: usize,
    pub requests: Vec<Vec<u8>>,
    pub travel: Vec<Vec<Vec<TimeDistJson>>>,
    pub visit: Vec<Vec<TimeDistJson>>,
    pub time_limit: Vec<f64>,
    pub time_margin: Vec<f64>,
    pub team_cap: Vec<usize>,
    pub weight_dropped: f64,
    pub weight_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub format_version: u32,
    pub routes: Vec<Vec<usize>>,
    pub assignment: Vec<usize>,
}

/// Result of `eval`: the objective breakdown plus the feasibility report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub dropped_requests: u64,
    pub expected_overtime_penalty: f64,
    pub total: f64,
    pub feasible: bool,
    pub violations: Vec<String>,
}

/// What `solve` logs to stdout: the objective of the emitted solution
/// evaluated on the input instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveLog {
    pub solver: String,
    pub dropped_requests: u64,
    pub expected_overtime_penalty: f64,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    Version { got: u32, expected: u32 },
    RequestEntry { human: usize, poi: usize, value: u8 },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Version { got, expected } => {
                write!(f, "unsupported format_version {got}, expected {expected}")
            }
            FormatError::RequestEntry { human, poi, value } => {
                write!(f, "requests[{human}][{poi}] must be 0 or 1, got {value}")
            }
        }
    }
}

impl std::error::Error for FormatError {}

fn dist_to_json(t: TimeDist) -> TimeDistJson {
    TimeDistJson {
        mean: t.mean,
        std: t.std,
    }
}

fn dist_from_json(t: TimeDistJson) -> TimeDist {
    TimeDist::new(t.mean, t.std)
}

pub fn instance_to_json(inst: &Instance) -> InstanceJson {
    InstanceJson {
        format_version: FORMAT_VERSION,
        n_robots: inst.n_robots,
        n_humans: inst.n_humans,
        n_pois: inst.n_pois,
        requests: inst
            .requests
            .iter()
            .map(|row| row.iter().map(|&r| r as u8).collect())
            .collect(),
        travel: inst
            .travel
            .iter()
            .map(|t| {
                t.iter()
                    .map(|row| row.iter().copied().map(dist_to_json).collect())
                    .collect()
            })
            .collect(),
        visit: inst
            .visit
            .iter()
            .map(|row| row.iter().copied().map(dist_to_json).collect())
            .collect(),
        time_limit: inst.time_limit.clone(),
        time_margin: inst.time_margin.clone(),
        team_cap: inst.team_cap.clone(),
        weight_dropped: inst.weight_dropped,
        weight_time: inst.weight_time,
    }
}

pub fn instance_from_json(json: InstanceJson) -> Result<Instance, FormatError> {
    if json.format_version != FORMAT_VERSION {
        return Err(FormatError::Version {
            got: json.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let mut requests = Vec::with_capacity(json.requests.len());
    for (l, row) in json.requests.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (i, &v) in row.iter().enumerate() {
            match v {
                0 => out.push(false),
                1 => out.push(true),
                other => {
                    return Err(FormatError::RequestEntry {
                        human: l,
                        poi: i,
                        value: other,
                    })
                }
            }
        }
        requests.push(out);
    }
    Ok(Instance {
        n_robots: json.n_robots,
        n_humans: json.n_humans,
        n_pois: json.n_pois,
        requests,
        travel: json
            .travel
            .into_iter()
            .map(|t| {
                t.into_iter()
                    .map(|row| row.into_iter().map(dist_from_json).collect())
                    .collect()
            })
            .collect(),
        visit: json
            .visit
            .into_iter()
            .map(|row| row.into_iter().map(dist_from_json).collect())
            .collect(),
        time_limit: json.time_limit,
        time_margin: json.time_margin,
        team_cap: json.team_cap,
        weight_dropped: json.weight_dropped,
        weight_time: json.weight_time,
    })
}

pub fn solution_to_json(sol: &Solution) -> SolutionJson {
    SolutionJson {
        format_version: FORMAT_VERSION,
        routes: sol.routes.iter().map(|r| r.pois.clone()).collect(),
        assignment: sol.matching.assignment.clone(),
    }
}

pub fn solution_from_json(json: SolutionJson) -> Result<Solution, FormatError> {
    if json.format_version != FORMAT_VERSION {
        return Err(FormatError::Version {
            got: json.format_version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(Solution {
        routes: json
            .routes
            .into_iter()
            .enumerate()
            .map(|(k, pois)| Route::new(k, pois))
            .collect(),
        matching: Matching {
            assignment: json.assignment,
        },
    })
}

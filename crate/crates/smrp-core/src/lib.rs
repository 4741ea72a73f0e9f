//! Joint human-robot matching and tour routing under uncertain travel and
//! visit times.
//!
//! A fleet of robot guides must split a crowd of humans into teams (one team
//! per robot) and plan, for every robot, an ordered tour over the places its
//! team asked to see. Travel legs and visits take random time; each robot has
//! a hard budget on its expected tour time and a soft penalty on the tour
//! time approaching that budget. The planner minimizes a weighted sum of
//! dropped requests and expected overtime.
//!
//! The crate is organized around that decomposition:
//!
//! - [`model`] — instance/solution types, validation, objective evaluation
//!   and an independent feasibility checker;
//! - [`stochastic`] — Gaussian time arithmetic: closed-form expected overtime
//!   and a seeded Monte Carlo oracle;
//! - [`matching`] — exact capacitated assignment of humans to robots via
//!   successive shortest augmenting paths;
//! - [`routing`] — per-robot tour selection and ordering: a seeded
//!   insertion/local-search heuristic plus an exact subset DP;
//! - [`lns`] — the alternating large neighborhood search that ties the two
//!   sub-solvers together;
//! - [`exact`] — exhaustive solver for tiny instances, used as an optimality
//!   oracle;
//! - [`simulator`] — stochastic execution of a plan under action noise.
//!
//! All randomness is drawn from [`rand_chacha::ChaCha8Rng`] seeded with
//! explicit `u64` seeds (`seed_from_u64`); Gaussian draws use
//! `rand_distr::StandardNormal`. Fixed seeds give bit-identical results
//! across platforms and thread counts.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only widens the dependency features.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod exact;
pub mod lns;
pub mod matching;
pub mod model;
pub mod routing;
pub mod simulator;
pub mod stochastic;

mod seeding;

//! Analytics for two-state transfer pools and the Markov chains they induce.
//!
//! A transfer pool moves money between members year over year; each member
//! is either a payer or a receiver in a given year. From a table counting
//! year-to-year status changes this crate answers, with exact analytical
//! machinery and an independent seeded simulator:
//!
//! - Does this year's status depend on last year's? ([`chi_square_test`]
//!   on the contingency table, with optional continuity correction.)
//! - Where is a plan likely to be k years out? ([`estimate_from_counts`],
//!   [`k_step`].)
//! - Where does the pool settle, and how fast?
//!   ([`stationary_distribution`], [`limiting_matrix`],
//!   [`convergence_horizon`], [`two_state`] eigendecomposition.)
//! - How long does a plan stay on one side? ([`expected_sojourn`].)
//! - Do the formulas survive contact with sampled trajectories?
//!   ([`simulate_trajectories`] with splitmix64 streams.)
//!
//! The [`craps`] module instantiates the same chain machinery on a game
//! with exactly known absorption behavior, as an end-to-end check.
//!
//! Numerical code (linear solves, matrix powers, the regularized upper
//! incomplete gamma function) is implemented here rather than delegated, so
//! every tolerance in the public contract is owned by this crate.

#![forbid(unsafe_code)]

pub mod contingency;
pub mod craps;
pub mod eigen;
pub mod error;
pub mod markov;
pub mod matrix;
pub mod simulate;
pub mod special;

pub use contingency::{
    chi_square_test, expected_counts, independence_decision, ContingencyTable, Correction,
    Decision, TestResult,
};
pub use craps::{
    build_craps_chain, compare_with_pool, craps_expected_rolls, craps_win_probability,
    PoolComparison, COMEOUT, LOSE, STATE_LABELS, WIN,
};
pub use eigen::{two_state, EigenSystem};
pub use error::{Error, Result};
pub use markov::{
    absorption_probabilities, classify, convergence_horizon, estimate_from_counts,
    expected_sojourn, k_step, limiting_matrix, second_eigenvalue, sojourn_via_rounded_stationary,
    stationary_distribution, AbsorptionResult, ChainClassification, StationaryDistribution,
    TransitionMatrix,
};
pub use matrix::Matrix;
pub use simulate::{
    plan_seed, simulate_path, simulate_trajectories, InitialState, SimulationConfig, SplitMix64,
    TrajectoryStats,
};
pub use special::{chi_square_sf, regularized_gamma_q};

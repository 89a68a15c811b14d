//! Dense, desk-scale simulation of oracle-driven quantum state synthesis.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: state vectors, density matrices, unitaries and the closed-form swap test.
//! - [`ensembles`]: seeded random streams, Haar states/unitaries and uniformly random Cliffords.
//! - [`phase_states`]: phase oracles, phase states and the l1-overlap identities.
//! - [`adaptive`]: the O(n)-query QSample-then-phase baseline.
//! - [`distill`]: swap-test distillation in sampled and exact-conditional modes.
//! - [`one_query`] / [`two_query`]: the one- and two-query synthesis pipelines.
//! - [`qma`]: local Hamiltonians, the filtered phase-state oracle and the energy gate.
//! - [`classical`]: CNF verifiers, hashing isolation and Bernstein-Vazirani extraction.
//!
//! Monte-Carlo loops go through [`exec::Execution`], which runs on a rayon pool when the
//! `parallel` feature is enabled and falls back to a plain loop otherwise. Every trial owns
//! its own [`ensembles::RngStream`], so results do not depend on scheduling.

pub mod adaptive;
pub mod classical;
pub mod distill;
pub mod ensembles;
mod error;
pub mod exec;
pub mod numeric;
pub mod one_query;
pub mod phase_states;
pub mod qcore;
pub mod qma;
pub mod stats;
pub mod two_query;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Library version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

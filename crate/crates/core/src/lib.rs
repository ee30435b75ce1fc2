//! Simulation and estimation toolkit for distillation-based characterization
//! of Bell pairs.
//!
//! The [`engine`] module is a small exact density-matrix simulator. On top of
//! it, [`distill`] builds the three two-copy distillation circuits and their
//! closed-form success model, [`estimator`] inverts observed success rates into
//! Werner and Bell-diagonal parameters, [`tomography`] provides the two-qubit
//! tomography reference, [`mbqc`] produces Bell pairs from measured cluster
//! chains, and [`tracker`] follows drifting Pauli rates with a grid posterior.

pub mod bell;
pub mod distill;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod mbqc;
pub mod seed;
pub mod tomography;
pub mod tracker;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

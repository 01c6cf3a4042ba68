//! Network nonlocality sharing in generalized (n, m, k) star networks with
//! sequential weak measurements.
//!
//! n independent sources each link a chain of m sequentially measuring
//! Alices to one central Bob; every observer has k settings. The chained
//! n-locality expression S = sum_l |I_l|^(1/n) is bounded by k - 1 for any
//! n-local model, and this crate evaluates it two independent ways:
//!
//! - [`inequality::simulate_s`] runs the full density-operator pipeline
//!   (Bob's projection, weak updates with quality factor F and precision
//!   factor G, the final projective update) and assembles S by exhaustive
//!   enumeration of outcomes and intermediate settings;
//! - [`inequality::analytic_bound`] and
//!   [`inequality::analytic_bound_noise`] evaluate the closed forms the
//!   pipeline collapses to with singlet (or noisy singlet) sources.
//!
//! On top of the two oracles, [`analysis`] locates simultaneous-violation
//! windows in the precision factor, maximin points, critical noise
//! visibilities, and the three-observer no-sharing optimum. The [`verify`]
//! module packages every cross-check into one deterministic suite.
//!
//! Global conventions: composite systems are ordered Alice (x) Bob with the
//! product basis |00>, |01>, |10>, |11>; post-measurement states stay
//! unnormalized end to end, so probabilities are plain traces.

pub mod analysis;
pub mod branchsim;
pub mod error;
pub mod inequality;
pub mod measure;
pub mod model;
pub mod qcore;
pub mod state;
pub mod verify;

pub use error::{Error, Result};

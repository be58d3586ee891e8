//! Round-based simulator for energy-aware cluster-head election in
//! heterogeneous wireless sensor networks.
//!
//! - [`energy`]: first-order radio model and analytic round energy.
//! - [`election`]: node classes, energy endowments and election probabilities.
//! - [`sim`]: deployment, election, clustering and per-event energy accounting.
//! - [`metrics`]: lifetime summaries, seed sweeps, comparisons and CSV output.
//! - [`config`] and [`cli`]: configuration files and the `beenish` binary.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod election;
pub mod energy;
pub mod error;
pub mod metrics;
pub mod sim;

pub use election::{HeterogeneityParams, NodeClass, Strategy};
pub use energy::RadioParams;
pub use error::{ConfigError, DomainError, SimError};
pub use metrics::{SimSummary, SweepResult};
pub use sim::{run, RoundOutcome, SimConfig, Simulation};

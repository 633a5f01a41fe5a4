//! Experiment harness for `perfdfo-core`: JSON experiment documents, multi-trial
//! execution with deterministic seeding, CSV traces/aggregates and a
//! checksummed manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use aggregate::{aggregate, AggregateCurve, AggregatePoint, Stat};
pub use config::{DiagConfig, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use runner::{run_diag, run_experiment, RunSummary};

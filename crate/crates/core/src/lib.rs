//! Zeroth-order optimization of performative risk under decision-dependent
//! Markovian data.
//!
//! The crate is `no_std` (with `alloc`) so the numerical pieces can be embedded
//! anywhere; file formats, configuration and the CLI live in the `perfdfo`
//! companion crate.
//!
//! * [`schedule`]: step size, query radius and epoch length laws, plus the
//!   forgetting-factor weights.
//! * [`estimator`]: sphere/ball sampling and the one-point and two-point
//!   gradient estimators.
//! * [`env`]: controlled Markov kernels and the three AR benchmarks.
//! * [`optim`]: DFO(λ) and the comparison algorithms, each producing a
//!   [`RunTrace`](optim::RunTrace).
//! * [`diag`]: Monte-Carlo diagnostics for estimator bias and variance.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diag;
pub mod env;
pub mod error;
pub mod estimator;
pub mod optim;
pub mod rng;
pub mod schedule;
pub mod vector;

pub use env::{ArPricing, ArRegression, ArScalarQuartic, Environment};
pub use error::Error;
pub use estimator::{one_point_gradient, sample_unit_ball, sample_unit_sphere, EstimatorKind};
pub use optim::{run, AlgoConfig, Algorithm, EpochRecord, RunTrace};
pub use rng::Rng;
pub use schedule::{forgetting_weight, schedule_at, Schedule, SchedulePreset, StepParams};
pub use vector::{DecisionVector, Direction};

pub type Result<T> = core::result::Result<T, Error>;

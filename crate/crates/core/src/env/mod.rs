//! Decision-controlled Markov environments.
//!
//! An [`Environment`] owns no sample state: the caller threads the current
//! sample `z` through [`Environment::advance`], deploying a model at each step.
//! Oracles that only exist for the synthetic benchmarks (stationary draws,
//! closed-form risk and gradient) are optional and report
//! [`Error::OracleAbsent`] by default.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, Rng};

mod pricing;
mod quartic;
mod regression;

pub use pricing::ArPricing;
pub use quartic::ArScalarQuartic;
pub use regression::ArRegression;

pub trait Environment: Send + Sync {
    fn name(&self) -> &'static str;

    /// Decision dimension `d`.
    fn dim(&self) -> usize;

    /// Length of the sample state `z`.
    fn sample_dim(&self) -> usize;

    /// One transition of the kernel controlled by the deployed model, in place.
    /// Callers guarantee the slice lengths.
    fn advance(&self, z: &mut [f64], deployed: &[f64], rng: &mut Rng);

    fn loss(&self, theta: &[f64], z: &[f64]) -> f64;

    /// Geometric mixing rate of the kernel, if known.
    fn mixing_rate(&self) -> Option<f64> {
        None
    }

    fn loss_grad_theta(&self, _theta: &[f64], _z: &[f64]) -> Result<Vec<f64>> {
        Err(Error::OracleAbsent("loss gradient"))
    }

    fn stationary_sample(&self, _theta: &[f64], _rng: &mut Rng) -> Result<Vec<f64>> {
        Err(Error::OracleAbsent("stationary sampling"))
    }

    fn exact_risk(&self, _theta: &[f64]) -> Result<f64> {
        Err(Error::OracleAbsent("exact risk"))
    }

    fn exact_risk_grad(&self, _theta: &[f64]) -> Result<Vec<f64>> {
        Err(Error::OracleAbsent("exact risk gradient"))
    }

    /// Starting sample: a stationary draw at the first deployed model when
    /// available, else the zero state.
    fn initial_sample(&self, deployed: &[f64], rng: &mut Rng) -> Vec<f64> {
        self.stationary_sample(deployed, rng)
            .unwrap_or_else(|_| vec![0.0; self.sample_dim()])
    }
}

/// Checked single kernel transition returning the new state.
pub fn kernel_step<E: Environment + ?Sized>(
    env: &E,
    z: &[f64],
    theta: &[f64],
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    check_len(env.sample_dim(), z.len())?;
    check_len(env.dim(), theta.len())?;
    let mut next = z.to_vec();
    env.advance(&mut next, theta, rng);
    Ok(next)
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Shared validation for the AR(1) mixing parameter.
pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("gamma must lie in (0, 1)"))
    }
}

pub(crate) fn check_positive(v: f64, what: &'static str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what))
    }
}

/// Innovation standard deviation that makes the AR(1) average
/// `z' = (1-γ) z + γ z̄` have stationary standard deviation `sigma`.
pub(crate) fn innovation_std(gamma: f64, sigma: f64) -> f64 {
    libm::sqrt((2.0 - gamma) / gamma) * sigma
}

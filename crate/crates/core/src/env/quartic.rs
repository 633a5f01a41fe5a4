use alloc::vec;
use alloc::vec::Vec;

use super::{check_gamma, check_positive, innovation_std, Environment};
use crate::{Result, Rng};

/// Scalar AR(1) samples around the deployed model with the cubic-in-θ loss
/// `ℓ(θ; z) = z θ (3θ² − 8θ − 48) / 12`.
///
/// At fixed θ the chain is stationary at `N(θ, σ²)`, so the risk is the
/// quartic `θ²(3θ² − 8θ − 48)/12` with stationary points `{−2, 0, 4}` and
/// global minimum at 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ArScalarQuartic {
    gamma: f64,
    sigma: f64,
    innovation_std: f64,
}

impl ArScalarQuartic {
    pub fn new(gamma: f64, sigma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive(sigma, "sigma must be positive")?;
        Ok(Self { gamma, sigma, innovation_std: innovation_std(gamma, sigma) })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The factor multiplying `z` in the loss.
    #[inline]
    fn slope(theta: f64) -> f64 {
        theta * (3.0 * theta * theta - 8.0 * theta - 48.0) / 12.0
    }

    pub fn risk(theta: f64) -> f64 {
        theta * Self::slope(theta)
    }

    pub fn risk_grad(theta: f64) -> f64 {
        theta * (theta - 4.0) * (theta + 2.0)
    }

    pub fn risk_hessian(theta: f64) -> f64 {
        3.0 * theta * theta - 4.0 * theta - 8.0
    }

    pub fn performative_optimum() -> f64 {
        4.0
    }
}

impl Default for ArScalarQuartic {
    fn default() -> Self {
        Self::new(0.5, 1.0).expect("default parameters are valid")
    }
}

impl Environment for ArScalarQuartic {
    fn name(&self) -> &'static str {
        "quartic"
    }

    fn dim(&self) -> usize {
        1
    }

    fn sample_dim(&self) -> usize {
        1
    }

    #[inline]
    fn advance(&self, z: &mut [f64], deployed: &[f64], rng: &mut Rng) {
        let innovation = rng.normal(deployed[0], self.innovation_std);
        z[0] = (1.0 - self.gamma) * z[0] + self.gamma * innovation;
    }

    #[inline]
    fn loss(&self, theta: &[f64], z: &[f64]) -> f64 {
        z[0] * Self::slope(theta[0])
    }

    fn mixing_rate(&self) -> Option<f64> {
        Some(1.0 - self.gamma)
    }

    fn loss_grad_theta(&self, theta: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let t = theta[0];
        Ok(vec![z[0] * (9.0 * t * t - 16.0 * t - 48.0) / 12.0])
    }

    fn stationary_sample(&self, theta: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        Ok(vec![rng.normal(theta[0], self.sigma)])
    }

    fn exact_risk(&self, theta: &[f64]) -> Result<f64> {
        super::check_len(1, theta.len())?;
        Ok(Self::risk(theta[0]))
    }

    fn exact_risk_grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        super::check_len(1, theta.len())?;
        Ok(vec![Self::risk_grad(theta[0])])
    }
}

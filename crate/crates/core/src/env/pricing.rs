use alloc::vec;
use alloc::vec::Vec;

use super::{check_gamma, check_len, check_positive, innovation_std, Environment};
use crate::vector::{dot, norm_sq};
use crate::{Error, Result, Rng};

/// Multi-good pricing: demand `z` drifts towards `μ₀ − κθ` through an AR(1)
/// chain and the loss is the negative revenue `−⟨θ, z⟩`.
///
/// Risk `κ‖θ‖² − ⟨θ, μ₀⟩`, minimized at `μ₀ / (2κ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArPricing {
    gamma: f64,
    sigma: f64,
    kappa: f64,
    mu0: Vec<f64>,
    innovation_std: f64,
}

impl ArPricing {
    pub fn new(gamma: f64, sigma: f64, kappa: f64, mu0: Vec<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive(sigma, "sigma must be positive")?;
        check_positive(kappa, "kappa must be positive")?;
        if mu0.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { gamma, sigma, kappa, mu0, innovation_std: innovation_std(gamma, sigma) })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu0(&self) -> &[f64] {
        &self.mu0
    }

    /// Mean of the stationary demand when `deployed` is in force.
    pub fn stationary_mean(&self, deployed: &[f64]) -> Vec<f64> {
        self.mu0.iter().zip(deployed).map(|(m, t)| m - self.kappa * t).collect()
    }

    pub fn performative_optimum(&self) -> Vec<f64> {
        self.mu0.iter().map(|m| m / (2.0 * self.kappa)).collect()
    }

    /// Revenue at the optimum, `‖μ₀‖² / (4κ)`.
    pub fn optimal_revenue(&self) -> f64 {
        norm_sq(&self.mu0) / (4.0 * self.kappa)
    }

    /// Risk of `theta` evaluated on the stationary law of `deployed`.
    pub fn decoupled_risk(&self, theta: &[f64], deployed: &[f64]) -> f64 {
        -dot(theta, &self.stationary_mean(deployed))
    }
}

impl Default for ArPricing {
    fn default() -> Self {
        Self::new(0.1, 1.0, 0.5, vec![5.0, -5.0, -5.0, 5.0, -5.0]).expect("default parameters are valid")
    }
}

impl Environment for ArPricing {
    fn name(&self) -> &'static str {
        "pricing"
    }

    fn dim(&self) -> usize {
        self.mu0.len()
    }

    fn sample_dim(&self) -> usize {
        self.mu0.len()
    }

    #[inline]
    fn advance(&self, z: &mut [f64], deployed: &[f64], rng: &mut Rng) {
        for ((zi, m), t) in z.iter_mut().zip(&self.mu0).zip(deployed) {
            let innovation = rng.normal(m - self.kappa * t, self.innovation_std);
            *zi = (1.0 - self.gamma) * *zi + self.gamma * innovation;
        }
    }

    #[inline]
    fn loss(&self, theta: &[f64], z: &[f64]) -> f64 {
        -dot(theta, z)
    }

    fn mixing_rate(&self) -> Option<f64> {
        Some(1.0 - self.gamma)
    }

    fn loss_grad_theta(&self, _theta: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        Ok(z.iter().map(|v| -v).collect())
    }

    fn stationary_sample(&self, theta: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        check_len(self.dim(), theta.len())?;
        Ok(self
            .stationary_mean(theta)
            .into_iter()
            .map(|m| rng.normal(m, self.sigma))
            .collect())
    }

    fn exact_risk(&self, theta: &[f64]) -> Result<f64> {
        check_len(self.dim(), theta.len())?;
        Ok(self.kappa * norm_sq(theta) - dot(theta, &self.mu0))
    }

    fn exact_risk_grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), theta.len())?;
        Ok(theta.iter().zip(&self.mu0).map(|(t, m)| 2.0 * self.kappa * t - m).collect())
    }
}

use alloc::vec;
use alloc::vec::Vec;

use super::{check_gamma, check_len, check_positive, innovation_std, Environment};
use crate::vector::{dot, norm, norm_sq};
use crate::{Error, Result, Rng};

/// Linear regression whose response shifts with the deployed model.
///
/// The sample state is `(x, y)` packed as `[x_0, .., x_{d-1}, y]`. At fixed θ
/// the chain is stationary at `x ~ N(0, σ₁² I)`,
/// `y | x ~ N(⟨x + κθ, θ₀⟩, σ₂²)`, and the loss is `(⟨x, θ⟩ − y)²`.
/// Taking the expectation under that law gives the risk
/// `σ₁²‖θ − θ₀‖² + κ²⟨θ, θ₀⟩² + σ₂²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArRegression {
    gamma: f64,
    sigma1: f64,
    sigma2: f64,
    kappa: f64,
    theta_ref: Vec<f64>,
    innov_x: f64,
    innov_y: f64,
}

impl ArRegression {
    /// `sigma1`, `sigma2` are standard deviations; `theta_ref` is the
    /// unshifted regression coefficient θ₀.
    pub fn new(gamma: f64, sigma1: f64, sigma2: f64, kappa: f64, theta_ref: Vec<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive(sigma1, "sigma1 must be positive")?;
        check_positive(sigma2, "sigma2 must be positive")?;
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument("kappa must be non-negative"));
        }
        if theta_ref.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            gamma,
            sigma1,
            sigma2,
            kappa,
            theta_ref,
            innov_x: innovation_std(gamma, sigma1),
            innov_y: innovation_std(gamma, sigma2),
        })
    }

    /// Default benchmark: `κ = 1/‖θ₀‖`, unit noise, γ = 0.25.
    pub fn with_reference(theta_ref: Vec<f64>) -> Result<Self> {
        let kappa = 1.0 / norm(&theta_ref);
        Self::new(0.25, 1.0, 1.0, kappa, theta_ref)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn theta_ref(&self) -> &[f64] {
        &self.theta_ref
    }

    /// Minimizer of the risk: `a θ₀` with `a = σ₁² / (σ₁² + κ²‖θ₀‖²)`.
    pub fn performative_optimum(&self) -> Vec<f64> {
        let s1 = self.sigma1 * self.sigma1;
        let a = s1 / (s1 + self.kappa * self.kappa * norm_sq(&self.theta_ref));
        self.theta_ref.iter().map(|t| a * t).collect()
    }

    pub fn optimal_risk(&self) -> f64 {
        let opt = self.performative_optimum();
        self.exact_risk(&opt).expect("dimensions match")
    }

    #[inline]
    fn shift(&self, deployed: &[f64]) -> f64 {
        self.kappa * dot(deployed, &self.theta_ref)
    }
}

impl Default for ArRegression {
    fn default() -> Self {
        Self::with_reference(vec![5.0, -5.0, 5.0, -5.0, 5.0]).expect("default parameters are valid")
    }
}

impl Environment for ArRegression {
    fn name(&self) -> &'static str {
        "regression"
    }

    fn dim(&self) -> usize {
        self.theta_ref.len()
    }

    fn sample_dim(&self) -> usize {
        self.theta_ref.len() + 1
    }

    #[inline]
    fn advance(&self, z: &mut [f64], deployed: &[f64], rng: &mut Rng) {
        let d = self.dim();
        let g = self.gamma;
        let mut mean_y = self.shift(deployed);
        for (xi, r) in z[..d].iter_mut().zip(&self.theta_ref) {
            let x_new = rng.normal(0.0, self.innov_x);
            mean_y += x_new * r;
            *xi = (1.0 - g) * *xi + g * x_new;
        }
        let y_new = rng.normal(mean_y, self.innov_y);
        z[d] = (1.0 - g) * z[d] + g * y_new;
    }

    #[inline]
    fn loss(&self, theta: &[f64], z: &[f64]) -> f64 {
        let d = self.dim();
        let r = dot(&z[..d], theta) - z[d];
        r * r
    }

    fn mixing_rate(&self) -> Option<f64> {
        Some(1.0 - self.gamma)
    }

    fn loss_grad_theta(&self, theta: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let r = dot(&z[..d], theta) - z[d];
        Ok(z[..d].iter().map(|x| 2.0 * r * x).collect())
    }

    fn stationary_sample(&self, theta: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        check_len(self.dim(), theta.len())?;
        let mut z: Vec<f64> = (0..self.dim()).map(|_| rng.normal(0.0, self.sigma1)).collect();
        let mean_y = dot(&z, &self.theta_ref) + self.shift(theta);
        z.push(rng.normal(mean_y, self.sigma2));
        Ok(z)
    }

    fn exact_risk(&self, theta: &[f64]) -> Result<f64> {
        check_len(self.dim(), theta.len())?;
        let s1 = self.sigma1 * self.sigma1;
        let diff: f64 = theta.iter().zip(&self.theta_ref).map(|(t, r)| (t - r) * (t - r)).sum();
        let shift = self.shift(theta);
        Ok(s1 * diff + shift * shift + self.sigma2 * self.sigma2)
    }

    fn exact_risk_grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), theta.len())?;
        let s1 = self.sigma1 * self.sigma1;
        let c = 2.0 * self.kappa * self.shift(theta);
        Ok(theta
            .iter()
            .zip(&self.theta_ref)
            .map(|(t, r)| 2.0 * s1 * (t - r) + c * r)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_optimum_is_half_the_reference() {
        let env = ArRegression::default();
        let opt = env.performative_optimum();
        for (o, r) in opt.iter().zip(env.theta_ref()) {
            assert_relative_eq!(*o, r / 2.0, epsilon = 1e-12);
        }
        // 125/4 + (125/2)^2 / 125 + 1
        assert_relative_eq!(env.optimal_risk(), 63.5, epsilon = 1e-12);
        assert!(env.exact_risk_grad(&opt).unwrap().iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn loss_gradient_at_origin() {
        let env = ArRegression::default();
        let z = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(env.loss_grad_theta(&[0.0; 5], &z).unwrap(), vec![-2.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sample_state_carries_the_response() {
        let env = ArRegression::default();
        assert_eq!(env.sample_dim(), 6);
        let z = env.stationary_sample(&[0.0; 5], &mut Rng::seed_from_u64(1)).unwrap();
        assert_eq!(z.len(), 6);
    }
}

//! DFO(λ) and the baselines it is compared against.
//!
//! Every algorithm walks a single Markov trajectory: the sample state is
//! carried across epochs and each kernel step is taken under the model
//! deployed at that moment. Metrics come from the environment's exact oracles
//! at epoch boundaries and consume no samples.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::env::{check_len, Environment};
use crate::estimator::sample_unit_sphere;
use crate::schedule::{forgetting_weight, Schedule};
use crate::vector::{axpy, norm_sq, DecisionVector};
use crate::{Error, Result, Rng};

mod trace;

pub use trace::{EpochRecord, RunTrace};

/// Iterates with a norm above this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Epochs of `τ_k` greedy deployments sharing one direction, with
    /// forgetting-factor weighted in-epoch updates.
    DfoLambda,
    /// One-point update after every single sample.
    DfoGd,
    /// Stochastic gradient of the loss at the deployed model, ignoring the
    /// distribution shift.
    SgdGd,
    /// Two loss values on one post-burn-in sample.
    TwoPointI,
    /// Two loss values on two independently burnt-in samples.
    TwoPointII,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::DfoLambda,
        Algorithm::DfoGd,
        Algorithm::SgdGd,
        Algorithm::TwoPointI,
        Algorithm::TwoPointII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DfoLambda => "dfo_lambda",
            Algorithm::DfoGd => "dfo_gd",
            Algorithm::SgdGd => "sgd_gd",
            Algorithm::TwoPointI => "two_point_I",
            Algorithm::TwoPointII => "two_point_II",
        }
    }

    /// Kernel steps spent in epoch `k`.
    pub fn epoch_cost(self, k: usize, schedule: &Schedule, burn_in_tau: Option<usize>) -> u64 {
        let burn_in = || burn_in_tau.unwrap_or_else(|| schedule.tau_at(k)) as u64;
        match self {
            Algorithm::DfoLambda => schedule.tau_at(k) as u64,
            Algorithm::DfoGd | Algorithm::SgdGd => 1,
            Algorithm::TwoPointI => burn_in(),
            Algorithm::TwoPointII => 2 * burn_in(),
        }
    }

    /// Smallest epoch count whose total sample cost reaches `budget` (at least 1).
    pub fn epochs_for_budget(self, schedule: &Schedule, burn_in_tau: Option<usize>, budget: u64) -> usize {
        let mut spent = 0;
        let mut k = 0;
        while spent < budget || k == 0 {
            spent += self.epoch_cost(k, schedule, burn_in_tau);
            k += 1;
        }
        k
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or(Error::InvalidArgument("unknown algorithm tag"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig {
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    /// Number of epochs `T`.
    pub epochs: usize,
    pub theta0: DecisionVector,
    /// Burn-in length for the two-point baselines; `None` uses `τ_k`.
    pub burn_in_tau: Option<usize>,
}

impl AlgoConfig {
    pub fn new(algorithm: Algorithm, schedule: Schedule, epochs: usize, theta0: DecisionVector) -> Self {
        Self { algorithm, schedule, epochs, theta0, burn_in_tau: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1"));
        }
        if self.burn_in_tau == Some(0) {
            return Err(Error::InvalidArgument("burn_in_tau must be positive"));
        }
        self.schedule.validate()
    }

    /// Samples the configured run will consume if it does not diverge.
    pub fn sample_cost(&self) -> u64 {
        (0..self.epochs)
            .map(|k| self.algorithm.epoch_cost(k, &self.schedule, self.burn_in_tau))
            .sum()
    }
}

/// Runs `cfg.algorithm` on `env`.
pub fn run<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    match cfg.algorithm {
        Algorithm::DfoLambda => dfo_lambda(env, cfg, rng),
        Algorithm::DfoGd => dfo_gd(env, cfg, rng),
        Algorithm::SgdGd => sgd_gd(env, cfg, rng),
        Algorithm::TwoPointI => two_point_i(env, cfg, rng),
        Algorithm::TwoPointII => two_point_ii(env, cfg, rng),
    }
}

/// Shared bookkeeping: Markov state, iterate, sample counter and records.
struct Runner<'a, E: ?Sized> {
    env: &'a E,
    cfg: &'a AlgoConfig,
    d: usize,
    z: Vec<f64>,
    theta: Vec<f64>,
    deployed: Vec<f64>,
    samples: u64,
    records: Vec<EpochRecord>,
}

impl<'a, E: Environment + ?Sized> Runner<'a, E> {
    fn new(env: &'a E, cfg: &'a AlgoConfig, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        let d = env.dim();
        check_len(d, cfg.theta0.dim())?;
        let theta = cfg.theta0.as_slice().to_vec();
        let z = env.initial_sample(&theta, rng);
        let mut runner = Self {
            env,
            cfg,
            d,
            z,
            deployed: theta.clone(),
            theta,
            samples: 0,
            records: Vec::with_capacity(cfg.epochs + 1),
        };
        runner.record(0);
        Ok(runner)
    }

    fn record(&mut self, epoch: usize) {
        let risk = self.env.exact_risk(&self.theta).ok();
        let grad_norm_sq = self.env.exact_risk_grad(&self.theta).ok().map(|g| norm_sq(&g));
        self.records.push(EpochRecord {
            epoch,
            samples: self.samples,
            theta: DecisionVector::new(self.theta.clone()).expect("checked finite before recording"),
            risk,
            grad_norm_sq,
        });
    }

    /// Deploys `theta + scale * dir` for one kernel step and returns the loss
    /// of the deployed model on the new sample.
    #[inline]
    fn step_perturbed(&mut self, scale: f64, dir: &[f64], rng: &mut Rng) -> f64 {
        for ((p, t), u) in self.deployed.iter_mut().zip(&self.theta).zip(dir) {
            *p = t + scale * u;
        }
        self.env.advance(&mut self.z, &self.deployed, rng);
        self.samples += 1;
        self.env.loss(&self.deployed, &self.z)
    }

    fn healthy(&self) -> bool {
        let n = norm_sq(&self.theta);
        n.is_finite() && n <= DIVERGENCE_NORM * DIVERGENCE_NORM
    }

    /// Runs `epoch` for `k = 0..T`, recording after each one.
    fn drive(mut self, rng: &mut Rng, mut epoch: impl FnMut(&mut Self, usize, &mut Rng) -> Result<()>) -> Result<RunTrace> {
        let mut diverged_at = None;
        for k in 0..self.cfg.epochs {
            epoch(&mut self, k, rng)?;
            if !self.healthy() {
                diverged_at = Some(k);
                break;
            }
            self.record(k + 1);
        }
        let output_index = rng.index(self.records.len());
        Ok(RunTrace {
            algorithm: self.cfg.algorithm,
            records: self.records,
            output_index,
            diverged_at,
            total_samples: self.samples,
        })
    }
}

/// DFO(λ): each epoch draws one direction `u_k`, then for `m = 1..=τ_k`
/// deploys `θ + δ_k u_k`, advances the chain once and applies
/// `θ ← θ − η_k λ^(τ_k − m) (d/δ_k) ℓ(θ + δ_k u_k; Z) u_k`.
pub fn dfo_lambda<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    let runner = Runner::new(env, cfg, rng)?;
    let schedule = cfg.schedule;
    runner.drive(rng, |r, k, rng| {
        let p = schedule.at(k);
        let u = sample_unit_sphere(r.d, rng)?;
        let scale = r.d as f64 / p.delta;
        for m in 1..=p.tau {
            let loss = r.step_perturbed(p.delta, &u, rng);
            let w = forgetting_weight(schedule.lambda, p.tau, m)?;
            if w != 0.0 {
                axpy(-p.eta * w * scale * loss, &u, &mut r.theta);
            }
        }
        Ok(())
    })
}

/// One sample, one one-point update per epoch; no burn-in.
pub fn dfo_gd<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    let runner = Runner::new(env, cfg, rng)?;
    let schedule = cfg.schedule;
    runner.drive(rng, |r, k, rng| {
        let p = schedule.at(k);
        let u = sample_unit_sphere(r.d, rng)?;
        let scale = r.d as f64 / p.delta;
        let loss = r.step_perturbed(p.delta, &u, rng);
        axpy(-p.eta * scale * loss, &u, &mut r.theta);
        Ok(())
    })
}

/// Deploys `θ_k`, takes one sample, steps along `−∇_θ ℓ(θ_k; Z)`.
pub fn sgd_gd<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    let probe = vec![0.0; env.sample_dim()];
    if env.loss_grad_theta(cfg.theta0.as_slice(), &probe).is_err() {
        return Err(Error::UnsupportedAlgorithm(Algorithm::SgdGd.name()));
    }
    let runner = Runner::new(env, cfg, rng)?;
    let schedule = cfg.schedule;
    runner.drive(rng, |r, k, rng| {
        let p = schedule.at(k);
        r.env.advance(&mut r.z, &r.theta, rng);
        r.samples += 1;
        let g = r.env.loss_grad_theta(&r.theta, &r.z)?;
        axpy(-p.eta, &g, &mut r.theta);
        Ok(())
    })
}

/// Burns in at `θ + δu`, then differences the loss at `θ + δu` and `θ` on the
/// same sample. The sample's law depends on `u`, which biases the estimate.
pub fn two_point_i<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    let runner = Runner::new(env, cfg, rng)?;
    let schedule = cfg.schedule;
    runner.drive(rng, |r, k, rng| {
        let p = schedule.at(k);
        let burn_in = r.cfg.burn_in_tau.unwrap_or(p.tau);
        let u = sample_unit_sphere(r.d, rng)?;
        let mut perturbed_loss = 0.0;
        for _ in 0..burn_in {
            perturbed_loss = r.step_perturbed(p.delta, &u, rng);
        }
        let base_loss = r.env.loss(&r.theta, &r.z);
        axpy(-p.eta * r.d as f64 / p.delta * (perturbed_loss - base_loss), &u, &mut r.theta);
        Ok(())
    })
}

/// Burns in at `θ + δu` for the first loss value, then at `θ` for the second.
pub fn two_point_ii<E: Environment + ?Sized>(env: &E, cfg: &AlgoConfig, rng: &mut Rng) -> Result<RunTrace> {
    let runner = Runner::new(env, cfg, rng)?;
    let schedule = cfg.schedule;
    runner.drive(rng, |r, k, rng| {
        let p = schedule.at(k);
        let burn_in = r.cfg.burn_in_tau.unwrap_or(p.tau);
        let u = sample_unit_sphere(r.d, rng)?;
        let mut perturbed_loss = 0.0;
        for _ in 0..burn_in {
            perturbed_loss = r.step_perturbed(p.delta, &u, rng);
        }
        let mut base_loss = 0.0;
        for _ in 0..burn_in {
            base_loss = r.step_perturbed(0.0, &u, rng);
        }
        axpy(-p.eta * r.d as f64 / p.delta * (perturbed_loss - base_loss), &u, &mut r.theta);
        Ok(())
    })
}

//! Monte-Carlo diagnostics for the gradient estimators.
//!
//! These draw samples straight from the stationary law, so they isolate the
//! estimator's own bias and variance from the Markov-chain effects the
//! optimizers have to deal with.

use alloc::vec;
use alloc::vec::Vec;

use crate::env::{check_len, Environment};
use crate::estimator::{sample_unit_ball, sample_unit_sphere, EstimatorKind};
use crate::vector::{axpy, norm_sq};
use crate::{Error, Result, Rng};

/// Componentwise sample mean and standard error of a vector-valued statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub mean: Vec<f64>,
    /// Sample standard deviation over `sqrt(n)`.
    pub se: Vec<f64>,
    /// Sum of componentwise sample variances.
    pub cov_trace: f64,
    pub sample_count: u64,
}

impl MomentReport {
    /// `E‖g‖²` estimated from the same draws.
    pub fn second_moment(&self) -> f64 {
        let n = self.sample_count as f64;
        self.cov_trace * (n - 1.0) / n + norm_sq(&self.mean)
    }

    /// Largest `|mean_i - target_i| / se_i`.
    pub fn max_z_score(&self, target: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(&self.se)
            .zip(target)
            .map(|((m, s), t)| (m - t).abs() / s)
            .fold(0.0, f64::max)
    }
}

/// Running mean and sum of squared deviations per component.
#[derive(Debug, Clone)]
pub struct Welford {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    pub fn new(d: usize) -> Self {
        Self { n: 0, mean: vec![0.0; d], m2: vec![0.0; d] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    /// Needs at least two observations.
    pub fn report(&self) -> Result<MomentReport> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("need at least two samples for moments"));
        }
        let n = self.n as f64;
        let var: Vec<f64> = self.m2.iter().map(|s| s / (n - 1.0)).collect();
        Ok(MomentReport {
            mean: self.mean.clone(),
            se: var.iter().map(|v| libm::sqrt(v / n)).collect(),
            cov_trace: var.iter().sum(),
            sample_count: self.n,
        })
    }
}

/// Monte-Carlo estimate of the ball-smoothed risk `E_w[L(θ + δw)]`, `w`
/// uniform on the unit ball.
pub fn smoothed_risk<E: Environment + ?Sized>(
    env: &E,
    theta: &[f64],
    delta: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<f64> {
    check_len(env.dim(), theta.len())?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1"));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    // surface the missing oracle before drawing anything
    env.exact_risk(theta)?;
    let mut point = vec![0.0; theta.len()];
    let mut sum = 0.0;
    for _ in 0..n {
        let w = sample_unit_ball(theta.len(), rng)?;
        point.copy_from_slice(theta);
        axpy(delta, &w, &mut point);
        sum += env.exact_risk(&point)?;
    }
    Ok(sum / n as f64)
}

/// Draws `n` independent estimator values at `theta` with stationary samples
/// and summarizes them.
pub fn estimator_moments<E: Environment + ?Sized>(
    env: &E,
    theta: &[f64],
    delta: f64,
    n: usize,
    kind: EstimatorKind,
    rng: &mut Rng,
) -> Result<MomentReport> {
    let d = env.dim();
    check_len(d, theta.len())?;
    if !(delta > 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    env.stationary_sample(theta, &mut rng.clone())?;
    let mut acc = Welford::new(d);
    let mut pert = vec![0.0; d];
    let mut g = vec![0.0; d];
    for _ in 0..n {
        let u = sample_unit_sphere(d, rng)?;
        pert.copy_from_slice(theta);
        axpy(delta, &u, &mut pert);
        let z1 = env.stationary_sample(&pert, rng)?;
        let value = match kind {
            EstimatorKind::OnePoint => env.loss(&pert, &z1),
            EstimatorKind::TwoPointI => env.loss(&pert, &z1) - env.loss(theta, &z1),
            EstimatorKind::TwoPointII => {
                let z2 = env.stationary_sample(theta, rng)?;
                env.loss(&pert, &z1) - env.loss(theta, &z2)
            }
        };
        let c = d as f64 / delta * value;
        g.iter_mut().zip(u.iter()).for_each(|(gi, ui)| *gi = c * ui);
        acc.push(&g);
    }
    acc.report()
}

/// Loss statistics that enter the two-point second-moment lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpread {
    /// `Var[ℓ(θ; Z)]`, `Z ~ Π_θ`.
    pub variance: f64,
    /// `E[(ℓ(θ + δu; Z) − ℓ(θ; Z))²] / δ²`, `Z ~ Π_{θ+δu}`: an effective
    /// squared Lipschitz constant of the loss in θ.
    pub lipschitz_sq: f64,
}

pub fn loss_spread<E: Environment + ?Sized>(
    env: &E,
    theta: &[f64],
    delta: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<LossSpread> {
    let d = env.dim();
    check_len(d, theta.len())?;
    if !(delta > 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    let mut base = Welford::new(1);
    let mut diff_sq = 0.0;
    let mut pert = vec![0.0; d];
    for _ in 0..n {
        let z = env.stationary_sample(theta, rng)?;
        base.push(&[env.loss(theta, &z)]);
        let u = sample_unit_sphere(d, rng)?;
        pert.copy_from_slice(theta);
        axpy(delta, &u, &mut pert);
        let z1 = env.stationary_sample(&pert, rng)?;
        let diff = env.loss(&pert, &z1) - env.loss(theta, &z1);
        diff_sq += diff * diff;
    }
    let report = base.report()?;
    Ok(LossSpread {
        variance: report.cov_trace,
        lipschitz_sq: diff_sq / (n as f64 * delta * delta),
    })
}

/// `(3/2) σ² d² / δ² − 3 μ² d²`: lower bound on the two-point (independent
/// samples) estimator's second moment.
pub fn two_point_second_moment_bound(d: usize, delta: f64, spread: LossSpread) -> f64 {
    let d2 = (d * d) as f64;
    1.5 * spread.variance * d2 / (delta * delta) - 3.0 * spread.lipschitz_sq * d2
}

/// Central differences `(f(θ + h e_i) − f(θ − h e_i)) / 2h`.
pub fn finite_diff_grad<F>(mut f: F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step h must be positive"));
    }
    let mut x = theta.to_vec();
    let mut out = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        x[i] = theta[i] + h;
        let plus = f(&x);
        x[i] = theta[i] - h;
        let minus = f(&x);
        x[i] = theta[i];
        out.push((plus - minus) / (2.0 * h));
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x` over the trailing half of the
/// points, so the early transient does not enter the fit.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("xs and ys differ in length"));
    }
    if xs.len() < 8 {
        return Err(Error::InvalidArgument("slope_fit needs at least 8 points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("slope_fit needs positive finite values"));
    }
    let start = xs.len() / 2;
    let lx: Vec<f64> = xs[start..].iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = ys[start..].iter().map(|v| libm::log(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("slope_fit needs distinct x values"));
    }
    Ok(sxy / sxx)
}

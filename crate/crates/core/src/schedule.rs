//! Two-timescale step-size laws.
//!
//! At epoch `k` the optimizer uses step size `eta0 / (1+k)^alpha`, query radius
//! `delta0 / (1+k)^beta` and an epoch of `max(1, ceil(tau0 * ln(1+k)))` kernel
//! steps. The update step shrinks faster than the radius (`alpha > beta`) so the
//! `O(1/delta^2)` estimator variance is averaged out.

use crate::{Error, Result};

/// Which exponent constraints a [`Schedule`] is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePreset {
    /// `alpha = 2/3`, `beta = 1/6` by default; requires `2 alpha - 4 beta` in `(0, 1)`.
    Smooth,
    /// `alpha = 3/4`, `beta = 1/6` by default; requires `0 < 3 beta < alpha < 1`.
    NonSmooth,
    /// Only the basic ranges `0 < alpha < 1`, `0 <= beta < 1/2`.
    Custom,
}

impl SchedulePreset {
    pub fn name(self) -> &'static str {
        match self {
            SchedulePreset::Smooth => "smooth",
            SchedulePreset::NonSmooth => "nonsmooth",
            SchedulePreset::Custom => "custom",
        }
    }

    pub fn default_exponents(self) -> (f64, f64) {
        match self {
            SchedulePreset::Smooth | SchedulePreset::Custom => (2.0 / 3.0, 1.0 / 6.0),
            SchedulePreset::NonSmooth => (0.75, 1.0 / 6.0),
        }
    }

    /// Default `(eta0, delta0)` for decision dimension `d`.
    pub fn default_constants(self, d: usize) -> (f64, f64) {
        let d = d as f64;
        match self {
            SchedulePreset::Smooth | SchedulePreset::Custom => {
                (libm::pow(d, -2.0 / 3.0), libm::cbrt(d))
            }
            SchedulePreset::NonSmooth => (libm::pow(d, -2.0 / 3.0), d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub preset: SchedulePreset,
    pub alpha: f64,
    pub beta: f64,
    pub eta0: f64,
    pub delta0: f64,
    pub tau0: f64,
    pub lambda: f64,
    pub rho: f64,
}

/// Parameters in force during one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub eta: f64,
    pub delta: f64,
    pub tau: usize,
}

/// `2 / ln(1 / max(rho, lambda))`, or 0 when both are 0 (every epoch then has one step).
pub fn default_tau0(rho: f64, lambda: f64) -> f64 {
    let m = rho.max(lambda);
    if m <= 0.0 {
        0.0
    } else {
        2.0 / libm::log(1.0 / m)
    }
}

impl Schedule {
    /// Builds and validates a schedule. `tau0 = None` selects [`default_tau0`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        preset: SchedulePreset,
        alpha: f64,
        beta: f64,
        eta0: f64,
        delta0: f64,
        lambda: f64,
        rho: f64,
        tau0: Option<f64>,
    ) -> Result<Self> {
        let s = Schedule {
            preset,
            alpha,
            beta,
            eta0,
            delta0,
            tau0: tau0.unwrap_or_else(|| default_tau0(rho, lambda)),
            lambda,
            rho,
        };
        s.validate()?;
        Ok(s)
    }

    /// The preset's default exponents and dimension-scaled constants.
    pub fn preset(preset: SchedulePreset, d: usize, lambda: f64, rho: f64) -> Result<Self> {
        let (alpha, beta) = preset.default_exponents();
        let (eta0, delta0) = preset.default_constants(d);
        Self::new(preset, alpha, beta, eta0, delta0, lambda, rho, None)
    }

    pub fn validate(&self) -> Result<()> {
        let Schedule { alpha, beta, .. } = *self;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSchedule("alpha must lie in (0, 1)"));
        }
        if !(0.0..0.5).contains(&beta) {
            return Err(Error::InvalidSchedule("beta must lie in [0, 1/2)"));
        }
        match self.preset {
            SchedulePreset::Smooth => {
                let c = 2.0 * alpha - 4.0 * beta;
                if !(c > 0.0 && c < 1.0) {
                    return Err(Error::InvalidSchedule("smooth preset needs 2 alpha - 4 beta in (0, 1)"));
                }
            }
            SchedulePreset::NonSmooth => {
                if !(3.0 * beta > 0.0 && 3.0 * beta < alpha) {
                    return Err(Error::InvalidSchedule("nonsmooth preset needs 0 < 3 beta < alpha"));
                }
            }
            SchedulePreset::Custom => {}
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::InvalidSchedule("eta0 must be positive"));
        }
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::InvalidSchedule("delta0 must be positive"));
        }
        if !(self.tau0 >= 0.0 && self.tau0.is_finite()) {
            return Err(Error::InvalidSchedule("tau0 must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::InvalidSchedule("lambda must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidSchedule("rho must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn at(&self, k: usize) -> StepParams {
        schedule_at(k, self)
    }

    /// Epoch length at `k` alone.
    pub fn tau_at(&self, k: usize) -> usize {
        // The 1e-9 slack keeps products such as (2/ln 2)·ln 8 = 6 from rounding up to 7.
        let raw = self.tau0 * libm::log1p(k as f64);
        let t = libm::ceil(raw - 1e-9);
        if t < 1.0 {
            1
        } else {
            t as usize
        }
    }

    /// `sum_{k < epochs} tau_k`: the samples DFO(λ) consumes over `epochs` epochs.
    pub fn total_samples(&self, epochs: usize) -> u64 {
        (0..epochs).map(|k| self.tau_at(k) as u64).sum()
    }
}

pub fn schedule_at(k: usize, s: &Schedule) -> StepParams {
    let base = 1.0 + k as f64;
    StepParams {
        eta: s.eta0 / libm::pow(base, s.alpha),
        delta: s.delta0 / libm::pow(base, s.beta),
        tau: s.tau_at(k),
    }
}

/// Weight `lambda^(tau - m)` of the `m`-th inner update, with `0^0 = 1` so the
/// last step of an epoch always counts fully.
pub fn forgetting_weight(lambda: f64, tau: usize, m: usize) -> Result<f64> {
    if m == 0 || m > tau {
        return Err(Error::IndexOutOfRange { m, tau });
    }
    Ok(libm::pow(lambda, (tau - m) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn smooth(lambda: f64, rho: f64) -> Schedule {
        Schedule::new(SchedulePreset::Smooth, 2.0 / 3.0, 1.0 / 6.0, 1.0, 1.0, lambda, rho, None).unwrap()
    }

    #[test]
    fn first_epoch_has_one_step() {
        for (l, r) in [(0.0, 0.0), (0.25, 0.5), (0.9, 0.99)] {
            assert_eq!(smooth(l, r).at(0).tau, 1);
        }
    }

    #[test]
    fn epoch_seven_values() {
        let p = smooth(0.5, 0.5).at(7);
        assert_relative_eq!(p.eta, 0.25, epsilon = 1e-15);
        assert_relative_eq!(p.delta, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(p.tau, 6);
    }

    #[test]
    fn tau_sequence_for_half_mixing() {
        let s = smooth(0.5, 0.5);
        assert_eq!((0..3).map(|k| s.tau_at(k)).collect::<alloc::vec::Vec<_>>(), [1, 2, 4]);
        assert_eq!(s.total_samples(3), 7);
    }

    #[test]
    fn zero_mixing_gives_unit_epochs() {
        let s = smooth(0.0, 0.0);
        assert_eq!(s.tau0, 0.0);
        assert!((0..100).all(|k| s.tau_at(k) == 1));
    }

    #[test]
    fn tau0_override() {
        let s = Schedule::new(SchedulePreset::Custom, 0.5, 0.1, 1.0, 1.0, 0.5, 0.5, Some(1.0)).unwrap();
        assert_eq!(s.tau0, 1.0);
        assert_eq!(s.tau_at(9), libm::ceil(libm::log(10.0)) as usize);
    }

    #[test]
    fn forgetting_weights() {
        assert_eq!(forgetting_weight(0.0, 5, 5).unwrap(), 1.0);
        assert_eq!(forgetting_weight(0.0, 5, 3).unwrap(), 0.0);
        assert_eq!(forgetting_weight(0.5, 4, 2).unwrap(), 0.25);
        assert_eq!(forgetting_weight(0.5, 4, 0), Err(Error::IndexOutOfRange { m: 0, tau: 4 }));
        assert_eq!(forgetting_weight(0.5, 4, 5), Err(Error::IndexOutOfRange { m: 5, tau: 4 }));
    }

    #[test]
    fn preset_constraints() {
        assert!(Schedule::preset(SchedulePreset::Smooth, 5, 0.25, 0.5).is_ok());
        assert!(Schedule::preset(SchedulePreset::NonSmooth, 5, 0.25, 0.5).is_ok());
        // 3 beta = alpha violates the non-smooth constraint.
        assert!(Schedule::new(SchedulePreset::NonSmooth, 0.5, 1.0 / 6.0, 1.0, 1.0, 0.0, 0.5, None).is_err());
        // 2 alpha - 4 beta = 1.2
        assert!(Schedule::new(SchedulePreset::Smooth, 0.9, 0.15, 1.0, 1.0, 0.0, 0.5, None).is_err());
        assert!(Schedule::new(SchedulePreset::Custom, 1.0, 0.1, 1.0, 1.0, 0.0, 0.5, None).is_err());
        assert!(Schedule::new(SchedulePreset::Custom, 0.5, 0.5, 1.0, 1.0, 0.0, 0.5, None).is_err());
        assert!(Schedule::new(SchedulePreset::Custom, 0.5, 0.1, 1.0, 1.0, 1.0, 0.5, None).is_err());
        assert!(Schedule::new(SchedulePreset::Custom, 0.5, 0.1, 1.0, 1.0, 0.0, 1.0, None).is_err());
        assert!(Schedule::new(SchedulePreset::Custom, 0.5, 0.1, 0.0, 1.0, 0.0, 0.5, None).is_err());
    }

    #[test]
    fn preset_constants_scale_with_dimension() {
        let s = Schedule::preset(SchedulePreset::Smooth, 8, 0.0, 0.5).unwrap();
        assert_relative_eq!(s.eta0, 0.25, epsilon = 1e-12);
        assert_relative_eq!(s.delta0, 2.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn schedule_is_monotone(
            alpha in 0.01f64..0.99,
            beta in 0.0f64..0.49,
            lambda in 0.0f64..0.99,
            rho in 0.0f64..0.99,
            k in 0usize..100_000,
        ) {
            let s = Schedule::new(SchedulePreset::Custom, alpha, beta, 1.0, 1.0, lambda, rho, None).unwrap();
            let (a, b) = (s.at(k), s.at(k + 1));
            prop_assert!(b.eta <= a.eta);
            prop_assert!(b.delta <= a.delta);
            prop_assert!(b.tau >= a.tau);
        }
    }
}

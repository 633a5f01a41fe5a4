//! Zeroth-order gradient estimators built from loss values at randomly
//! perturbed models.

use alloc::vec::Vec;
use core::str::FromStr;

use crate::vector::{norm, Direction};
use crate::{Error, Result, Rng};

/// Uniform draw from the unit sphere in `d` dimensions, by normalizing a
/// standard Gaussian vector.
pub fn sample_unit_sphere(d: usize, rng: &mut Rng) -> Result<Direction> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        // all-zero draw has probability zero but would break normalization
        if norm(&v) > 0.0 {
            return Direction::normalized(v);
        }
    }
}

/// Uniform draw from the unit ball: sphere direction scaled by `U^(1/d)`.
pub fn sample_unit_ball(d: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    let u = sample_unit_sphere(d, rng)?;
    let r = libm::pow(rng.uniform(), 1.0 / d as f64);
    Ok(u.iter().map(|x| r * x).collect())
}

/// `(d / delta) * loss_value * u`.
pub fn one_point_gradient(d: usize, delta: f64, loss_value: f64, u: &[f64]) -> Result<Vec<f64>> {
    check_args(d, delta, u)?;
    let c = d as f64 / delta * loss_value;
    Ok(u.iter().map(|x| c * x).collect())
}

/// `(d / delta) * (loss_perturbed - loss_base) * u`.
///
/// Both two-point variants share this form; they differ only in which samples
/// the two loss values are evaluated on.
pub fn two_point_gradient(
    d: usize,
    delta: f64,
    loss_perturbed: f64,
    loss_base: f64,
    u: &[f64],
) -> Result<Vec<f64>> {
    one_point_gradient(d, delta, loss_perturbed - loss_base, u)
}

fn check_args(d: usize, delta: f64, u: &[f64]) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    if u.len() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: u.len() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// One loss value at the perturbed model, sample drawn at the perturbed model.
    OnePoint,
    /// Two loss values on a single sample drawn at the perturbed model.
    TwoPointI,
    /// Two loss values on independent samples drawn at the perturbed and base models.
    TwoPointII,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::OnePoint => "one_point",
            EstimatorKind::TwoPointI => "two_point_I",
            EstimatorKind::TwoPointII => "two_point_II",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_point" => Ok(EstimatorKind::OnePoint),
            "two_point_I" => Ok(EstimatorKind::TwoPointI),
            "two_point_II" => Ok(EstimatorKind::TwoPointII),
            _ => Err(Error::InvalidArgument("unknown estimator tag")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use crate::Rng;

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = Rng::seed_from_u64(0);
        assert_eq!(sample_unit_sphere(0, &mut rng), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn one_dimensional_sphere_is_a_fair_sign() {
        let mut rng = Rng::seed_from_u64(7);
        let n = 100_000;
        let mut plus = 0;
        for _ in 0..n {
            let u = sample_unit_sphere(1, &mut rng).unwrap();
            assert!(u[0] == 1.0 || u[0] == -1.0);
            if u[0] > 0.0 {
                plus += 1;
            }
        }
        // 3 standard errors of a Bernoulli(1/2) proportion
        let se = 0.5 / (n as f64).sqrt();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn circle_mean_is_zero() {
        let mut rng = Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut sum = [0.0; 2];
        for _ in 0..n {
            let u = sample_unit_sphere(2, &mut rng).unwrap();
            sum[0] += u[0];
            sum[1] += u[1];
        }
        // each coordinate has variance 1/2 on the circle
        let tol = 3.0 / (2.0 * n as f64).sqrt();
        for s in sum {
            assert!((s / n as f64).abs() < tol, "{}", s / n as f64);
        }
    }

    #[test]
    fn ball_second_moment() {
        // E|w|^2 = d / (d + 2) for the uniform unit ball
        let mut rng = Rng::seed_from_u64(3);
        let (d, n) = (3, 200_000);
        let m: f64 = (0..n)
            .map(|_| crate::vector::norm_sq(&sample_unit_ball(d, &mut rng).unwrap()))
            .sum::<f64>()
            / n as f64;
        assert!((m - 0.6).abs() < 0.005, "{m}");
    }

    #[test]
    fn one_point_arithmetic() {
        assert_eq!(one_point_gradient(1, 0.5, 2.0, &[1.0]).unwrap(), vec![4.0]);
        let u = sample_unit_sphere(5, &mut Rng::seed_from_u64(1)).unwrap();
        assert_eq!(one_point_gradient(5, 1.0, 0.0, &u).unwrap(), vec![0.0; 5]);
        let g = one_point_gradient(2, 0.1, 1.0, &[0.6, 0.8]).unwrap();
        assert_relative_eq!(g[0], 12.0, epsilon = 1e-12);
        assert_relative_eq!(g[1], 16.0, epsilon = 1e-12);
    }

    #[test]
    fn one_point_rejects_bad_radius() {
        assert_eq!(one_point_gradient(1, 0.0, 1.0, &[1.0]), Err(Error::InvalidRadius(0.0)));
        assert_eq!(one_point_gradient(1, -1.0, 1.0, &[1.0]), Err(Error::InvalidRadius(-1.0)));
        assert!(one_point_gradient(2, 1.0, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn two_point_of_equal_losses_is_zero() {
        assert_eq!(two_point_gradient(2, 0.3, 5.0, 5.0, &[0.6, 0.8]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn estimator_tags_round_trip() {
        for k in [EstimatorKind::OnePoint, EstimatorKind::TwoPointI, EstimatorKind::TwoPointII] {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("three_point".parse::<EstimatorKind>().is_err());
    }

    proptest! {
        #[test]
        fn sphere_samples_have_unit_norm(d in 1usize..40, seed in any::<u64>()) {
            let u = sample_unit_sphere(d, &mut Rng::seed_from_u64(seed)).unwrap();
            prop_assert_eq!(u.dim(), d);
            prop_assert!((norm(&u) - 1.0).abs() < 1e-12);
        }
    }
}

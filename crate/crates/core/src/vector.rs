use alloc::vec::Vec;
use core::ops::Deref;

use crate::{Error, Result};

/// Model parameters being optimized and deployed.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    /// Rejects empty vectors and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("decision vector entries must be finite"));
        }
        Ok(Self(values))
    }

    pub fn zeros(d: usize) -> Self {
        Self(alloc::vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self + scale * dir`, the perturbed model that actually gets deployed.
    pub fn perturbed(&self, scale: f64, dir: &[f64]) -> Self {
        Self(self.0.iter().zip(dir).map(|(t, u)| t + scale * u).collect())
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<DecisionVector> for Vec<f64> {
    fn from(v: DecisionVector) -> Self {
        v.0
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `values`; fails on an empty or zero vector.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let n = norm(&values);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector"));
        }
        values.iter_mut().for_each(|v| *v /= n);
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Direction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(norm_sq(a))
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

use alloc::vec::Vec;

use super::Algorithm;
use crate::vector::DecisionVector;

/// State at the start of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Kernel steps consumed before this epoch began.
    pub samples: u64,
    pub theta: DecisionVector,
    pub risk: Option<f64>,
    pub grad_norm_sq: Option<f64>,
}

/// Everything one optimizer run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    /// One record per epoch boundary `0..=T` (fewer if the run diverged).
    pub records: Vec<EpochRecord>,
    /// Index of the uniformly drawn output iterate.
    pub output_index: usize,
    /// Epoch during which the iterate left the finite / bounded region.
    pub diverged_at: Option<usize>,
    /// Kernel steps consumed by the whole run.
    pub total_samples: u64,
}

impl RunTrace {
    pub fn output_theta(&self) -> &DecisionVector {
        &self.records[self.output_index].theta
    }

    pub fn final_theta(&self) -> &DecisionVector {
        &self.records.last().expect("a trace always holds the initial record").theta
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// Epochs actually completed.
    pub fn epochs(&self) -> usize {
        self.records.len() - 1
    }

    /// `(1/(1+k)) Σ_{j≤k} ‖∇L(θ_j)‖²` for every record, absent without a gradient oracle.
    pub fn running_avg_grad_norm_sq(&self) -> Vec<Option<f64>> {
        let mut sum = 0.0;
        let mut ok = true;
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                match r.grad_norm_sq {
                    Some(g) if ok => sum += g,
                    _ => ok = false,
                }
                ok.then(|| sum / (i + 1) as f64)
            })
            .collect()
    }
}

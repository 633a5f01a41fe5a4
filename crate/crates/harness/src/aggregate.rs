use thiserror::Error;

use crate::output::TraceRow;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("no traces to aggregate")]
    Empty,
    #[error("trace {trial} has a different epoch grid from trace 0")]
    Misaligned { trial: usize },
}

/// Mean and sample standard deviation (`n - 1` denominator; 0 for one trace).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub epoch: usize,
    pub samples_mean: f64,
    pub risk: Option<Stat>,
    pub grad_norm_sq: Option<Stat>,
    pub run_avg_grad_norm_sq: Option<Stat>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub points: Vec<AggregatePoint>,
}

impl AggregateCurve {
    /// Mean of `metric` over points whose epoch is in the last `fraction` of the run.
    pub fn tail_mean(&self, fraction: f64, metric: impl Fn(&AggregatePoint) -> Option<Stat>) -> Option<f64> {
        let last = self.points.last()?.epoch as f64;
        let cut = last * (1.0 - fraction);
        let vals: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.epoch as f64 >= cut)
            .filter_map(|p| metric(p).map(|s| s.mean))
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

pub fn stat(values: &[f64]) -> Stat {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Stat { mean, std }
}

fn metric_stat(traces: &[&[TraceRow]], i: usize, get: impl Fn(&TraceRow) -> Option<f64>) -> Option<Stat> {
    let vals: Option<Vec<f64>> = traces.iter().map(|t| get(&t[i])).collect();
    vals.map(|v| stat(&v))
}

/// Pointwise mean and spread of surviving trials on a shared epoch grid.
pub fn aggregate(traces: &[&[TraceRow]]) -> Result<AggregateCurve, AggregateError> {
    let first = traces.first().ok_or(AggregateError::Empty)?;
    for (trial, t) in traces.iter().enumerate() {
        if t.len() != first.len() || t.iter().zip(first.iter()).any(|(a, b)| a.epoch != b.epoch) {
            return Err(AggregateError::Misaligned { trial });
        }
    }
    if first.is_empty() {
        return Err(AggregateError::Empty);
    }
    let points = (0..first.len())
        .map(|i| AggregatePoint {
            epoch: first[i].epoch,
            samples_mean: traces.iter().map(|t| t[i].samples as f64).sum::<f64>() / traces.len() as f64,
            risk: metric_stat(traces, i, |r| r.risk),
            grad_norm_sq: metric_stat(traces, i, |r| r.grad_norm_sq),
            run_avg_grad_norm_sq: metric_stat(traces, i, |r| r.run_avg_grad_norm_sq),
            trials: traces.len(),
        })
        .collect();
    Ok(AggregateCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(epoch: usize, v: f64) -> TraceRow {
        TraceRow {
            epoch,
            samples: epoch as u64 * 2,
            risk: Some(v),
            grad_norm_sq: None,
            run_avg_grad_norm_sq: Some(v * v),
            theta: vec![v],
        }
    }

    #[test]
    fn single_trace_has_zero_spread() {
        let t = vec![row(0, 1.0), row(1, 5.0)];
        let c = aggregate(&[&t]).unwrap();
        assert_eq!(c.points[1].risk, Some(Stat { mean: 5.0, std: 0.0 }));
        assert_eq!(c.points[1].grad_norm_sq, None);
        assert_eq!(c.points[1].trials, 1);
    }

    #[test]
    fn two_traces_mean_and_sample_std() {
        let a = vec![row(0, 1.0)];
        let b = vec![row(0, 3.0)];
        let c = aggregate(&[&a, &b]).unwrap();
        // n - 1 denominator: ((1 - 2)^2 + (3 - 2)^2) / 1 = 2
        assert_eq!(c.points[0].risk, Some(Stat { mean: 2.0, std: 2f64.sqrt() }));
    }

    #[test]
    fn errors() {
        assert_eq!(aggregate(&[]), Err(AggregateError::Empty));
        let a = vec![row(0, 1.0), row(1, 1.0)];
        let b = vec![row(0, 1.0), row(2, 1.0)];
        assert_eq!(aggregate(&[&a, &b]), Err(AggregateError::Misaligned { trial: 1 }));
        let c = vec![row(0, 1.0)];
        assert_eq!(aggregate(&[&a, &c]), Err(AggregateError::Misaligned { trial: 1 }));
    }

    #[test]
    fn tail_mean_uses_the_last_fraction() {
        let t: Vec<TraceRow> = (0..=10).map(|k| row(k, k as f64)).collect();
        let c = aggregate(&[&t]).unwrap();
        assert_eq!(c.tail_mean(0.1, |p| p.risk), Some(9.5));
    }
}

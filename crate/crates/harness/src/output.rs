//! CSV rows for traces and aggregates.
//!
//! Files are UTF-8 with a header row and LF line endings; floats use 17
//! significant digits so values round-trip exactly. Absent metrics are empty
//! cells.

use std::fmt::Write as _;

use perfdfo_core::RunTrace;

use crate::aggregate::{AggregateCurve, Stat};

/// Shortest text that carries 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// One sampled epoch of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub epoch: usize,
    pub samples: u64,
    pub risk: Option<f64>,
    pub grad_norm_sq: Option<f64>,
    pub run_avg_grad_norm_sq: Option<f64>,
    pub theta: Vec<f64>,
}

/// Epoch indices kept when a trace of `epochs` epochs is thinned to at most
/// roughly `max_rows` rows: every `stride`-th epoch plus the last one.
pub fn row_epochs(epochs: usize, max_rows: Option<usize>) -> Vec<usize> {
    let stride = match max_rows {
        Some(m) if m > 1 && epochs + 1 > m => epochs.div_ceil(m - 1),
        _ => 1,
    };
    let mut out: Vec<usize> = (0..=epochs).step_by(stride).collect();
    if *out.last().expect("epoch 0 always present") != epochs {
        out.push(epochs);
    }
    out
}

pub fn trace_rows(trace: &RunTrace, max_rows: Option<usize>) -> Vec<TraceRow> {
    let avg = trace.running_avg_grad_norm_sq();
    row_epochs(trace.epochs(), max_rows)
        .into_iter()
        .map(|k| {
            let r = &trace.records[k];
            TraceRow {
                epoch: r.epoch,
                samples: r.samples,
                risk: r.risk,
                grad_norm_sq: r.grad_norm_sq,
                run_avg_grad_norm_sq: avg[k],
                theta: r.theta.as_slice().to_vec(),
            }
        })
        .collect()
}

pub const TRACE_COLUMNS: [&str; 6] = ["trial", "epoch", "samples_cum", "risk", "grad_norm_sq", "run_avg_grad_norm_sq"];

pub fn trace_csv(trial: usize, rows: &[TraceRow], dim: usize, record_theta: bool) -> String {
    let mut out = TRACE_COLUMNS.join(",");
    if record_theta {
        for i in 0..dim {
            write!(out, ",theta_{i}").unwrap();
        }
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{trial},{},{},{},{},{}",
            r.epoch,
            r.samples,
            opt(r.risk),
            opt(r.grad_norm_sq),
            opt(r.run_avg_grad_norm_sq)
        )
        .unwrap();
        if record_theta {
            for t in &r.theta {
                write!(out, ",{}", fmt_float(*t)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub const AGGREGATE_COLUMNS: [&str; 9] = [
    "epoch",
    "samples_mean",
    "risk_mean",
    "risk_std",
    "grad_norm_sq_mean",
    "grad_norm_sq_std",
    "run_avg_grad_norm_sq_mean",
    "run_avg_grad_norm_sq_std",
    "trials",
];

pub fn aggregate_csv(curve: &AggregateCurve) -> String {
    let stat = |s: Option<Stat>| match s {
        Some(s) => format!("{},{}", fmt_float(s.mean), fmt_float(s.std)),
        None => ",".to_string(),
    };
    let mut out = AGGREGATE_COLUMNS.join(",");
    out.push('\n');
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.epoch,
            fmt_float(p.samples_mean),
            stat(p.risk),
            stat(p.grad_norm_sq),
            stat(p.run_avg_grad_norm_sq),
            p.trials
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub check: usize,
    pub estimator: String,
    pub delta: f64,
    pub report: perfdfo_core::diag::MomentReport,
    pub theta: Vec<f64>,
}

pub const MOMENT_COLUMNS: [&str; 9] =
    ["check", "estimator", "delta", "sample_count", "cov_trace", "component", "theta", "mean", "se"];

/// Long format: one row per estimator component.
pub fn moments_csv(rows: &[MomentRow]) -> String {
    let mut out = MOMENT_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        for (i, (m, s)) in r.report.mean.iter().zip(&r.report.se).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{i},{},{},{}",
                r.check,
                r.estimator,
                fmt_float(r.delta),
                r.report.sample_count,
                fmt_float(r.report.cov_trace),
                fmt_float(r.theta[i]),
                fmt_float(*m),
                fmt_float(*s)
            )
            .unwrap();
        }
    }
    out
}

use std::path::PathBuf;

use thiserror::Error;

use crate::spectral::Wavevector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid {n1}x{n2}x{n3}: every axis must be even and at least 8")]
    InvalidGrid { n1: usize, n2: usize, n3: usize },

    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite sample at flat index {index}")]
    NonFiniteSample { index: usize },

    #[error("multiplier is not finite at wavevector {k}")]
    SingularMultiplier { k: Wavevector },

    #[error("{name} = {value} outside {interval}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        interval: String,
    },

    #[error("field has nonzero mean ({mean:e}) but a negative-exponent norm was requested")]
    NonzeroMean { mean: f64 },

    #[error("velocity field is not divergence free (relative residual {residual:e})")]
    NotDivergenceFree { residual: f64 },

    #[error("velocity component {component} has nonzero mean ({mean:e})")]
    VelocityMean { component: usize, mean: f64 },

    #[error("non-finite state at step {step} (t = {time}); last valid step {last_valid_step}")]
    NonFiniteState {
        step: u64,
        time: f64,
        last_valid_step: u64,
    },

    #[error("snapshot time {time} does not follow previous time {previous}")]
    NonMonotoneTime { time: f64, previous: f64 },

    #[error("empty history")]
    EmptyHistory,

    #[error("{lemma}: {detail}")]
    Hypothesis { lemma: &'static str, detail: String },

    #[error("infeasible ensemble: {0}")]
    Ensemble(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("invalid norm spec `{spec}`: {reason}")]
    NormSpec { spec: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Checks `lo < value < hi` (open interval), producing an `OutOfRange` error
/// that prints the interval.
pub(crate) fn check_open(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            interval: format!("]{}, {}[", fmt_bound(lo), fmt_bound(hi)),
        })
    }
}

pub(crate) fn fmt_bound(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "+inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

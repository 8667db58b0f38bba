// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    Spec(String),

    #[error("parameter {x} outside domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("degenerate spectrum at t = {t}: gap {gap:e} below floor {gap_min:e}")]
    DegenerateSpectrum { t: f64, gap: f64, gap_min: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("coupling requested between a level and itself (level {0})")]
    SameLevel(usize),

    #[error("target error must be positive, got {0}")]
    InvalidDelta(f64),

    #[error("observable is not Hermitian at grid index {index} (defect {defect:e})")]
    NonHermitianObservable { index: usize, defect: f64 },

    #[error("invalid level {0}, expected 1 or 2")]
    InvalidLevel(usize),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

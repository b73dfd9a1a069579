// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::propagator::Sector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:e} against scale {scale:e}")]
    NotHermitian { defect: f64, scale: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("thermal occupation needs a positive finite frequency/temperature ratio, got {0}")]
    NonPositiveRatio(f64),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("closed-form entry U[{row}][{col}] at field ({n1}, {n2}) leaves the generic four-state sector")]
    IndexOutOfSector { row: usize, col: usize, n1: u32, n2: u32 },

    #[error("printed formula for rho_{element} cannot be evaluated as written: {reason}")]
    MalformedFormula { element: &'static str, reason: &'static str },

    #[error("numerical failure in sector {sector:?} at gt = {gt}: {source}")]
    Sector {
        sector: Sector,
        gt: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

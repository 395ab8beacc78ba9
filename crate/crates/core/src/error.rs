// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::solutions::ConditionCheck;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model dimensions: {0}")]
    InvalidDims(String),

    #[error("state {0} is not a member of the Hilbert space")]
    StateNotInSpace(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for {what} (count {count})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        count: usize,
    },

    #[error("operator does not preserve the parity sector of the space: {0}")]
    ParityBreaking(String),

    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),

    #[error("operands live in different spaces: {0}")]
    SpaceMismatch(String),

    #[error("existence conditions violated: {}", format_violations(.0))]
    ConditionsViolated(Vec<ConditionCheck>),

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error(
        "integration step failed at t = {t}: step size {step:e}, stiffness estimate {stiffness:e}"
    )]
    StepFailure { t: f64, step: f64, stiffness: f64 },

    #[error("density matrix lost positivity at t = {t}: minimum eigenvalue {min_eigenvalue:e}")]
    PositivityLoss { t: f64, min_eigenvalue: f64 },

    #[error("circuit parameters outside the supported regime: {0}")]
    RegimeViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn format_violations(checks: &[ConditionCheck]) -> String {
    checks
        .iter()
        .filter(|c| !c.satisfied)
        .map(|c| format!("{} (off by {:.3e})", c.name, c.deviation))
        .collect::<Vec<_>>()
        .join("; ")
}

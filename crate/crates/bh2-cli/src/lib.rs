//! Library behind the `bh2` command-line driver: parameter resolution,
//! sweep execution, error records, and power-law fits.

pub mod commands;
pub mod fit;
pub mod params;
pub mod records;
pub mod sweep;

use thiserror::Error;

/// Process exit codes: 2 parameter error, 3 convergence failure,
/// 4 regime/size guard, 1 anything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("regime/size guard: {0}")]
    Guard(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Param(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<bh2::bethe::BetheError> for CliError {
    fn from(e: bh2::bethe::BetheError) -> Self {
        use bh2::bethe::BetheError as B;
        match e {
            B::NoConvergence { .. } => CliError::Convergence(e.to_string()),
            B::RegimeBoundary(_) => CliError::Guard(e.to_string()),
            B::LengthMismatch { .. } | B::Model(_) => CliError::Param(e.to_string()),
            other => CliError::Convergence(other.to_string()),
        }
    }
}

impl From<bh2::fock::FockError> for CliError {
    fn from(e: bh2::fock::FockError) -> Self {
        use bh2::fock::FockError as F;
        match e {
            F::SizeGuard { .. } => CliError::Guard(e.to_string()),
            F::Bethe(b) => b.into(),
            other => CliError::Convergence(other.to_string()),
        }
    }
}

impl From<bh2::model::ModelError> for CliError {
    fn from(e: bh2::model::ModelError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<bh2::exact::ExactError> for CliError {
    fn from(e: bh2::exact::ExactError) -> Self {
        match e {
            bh2::exact::ExactError::ConvergenceFailure(_) => CliError::Convergence(e.to_string()),
            bh2::exact::ExactError::IndexOutOfRange { .. } => CliError::Param(e.to_string()),
        }
    }
}

impl From<bh2::approx::ApproxError> for CliError {
    fn from(e: bh2::approx::ApproxError) -> Self {
        match e {
            bh2::approx::ApproxError::RegimeViolation { .. } => CliError::Guard(e.to_string()),
            bh2::approx::ApproxError::DegenerateDenominator(_) => CliError::Param(e.to_string()),
        }
    }
}

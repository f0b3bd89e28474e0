use branched_core::{AlgebraError, AnalysisError, ParseError};
use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// A pass/fail threshold was missed; the run itself completed.
    #[error("{0}")]
    Threshold(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Threshold(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) | CliError::Output(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(format!("parse error: {e}"))
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::DegreeCap { .. } | AlgebraError::UnknownLabel(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidAlpha(a) => {
                CliError::Usage(format!("alpha must avoid 1/n and lie in (0,1), got {a}"))
            }
            AnalysisError::InvalidBeta { .. }
            | AnalysisError::InvalidEpsilon { .. }
            | AnalysisError::InsufficientScales { .. }
            | AnalysisError::DissectionOffGrid(_) => CliError::Usage(e.to_string()),
            AnalysisError::Algebra(a) => a.into(),
            AnalysisError::Divergence { .. } | AnalysisError::BudgetUnattainable { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

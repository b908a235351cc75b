//! Command-line experiments over the functional calculus: single
//! constructions, admissibility profiles, norm sweeps, worst-case search
//! and the acceptance suite.

pub mod commands;
pub mod config;
pub mod search;
pub mod svg;
pub mod sweep;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invariant breach: {0}")]
    Breach(String),
    #[error(transparent)]
    Core(#[from] hinfcalc::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_BREACH: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

impl CliError {
    /// 1 for numerical failures and invariant breaches, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        use hinfcalc::Error as E;
        match self {
            CliError::Breach(_) => EXIT_BREACH,
            CliError::Core(
                E::ConstructionFailed { .. } | E::Singular(_) | E::Conditioning(_) | E::OracleUnavailable(_),
            ) => EXIT_BREACH,
            CliError::Core(_) | CliError::Invalid(_) | CliError::Io(_) | CliError::Csv(_) => EXIT_INVALID,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Breach("x".into()).exit_code(), EXIT_BREACH);
        assert_eq!(CliError::Invalid("x".into()).exit_code(), EXIT_INVALID);
        assert_eq!(CliError::Core(hinfcalc::Error::OracleUnavailable("cond".into())).exit_code(), EXIT_BREACH);
        assert_eq!(CliError::Core(hinfcalc::Error::NotStable { abscissa: 1.0 }).exit_code(), EXIT_INVALID);
    }
}

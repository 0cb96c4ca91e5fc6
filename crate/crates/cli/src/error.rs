//! Errors and the exit-code contract.

use iwasawa::IwasawaError;
use sympower::SymPowerError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Precision(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Precision(_) => EXIT_PRECISION,
            CliError::Failure(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Precision(m) => write!(f, "precision shortfall: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IwasawaError> for CliError {
    fn from(e: IwasawaError) -> Self {
        let msg = e.to_string();
        match e {
            IwasawaError::Config(_) | IwasawaError::Domain(_) => CliError::Usage(msg),
            IwasawaError::PrecisionShortfall { .. }
            | IwasawaError::Indeterminate(_)
            | IwasawaError::Convergence { .. }
            | IwasawaError::UnboundedTail => CliError::Precision(msg),
            _ => CliError::Failure(msg),
        }
    }
}

impl From<SymPowerError> for CliError {
    fn from(e: SymPowerError) -> Self {
        match e {
            SymPowerError::Iwasawa(inner) => inner.into(),
            SymPowerError::Config(_) | SymPowerError::Domain(_) | SymPowerError::MissingComponent(_) => {
                CliError::Usage(e.to_string())
            }
            SymPowerError::Consistency(_) => CliError::Failure(e.to_string()),
        }
    }
}

/// Exit code for a finished report.
pub fn report_exit_code(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let short = IwasawaError::PrecisionShortfall { needed: 5, available: 2, source_of: "x".into() };
        assert_eq!(CliError::from(short).exit_code(), EXIT_PRECISION);
        assert_eq!(CliError::from(SymPowerError::Config("m".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(SymPowerError::Iwasawa(IwasawaError::Indeterminate("v".into()))).exit_code(), EXIT_PRECISION);
        assert_eq!(CliError::from(SymPowerError::Consistency("c".into())).exit_code(), EXIT_CHECK_FAILED);
        assert_eq!(report_exit_code(true), EXIT_PASS);
    }
}

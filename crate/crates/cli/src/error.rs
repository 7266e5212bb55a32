use std::fmt;

use perpetual_mortgage::Error;

/// Anything that stops a command, with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Config(String),
    Io(std::io::Error),
    /// Oracle tolerances exceeded; the report has already been printed.
    CheckFailed,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "Usage",
            CliError::Config(_) => "Config",
            CliError::Io(_) => "Io",
            CliError::CheckFailed => "CheckFailed",
        }
    }

    /// 2 for invalid input, 1 for numerical failures and failed checks.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                Error::NoBracket { .. }
                | Error::MaxIterExceeded(_)
                | Error::Degenerate(_)
                | Error::NotConverged { .. }
                | Error::Diagnostic(_),
            )
            | CliError::Io(_)
            | CliError::CheckFailed => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) => f.write_str(s),
            CliError::Config(s) => write!(f, "bad configuration: {s}"),
            CliError::Io(e) => write!(f, "cannot write output: {e}"),
            CliError::CheckFailed => f.write_str("one or more oracle checks exceeded tolerance"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag or configuration value.
    Config(String),
    /// A library call rejected its inputs.
    Domain(vbsim_core::Error),
    Io(String),
    /// `verify` ran but at least one check failed.
    VerifyFailed(usize),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) | CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::VerifyFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl From<vbsim_core::Error> for CliError {
    fn from(e: vbsim_core::Error) -> Self {
        CliError::Domain(e)
    }
}

//! CLI failure modes and the process exit codes they map to.

use std::fmt;

/// Exit code when every exact-inequality certificate passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when a certificate fails (exact always; statistical under `--strict`).
pub const EXIT_CERT_FAILURE: i32 = 1;
/// Exit code for malformed configs, I/O failures, and precondition errors.
pub const EXIT_CONFIG_ERROR: i32 = 2;
/// Exit code when the dense-matrix resource guard refuses the request.
pub const EXIT_RESOURCE: i32 = 3;

/// Errors that stop a run before its certificates are evaluated.
///
/// A failing certificate is *not* an error: the run completes, writes its
/// artifacts, and the exit code is decided from the reports.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration; the message names the field.
    Config(String),
    /// Request exceeds the dense-matrix ceiling.
    Resource(String),
    /// Failed to read a config or write an artifact.
    Io(std::io::Error),
    /// The library rejected the run parameters at execution time.
    Lib(entdyn::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resource(_) => EXIT_RESOURCE,
            _ => EXIT_CONFIG_ERROR,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Resource(msg) => write!(f, "resource guard: {msg}"),
            CliError::Io(err) => write!(f, "io error: {err}"),
            CliError::Lib(err) => write!(f, "run failed: {err}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl From<entdyn::Error> for CliError {
    fn from(err: entdyn::Error) -> Self {
        match err {
            entdyn::Error::TooManyQubits { requested, max } => CliError::Resource(format!(
                "{requested} qubits exceeds the dense-matrix ceiling of {max}"
            )),
            other => CliError::Lib(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG_ERROR);
        assert_eq!(CliError::Resource("x".into()).exit_code(), EXIT_RESOURCE);
        let lib: CliError = entdyn::Error::TooManyQubits {
            requested: 14,
            max: 13,
        }
        .into();
        assert_eq!(lib.exit_code(), EXIT_RESOURCE);
        let lib: CliError = entdyn::Error::InvalidArgument("bad".into()).into();
        assert_eq!(lib.exit_code(), EXIT_CONFIG_ERROR);
    }
}

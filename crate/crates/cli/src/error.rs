use std::fmt;

use serde::Serialize;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments.
    Validation(String),
    /// Reading or writing files.
    Io(String),
    /// A numerical routine failed.
    Numerical(conic_heat::Error),
    /// One or more self-checks failed.
    Verification(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Io(_) => "io",
            CliError::Numerical(_) => "numerical",
            CliError::Verification(_) => "verification",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: i32,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                exit_code: self.exit_code(),
                message: self.to_string(),
            },
        })
        .expect("error body serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Verification(failed) => write!(f, "failed checks: {}", failed.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<conic_heat::Error> for CliError {
    fn from(e: conic_heat::Error) -> Self {
        match e {
            conic_heat::Error::InvalidProfile(m) => CliError::Validation(m),
            other => CliError::Numerical(other),
        }
    }
}

pub fn io_error(context: &str, path: &std::path::Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{context} {}: {e}", path.display()))
}

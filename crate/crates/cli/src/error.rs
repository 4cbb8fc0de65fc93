use thiserror::Error;
use weylsteer_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
    pub const GOLDEN_MISMATCH: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", match line { Some(l) => format!("parse error at line {l}: {message}"), None => format!("parse error: {message}") })]
    Parse { line: Option<usize>, message: String },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Mismatch(String),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError::Parse { line: None, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } => exit::PARSE,
            CliError::Mismatch(_) => exit::GOLDEN_MISMATCH,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Core(e) => match e {
                CoreError::Infeasible { .. } => exit::INFEASIBLE,
                CoreError::InvalidInput(_)
                | CoreError::NotHermitian { .. }
                | CoreError::NotUnitary { .. }
                | CoreError::IncompatibleAnsatz { .. } => exit::PARSE,
                CoreError::Singular { .. }
                | CoreError::Domain { .. }
                | CoreError::Reconstruction { .. }
                | CoreError::NonConvergence { .. }
                | CoreError::Integration { .. }
                | CoreError::NotCnotClass { .. } => exit::NUMERICAL,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

use std::path::Path;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT_ERROR: i32 = 2;
    pub const INVALID_CLUSTER_SPEC: i32 = 3;
    pub const NOT_LOCAL_OPTIMUM: i32 = 4;
    pub const BUDGET_EXCEEDED: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    ClusterSpec(String),

    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn parse(source: &str, line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            file: source.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Input(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) | Self::Parse { .. } => exit::INPUT_ERROR,
            Self::ClusterSpec(_) => exit::INVALID_CLUSTER_SPEC,
            Self::Budget(_) => exit::BUDGET_EXCEEDED,
        }
    }
}

impl From<mwpam_core::Error> for CliError {
    fn from(e: mwpam_core::Error) -> Self {
        match e {
            mwpam_core::Error::InvalidClusterSpec(_) => Self::ClusterSpec(e.to_string()),
            mwpam_core::Error::BudgetExceeded { .. } => Self::Budget(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

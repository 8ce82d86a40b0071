use quartic_core::Error as CoreError;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    NoSolution = 2,
    NotConverged = 3,
    TableMismatch = 4,
}

impl Exit {
    pub fn code(&self) -> u8 {
        *self as u8
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { exit: Exit::Usage, message: message.into() }
    }

    pub fn no_solution(message: impl Into<String>) -> Self {
        Self { exit: Exit::NoSolution, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let exit = match e {
            CoreError::NoRealSolution(_)
            | CoreError::NoZeroEnergySolution(_)
            | CoreError::InvalidMode { .. }
            | CoreError::NoMatch { .. } => Exit::NoSolution,
            CoreError::NonConvergence { .. } => Exit::NotConverged,
            _ => Exit::Usage,
        };
        Self { exit, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

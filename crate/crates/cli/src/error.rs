use std::process::ExitCode;

use kuramoto_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad config file or a request outside the supported range.
    #[error("{0}")]
    Config(String),
    #[error("integration failed: {0}")]
    Integration(CoreError),
    #[error("cell complex is inconsistent: {0}")]
    Boundary(CoreError),
    #[error("{0}")]
    Degenerate(CoreError),
    #[error(transparent)]
    Core(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Boundary(_) => 4,
            CliError::Degenerate(_) => 5,
            CliError::Core(_) | CliError::Io(_) | CliError::Output(_) => 1,
        })
    }
}

/// Maps a library error raised while running a command. Argument errors
/// count as configuration errors; the rest keep their command-specific code.
pub fn classify(e: CoreError, during: fn(CoreError) -> CliError) -> CliError {
    match e {
        CoreError::TooFewOscillators { .. } | CoreError::DimensionMismatch { .. } | CoreError::InvalidArgument(_) => {
            CliError::Config(e.to_string())
        }
        CoreError::DegenerateFrame { .. } => CliError::Degenerate(e),
        CoreError::BoundaryNotZero { .. } => CliError::Boundary(e),
        other => during(other),
    }
}

pub type CliResult<T> = Result<T, CliError>;

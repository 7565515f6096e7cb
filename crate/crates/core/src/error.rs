use thiserror::Error;

use crate::data::DataError;
use crate::engine::SimError;
use crate::eval::EvalError;
use crate::synth::SynthError;
use crate::types::ParamError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error; [`Error::exit_code`] gives the process exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Input {
        context: String,
        #[source]
        source: DataError,
    },
    #[error("{0}")]
    InvalidInput(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// 1 usage, 2 input parse or I/O, 3 invalid configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Input { .. } | Error::InvalidInput(_) | Error::Io { .. } => 2,
            Error::Eval(EvalError::Io(_) | EvalError::Csv(_) | EvalError::Json(_)) => 2,
            Error::Eval(EvalError::UnknownQuestion(_) | EvalError::NoSeedWave(_) | EvalError::EmptyWave { .. }) => 2,
            Error::Config(_) | Error::Param(_) | Error::Sim(_) | Error::Eval(_) | Error::Synth(_) => 3,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use spinorbit::benchdsl::BenchError;
use spinorbit::chsh::ChshError;
use spinorbit::elements::ElementError;
use spinorbit::experiment::ExperimentError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Malformed or semantically invalid bench input.
    #[error("{0}")]
    Input(String),
    /// A numeric contract failed at run time, e.g. lost probability weight.
    #[error("{0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        })
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<ElementError> for CliError {
    fn from(e: ElementError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Element(inner) => inner.into(),
            ExperimentError::DegenerateAnalyzer => CliError::Usage(e.to_string()),
            ExperimentError::State(_) | ExperimentError::HeraldFailed | ExperimentError::LostWeight(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<ChshError> for CliError {
    fn from(e: ChshError) -> Self {
        match e {
            ChshError::Experiment(inner) => inner.into(),
            ChshError::NonFinite(_) | ChshError::TooFewShots { .. } | ChshError::InvalidGrid(_) => {
                CliError::Usage(e.to_string())
            }
            ChshError::InvalidProbabilities(_) | ChshError::ZeroCounts => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        CliError::Input(e.to_string())
    }
}

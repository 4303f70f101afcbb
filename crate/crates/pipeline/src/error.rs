use std::path::PathBuf;

use gapsense_core::circuits::CircuitError;
use gapsense_core::fieldsolver::SolverError;
use gapsense_core::fitting::FitError;
use gapsense_core::geometry::GeometryError;
use gapsense_core::lossmodels::LossModelError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A CSV that does not match the schema for its fit kind. `row` counts
    /// data rows from 1; `None` for header problems.
    #[error("{}: {}{message}", path.display(), location(*row, column.as_deref()))]
    Schema { path: PathBuf, row: Option<usize>, column: Option<String>, message: String },
    #[error("missing fixture `{0}`")]
    MissingFixture(String),
    #[error("{label}: {message}")]
    SweepPoint { label: String, message: String, code: i32 },
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("field solver: {0}")]
    Solver(#[from] SolverError),
    #[error("fit: {0}")]
    Fit(#[from] FitError),
    #[error("loss model: {0}")]
    LossModel(#[from] LossModelError),
    #[error("circuit: {0}")]
    Circuit(#[from] CircuitError),
}

fn location(row: Option<usize>, column: Option<&str>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!("row {r}, column `{c}`: "),
        (Some(r), None) => format!("row {r}: "),
        (None, Some(c)) => format!("column `{c}`: "),
        (None, None) => String::new(),
    }
}

impl PipelineError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::Schema { .. } | Self::MissingFixture(_) | Self::Geometry(_) => {
                EXIT_INPUT
            }
            Self::Solver(SolverError::InvalidInput(_) | SolverError::InvalidMap(_)) => EXIT_INPUT,
            Self::Solver(_) => EXIT_NUMERICAL,
            Self::Fit(FitError::InvalidData(_) | FitError::InitOutOfBounds { .. }) => EXIT_INPUT,
            Self::Fit(_) => EXIT_NUMERICAL,
            Self::LossModel(LossModelError::InvalidParams(_) | LossModelError::EmptyBudget) => EXIT_INPUT,
            Self::LossModel(_) => EXIT_NUMERICAL,
            Self::Circuit(_) => EXIT_INPUT,
            Self::SweepPoint { code, .. } => *code,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

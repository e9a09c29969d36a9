use thiserror::Error;
use trotter_core::error_op::ErrorOpError;
use trotter_core::hamiltonian::HamiltonianError;
use trotter_core::ordering::OrderingError;
use trotter_core::sim::SimError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    ErrorOperator(#[from] ErrorOpError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    /// 2 for bad input, 3 for refusals on size or caps, 4 for numerical
    /// non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_)
            | CliError::Hamiltonian(_)
            | CliError::Io(_)
            | CliError::Csv(_)
            | CliError::Json(_) => 2,
            CliError::Ordering(OrderingError::CapExceeded { .. }) => 3,
            CliError::Ordering(OrderingError::ErrorOperator(e)) | CliError::ErrorOperator(e) => {
                match e {
                    ErrorOpError::DenseThreshold { .. } => 3,
                    _ => 2,
                }
            }
            CliError::Ordering(_) => 2,
            CliError::Sim(SimError::NonConvergence { .. }) => 4,
            CliError::Sim(SimError::TooManyQubits { .. }) => 3,
            CliError::Sim(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid number of parties {n}: must be between 1 and {max}")]
    InvalidSize { n: usize, max: usize },

    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid correlation tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid response function: {0}")]
    InvalidResponse(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("quadrature needs {required} evaluations, budget is {budget}")]
    QuadratureBudget { required: f64, budget: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

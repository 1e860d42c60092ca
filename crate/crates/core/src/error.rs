use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid dataset: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Carries the best objective value reached.
    #[error("oracle stopped after {iterations} iterations with gap {gap:e} (objective {half_sq})")]
    IterationCap {
        iterations: usize,
        gap: f64,
        half_sq: f64,
    },

    #[error("simulation fault: {0}")]
    Simulation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for faults of the numerics rather than of the input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::IterationCap { .. } | Error::Simulation(_)
        )
    }
}

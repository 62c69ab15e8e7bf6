use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qmvop::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the invocation, 1 for
    /// numerical failures.
    pub fn exit_code(&self) -> u8 {
        use qmvop::Error as E;
        match self {
            CliError::Core(
                E::NonConvergence { .. }
                | E::DivergentSeries { .. }
                | E::NoConvergence { .. }
                | E::NoDecay { .. }
                | E::NotHermitian { .. }
                | E::Singular { .. }
                | E::NotReal { .. },
            ) => 1,
            _ => 2,
        }
    }
}

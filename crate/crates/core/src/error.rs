use thiserror::Error;

/// Errors raised by the simulator, model and training code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An invalid setting or combination of settings.
    #[error("configuration error: {0}")]
    Config(String),
    /// Inputs outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A qubit index outside the register.
    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    Index { index: usize, n_qubits: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

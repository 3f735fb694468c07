use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e}): {context}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        context: String,
    },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("two-electron problem too large: {0}")]
    Budget(String),

    #[error("wavefunction reaches the grid edge: relative amplitude {amplitude:e} exceeds {limit:e} at t = {time:e} s")]
    EdgeAmplitude {
        amplitude: f64,
        limit: f64,
        time: f64,
    },

    #[error("index {index} out of range for a {n}-qubit register")]
    QubitIndex { index: usize, n: usize },

    #[error("invalid exchange pair: {0}")]
    InvalidPair(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("target unreachable in bounds: {0}")]
    Unreachable(String),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Singular(_) => "singular",
            Error::Budget(_) => "budget",
            Error::EdgeAmplitude { .. } => "edge_amplitude",
            Error::QubitIndex { .. } => "qubit_index",
            Error::InvalidPair(_) => "invalid_pair",
            Error::Parse { .. } => "parse",
            Error::Unreachable(_) => "unreachable",
        }
    }
}

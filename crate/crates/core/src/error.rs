use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "target entropy {target:.4} bits is unreachable for {family}; achievable range is ({min:.4}, {max:.4}) bits"
    )]
    UnreachableEntropy {
        family: &'static str,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("message is empty")]
    EmptyMessage,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("threshold {0} excludes every quotient")]
    AllExcluded(f64),

    #[error("chapter growth failed: {0}")]
    Growth(String),

    #[error("codeword assignment infeasible: {0}")]
    InfeasibleAssignment(String),

    #[error("stationary distribution did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no dictionary candidate could be built: {0}")]
    NoCandidate(String),

    #[error("corrupt block: {0}")]
    CorruptBlock(String),

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("dictionary set: {0}")]
    DictSet(String),

    #[error("image: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed compressed input rather than by
    /// the caller's parameters.
    pub fn is_corrupt_input(&self) -> bool {
        matches!(
            self,
            Error::CorruptBlock(_) | Error::CorruptContainer(_) | Error::DictSet(_)
        )
    }
}

use thiserror::Error;

use crate::alm::AlmOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("symmetric eigensolver did not converge within {0} iterations")]
    EigenFailure(usize),

    #[error("function undefined on the spectrum: {0}")]
    DomainError(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid parameter: {0}")]
    ParameterError(String),

    #[error("first argument is singular; supply a positive regularization shift")]
    SingularInput,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("inconsistent mean: {0}")]
    InconsistentMean(String),

    #[error("eigenvalue 1 of the weight matrix has a {0}-dimensional eigenspace")]
    DegeneratePerron(usize),

    #[error("mean {index} is not affinely dominated: weight vector {weights:?} has a non-positive entry")]
    NotAffinelyDominated { index: usize, weights: Vec<f64> },

    #[error("weight matrix is not primitive (spectral gap {0:.3e}); its powers do not converge")]
    NonPrimitive(f64),

    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("hypothesis violation: means {indices:?} are arithmetic while another mean is not; need all arithmetic or at most one not strictly concave")]
    HypothesisViolation { indices: Vec<usize> },

    #[error("iteration did not converge: final pairwise distance {:.3e} after {} iterations", .0.final_distance, .0.iterations)]
    NonConverged(Box<AlmOutcome>),

    #[error("weight estimation failed: estimated weights sum to {0}")]
    WeightEstimationFailure(f64),

    #[error("precondition failed: {0}")]
    PreconditionError(String),

    #[error("no registered check matches {0:?}")]
    UnknownCheck(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

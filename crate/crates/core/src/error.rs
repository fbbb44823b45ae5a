use thiserror::Error;

/// Errors raised while constructing fields and polyhedra or evaluating masses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {got} not supported (need at least {min})")]
    Dimension { got: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("perturbation too large: |h| bound {bound:.6} at the inner radius exceeds epsilon(n) = {epsilon:.6}")]
    Smallness { bound: f64, epsilon: f64 },

    #[error("point at radius {radius} lies inside the inner cutoff {cutoff}")]
    InsideCutoff { radius: f64, cutoff: f64 },

    #[error("singular matrix encountered ({0})")]
    Singular(&'static str),

    #[error("angle quotient {value} is outside [-1, 1] beyond round-off")]
    Conditioning { value: f64 },

    #[error("angle validation failed: {count} edge(s) with |sin alpha| < {constant} (worst {worst:.6})")]
    AngleValidation {
        count: usize,
        constant: f64,
        worst: f64,
    },

    #[error("non-finite integrand value at quadrature node {node} (point {point:?})")]
    NonFinite { node: usize, point: Vec<f64> },

    #[error("invalid geometry: {0}")]
    Geometry(String),
}

impl Error {
    /// Whether the error originates in configuration or validation rather than arithmetic.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::InvalidParameter(_)
                | Error::UnknownId(_)
                | Error::Smallness { .. }
                | Error::InsideCutoff { .. }
                | Error::AngleValidation { .. }
                | Error::Geometry(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{quantity} = {value:e} is outside the domain of {context}: {reason}")]
    Domain {
        context: &'static str,
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A series failed to meet its tail bound before the term cap.
    #[error("{context}: series did not converge after {terms} terms (partial sum {partial:e}, tail bound {tail_bound:e})")]
    Convergence {
        context: &'static str,
        partial: f64,
        terms: usize,
        tail_bound: f64,
    },

    /// Design matrix does not have full column rank.
    #[error("design matrix is rank deficient: column {column} ({name}) is linearly dependent on the others")]
    Singular { column: usize, name: String },

    #[error("objective is not finite at x = {x:e} (value {value})")]
    NonFinite { x: f64, value: f64 },

    #[error("no usable points: all {excluded} points have non-positive separation")]
    EmptyObjective { excluded: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(
        context: &'static str,
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    ) -> Self {
        Error::Domain {
            context,
            quantity,
            value,
            reason,
        }
    }
}

//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors reported by grid construction, operators and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid constraints violated (empty interval, too few cells, ...).
    InvalidGrid(String),
    /// Model parameter out of range (eps <= 0, sigma <= 0, ...).
    InvalidParams(String),
    /// An operation was called with the wrong scheme variant.
    VariantMismatch { expected: &'static str },
    /// A state or right-hand side contains NaN or infinite entries.
    NonFinite(&'static str),
    /// Shapes of two objects that must match do not.
    ShapeMismatch(String),
    /// Direct factorization hit a zero pivot.
    SingularFactor { row: usize },
    /// Iterative solve stopped above the requested tolerance.
    SolveDidNotConverge {
        iterations: usize,
        residual: f64,
        required: f64,
    },
    /// A solver failure inside a DIRK stage, with the stage index attached.
    StageSolve { stage: usize, source: String },
    /// Butcher tableau failed validation; the first violated condition.
    InvalidTableau { condition: &'static str, residual: f64 },
    /// Eigenvalue clusters too close to classify into physical/spurious.
    DegenerateModes { gap: f64 },
    /// The 4x4 eigensolver did not converge (never observed; guarded anyway).
    EigenFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidParams(msg) => write!(f, "invalid model parameters: {msg}"),
            Error::VariantMismatch { expected } => {
                write!(f, "operation requires the {expected} variant")
            }
            Error::NonFinite(what) => write!(f, "non-finite values in {what}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::SingularFactor { row } => {
                write!(f, "singular factorization at row {row}")
            }
            Error::SolveDidNotConverge {
                iterations,
                residual,
                required,
            } => write!(
                f,
                "linear solve stopped after {iterations} iterations with relative residual {residual:e} (required {required:e})"
            ),
            Error::StageSolve { stage, source } => {
                write!(f, "DIRK stage {stage} solve failed: {source}")
            }
            Error::InvalidTableau { condition, residual } => {
                write!(f, "tableau violates {condition} (residual {residual:e})")
            }
            Error::DegenerateModes { gap } => write!(
                f,
                "eigenvalues too close to classify (relative gap {gap:e})"
            ),
            Error::EigenFailure(msg) => write!(f, "eigensolver failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

//! Error type shared across the crate.

use std::fmt;

/// Errors reported by construction, solving and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes are incompatible or a square matrix was required.
    Dimension(String),
    /// A linear solve hit a pivot below the singularity threshold.
    Singular(String),
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A rational Laplace transform violates its structural constraints.
    InvalidTransform(String),
    /// Model parameters violate a structural constraint.
    InvalidModel(String),
    /// An iteration exhausted its budget without meeting tolerance.
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// The root of the Laplace exponent has a vanishing derivative.
    DegenerateRoot { root: f64, slope: f64 },
    /// An orbit normalization denominator collapsed.
    OrbitDegeneracy(String),
    /// An orbit jump is undefined because the normalizer vanishes.
    UndefinedJump(String),
    /// The requested operation does not support this model class.
    Unsupported(String),
    /// A numerical routine failed outside its supported range.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::Singular(msg) => write!(f, "singular system: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidTransform(msg) => write!(f, "invalid rational transform: {msg}"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::NonConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (last residual {residual:e})"
            ),
            Error::DegenerateRoot { root, slope } => write!(
                f,
                "degenerate root: psi'({root}) = {slope:e} is not positive"
            ),
            Error::OrbitDegeneracy(msg) => write!(f, "orbit degeneracy: {msg}"),
            Error::UndefinedJump(msg) => write!(f, "undefined orbit jump: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported model: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::vec::Vec;
use core::fmt;

use crate::chain::SpecViolation;
use crate::Complex64;

/// Errors produced by chain construction, metric building and the solvers.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The chain description is structurally invalid; every violation found
    /// is listed.
    InvalidSpec(Vec<SpecViolation>),
    /// A coupling `H[j][j+1]` is exactly zero, so the chain decouples there
    /// and no diagonal metric relates the two halves. Index is 1-based.
    Decoupled { index: usize },
    /// The coupling ratio `conj(H[j+1][j]) / H[j][j+1]` at this 1-based index
    /// is not a positive real number, so no real diagonal similarity can make
    /// the matrix Hermitian.
    NotSymmetrizable { index: usize, ratio: Complex64 },
    /// An operation that requires a real symmetric tridiagonal matrix was
    /// handed something else.
    NonSymmetric(&'static str),
    /// An iteration failed to reach its tolerance; the per-root (or per
    /// vector) residuals reached are attached.
    Convergence { residuals: Vec<f64> },
    /// Undoing a log-scaled metric would overflow f64 at this 1-based entry.
    Range { index: usize },
    /// Invalid parameter for a closed-form model.
    Domain(&'static str),
    /// A vector length does not match the chain size.
    DimensionMismatch { expected: usize, got: usize },
    /// Eigenvector extraction failed at a repeated eigenvalue: the matrix has
    /// no second independent eigenvector there.
    Defective { value: Complex64 },
    /// The operation does not support this matrix shape.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(violations) => {
                write!(f, "invalid chain specification:")?;
                for v in violations {
                    write!(f, " [{v}]")?;
                }
                Ok(())
            }
            Error::Decoupled { index } => write!(
                f,
                "chain decouples: upper coupling at site {index} is zero"
            ),
            Error::NotSymmetrizable { index, ratio } => write!(
                f,
                "no real diagonal metric: coupling ratio at site {index} is \
                 {ratio} (needs a positive real)"
            ),
            Error::NonSymmetric(what) => {
                write!(f, "expected a real symmetric tridiagonal matrix: {what}")
            }
            Error::Convergence { residuals } => {
                let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
                write!(
                    f,
                    "iteration did not converge ({} residuals, worst {worst:e})",
                    residuals.len()
                )
            }
            Error::Range { index } => write!(
                f,
                "metric entry {index} overflows f64 when applied directly; \
                 it is only available in log form"
            ),
            Error::Domain(what) => write!(f, "parameter out of domain: {what}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "vector length {got} does not match chain size {expected}")
            }
            Error::Defective { value } => write!(
                f,
                "matrix is defective at repeated eigenvalue {value}; no second \
                 independent eigenvector exists"
            ),
            Error::Unsupported(what) => write!(f, "unsupported input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

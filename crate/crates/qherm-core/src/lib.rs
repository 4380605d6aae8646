//! Tridiagonal lattice chains with asymmetric couplings: metric construction,
//! symmetrization by diagonal similarity, and eigensolvers.
//!
//! A chain Hamiltonian couples site j to its neighbours through independent
//! upper and lower amplitudes. When every product of paired couplings is
//! positive (more generally, when every ratio `conj(lower)/upper` is real and
//! positive) the matrix is similar to a Hermitian one via a real diagonal
//! transform, so its spectrum is real even though the matrix itself is not
//! Hermitian. This crate builds that diagonal metric, applies the similarity,
//! and solves for spectra either through the symmetrized form (bisection on
//! Sturm counts) or directly from the characteristic polynomial (simultaneous
//! root iteration), together with closed-form solutions for uniform chains,
//! two-site blocks and alternating gain/loss chains.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded use.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod chain;
pub mod eigen;
mod error;
pub mod metric;
mod scaled;

pub use chain::{ChainSpec, Corners, EigenPair, PolyEval, SpecViolation, TridiagMatrix};
pub use eigen::Spectrum;
pub use error::Error;
pub use metric::{MetricDiagonal, QuasiHermReport};

/// Convenience alias used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// Result alias for fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;

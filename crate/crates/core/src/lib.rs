//! Sketch-and-select Arnoldi and friends.
//!
//! The crate builds Krylov bases with several processes (full Arnoldi,
//! truncated Arnoldi with plain or sketched coefficients, sketched-orthonormal
//! Arnoldi and sketch-and-select Arnoldi), solves linear systems with GMRES and
//! sketched GMRES, and measures how the condition number of a non-orthogonal
//! basis grows.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the experiments use.
// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod arnoldi;
pub mod error;
pub mod linalg;
pub mod matrix_io;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod sketch;
pub mod solvers;

pub use arnoldi::{Method, StopReason};
pub use error::{Error, Result};
pub use scalar::Real;
pub use selection::Strategy;
pub use sketch::SketchKind;

/// Compressed-row sparse matrix over `f64`.
pub type CsrMatrix = linalg::CsrMatrix<f64>;
/// Column-major dense matrix over `f64`.
pub type DenseMatrix = linalg::DenseMatrix<f64>;
/// Householder QR factorization with column appending, over `f64`.
pub type QrUpdatable = linalg::QrUpdatable<f64>;
/// Subspace embedding operator over `f64`.
pub type SketchOperator = sketch::SketchOperator<f64>;
/// Basis-construction settings over `f64`.
pub type ArnoldiConfig = arnoldi::ArnoldiConfig<f64>;
/// Output of a basis construction over `f64`.
pub type ArnoldiState = arnoldi::ArnoldiState<f64>;
/// Result of one subset selection over `f64`.
pub type SelectionResult = selection::SelectionResult<f64>;
/// Solver history over `f64`.
pub type SolveReport = solvers::SolveReport<f64>;
/// Perturbation-bound evaluation over `f64`.
pub type BoundReport = analysis::BoundReport<f64>;
/// Performance profile over `f64`.
pub type ProfileData = analysis::ProfileData<f64>;

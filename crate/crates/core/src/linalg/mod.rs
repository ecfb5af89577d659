//! Dense and sparse kernels: products, norms, updatable QR, least squares,
//! singular values and condition numbers.

mod csr;
mod dense;
mod lstsq;
mod qr;
mod svd;
pub mod vector;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use lstsq::{least_squares, rank_tolerance};
pub use qr::{IncrementalLeastSquares, QrUpdatable};
pub use svd::{cond2, cond_profile, singular_values, svd, Svd};
pub(crate) use svd::singular_values_of_factor;

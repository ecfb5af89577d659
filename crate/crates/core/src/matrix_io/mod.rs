//! Matrix input: Matrix Market files, synthetic generators, and the
//! problem description (matrix source plus right-hand side) used by the CLI.

mod generators;
mod market;
mod problem;

pub use generators::{
    conv_diff_2d, dense_random_spectrum, generate, shift, tridiag_toeplitz, Generator,
};
pub use market::{
    parse_matrix_market, read_matrix_market, read_vector, write_matrix_market, write_matrix_market_file,
};
pub use problem::{MatrixSource, Problem, ProblemSpec, RhsSpec, E1_PERTURBATION};

//! Dense row-major matrices of `f64`, FLOPs-counted arithmetic, the text
//! matrix format and a one-sided Jacobi SVD used as a verification oracle.

mod io;
mod matrix;
mod ops;
mod svd;

pub use io::{read_matrix, read_matrix_file, write_matrix, write_matrix_file};
pub use matrix::Matrix;
pub use ops::{axpy_scale, frobenius_norm, matmul, scale, FlopsCounter, MatmulShape};
pub use svd::{jacobi_svd, SvdResult, MAX_SWEEPS};

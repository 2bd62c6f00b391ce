//! Unified Newton-Schulz orthogonalization.
//!
//! A wide matrix `X` with singular values in `[0, 1]` is mapped in one pass to
//! `(I + sum_k a_k (I - X X^T)^(2^(k-1)) + b (I - X X^T)^(2^(N-1))) X`, which
//! applies the scalar polynomial of [`poly`] to every singular value and so
//! approximates the polar factor `U V^T`. Only two products involve the long
//! dimension; the rest are `h x h` squarings.
//!
//! Modules:
//! - [`densemat`]: dense matrices with FLOPs accounting and a Jacobi SVD oracle
//! - [`poly`]: the scalar polynomial, its terms, gradients and `b` rules
//! - [`train`]: Adam fitting of the learnable coefficients and step schedules
//! - [`ortho`]: preprocessing, the UNSO kernel and Newton-Schulz baselines
//! - [`bench`]: Gaussian inputs, error metric, FLOPs tables and curves

pub mod bench;
pub mod defaults;
pub mod densemat;
pub mod error;
pub mod ortho;
pub mod poly;
pub mod schedule;
pub mod train;

pub use densemat::{FlopsCounter, Matrix, SvdResult};
pub use error::{Error, Result};
pub use ortho::{orthogonalize, Grouping, Method, MethodSpec, OrthoResult, Scaling};
pub use poly::{BRule, CoefficientSet, QuinticStep};
pub use schedule::{CesistaStep, CesistaStepParams, Schedule};
pub use train::{TrainConfig, TrainState};

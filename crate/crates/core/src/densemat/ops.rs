use crate::error::{Error, Result};

use super::Matrix;

/// Operand shape of one recorded product: `(m x k) * (k x n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatmulShape {
    pub m: usize,
    pub k: usize,
    pub n: usize,
}

impl MatmulShape {
    pub fn flops(&self) -> u64 {
        2 * (self.m * self.k * self.n) as u64
    }

    /// Whether any dimension of the product equals `dim`.
    pub fn touches(&self, dim: usize) -> bool {
        self.m == dim || self.k == dim || self.n == dim
    }
}

/// FLOPs accumulator for one measurement scope.
///
/// Counting model: a product of `(m x k)` by `(k x n)` costs `2mkn`, every
/// elementwise scale or add costs one op per entry, and a squared-accumulate
/// in a norm costs two. Products are also logged with their operand shapes so
/// callers can tell short-side work from long-side work.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlopsCounter {
    total: u64,
    matmuls: Vec<MatmulShape>,
}

impl FlopsCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn reset(&mut self) {
        self.total = 0;
        self.matmuls.clear();
    }

    pub fn add(&mut self, ops: u64) {
        self.total += ops;
    }

    pub fn record_matmul(&mut self, shape: MatmulShape) {
        self.total += shape.flops();
        self.matmuls.push(shape);
    }

    pub fn matmuls(&self) -> &[MatmulShape] {
        &self.matmuls
    }

    /// Number of recorded products with some dimension equal to `dim`.
    pub fn matmuls_touching(&self, dim: usize) -> usize {
        self.matmuls.iter().filter(|s| s.touches(dim)).count()
    }
}

/// Matrix product, counted as `2 * a.rows * a.cols * b.cols`.
pub fn matmul(a: &Matrix, b: &Matrix, counter: &mut FlopsCounter) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut out = vec![0.0; m * n];
    let (ad, bd) = (a.as_slice(), b.as_slice());
    for i in 0..m {
        let out_row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = ad[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let b_row = &bd[p * n..(p + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += aip * bv;
            }
        }
    }
    counter.record_matmul(MatmulShape { m, k, n });
    Ok(Matrix::from_parts(m, n, out))
}

/// `alpha * a + beta * b`. Only performed operations are counted: a scaling by
/// exactly 1 is free, a zero coefficient drops its term entirely, and the add
/// is only counted when both terms survive.
pub fn axpy_scale(alpha: f64, a: &Matrix, beta: f64, b: &Matrix, counter: &mut FlopsCounter) -> Result<Matrix> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            op: "axpy_scale",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let len = a.as_slice().len() as u64;
    let data: Vec<f64> = match (alpha == 0.0, beta == 0.0) {
        (_, true) => {
            if alpha != 1.0 && alpha != 0.0 {
                counter.add(len);
            }
            a.as_slice().iter().map(|&x| alpha * x).collect()
        }
        (true, false) => {
            if beta != 1.0 {
                counter.add(len);
            }
            b.as_slice().iter().map(|&y| beta * y).collect()
        }
        (false, false) => {
            let scalings = u64::from(alpha != 1.0) + u64::from(beta != 1.0);
            counter.add(len * (scalings + 1));
            a.as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(&x, &y)| alpha * x + beta * y)
                .collect()
        }
    };
    Ok(Matrix::from_parts(a.rows(), a.cols(), data))
}

/// `alpha * a`; free when `alpha == 1`.
pub fn scale(alpha: f64, a: &Matrix, counter: &mut FlopsCounter) -> Matrix {
    if alpha == 1.0 {
        return a.clone();
    }
    counter.add(a.as_slice().len() as u64);
    let data = a.as_slice().iter().map(|&x| alpha * x).collect();
    Matrix::from_parts(a.rows(), a.cols(), data)
}

/// Counted Frobenius norm: `2 * rows * cols` ops.
pub fn frobenius_norm(a: &Matrix, counter: &mut FlopsCounter) -> f64 {
    counter.add(2 * a.as_slice().len() as u64);
    a.norm_fro()
}

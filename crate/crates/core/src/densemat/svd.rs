use crate::error::{Error, Result};

use super::Matrix;

pub const MAX_SWEEPS: usize = 60;
const ORTHO_TOL: f64 = 1e-12;
const MAX_ORACLE_ROWS: usize = 256;

/// Thin SVD of a wide matrix `a = u * diag(s) * v^T`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `h x h` orthogonal.
    pub u: Matrix,
    /// `h` singular values, descending.
    pub s: Vec<f64>,
    /// `w x h` with orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let (h, w) = (self.u.rows(), self.v.rows());
        Matrix::from_fn(h, w, |i, j| {
            (0..h).map(|k| self.u[(i, k)] * self.s[k] * self.v[(j, k)]).sum()
        })
    }
}

/// One-sided (Hestenes) Jacobi SVD for `rows <= cols <= ..`, `rows <= 256`.
///
/// Rows are rotated pairwise until every pair is orthogonal to `1e-12`
/// relative; the accumulated rotations form `u`, the final row norms are the
/// singular values and the normalized rows are the columns of `v`.
/// Verification oracle only: nothing on the production path calls it.
pub fn jacobi_svd(a: &Matrix) -> Result<SvdResult> {
    let (h, w) = a.shape();
    if h > w {
        return Err(Error::InvalidArgument(format!(
            "jacobi_svd expects rows <= cols, got {h}x{w}"
        )));
    }
    if h > MAX_ORACLE_ROWS {
        return Err(Error::InvalidArgument(format!(
            "jacobi_svd is limited to {MAX_ORACLE_ROWS} rows, got {h}"
        )));
    }

    let mut r = a.clone();
    let mut u = Matrix::identity(h);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..h {
            for j in (i + 1)..h {
                let (alpha, beta, gamma) = {
                    let (ri, rj) = (r.row(i), r.row(j));
                    let mut acc = (0.0, 0.0, 0.0);
                    for (x, y) in ri.iter().zip(rj) {
                        acc.0 += x * x;
                        acc.1 += y * y;
                        acc.2 += x * y;
                    }
                    acc
                };
                if gamma == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut r, i, j, c, s);
                rotate_cols(&mut u, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::OracleFailure { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..h)
        .map(|i| r.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let s: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u_sorted = Matrix::from_fn(h, h, |i, k| u[(i, order[k])]);
    let smax = s.first().copied().unwrap_or(0.0);
    let mut v = Matrix::zeros(w, h);
    let mut missing = Vec::new();
    for (k, &src) in order.iter().enumerate() {
        if s[k] > smax * 1e-14 && s[k] > 0.0 {
            for j in 0..w {
                v[(j, k)] = r[(src, j)] / s[k];
            }
        } else {
            missing.push(k);
        }
    }
    complete_orthonormal(&mut v, &missing);
    Ok(SvdResult { u: u_sorted, s, v })
}

fn rotate_rows(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    let (head, tail) = data.split_at_mut(j * cols);
    let ri = &mut head[i * cols..(i + 1) * cols];
    let rj = &mut tail[..cols];
    for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

fn rotate_cols(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m.rows() {
        let (xi, yj) = (m[(k, i)], m[(k, j)]);
        m[(k, i)] = c * xi - s * yj;
        m[(k, j)] = s * xi + c * yj;
    }
}

/// Fills the listed columns of `v` with unit vectors orthogonal to every
/// other column (Gram-Schmidt over the standard basis).
fn complete_orthonormal(v: &mut Matrix, missing: &[usize]) {
    let (w, h) = v.shape();
    let mut filled: Vec<usize> = (0..h).filter(|k| !missing.contains(k)).collect();
    let mut basis = 0;
    for &k in missing {
        while basis < w {
            let mut cand: Vec<f64> = (0..w).map(|j| if j == basis { 1.0 } else { 0.0 }).collect();
            basis += 1;
            for &f in &filled {
                let dot: f64 = (0..w).map(|j| cand[j] * v[(j, f)]).sum();
                for (j, c) in cand.iter_mut().enumerate() {
                    *c -= dot * v[(j, f)];
                }
            }
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for (j, c) in cand.iter().enumerate() {
                    v[(j, k)] = c / norm;
                }
                filled.push(k);
                break;
            }
        }
    }
}

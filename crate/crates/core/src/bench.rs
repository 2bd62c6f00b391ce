//! Experiment drivers: Gaussian inputs, the orthogonality error, the
//! method-by-shape FLOPs/error table, a closed-form FLOPs model and scalar
//! curve tables.

use std::cmp::Ordering;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::densemat::Matrix;
use crate::error::{Error, Result};
use crate::ortho::{orthogonalize, Grouping, Method, MethodSpec, Scaling};
use crate::poly::{term, term_extreme, QuinticStep, MUON_STEP};

/// Shapes of the reference table.
pub const TABLE_SHAPES: [(usize, usize); 3] = [(128, 128), (128, 512), (128, 1024)];

/// Seeds averaged per table cell by default.
pub const DEFAULT_SEEDS: std::ops::Range<u64> = 0..10;

pub const DEFAULT_CURVE_POINTS: usize = 2000;
pub const DEFAULT_CURVE_LOW: f64 = 0.0005;

/// I.i.d. standard normal entries, Box-Muller over a seeded ChaCha8 stream.
/// Deterministic in `(rows, cols, seed)`.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    let mut data = Vec::with_capacity(n + 1);
    while data.len() < n {
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        data.push(radius * angle.cos());
        data.push(radius * angle.sin());
    }
    data.truncate(n);
    Matrix::new(rows, cols, data).expect("Box-Muller output is finite")
}

/// `||Y Y^T - I||_F` for a wide `Y`.
pub fn ortho_error(y: &Matrix) -> Result<f64> {
    let (h, w) = y.shape();
    if h > w {
        return Err(Error::InvalidArgument(format!(
            "orthogonality error expects rows <= cols, got {h}x{w}"
        )));
    }
    let mut sum = 0.0;
    for i in 0..h {
        for j in i..h {
            let dot: f64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| a * b).sum();
            let e = if i == j { dot - 1.0 } else { dot };
            sum += if i == j { e * e } else { 2.0 * e * e };
        }
    }
    Ok(sum.sqrt())
}

/// One table cell: a method on one shape, averaged over seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub method: String,
    pub rows: usize,
    pub cols: usize,
    pub seeds: Vec<u64>,
    pub error_mean: f64,
    /// Identical for every seed: the op count does not depend on the data.
    pub flops: u64,
    pub per_seed_errors: Vec<f64>,
}

/// Runs every method on every shape for every seed. Reports are ordered by
/// method, then shape, following the input lists.
pub fn run_table(shapes: &[(usize, usize)], methods: &[MethodSpec], seeds: &[u64]) -> Result<Vec<BenchReport>> {
    if shapes.is_empty() || methods.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "run_table needs shapes, methods and seeds".into(),
        ));
    }
    let mut reports = Vec::with_capacity(shapes.len() * methods.len());
    for spec in methods {
        for &(rows, cols) in shapes {
            let cells: Vec<(f64, u64)> = seeds
                .par_iter()
                .map(|&seed| {
                    let m = gaussian_matrix(rows, cols, seed);
                    let r = orthogonalize(&m, spec)?;
                    let y = if r.y.rows() > r.y.cols() { r.y.transpose() } else { r.y };
                    Ok((ortho_error(&y)?, r.flops))
                })
                .collect::<Result<_>>()?;
            let flops = cells[0].1;
            debug_assert!(cells.iter().all(|c| c.1 == flops), "FLOPs differ across seeds");
            let per_seed_errors: Vec<f64> = cells.iter().map(|c| c.0).collect();
            reports.push(BenchReport {
                method: spec.name().to_string(),
                rows,
                cols,
                seeds: seeds.to_vec(),
                error_mean: per_seed_errors.iter().sum::<f64>() / per_seed_errors.len() as f64,
                flops,
                per_seed_errors,
            });
        }
    }
    Ok(reports)
}

pub fn write_reports_csv<W: Write>(mut w: W, reports: &[BenchReport]) -> Result<()> {
    writeln!(w, "method,rows,cols,error_mean,flops")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.method,
            r.rows,
            r.cols,
            fmt_sig(r.error_mean),
            r.flops
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Formats with 10 significant digits; plain decimal for moderate
/// magnitudes, exponent form otherwise.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.9e}")
    }
}

/// Cost of `alpha * A + beta * B` on `len` entries under the counting rules
/// of [`crate::densemat::axpy_scale`].
fn axpy_cost(alpha: f64, beta: f64, len: u64) -> u64 {
    if beta == 0.0 {
        len * u64::from(alpha != 1.0 && alpha != 0.0)
    } else if alpha == 0.0 {
        len * u64::from(beta != 1.0)
    } else {
        len * (u64::from(alpha != 1.0) + u64::from(beta != 1.0) + 1)
    }
}

/// Closed-form FLOPs of [`orthogonalize`] on an input of the given shape.
///
/// Assumes generic data: scaling norms different from exactly 1.
pub fn flops_model(spec: &MethodSpec, rows: usize, cols: usize) -> u64 {
    let (h, w) = (rows.min(cols) as u64, rows.max(cols) as u64);
    let long = 2 * h * h * w;
    let short = 2 * h * h * h;
    let (hh, hw) = (h * h, h * w);

    let (mut total, mut gram_ready) = match spec.scaling {
        Scaling::FrobeniusPlain => (2 * hw + hw, false),
        Scaling::FrobeniusGram => (long + 2 * hh + hw + hh, true),
        Scaling::Gelfand { power } => (
            long + u64::from(power.saturating_sub(1)) * short + 2 * hh + hw + hh,
            true,
        ),
    };
    let mut gram = |total: &mut u64| {
        if !std::mem::take(&mut gram_ready) {
            *total += long;
        }
    };

    let quintic = |total: &mut u64, steps: &[QuinticStep], grouping: Grouping, gram: &mut dyn FnMut(&mut u64)| {
        for s in steps {
            gram(total);
            match grouping {
                Grouping::Expanded => {
                    *total += long + axpy_cost(s.a, s.b, hw);
                    if s.c != 0.0 {
                        *total += long + axpy_cost(1.0, s.c, hw);
                    }
                }
                Grouping::GramPolynomial => {
                    *total += short + axpy_cost(s.b, s.c, hh) + long + axpy_cost(s.a, 1.0, hw);
                }
            }
        }
    };

    match &spec.method {
        Method::Unso(coeffs) => {
            gram(&mut total);
            total += axpy_cost(1.0, -1.0, hh);
            for &a in coeffs.a() {
                total += axpy_cost(1.0, a, hh) + short;
            }
            total += axpy_cost(1.0, coeffs.b(), hh) + long;
        }
        Method::OriginalNs { iterations } => {
            for _ in 0..*iterations {
                gram(&mut total);
                total += axpy_cost(3.0, -1.0, hh) + long + hw;
            }
        }
        Method::MuonNs { iterations, grouping } => {
            quintic(&mut total, &vec![MUON_STEP; *iterations], *grouping, &mut gram)
        }
        Method::CesistaNs { params, grouping } => quintic(&mut total, &params.to_quintics(), *grouping, &mut gram),
        Method::ExternalSchedule { steps, grouping } => quintic(&mut total, steps, *grouping, &mut gram),
    }
    total
}

/// `n >= 2` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || lo.partial_cmp(&hi) != Some(Ordering::Less) || lo < 0.0 || hi > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "grid needs n >= 2 and 0 <= lo < hi <= 1, got n={n}, [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    g[n - 1] = hi;
    Ok(g)
}

pub fn default_curve_grid() -> Vec<f64> {
    uniform_grid(DEFAULT_CURVE_LOW, 1.0, DEFAULT_CURVE_POINTS).expect("valid default grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named columns sampled on a shared, strictly increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub grid: Vec<f64>,
    pub columns: Vec<CurveColumn>,
}

impl CurveTable {
    pub fn new(grid: Vec<f64>) -> Result<Self> {
        if grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less)) {
            return Err(Error::InvalidArgument("curve grid must be strictly increasing".into()));
        }
        Ok(Self {
            grid,
            columns: Vec::new(),
        })
    }

    pub fn push(&mut self, name: impl Into<String>, f: impl Fn(f64) -> f64) {
        let values = self.grid.iter().map(|&x| f(x)).collect();
        self.columns.push(CurveColumn {
            name: name.into(),
            values,
        });
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = vec!["x".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        writeln!(w, "{}", header.join(","))?;
        for (i, &x) in self.grid.iter().enumerate() {
            let mut row = vec![fmt_sig(x)];
            row.extend(self.columns.iter().map(|c| fmt_sig(c.values[i])));
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Each method's composed scalar map on the grid, one column per method.
pub fn sample_curves(methods: &[MethodSpec], grid: &[f64]) -> Result<CurveTable> {
    let mut table = CurveTable::new(grid.to_vec())?;
    for spec in methods {
        table.push(spec.name(), |x| spec.scalar_map(x));
    }
    Ok(table)
}

/// Exponent pattern `n_k` of the term family `x (1 - x^2)^(n_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    /// `n_k = k`
    Linear,
    /// `n_k = 2^(k-1)`
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TermExtreme {
    pub k: u32,
    pub x_star: f64,
    pub y_star: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermCurves {
    /// Columns `k=1..k=N`.
    pub table: CurveTable,
    pub extremes: Vec<TermExtreme>,
}

impl TermCurves {
    /// Every column divided by its peak value.
    pub fn normalized(&self) -> CurveTable {
        let mut t = CurveTable {
            grid: self.table.grid.clone(),
            columns: Vec::new(),
        };
        for (col, ext) in self.table.columns.iter().zip(&self.extremes) {
            t.columns.push(CurveColumn {
                name: format!("{}/peak", col.name),
                values: col.values.iter().map(|v| v / ext.y_star).collect(),
            });
        }
        t
    }
}

/// Term functions `x (1 - x^2)^(n_k)` for `k = 1..=order` with their peaks
/// at `x* = 1/sqrt(2 n_k + 1)`.
pub fn sample_term_curves(order: u32, growth: Growth, grid: &[f64]) -> Result<TermCurves> {
    if order == 0 {
        return Err(Error::InvalidArgument("term curves need order >= 1".into()));
    }
    let mut table = CurveTable::new(grid.to_vec())?;
    let mut extremes = Vec::with_capacity(order as usize);
    for k in 1..=order {
        let name = format!("k={k}");
        let ext = match growth {
            Growth::Exponential => {
                table.push(name, |x| term(k, x));
                let (x_star, y_star) = term_extreme(k);
                TermExtreme { k, x_star, y_star }
            }
            Growth::Linear => {
                let n = k as i32;
                table.push(name, |x| x * (1.0 - x * x).powi(n));
                let x_star = 1.0 / (2.0 * f64::from(k) + 1.0).sqrt();
                TermExtreme {
                    k,
                    x_star,
                    y_star: x_star * (1.0 - x_star * x_star).powi(n),
                }
            }
        };
        extremes.push(ext);
    }
    Ok(TermCurves { table, extremes })
}

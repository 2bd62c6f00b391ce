//! Matrix orthogonalizers: input orientation and scaling, the single-pass
//! UNSO polynomial, and the iterative Newton-Schulz baselines.
//!
//! Every kernel works on a wide input (`rows <= cols`) so that Gram products
//! `X X^T` are `h x h`. Products whose cost scales with the long side `w` are
//! `X X^T` and the final left multiplication onto `X`; everything else is
//! short-side work.

use crate::densemat::{axpy_scale, frobenius_norm, jacobi_svd, matmul, scale, FlopsCounter, Matrix};
use crate::error::{Error, Result};
use crate::poly::{compose, CoefficientSet, QuinticStep, MUON_STEP, ORIGINAL_NS_STEP};
use crate::schedule::CesistaStepParams;

pub const ORIGINAL_NS_ITERATIONS: usize = 8;
pub const MUON_ITERATIONS: usize = 5;

/// How the oriented input `A` is scaled so its singular values land in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    /// `A / ||A A^T||_F^(1/2)`. The Gram product is kept and reused as the
    /// first `X X^T` of the kernel.
    FrobeniusGram,
    /// `A / ||A||_F`.
    FrobeniusPlain,
    /// `A / ||(A A^T)^power||_F^(1/(2 power))`, Gelfand's upper bound on the
    /// largest singular value. The Gram product is reused like `FrobeniusGram`.
    Gelfand { power: u32 },
}

/// Evaluation order of a quintic step `a X + b (X X^T) X + c (X X^T)^2 X`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Grouping {
    /// `G = X X^T`, `P = G X`, `Q = G P`, then `a X + b P + c Q`:
    /// three products on the long side per step.
    #[default]
    Expanded,
    /// `G = X X^T`, `B = b G + c G G`, then `a X + B X`:
    /// two products on the long side plus one `h x h` product per step.
    GramPolynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Unso(CoefficientSet),
    OriginalNs {
        iterations: usize,
    },
    MuonNs {
        iterations: usize,
        grouping: Grouping,
    },
    CesistaNs {
        params: CesistaStepParams,
        grouping: Grouping,
    },
    ExternalSchedule {
        steps: Vec<QuinticStep>,
        grouping: Grouping,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub scaling: Scaling,
    /// Check the scaled spectrum with the Jacobi oracle and warn when it
    /// leaves the method's convergence region. Diagnostic only.
    pub validate_spectrum: bool,
}

impl MethodSpec {
    pub fn new(method: Method, scaling: Scaling) -> Self {
        Self {
            method,
            scaling,
            validate_spectrum: false,
        }
    }

    pub fn unso(coeffs: CoefficientSet) -> Self {
        Self::new(Method::Unso(coeffs), Scaling::FrobeniusGram)
    }

    pub fn original_ns(iterations: usize) -> Self {
        Self::new(Method::OriginalNs { iterations }, Scaling::FrobeniusPlain)
    }

    pub fn muon(iterations: usize) -> Self {
        Self::new(
            Method::MuonNs {
                iterations,
                grouping: Grouping::default(),
            },
            Scaling::FrobeniusPlain,
        )
    }

    pub fn cesista(params: CesistaStepParams) -> Self {
        Self::new(
            Method::CesistaNs {
                params,
                grouping: Grouping::default(),
            },
            Scaling::FrobeniusPlain,
        )
    }

    pub fn external(steps: Vec<QuinticStep>) -> Self {
        Self::new(
            Method::ExternalSchedule {
                steps,
                grouping: Grouping::default(),
            },
            Scaling::FrobeniusPlain,
        )
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    /// Sets the grouping of quintic-step methods; no effect on the others.
    pub fn with_grouping(mut self, g: Grouping) -> Self {
        match &mut self.method {
            Method::MuonNs { grouping, .. }
            | Method::CesistaNs { grouping, .. }
            | Method::ExternalSchedule { grouping, .. } => *grouping = g,
            Method::Unso(_) | Method::OriginalNs { .. } => {}
        }
        self
    }

    pub fn with_validation(mut self, on: bool) -> Self {
        self.validate_spectrum = on;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.method {
            Method::Unso(_) => "unso",
            Method::OriginalNs { .. } => "original",
            Method::MuonNs { .. } => "muon",
            Method::CesistaNs { .. } => "cesista",
            Method::ExternalSchedule { .. } => "external",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        match &self.method {
            Method::OriginalNs { iterations: 0 } | Method::MuonNs { iterations: 0, .. } => {
                bad("iterative methods need at least one iteration")
            }
            Method::ExternalSchedule { steps, .. } if steps.is_empty() => bad("external schedule is empty"),
            _ => match self.scaling {
                Scaling::Gelfand { power: 0 } => bad("Gelfand power must be at least 1"),
                _ => Ok(()),
            },
        }
    }

    /// Per-step quintics for the step-structured baselines.
    pub fn quintic_steps(&self) -> Option<Vec<QuinticStep>> {
        match &self.method {
            Method::Unso(_) => None,
            Method::OriginalNs { iterations } => Some(vec![ORIGINAL_NS_STEP; *iterations]),
            Method::MuonNs { iterations, .. } => Some(vec![MUON_STEP; *iterations]),
            Method::CesistaNs { params, .. } => Some(params.to_quintics()),
            Method::ExternalSchedule { steps, .. } => Some(steps.clone()),
        }
    }

    /// The scalar map the method applies to each scaled singular value.
    pub fn scalar_map(&self, x: f64) -> f64 {
        match &self.method {
            Method::Unso(c) => c.eval(x),
            _ => compose(&self.quintic_steps().unwrap_or_default(), x),
        }
    }

    /// Largest scaled singular value for which the method is meant to converge.
    pub fn spectral_limit(&self) -> f64 {
        match self.method {
            Method::OriginalNs { .. } => 3f64.sqrt(),
            _ => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoResult {
    /// Same shape as the input.
    pub y: Matrix,
    pub flops: u64,
    pub was_transposed: bool,
}

/// Oriented, scaled input.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Wide (`rows <= cols`) scaled matrix.
    pub x: Matrix,
    /// `X X^T` when the scaling already produced it.
    pub gram: Option<Matrix>,
    pub was_transposed: bool,
}

/// Transposes tall inputs so the Gram side is the short one, then scales.
pub fn preprocess(m: &Matrix, scaling: Scaling, counter: &mut FlopsCounter) -> Result<Preprocessed> {
    if m.is_zero() {
        return Err(Error::DegenerateInput("cannot orthogonalize a zero matrix".into()));
    }
    let was_transposed = m.rows() > m.cols();
    let a = if was_transposed { m.transpose() } else { m.clone() };

    let (x, gram) = match scaling {
        Scaling::FrobeniusPlain => {
            let norm = frobenius_norm(&a, counter);
            check_norm(norm)?;
            (scale(1.0 / norm, &a, counter), None)
        }
        Scaling::FrobeniusGram => {
            let g = matmul(&a, &a.transpose(), counter)?;
            let gnorm = frobenius_norm(&g, counter);
            check_norm(gnorm)?;
            (
                scale(1.0 / gnorm.sqrt(), &a, counter),
                Some(scale(1.0 / gnorm, &g, counter)),
            )
        }
        Scaling::Gelfand { power } => {
            if power == 0 {
                return Err(Error::InvalidArgument("Gelfand power must be at least 1".into()));
            }
            let g = matmul(&a, &a.transpose(), counter)?;
            let mut p = g.clone();
            for _ in 1..power {
                p = matmul(&p, &g, counter)?;
            }
            let pnorm = frobenius_norm(&p, counter);
            check_norm(pnorm)?;
            let sigma = pnorm.powf(1.0 / (2.0 * f64::from(power)));
            check_norm(sigma)?;
            (
                scale(1.0 / sigma, &a, counter),
                Some(scale(1.0 / (sigma * sigma), &g, counter)),
            )
        }
    };
    Ok(Preprocessed {
        x,
        gram,
        was_transposed,
    })
}

fn check_norm(n: f64) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateInput(format!("scaling norm is {n}")))
    }
}

fn check_wide(x: &Matrix) -> Result<()> {
    if x.rows() > x.cols() {
        return Err(Error::InvalidArgument(format!(
            "kernels expect rows <= cols, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

fn gram_of(x: &Matrix, counter: &mut FlopsCounter) -> Result<Matrix> {
    matmul(x, &x.transpose(), counter)
}

/// Single-pass UNSO: `(I + sum a_k X_k + b X_N) X` with `X_1 = I - X X^T`
/// and `X_k = X_{k-1}^2`. Two products touch the long side whatever the
/// order; the `N - 1` squarings are `h x h`.
pub fn unso(x: &Matrix, coeffs: &CoefficientSet, counter: &mut FlopsCounter) -> Result<Matrix> {
    unso_kernel(x, None, coeffs, counter)
}

fn unso_kernel(
    x: &Matrix,
    gram: Option<Matrix>,
    coeffs: &CoefficientSet,
    counter: &mut FlopsCounter,
) -> Result<Matrix> {
    check_wide(x)?;
    let gram = match gram {
        Some(g) => g,
        None => gram_of(x, counter)?,
    };
    let id = Matrix::identity(x.rows());
    let mut power = axpy_scale(1.0, &id, -1.0, &gram, counter)?;
    let mut acc = id;
    for &a in coeffs.a() {
        acc = axpy_scale(1.0, &acc, a, &power, counter)?;
        power = matmul(&power, &power, counter)?;
    }
    acc = axpy_scale(1.0, &acc, coeffs.b(), &power, counter)?;
    matmul(&acc, x, counter)
}

/// Classic iteration on the short-side Gram: `X <- (3I - X X^T) X / 2`.
pub fn original_ns(x: &Matrix, iterations: usize, counter: &mut FlopsCounter) -> Result<Matrix> {
    original_kernel(x, None, iterations, counter)
}

fn original_kernel(
    x: &Matrix,
    mut gram: Option<Matrix>,
    iterations: usize,
    counter: &mut FlopsCounter,
) -> Result<Matrix> {
    check_wide(x)?;
    let id = Matrix::identity(x.rows());
    let mut x = x.clone();
    for _ in 0..iterations {
        let g = match gram.take() {
            Some(g) => g,
            None => gram_of(&x, counter)?,
        };
        let t = axpy_scale(3.0, &id, -1.0, &g, counter)?;
        let tx = matmul(&t, &x, counter)?;
        x = scale(0.5, &tx, counter);
    }
    Ok(x)
}

/// `iterations` of Muon's fixed quintic with the default grouping.
pub fn muon_ns(x: &Matrix, iterations: usize, counter: &mut FlopsCounter) -> Result<Matrix> {
    quintic_steps(x, &vec![MUON_STEP; iterations], Grouping::default(), counter)
}

/// Root-form steps expanded to `(a, b, c)` and applied like Muon's step.
pub fn cesista_ns(x: &Matrix, params: &CesistaStepParams, counter: &mut FlopsCounter) -> Result<Matrix> {
    quintic_steps(x, &params.to_quintics(), Grouping::default(), counter)
}

/// Applies `a X + b (X X^T) X + c (X X^T)^2 X` once per step.
pub fn quintic_steps(
    x: &Matrix,
    steps: &[QuinticStep],
    grouping: Grouping,
    counter: &mut FlopsCounter,
) -> Result<Matrix> {
    quintic_kernel(x, None, steps, grouping, counter)
}

fn quintic_kernel(
    x: &Matrix,
    mut gram: Option<Matrix>,
    steps: &[QuinticStep],
    grouping: Grouping,
    counter: &mut FlopsCounter,
) -> Result<Matrix> {
    check_wide(x)?;
    let mut x = x.clone();
    for step in steps {
        let g = match gram.take() {
            Some(g) => g,
            None => gram_of(&x, counter)?,
        };
        x = match grouping {
            Grouping::Expanded => {
                let p = matmul(&g, &x, counter)?;
                let lin = axpy_scale(step.a, &x, step.b, &p, counter)?;
                if step.c == 0.0 {
                    lin
                } else {
                    let q = matmul(&g, &p, counter)?;
                    axpy_scale(1.0, &lin, step.c, &q, counter)?
                }
            }
            Grouping::GramPolynomial => {
                let g2 = matmul(&g, &g, counter)?;
                let poly = axpy_scale(step.b, &g, step.c, &g2, counter)?;
                let px = matmul(&poly, &x, counter)?;
                axpy_scale(step.a, &x, 1.0, &px, counter)?
            }
        };
    }
    Ok(x)
}

/// Full pipeline: orient, scale, run the method, restore the input's shape.
pub fn orthogonalize(m: &Matrix, spec: &MethodSpec) -> Result<OrthoResult> {
    let mut counter = FlopsCounter::new();
    orthogonalize_with_counter(m, spec, &mut counter)
}

/// As [`orthogonalize`], accumulating into a caller-owned counter.
pub fn orthogonalize_with_counter(m: &Matrix, spec: &MethodSpec, counter: &mut FlopsCounter) -> Result<OrthoResult> {
    spec.validate()?;
    let start = counter.total();
    let Preprocessed {
        x,
        gram,
        was_transposed,
    } = preprocess(m, spec.scaling, counter)?;
    if spec.validate_spectrum {
        warn_on_spectrum(&x, spec);
    }
    let y = match &spec.method {
        Method::Unso(coeffs) => unso_kernel(&x, gram, coeffs, counter)?,
        Method::OriginalNs { iterations } => original_kernel(&x, gram, *iterations, counter)?,
        Method::MuonNs { iterations, grouping } => {
            quintic_kernel(&x, gram, &vec![MUON_STEP; *iterations], *grouping, counter)?
        }
        Method::CesistaNs { params, grouping } => quintic_kernel(&x, gram, &params.to_quintics(), *grouping, counter)?,
        Method::ExternalSchedule { steps, grouping } => quintic_kernel(&x, gram, steps, *grouping, counter)?,
    };
    let y = if was_transposed { y.transpose() } else { y };
    Ok(OrthoResult {
        y,
        flops: counter.total() - start,
        was_transposed,
    })
}

fn warn_on_spectrum(x: &Matrix, spec: &MethodSpec) {
    match jacobi_svd(x) {
        Ok(svd) => {
            let top = svd.s.first().copied().unwrap_or(0.0);
            if top > spec.spectral_limit() * (1.0 + 1e-12) {
                log::warn!(
                    "{}: largest scaled singular value {top} exceeds {}",
                    spec.name(),
                    spec.spectral_limit()
                );
            }
        }
        Err(e) => log::warn!("{}: spectrum check skipped: {e}", spec.name()),
    }
}

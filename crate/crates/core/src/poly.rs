//! The scalar UNSO polynomial
//!
//! `f(x) = x + sum_{k=1}^{N-1} a_k * x(1-x^2)^(2^(k-1)) + b * x(1-x^2)^(2^(N-1))`
//!
//! acting on singular values in `[0, 1]`, together with the odd quintic step
//! maps used by the iterative baselines.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported polynomial order. `2^N` must stay well inside the
/// exactly-representable integer range of `f64`.
pub const MAX_ORDER: usize = 40;

/// Rule that fixes the last coefficient `b` from the learnable ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BRule {
    /// Solves `f(1/sqrt(2^N+1)) = 1` exactly.
    Exact,
    /// `e^(1/2) (2^(N/2) - 1) - sum a_k`, the large-N form of `Exact`.
    Approx,
    /// `e^(1/2) (2^(N/2) - 1) - sum |a_k|`.
    AbsApprox,
}

impl BRule {
    pub const ALL: [BRule; 3] = [BRule::Exact, BRule::Approx, BRule::AbsApprox];

    pub fn name(self) -> &'static str {
        match self {
            BRule::Exact => "exact",
            BRule::Approx => "approx",
            BRule::AbsApprox => "alg1-abs",
        }
    }
}

impl fmt::Display for BRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown b rule {s:?} (expected exact, approx or alg1-abs)")))
    }
}

/// `base^(2^e)` by `e` squarings.
#[inline]
pub(crate) fn pow_2k(base: f64, e: u32) -> f64 {
    let mut p = base;
    for _ in 0..e {
        p *= p;
    }
    p
}

/// Term function `f_k`: `x` for `k = 0`, else `x (1 - x^2)^(2^(k-1))` with the
/// power formed by `k - 1` squarings.
pub fn term(k: u32, x: f64) -> f64 {
    if k == 0 {
        x
    } else {
        x * pow_2k(1.0 - x * x, k - 1)
    }
}

/// Interior maximum of `f_k`, `k >= 1`: `x* = 1/sqrt(2^k + 1)` and the exact
/// peak value `y* = x* (2^k/(2^k+1))^(2^(k-1))`. For large `k` the peak tends
/// to `x* e^(-1/2)`.
pub fn term_extreme(k: u32) -> (f64, f64) {
    assert!(k >= 1, "term_extreme requires k >= 1");
    let two_k = 2f64.powi(k as i32);
    let x_star = 1.0 / (two_k + 1.0).sqrt();
    let y_star = x_star * pow_2k(two_k / (two_k + 1.0), k - 1);
    (x_star, y_star)
}

/// `d f_k / dx`: `1` for `k = 0`, else
/// `(1 - x^2)^(2^(k-1) - 1) * (1 - (2^k + 1) x^2)`.
pub fn term_gradient(k: u32, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // 2^(k-1) - 1 = sum_{j < k-1} 2^j, so the power is a product of squarings.
    let mut p = 1.0 - x * x;
    let mut acc = 1.0;
    for _ in 0..k - 1 {
        acc *= p;
        p *= p;
    }
    acc * (1.0 - (2f64.powi(k as i32) + 1.0) * x * x)
}

/// Order `N`, learnable coefficients `a_1..a_{N-1}` and the rule for `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    order: usize,
    a: Vec<f64>,
    rule: BRule,
}

impl CoefficientSet {
    pub fn new(order: usize, a: Vec<f64>, rule: BRule) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "polynomial order must be in 1..={MAX_ORDER}, got {order}"
            )));
        }
        if a.len() != order - 1 {
            return Err(Error::InvalidArgument(format!(
                "order {order} needs {} coefficients, got {}",
                order - 1,
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self { order, a, rule })
    }

    /// Every `a_k` set to `value`.
    pub fn constant(order: usize, value: f64, rule: BRule) -> Result<Self> {
        Self::new(order, vec![value; order.saturating_sub(1)], rule)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn rule(&self) -> BRule {
        self.rule
    }

    pub fn with_rule(&self, rule: BRule) -> Self {
        Self { rule, ..self.clone() }
    }

    pub(crate) fn set_a(&mut self, a: &[f64]) {
        debug_assert_eq!(a.len(), self.a.len());
        self.a.copy_from_slice(a);
    }

    fn two_n(&self) -> f64 {
        2f64.powi(self.order as i32)
    }

    /// `((2^N+1)/2^N)^(2^(N-1))`, the inverse of `f_N`'s peak factor.
    fn exact_scale(&self) -> f64 {
        let t = self.two_n();
        pow_2k((t + 1.0) / t, self.order as u32 - 1)
    }

    /// `(2^N/(2^N+1))^(2^(k-1))` for `k = 1..N-1`.
    fn exact_weights(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.two_n();
        let r = t / (t + 1.0);
        (1..self.order as u32).map(move |k| pow_2k(r, k - 1))
    }

    /// Last coefficient `b` under this set's rule.
    pub fn b(&self) -> f64 {
        match self.rule {
            BRule::Exact => {
                let t = self.two_n();
                let weighted: f64 = self.a.iter().zip(self.exact_weights()).map(|(a, w)| a * w).sum();
                ((t + 1.0).sqrt() - 1.0 - weighted) * self.exact_scale()
            }
            BRule::Approx => approx_base(self.order) - self.a.iter().sum::<f64>(),
            BRule::AbsApprox => approx_base(self.order) - self.a.iter().map(|a| a.abs()).sum::<f64>(),
        }
    }

    /// `d b / d a_k` for each learnable coefficient. The subgradient of
    /// `|a_k|` at zero is taken as zero.
    pub fn b_gradient(&self) -> Vec<f64> {
        match self.rule {
            BRule::Exact => {
                let s = self.exact_scale();
                self.exact_weights().map(|w| -w * s).collect()
            }
            BRule::Approx => vec![-1.0; self.a.len()],
            BRule::AbsApprox => self
                .a
                .iter()
                .map(|&a| {
                    if a > 0.0 {
                        -1.0
                    } else if a < 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        }
    }

    /// `f(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_b(x, self.b())
    }

    pub(crate) fn eval_with_b(&self, x: f64, b: f64) -> f64 {
        let mut p = 1.0 - x * x;
        let mut acc = x;
        for &a in &self.a {
            acc += a * x * p;
            p *= p;
        }
        acc + b * x * p
    }

    /// `f(1/sqrt(2^N+1)) - 1`, zero by construction under [`BRule::Exact`].
    pub fn constraint_residual(&self) -> f64 {
        self.eval(1.0 / (self.two_n() + 1.0).sqrt()) - 1.0
    }

    /// `d f(x) / d a_k = f_k(x) + (d b / d a_k) f_N(x)`.
    pub fn gradient_wrt_a(&self, x: f64) -> Vec<f64> {
        let db = self.b_gradient();
        let mut grad = Vec::with_capacity(self.a.len());
        let mut p = 1.0 - x * x;
        for _ in 0..self.a.len() {
            grad.push(x * p);
            p *= p;
        }
        let last = x * p;
        for (g, d) in grad.iter_mut().zip(&db) {
            *g += d * last;
        }
        grad
    }

    /// Writes the coefficient file: `N <rule>` then one `a_k` per line.
    /// `b` is never stored.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.order, self.rule)?;
        for a in &self.a {
            writeln!(w, "{a}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut header: Option<(usize, BRule)> = None;
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if header.is_none() {
                let mut parts = text.split_whitespace();
                let order = parts.next().and_then(|s| s.parse::<usize>().ok());
                let rule = parts.next().map(str::parse::<BRule>);
                match (order, rule, parts.next()) {
                    (Some(n), Some(Ok(rule)), None) => header = Some((n, rule)),
                    _ => return Err(Error::parse(idx + 1, "expected header \"N <b-rule>\"")),
                }
                continue;
            }
            let v: f64 = text
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("invalid coefficient {text:?}")))?;
            values.push(v);
        }
        let (order, rule) = header.ok_or_else(|| Error::parse(1, "empty coefficient file"))?;
        if values.len() + 1 != order {
            return Err(Error::parse(
                values.len() + 2,
                format!(
                    "order {order} needs {} coefficients, found {}",
                    order.saturating_sub(1),
                    values.len()
                ),
            ));
        }
        Self::new(order, values, rule).map_err(|e| Error::parse(1, e.to_string()))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

fn approx_base(order: usize) -> f64 {
    0.5f64.exp() * (2f64.powf(order as f64 / 2.0) - 1.0)
}

/// Free-function form of [`CoefficientSet::b`].
pub fn derive_b(coeffs: &CoefficientSet) -> f64 {
    coeffs.b()
}

pub fn eval_f(coeffs: &CoefficientSet, x: f64) -> f64 {
    coeffs.eval(x)
}

pub fn constraint_residual(coeffs: &CoefficientSet) -> f64 {
    coeffs.constraint_residual()
}

pub fn eval_f_gradient_wrt_a(coeffs: &CoefficientSet, x: f64) -> Vec<f64> {
    coeffs.gradient_wrt_a(x)
}

/// One odd quintic step `g(x) = a x + b x^3 + c x^5`, the scalar form of
/// `X <- a X + b (X X^T) X + c (X X^T)^2 X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticStep {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuinticStep {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        x * (self.a + x2 * (self.b + self.c * x2))
    }
}

/// Muon's fixed step `(3.4445, -4.7750, 2.0315)`.
pub const MUON_STEP: QuinticStep = QuinticStep::new(3.4445, -4.7750, 2.0315);

/// Scalar form of the classic iteration `x (3 - x^2) / 2`.
pub const ORIGINAL_NS_STEP: QuinticStep = QuinticStep::new(1.5, -0.5, 0.0);

/// Applies the steps in order.
pub fn compose(steps: &[QuinticStep], x: f64) -> f64 {
    steps.iter().fold(x, |acc, s| s.eval(acc))
}

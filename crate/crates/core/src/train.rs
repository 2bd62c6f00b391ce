//! Adam fit of the learnable coefficients so that `f` approximates the sign
//! function on `(0, 1)`, and the same machinery for per-step root-form
//! quintic schedules.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{compose, BRule, CoefficientSet};
use crate::schedule::{CesistaStep, CesistaStepParams};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Initial value of every learnable coefficient.
pub const INIT_COEFFICIENT: f64 = 1.0;

/// Step size of the central differences used for schedule gradients.
pub const FD_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub order: usize,
    pub rule: BRule,
    pub learning_rate: f64,
    pub decay_factor: f64,
    pub decay_every: usize,
    pub epochs: usize,
    pub samples_per_step: usize,
    /// Samples are drawn from the open interval `(sample_low, sample_high)`.
    pub sample_low: f64,
    pub sample_high: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            order: 14,
            rule: BRule::Exact,
            learning_rate: 1e-1,
            decay_factor: 0.5,
            decay_every: 10_000,
            epochs: 20_000,
            samples_per_step: 1000,
            sample_low: 0.0,
            sample_high: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Defaults for fitting root-form schedules. The composed quintics are far
    /// more sensitive than the linear UNSO coefficients and diverge at `0.1`.
    pub fn schedule_defaults() -> Self {
        Self {
            learning_rate: 1e-3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return bad("decay_factor must be in (0, 1]");
        }
        if self.decay_every == 0 {
            return bad("decay_every must be positive");
        }
        if self.samples_per_step == 0 {
            return bad("samples_per_step must be positive");
        }
        if !(0.0 <= self.sample_low && self.sample_low < self.sample_high && self.sample_high <= 1.0) {
            return bad("need 0 <= sample_low < sample_high <= 1");
        }
        if self.order == 0 || self.order > crate::poly::MAX_ORDER {
            return bad("order out of range");
        }
        Ok(())
    }

    /// Step-decay schedule: rate used after `step` completed updates.
    pub fn lr_at(&self, step: usize) -> f64 {
        let drops = (step / self.decay_every) as i32;
        self.learning_rate * self.decay_factor.powi(drops)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainState {
    pub coeffs: CoefficientSet,
    /// Adam first moments.
    pub m: Vec<f64>,
    /// Adam second moments.
    pub v: Vec<f64>,
    pub step: usize,
    pub current_lr: f64,
    /// Mean loss of each step's batch, measured before that step's update.
    pub loss_history: Vec<f64>,
}

impl TrainState {
    pub fn new(coeffs: CoefficientSet, learning_rate: f64) -> Self {
        let n = coeffs.a().len();
        Self {
            coeffs,
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
            current_lr: learning_rate,
            loss_history: Vec::new(),
        }
    }
}

/// Mean of `(f(x) - 1)^2` over the samples.
pub fn loss(coeffs: &CoefficientSet, xs: &[f64]) -> Result<f64> {
    check_samples(xs)?;
    let b = coeffs.b();
    let total: f64 = xs
        .iter()
        .map(|&x| {
            let r = coeffs.eval_with_b(x, b) - 1.0;
            r * r
        })
        .sum();
    Ok(total / xs.len() as f64)
}

/// Loss together with its analytic gradient with respect to `a`.
pub fn loss_and_gradient(coeffs: &CoefficientSet, xs: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_samples(xs)?;
    let a = coeffs.a();
    let b = coeffs.b();
    let db = coeffs.b_gradient();
    let mut grad = vec![0.0; a.len()];
    let mut terms = vec![0.0; a.len()];
    let mut total = 0.0;
    for &x in xs {
        let mut p = 1.0 - x * x;
        let mut f = x;
        for (t, &ak) in terms.iter_mut().zip(a) {
            *t = x * p;
            f += ak * *t;
            p *= p;
        }
        let last = x * p;
        f += b * last;
        let r = f - 1.0;
        total += r * r;
        for ((g, t), d) in grad.iter_mut().zip(&terms).zip(&db) {
            *g += 2.0 * r * (t + d * last);
        }
    }
    let n = xs.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok((total / n, grad))
}

fn check_samples(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("loss needs at least one sample".into()));
    }
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidArgument(format!("sample {x} outside [0, 1]")));
    }
    Ok(())
}

/// `n` uniform draws from the open interval `(low, high)`.
pub(crate) fn sample_open(rng: &mut ChaCha8Rng, low: f64, high: f64, n: usize) -> Vec<f64> {
    let width = high - low;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = low + width * rng.random::<f64>();
        if x > low && x < high {
            out.push(x);
        }
    }
    out
}

fn adam_update(params: &mut [f64], grad: &[f64], m: &mut [f64], v: &mut [f64], t: usize, lr: f64) {
    let bc1 = 1.0 - ADAM_BETA1.powi(t as i32);
    let bc2 = 1.0 - ADAM_BETA2.powi(t as i32);
    for i in 0..params.len() {
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grad[i];
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}

/// Fits `a_1..a_{N-1}` starting from every coefficient at [`INIT_COEFFICIENT`].
pub fn train(config: &TrainConfig) -> Result<TrainState> {
    let init = CoefficientSet::constant(config.order, INIT_COEFFICIENT, config.rule)?;
    train_from(init, config)
}

/// Fits from the given starting coefficients; `config.order` and
/// `config.rule` are taken from `init`.
pub fn train_from(init: CoefficientSet, config: &TrainConfig) -> Result<TrainState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = TrainState::new(init, config.learning_rate);
    let mut params = state.coeffs.a().to_vec();

    for s in 0..config.epochs {
        let lr = config.lr_at(s);
        let xs = sample_open(&mut rng, config.sample_low, config.sample_high, config.samples_per_step);
        let (batch_loss, grad) = loss_and_gradient(&state.coeffs, &xs)?;
        if !batch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(diverged(s, batch_loss, state.coeffs.a()));
        }
        adam_update(&mut params, &grad, &mut state.m, &mut state.v, s + 1, lr);
        if params.iter().any(|p| !p.is_finite()) {
            return Err(diverged(s, batch_loss, state.coeffs.a()));
        }
        state.coeffs.set_a(&params);
        state.loss_history.push(batch_loss);
        state.step = s + 1;
        state.current_lr = config.lr_at(s + 1);
    }
    Ok(state)
}

fn diverged(step: usize, loss: f64, last: &[f64]) -> Error {
    Error::TrainingDiverged {
        step,
        loss,
        last_params: last.to_vec(),
    }
}

/// Writes `step,lr,loss` rows for a loss history produced under `config`.
pub fn write_loss_csv<W: Write>(mut w: W, config: &TrainConfig, history: &[f64]) -> Result<()> {
    writeln!(w, "step,lr,loss")?;
    for (s, l) in history.iter().enumerate() {
        writeln!(w, "{},{},{}", s, config.lr_at(s), l)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean of `(g_T(...g_1(x)) - 1)^2` over the samples.
pub fn schedule_loss(params: &CesistaStepParams, xs: &[f64]) -> Result<f64> {
    check_samples(xs)?;
    let steps = params.to_quintics();
    Ok(xs.iter().map(|&x| (compose(&steps, x) - 1.0).powi(2)).sum::<f64>() / xs.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleFit {
    pub params: CesistaStepParams,
    pub loss_history: Vec<f64>,
}

/// Fits `t` root-form steps, starting from Muon's step repeated `t` times.
pub fn train_cesista(t: usize, config: &TrainConfig) -> Result<ScheduleFit> {
    train_cesista_from(CesistaStepParams::repeated(CesistaStep::muon(), t)?, config)
}

/// Fits root-form steps from `init` with central-difference gradients.
/// Only the optimizer and sampling fields of `config` are used.
pub fn train_cesista_from(init: CesistaStepParams, config: &TrainConfig) -> Result<ScheduleFit> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut flat = init.to_flat();
    let mut m = vec![0.0; flat.len()];
    let mut v = vec![0.0; flat.len()];
    let mut history = Vec::with_capacity(config.epochs);
    let eval = |p: &[f64], xs: &[f64]| schedule_loss(&CesistaStepParams::from_flat(p), xs);

    for s in 0..config.epochs {
        let lr = config.lr_at(s);
        let xs = sample_open(&mut rng, config.sample_low, config.sample_high, config.samples_per_step);
        let batch_loss = eval(&flat, &xs)?;
        let mut grad = vec![0.0; flat.len()];
        let mut probe = flat.clone();
        for i in 0..flat.len() {
            probe[i] = flat[i] + FD_STEP;
            let up = eval(&probe, &xs)?;
            probe[i] = flat[i] - FD_STEP;
            let down = eval(&probe, &xs)?;
            probe[i] = flat[i];
            grad[i] = (up - down) / (2.0 * FD_STEP);
        }
        if !batch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(diverged(s, batch_loss, &flat));
        }
        let before = flat.clone();
        adam_update(&mut flat, &grad, &mut m, &mut v, s + 1, lr);
        if flat.iter().any(|p| !p.is_finite()) {
            return Err(diverged(s, batch_loss, &before));
        }
        history.push(batch_loss);
    }
    Ok(ScheduleFit {
        params: CesistaStepParams::from_flat(&flat),
        loss_history: history,
    })
}

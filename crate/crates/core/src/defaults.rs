//! Coefficients shipped with the crate so orthogonalization works without a
//! training run. Both files are reproduced bit-exactly by retraining with the
//! default configurations and seed 0.

use crate::ortho::{MethodSpec, MUON_ITERATIONS, ORIGINAL_NS_ITERATIONS};
use crate::poly::CoefficientSet;
use crate::schedule::{CesistaStepParams, Schedule};

/// `N = 14` coefficients from `train(&TrainConfig::default())`.
pub const UNSO_COEFFS_TEXT: &str = include_str!("../data/unso_n14.coeffs");

/// Five root-form steps from
/// `train_cesista(5, &TrainConfig::schedule_defaults())`.
pub const CESISTA_SCHEDULE_TEXT: &str = include_str!("../data/cesista_t5.sched");

pub const CESISTA_STEPS: usize = 5;

pub fn unso_coefficients() -> CoefficientSet {
    CoefficientSet::read(UNSO_COEFFS_TEXT.as_bytes()).expect("shipped coefficient file is valid")
}

pub fn cesista_schedule() -> CesistaStepParams {
    match Schedule::read(CESISTA_SCHEDULE_TEXT.as_bytes()).expect("shipped schedule file is valid") {
        Schedule::Cesista(p) => p,
        Schedule::Quintic(_) => unreachable!("shipped schedule is in root form"),
    }
}

/// Original NS, Muon, Cesista and UNSO with their default settings, in table order.
pub fn table_methods() -> Vec<MethodSpec> {
    vec![
        MethodSpec::original_ns(ORIGINAL_NS_ITERATIONS),
        MethodSpec::muon(MUON_ITERATIONS),
        MethodSpec::cesista(cesista_schedule()),
        MethodSpec::unso(unso_coefficients()),
    ]
}

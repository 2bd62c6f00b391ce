use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unso_core::bench::uniform_grid;
use unso_core::defaults;
use unso_core::train::{self, loss, loss_and_gradient, schedule_loss, write_loss_csv};
use unso_core::{BRule, CesistaStepParams, CoefficientSet, Error, TrainConfig};

fn samples(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.001..0.999)).collect()
}

#[test]
fn loss_gradient_matches_central_difference() {
    let xs = samples(500, 11);
    let h = 1e-6;
    for order in [4, 8, 14] {
        for rule in [BRule::Exact, BRule::Approx] {
            let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
            let a: Vec<f64> = (0..order - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
            let c = CoefficientSet::new(order, a.clone(), rule).unwrap();
            let (l, g) = loss_and_gradient(&c, &xs).unwrap();
            assert!((l - loss(&c, &xs).unwrap()).abs() <= 1e-14 * l);
            for j in 0..a.len() {
                let mut up = a.clone();
                let mut down = a.clone();
                up[j] += h;
                down[j] -= h;
                let lu = loss(&CoefficientSet::new(order, up, rule).unwrap(), &xs).unwrap();
                let ld = loss(&CoefficientSet::new(order, down, rule).unwrap(), &xs).unwrap();
                let fd = (lu - ld) / (2.0 * h);
                let rel = (g[j] - fd).abs() / fd.abs().max(1e-3);
                assert!(rel <= 1e-5, "N={order} {rule} j={j}: {} vs {fd}", g[j]);
            }
        }
    }
}

#[test]
fn loss_rejects_bad_samples() {
    let c = CoefficientSet::constant(4, 1.0, BRule::Exact).unwrap();
    assert!(matches!(loss(&c, &[]), Err(Error::InvalidArgument(_))));
    assert!(loss(&c, &[1.5]).is_err());
    assert!(loss(&c, &[f64::NAN]).is_err());
}

#[test]
fn learning_rate_halves_on_schedule() {
    let cfg = TrainConfig::default();
    assert_eq!(cfg.lr_at(0), 0.1);
    assert_eq!(cfg.lr_at(9_999), 0.1);
    assert_eq!(cfg.lr_at(10_000), 0.05);
    assert_eq!(cfg.lr_at(19_999), 0.05);
    assert_eq!(cfg.lr_at(20_000), 0.025);
}

#[test]
fn zero_epochs_returns_initial_coefficients() {
    let cfg = TrainConfig {
        epochs: 0,
        ..TrainConfig::default()
    };
    let state = train::train(&cfg).unwrap();
    assert_eq!(state.step, 0);
    assert!(state.coeffs.a().iter().all(|&a| a == 1.0));
    assert!(state.loss_history.is_empty());
}

#[test]
fn config_validation() {
    let base = TrainConfig::default();
    for bad in [
        TrainConfig {
            learning_rate: 0.0,
            ..base.clone()
        },
        TrainConfig {
            samples_per_step: 0,
            ..base.clone()
        },
        TrainConfig {
            decay_every: 0,
            ..base.clone()
        },
        TrainConfig {
            sample_low: 0.5,
            sample_high: 0.5,
            ..base.clone()
        },
        TrainConfig {
            order: 0,
            ..base.clone()
        },
    ] {
        assert!(matches!(train::train(&bad), Err(Error::InvalidArgument(_))));
    }
}

#[test]
fn diverging_run_reports_last_finite_params() {
    let cfg = TrainConfig {
        order: 14,
        learning_rate: 1e200,
        epochs: 20,
        ..TrainConfig::default()
    };
    match train::train(&cfg) {
        Err(Error::TrainingDiverged { last_params, .. }) => {
            assert_eq!(last_params.len(), 13);
            assert!(last_params.iter().all(|p| p.is_finite()));
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn training_is_deterministic() {
    let cfg = TrainConfig {
        order: 8,
        epochs: 300,
        seed: 5,
        ..TrainConfig::default()
    };
    let a = train::train(&cfg).unwrap();
    let b = train::train(&cfg).unwrap();
    assert_eq!(a, b);
    let c = train::train(&TrainConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.coeffs, c.coeffs);
}

#[test]
fn smoothed_loss_decreases() {
    let cfg = TrainConfig {
        epochs: 2000,
        seed: 1,
        ..TrainConfig::default()
    };
    let state = train::train(&cfg).unwrap();
    let h = &state.loss_history;
    let window = |i: usize| h[i..i + 100].iter().sum::<f64>() / 100.0;
    assert!(window(h.len() - 100) < 0.5 * window(0));
}

#[test]
fn default_training_fits_the_target() {
    let cfg = TrainConfig {
        seed: 42,
        ..TrainConfig::default()
    };
    let state = train::train(&cfg).unwrap();
    let grid = uniform_grid(0.01, 1.0, 2000).unwrap();
    let dev = grid
        .iter()
        .map(|&x| (state.coeffs.eval(x) - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 0.1, "max deviation {dev}");
    assert!(loss(&state.coeffs, &grid).unwrap() <= 1e-3);
}

#[test]
fn shipped_coefficients_reproduce_bit_exactly() {
    let state = train::train(&TrainConfig::default()).unwrap();
    assert_eq!(state.coeffs.to_text(), defaults::UNSO_COEFFS_TEXT);
    assert_eq!(state.coeffs, defaults::unso_coefficients());
}

#[test]
fn cesista_schedule_beats_muon_and_reproduces() {
    let cfg = TrainConfig {
        seed: 42,
        ..TrainConfig::schedule_defaults()
    };
    let fit = train::train_cesista(5, &cfg).unwrap();
    let grid = uniform_grid(0.1, 1.0, 2000).unwrap();
    let steps = fit.params.to_quintics();
    let dev = grid
        .iter()
        .map(|&x| (unso_core::poly::compose(&steps, x) - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 0.35, "max deviation {dev}");

    let muon = CesistaStepParams::repeated(unso_core::CesistaStep::muon(), 5).unwrap();
    assert!(schedule_loss(&fit.params, &grid).unwrap() < schedule_loss(&muon, &grid).unwrap());

    let shipped = train::train_cesista(5, &TrainConfig::schedule_defaults()).unwrap();
    assert_eq!(shipped.params, defaults::cesista_schedule());
}

#[test]
fn loss_csv_layout() {
    let cfg = TrainConfig::default();
    let mut out = Vec::new();
    write_loss_csv(&mut out, &cfg, &[0.5, 0.25]).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines, ["step,lr,loss", "0,0.1,0.5", "1,0.1,0.25"]);
}

mod common;

use common::{max_sorted_gap, naive_product, orthonormal_rows};
use unso_core::bench::{gaussian_matrix, ortho_error, run_table};
use unso_core::densemat::jacobi_svd;
use unso_core::ortho::{preprocess, MUON_ITERATIONS, ORIGINAL_NS_ITERATIONS};
use unso_core::{defaults, orthogonalize, Error, FlopsCounter, Grouping, Matrix, MethodSpec, Scaling};

/// Largest gap between the output spectrum and the scalar map applied to the
/// scaled input spectrum.
fn spectral_gap(spec: &MethodSpec, m: &Matrix) -> f64 {
    let pre = preprocess(m, spec.scaling, &mut FlopsCounter::new()).unwrap();
    let s_in = jacobi_svd(&pre.x).unwrap().s;
    let y = orthogonalize(m, spec).unwrap().y;
    let s_out = jacobi_svd(&y).unwrap().s;
    let mapped = s_in.iter().map(|&s| spec.scalar_map(s).abs()).collect();
    max_sorted_gap(mapped, s_out)
}

#[test]
fn output_spectrum_is_mapped_input_spectrum() {
    let specs = [
        MethodSpec::unso(defaults::unso_coefficients()),
        MethodSpec::original_ns(ORIGINAL_NS_ITERATIONS),
        MethodSpec::muon(MUON_ITERATIONS),
        MethodSpec::muon(MUON_ITERATIONS).with_grouping(Grouping::GramPolynomial),
        MethodSpec::cesista(defaults::cesista_schedule()),
    ];
    for spec in &specs {
        for (h, w) in [(16, 24), (32, 48)] {
            for seed in 0..50 {
                let gap = spectral_gap(spec, &gaussian_matrix(h, w, seed));
                assert!(gap <= 1e-8, "{} {h}x{w} seed {seed}: {gap}", spec.name());
            }
        }
    }
}

#[test]
fn output_shares_singular_vectors() {
    let spec = MethodSpec::unso(defaults::unso_coefficients());
    let m = gaussian_matrix(12, 20, 9);
    let pre = preprocess(&m, spec.scaling, &mut FlopsCounter::new()).unwrap();
    let svd = jacobi_svd(&pre.x).unwrap();
    let fs: Vec<f64> = svd.s.iter().map(|&s| spec.scalar_map(s)).collect();
    let expect = naive_product(&naive_product(&svd.u, &Matrix::diag(&fs)), &svd.v.transpose());
    let y = orthogonalize(&m, &spec).unwrap().y;
    assert!(y.distance(&expect) <= 1e-9);
}

#[test]
fn diagonal_input_maps_entrywise() {
    let d = [0.9, 0.5, 0.2, 0.05];
    let m = Matrix::diag(&d);
    let spec = MethodSpec::unso(defaults::unso_coefficients()).with_scaling(Scaling::FrobeniusPlain);
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let y = orthogonalize(&m, &spec).unwrap().y;
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == j { spec.scalar_map(d[i] / norm) } else { 0.0 };
            assert!((y[(i, j)] - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn tall_inputs_are_handled_by_transposition() {
    let spec = MethodSpec::unso(defaults::unso_coefficients());
    let m = gaussian_matrix(10, 26, 2);
    let wide = orthogonalize(&m, &spec).unwrap();
    let tall = orthogonalize(&m.transpose(), &spec).unwrap();
    assert!(!wide.was_transposed);
    assert!(tall.was_transposed);
    assert_eq!(tall.y.shape(), (26, 10));
    assert_eq!(tall.y, wide.y.transpose());
}

#[test]
fn scalings_bound_the_spectrum() {
    for seed in 0..10 {
        let m = gaussian_matrix(20, 30, seed);
        for scaling in [
            Scaling::FrobeniusGram,
            Scaling::FrobeniusPlain,
            Scaling::Gelfand { power: 1 },
            Scaling::Gelfand { power: 4 },
        ] {
            let x = preprocess(&m, scaling, &mut FlopsCounter::new()).unwrap().x;
            assert!(jacobi_svd(&x).unwrap().s[0] <= 1.0 + 1e-12);
        }
        // Gram scaling is never looser than plain scaling.
        let g = preprocess(&m, Scaling::FrobeniusGram, &mut FlopsCounter::new())
            .unwrap()
            .x;
        let p = preprocess(&m, Scaling::FrobeniusPlain, &mut FlopsCounter::new())
            .unwrap()
            .x;
        assert!(jacobi_svd(&g).unwrap().s[0] >= jacobi_svd(&p).unwrap().s[0]);
    }
}

#[test]
fn reused_gram_matches_fresh_product() {
    let m = gaussian_matrix(9, 15, 3);
    let pre = preprocess(&m, Scaling::FrobeniusGram, &mut FlopsCounter::new()).unwrap();
    let fresh = naive_product(&pre.x, &pre.x.transpose());
    assert!(pre.gram.unwrap().distance(&fresh) < 1e-14);
}

#[test]
fn error_metric_is_rotation_invariant() {
    let y = orthogonalize(&gaussian_matrix(16, 40, 1), &MethodSpec::muon(5))
        .unwrap()
        .y;
    let q = orthonormal_rows(16, 16, 77);
    let base = ortho_error(&y).unwrap();
    let rotated = ortho_error(&naive_product(&q, &y)).unwrap();
    assert!((base - rotated).abs() <= 1e-10 * base.max(1.0));
    assert!(ortho_error(&orthonormal_rows(8, 20, 3)).unwrap() < 1e-13);
    assert!(ortho_error(&Matrix::zeros(3, 2)).is_err());
}

#[test]
fn zero_and_invalid_inputs_are_rejected() {
    let spec = MethodSpec::unso(defaults::unso_coefficients());
    assert!(matches!(
        orthogonalize(&Matrix::zeros(3, 5), &spec),
        Err(Error::DegenerateInput(_))
    ));
    assert!(matches!(
        orthogonalize(&gaussian_matrix(3, 5, 0), &MethodSpec::muon(0)),
        Err(Error::InvalidArgument(_))
    ));
    let gelfand0 = spec.with_scaling(Scaling::Gelfand { power: 0 });
    assert!(orthogonalize(&gaussian_matrix(3, 5, 0), &gelfand0).is_err());
}

#[test]
fn groupings_agree_numerically() {
    let m = gaussian_matrix(16, 40, 5);
    let a = orthogonalize(&m, &MethodSpec::muon(5)).unwrap().y;
    let b = orthogonalize(&m, &MethodSpec::muon(5).with_grouping(Grouping::GramPolynomial))
        .unwrap()
        .y;
    assert!(a.distance(&b) < 1e-10);
}

#[test]
fn trained_methods_beat_muon() {
    let methods = [
        MethodSpec::muon(MUON_ITERATIONS),
        MethodSpec::cesista(defaults::cesista_schedule()),
        MethodSpec::unso(defaults::unso_coefficients()),
    ];
    let reports = run_table(&[(32, 96)], &methods, &[0, 1, 2]).unwrap();
    let err: Vec<f64> = reports.iter().map(|r| r.error_mean).collect();
    assert!(err[1] < err[0], "{err:?}");
    assert!(err[2] < err[1], "{err:?}");
}

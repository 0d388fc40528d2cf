//! Eigenvalue pairs: series route, matrix oracle and predictions together.

use dirac_gaps::asymptotics::{predict_gap, predict_lambda};
use dirac_gaps::oracle::{spectral_pair_matrix, BoundaryCondition, MatrixSpectrum};
use dirac_gaps::solver::{characteristic_residual, spectral_pair_series, SpectralPair};
use dirac_gaps::{Error, PrecisionConfig, Scalar, TrigPotential};

fn cfg(bits: u32, tol: f64) -> PrecisionConfig {
    PrecisionConfig::new(bits, tol).unwrap()
}

fn assert_pairs_agree(s: &SpectralPair, m: &SpectralPair) {
    let tol = (s.error_estimate + m.error_estimate).max(1e-25);
    assert!((&s.lambda_minus - &m.lambda_minus).abs_f64() <= tol);
    assert!((&s.lambda_plus - &m.lambda_plus).abs_f64() <= tol);
}

#[test]
fn series_and_matrix_agree() {
    let c = cfg(256, 1e-45);
    for coeffs in [[1, 1, 1, 1], [1, 2, 3, 4]] {
        let v = TrigPotential::from_ints(256, coeffs);
        for n in [11i64, -13] {
            let s = spectral_pair_series(n, &v, &c).unwrap();
            let m = spectral_pair_matrix(n, &v, &c, None).unwrap();
            assert_pairs_agree(&s, &m);
            let g2 = (&s.gamma_squared() - &m.gamma_squared()).abs_f64();
            assert!(g2 <= s.error_estimate + m.error_estimate);
        }
    }
}

#[test]
fn gap_magnitude_at_twenty_one() {
    let c = cfg(256, 1e-50);
    let v = TrigPotential::from_ints(256, [1, 1, 1, 1]);
    let s = spectral_pair_series(21, &v, &c).unwrap();
    let pred = predict_gap(21, &v).unwrap().predicted_gamma_abs.to_f64();
    let direct = 2.0 / (4f64.powi(20) * 3628800f64.powi(2));
    assert!((pred / direct - 1.0).abs() < 1e-14);
    // within a factor 1 + O(log^2 m / m^2), m = 10
    let ratio = s.gamma.abs_f64() / pred;
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn lambda_near_eleven() {
    let c = cfg(256, 1e-40);
    let v = TrigPotential::from_ints(256, [1, 2, 3, 4]);
    let s = spectral_pair_series(11, &v, &c).unwrap();
    let pred = predict_lambda(11, &v).unwrap();
    assert!((pred.to_c64().0 - (11.0 + 5.0 / 11.0 - 1.0 / 121.0)).abs() < 1e-14);
    for l in [&s.lambda_minus, &s.lambda_plus] {
        let eleven = Scalar::from_int(256, 11);
        assert!((l - &eleven).abs_f64() < 0.5);
        assert!((l - &pred).abs_f64() * 11f64.powi(3) < 5.0);
    }
}

#[test]
fn residuals_within_estimate() {
    let c = cfg(256, 1e-45);
    let v = TrigPotential::from_c64(256, [(0.5, 0.5), (1.0, 0.0), (0.0, -1.0), (0.75, 0.0)]);
    for n in [9i64, -9, 10, 17] {
        let s = spectral_pair_series(n, &v, &c).unwrap();
        assert!(s.residual.unwrap() <= 10.0 * s.error_estimate);
        for z in [s.z_minus(), s.z_plus()] {
            let r = characteristic_residual(n, &z, &v, &c).unwrap();
            assert!(r <= 10.0 * s.error_estimate, "n={n} r={r}");
        }
    }
}

#[test]
fn even_pairs_coincide_in_matrix() {
    let c = cfg(256, 1e-30);
    let v = TrigPotential::from_ints(256, [1, 2, 3, 4]);
    let m = spectral_pair_matrix(4, &v, &c, None).unwrap();
    assert!(m.gamma.abs_f64() < 1e-30);
}

#[test]
fn refinement_is_stable() {
    let c = cfg(256, 1e-30);
    let v = TrigPotential::from_ints(256, [1, 1, 1, 1]);
    let a = spectral_pair_matrix(7, &v, &c, None).unwrap();
    let b = spectral_pair_matrix(7, &v, &c, Some(67)).unwrap();
    assert!((&a.lambda_plus - &b.lambda_plus).abs_f64() < 1e-30);
    // modest-factor agreement with the leading gap formula at m = 3
    let ratio = a.gamma.abs_f64() / (2.0 / 147456.0);
    assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
}

#[test]
fn self_adjoint_spectrum_is_real() {
    // Q = conj(P): b = conj(A), B = conj(a)
    let c = cfg(128, 1e-30);
    let a = (0.5, 0.25);
    let big_a = (1.0, -0.5);
    let v = TrigPotential::from_c64(128, [a, big_a, (big_a.0, -big_a.1), (a.0, -a.1)]);
    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic] {
        let s = MatrixSpectrum::compute(bc, 12, &v, &c).unwrap();
        assert!(s.eigenvalues.iter().all(|e| e.im().to_f64().abs() < 1e-30));
    }
}

#[test]
fn mirrored_potential_mirrors_gaps() {
    let c = cfg(256, 1e-30);
    let v = TrigPotential::from_c64(256, [(0.0, 1.0), (0.5, 0.0), (-0.75, 0.0), (0.0, 0.5)]);
    for n in [9i64, 13] {
        let a = spectral_pair_matrix(n, &v, &c, None).unwrap();
        let b = spectral_pair_matrix(-n, &v.swapped(), &c, None).unwrap();
        let d = (a.gamma.abs_f64() - b.gamma.abs_f64()).abs();
        assert!(d <= a.error_estimate + b.error_estimate + 1e-60);
    }
}

#[test]
fn free_operator_series_and_matrix() {
    let c = cfg(128, 1e-30);
    let v = TrigPotential::zero(128);
    let s = spectral_pair_series(9, &v, &c).unwrap();
    assert!(s.gamma.is_zero());
    let m = MatrixSpectrum::compute(BoundaryCondition::Antiperiodic, 9, &v, &c).unwrap();
    let got: Vec<f64> = m.eigenvalues.iter().map(|e| e.to_c64().0).collect();
    let mut want: Vec<f64> = (-4..=4).flat_map(|k| [2.0 * k as f64 + 1.0; 2]).collect();
    want.retain(|&x| x.abs() <= 9.0);
    want.insert(0, -9.0);
    want.insert(0, -9.0);
    assert_eq!(got, want);
}

#[test]
fn localization_below_threshold() {
    let c = cfg(128, 1e-30);
    let v = TrigPotential::from_ints(128, [1, 2, 3, 4]);
    for n in [5i64, -7, 9] {
        let e = spectral_pair_matrix(n, &v, &c, None).unwrap_err();
        assert!(matches!(e, Error::Localization { .. }), "{e:?}");
    }
}

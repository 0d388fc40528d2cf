//! Dynamic-programming walk sums against brute-force enumeration.

use dirac_gaps::series::{sigma, sigma_terms, tau, tau_terms, Sign};
use dirac_gaps::walks::{enumerate, WalkKind};
use dirac_gaps::{Scalar, TrigPotential};
use proptest::prelude::*;

const P: u32 = 256;

fn potentials() -> Vec<TrigPotential> {
    vec![
        TrigPotential::from_ints(P, [1, 1, 1, 1]),
        TrigPotential::from_ints(P, [1, 2, 3, 4]),
        TrigPotential::from_c64(P, [(0.0, 1.0), (2.0, 0.0), (-3.0, 0.0), (0.0, 4.0)]),
    ]
}

fn points() -> Vec<Scalar> {
    [(0.0, 0.0), (0.1, 0.0), (0.0, 0.25), (-0.2, 0.1)]
        .iter()
        .map(|&(re, im)| Scalar::from_f64(P, re, im))
        .collect()
}

fn brute(kind: WalkKind, n: i64, index: usize, z: &Scalar, v: &TrigPotential) -> Scalar {
    enumerate(kind, n, index)
        .unwrap()
        .iter()
        .fold(Scalar::zero(P), |acc, w| &acc + &w.weight(z, v).unwrap())
}

fn rel_diff(a: &Scalar, b: &Scalar) -> f64 {
    let scale = b.abs_f64().max(f64::MIN_POSITIVE);
    (a - b).abs_f64() / scale
}

#[test]
fn crossing_sums_match_enumeration() {
    for v in potentials() {
        for z in points() {
            for n in [3i64, 5, 7, 9] {
                for sn in [n, -n] {
                    for (sign, kind) in [(Sign::Plus, WalkKind::X), (Sign::Minus, WalkKind::Y)] {
                        let dp = sigma_terms(sign, sn, 3, &z, &v).unwrap();
                        for (r, term) in dp.iter().enumerate() {
                            let b = brute(kind, sn, r, &z, &v);
                            assert!(rel_diff(term, &b) <= 1e-70, "n={sn} r={r} {kind}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn loop_sums_match_enumeration() {
    for v in potentials() {
        for z in points() {
            for n in [3i64, -3, 5, -5, 7, -7, 9, -9] {
                let dp = tau_terms(n, 4, &z, &v).unwrap();
                for (k, term) in dp.iter().enumerate() {
                    let b = brute(WalkKind::W, n, k + 1, &z, &v);
                    assert!(rel_diff(term, &b) <= 1e-70, "n={n} nu={}", k + 1);
                }
            }
        }
    }
}

#[test]
fn long_crossing_prefix_at_three() {
    // ten backtracking levels at the smallest index
    let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
    let z = Scalar::zero(P);
    let dp = sigma_terms(Sign::Plus, 3, 10, &z, &v).unwrap();
    for r in [0usize, 4, 10] {
        let b = brute(WalkKind::X, 3, r, &z, &v);
        assert!(rel_diff(&dp[r], &b) <= 1e-70, "r={r}");
    }
}

#[test]
fn hand_values() {
    let z = Scalar::zero(P);
    let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
    assert_eq!(sigma(Sign::Plus, 3, 0, &z, &v).unwrap().to_c64(), (2.0, 0.0));
    assert_eq!(sigma(Sign::Plus, -3, 0, &z, &v).unwrap().to_c64(), (0.5625, 0.0));
    assert_eq!(sigma(Sign::Plus, 3, 1, &z, &v).unwrap().to_c64(), (0.75, 0.0));
    assert_eq!(tau(5, 1, &z, &v).unwrap().to_c64(), (1.0, 0.0));
    let ones = TrigPotential::from_ints(P, [1, 1, 1, 1]);
    assert_eq!(tau(3, 1, &z, &ones).unwrap().to_c64(), (0.375, 0.0));
}

#[test]
fn even_index_annihilates() {
    let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
    for z in points() {
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(sigma_terms(sign, 4, 5, &z, &v).unwrap().iter().all(Scalar::is_zero));
        }
    }
    assert!(enumerate(WalkKind::X, 4, 0).unwrap().is_empty());
}

#[test]
fn walk_counts() {
    // 2m - 1 single-backtrack walks from -n to n for n = 2m + 1
    for m in 1..=4usize {
        let n = 2 * m as i64 + 1;
        assert_eq!(enumerate(WalkKind::X, n, 1).unwrap().len(), 2 * m - 1);
    }
    assert_eq!(enumerate(WalkKind::W, 5, 1).unwrap().len(), 2);
}

fn small_complex() -> impl Strategy<Value = (f64, f64)> {
    (-1.5f64..1.5, -1.5f64..1.5)
}

fn in_disc() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..0.5, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| (r * t.cos(), r * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_instances_match(
        coeffs in prop::array::uniform4(small_complex()),
        (zr, zi) in in_disc(),
        m in 1i64..4,
        negative in any::<bool>(),
        r in 0usize..3,
    ) {
        let v = TrigPotential::from_c64(P, coeffs);
        let z = Scalar::from_f64(P, zr, zi);
        let n = if negative { -(2 * m + 1) } else { 2 * m + 1 };
        for (sign, kind) in [(Sign::Plus, WalkKind::X), (Sign::Minus, WalkKind::Y)] {
            let dp = sigma(sign, n, r, &z, &v).unwrap();
            let b = brute(kind, n, r, &z, &v);
            prop_assert!((&dp - &b).abs_f64() <= 1e-70 * b.abs_f64().max(1.0));
        }
        let dp = tau(n, r + 1, &z, &v).unwrap();
        let b = brute(WalkKind::W, n, r + 1, &z, &v);
        prop_assert!((&dp - &b).abs_f64() <= 1e-70 * b.abs_f64().max(1.0));
    }

    #[test]
    fn mirror_symmetry_termwise(
        coeffs in prop::array::uniform4(small_complex()),
        (zr, zi) in in_disc(),
        m in 1i64..6,
        r in 0usize..4,
    ) {
        let v = TrigPotential::from_c64(P, coeffs);
        let z = Scalar::from_f64(P, zr, zi);
        let n = 2 * m + 1;
        let lhs = sigma(Sign::Minus, n, r, &z, &v).unwrap();
        let rhs = sigma(Sign::Plus, -n, r, &-&z, &v.swapped()).unwrap();
        prop_assert!((&lhs - &rhs).abs_f64() <= 1e-70 * lhs.abs_f64().max(1e-300));
    }
}

mod common;

use common::{bisect, de_integral, matching_system};
use proptest::prelude::*;
use qrel::model::ModelParams;
use qrel::scattering::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flux_is_conserved(k in 0.05f64..20.0, v in -50.0f64..200.0, a in 0.05f64..10.0) {
        let c = barrier_coefficients(k, v, a, 1.0, 1.0).unwrap();
        prop_assert!(c.flux_residual() < 1e-10);
    }

    #[test]
    fn agrees_with_matching_system(k in 0.1f64..10.0, v in -20.0f64..20.0, a in 0.1f64..5.0) {
        let c = barrier_coefficients(k, v, a, 1.0, 1.0).unwrap();
        let (t, r, _, _) = matching_system(k, v, a, 1.0, 1.0);
        prop_assert!((c.t - t).norm() < 1e-12, "T {} vs {}", c.t, t);
        prop_assert!((c.r - r).norm() < 1e-12, "R {} vs {}", c.r, r);
    }

    #[test]
    fn swapping_sign_of_field_swaps_channels(bx in 0.0f64..5.0, k in 0.5f64..10.0) {
        let p = ModelParams::default();
        let plus = channel_coefficients(k, &p, bx, Channel::Plus).unwrap();
        let minus = channel_coefficients(k, &p, -bx, Channel::Minus).unwrap();
        prop_assert!((plus.t - minus.t).norm() < 1e-15);
    }
}

#[test]
fn interior_amplitudes_match_matching_system() {
    for &(k, v, a) in &[
        (5.0, 2.0, 3.0),
        (5.0, -2.0, 3.0),
        (1.0, 3.0, 2.0),
        (2.0, 1.5, 0.7),
    ] {
        let c = barrier_coefficients(k, v, a, 1.0, 1.0).unwrap();
        let (_, _, m1, m2) = matching_system(k, v, a, 1.0, 1.0);
        assert!(
            (c.m1 - m1).norm() < 1e-11 * (1.0 + m1.norm()),
            "{k} {v} {a}"
        );
        assert!(
            (c.m2 - m2).norm() < 1e-11 * (1.0 + m2.norm()),
            "{k} {v} {a}"
        );
    }
}

#[test]
fn resonances_are_transparent() {
    let p = ModelParams::default();
    for ch in [Channel::Plus, Channel::Minus] {
        let v = ch.potential(p.bx);
        let qa = |k: f64| (k * k - 2.0 * p.m * v).max(0.0).sqrt() * p.a;
        for n in 1..=5 {
            let target = n as f64 * std::f64::consts::PI;
            let lo = (2.0 * p.m * v).max(0.0).sqrt() + 1e-12;
            if qa(lo) > target {
                continue;
            }
            let k = bisect(|k| qa(k) - target, lo, 50.0);
            let c = channel_coefficients(k, &p, p.bx, ch).unwrap();
            assert!(
                (c.t.norm() - 1.0).abs() < 1e-10,
                "{ch:?} n={n} |T|={}",
                c.t.norm()
            );
        }
    }
}

#[test]
fn stationary_state_is_continuous_and_smooth() {
    let p = ModelParams::default();
    for ch in [Channel::Plus, Channel::Minus] {
        let s = scattering_state(p.k0, &p, ch).unwrap();
        let eps = 1e-7;
        for x in [0.0, p.a] {
            let (l, r) = (s.eval(x - eps), s.eval(x + eps));
            assert!((l - r).norm() < 1e-5);
            let dl = (s.eval(x - eps) - s.eval(x - 3.0 * eps)) / (2.0 * eps);
            let dr = (s.eval(x + 3.0 * eps) - s.eval(x + eps)) / (2.0 * eps);
            assert!((dl - dr).norm() < 1e-4 * (1.0 + dl.norm()));
        }
    }
}

#[test]
fn momentum_average_matches_independent_quadrature() {
    let p = ModelParams::default();
    for ch in [Channel::Plus, Channel::Minus] {
        let v = ch.potential(p.bx);
        let integrand = |k: f64| {
            let (t, _, _, _) = matching_system(k, v, p.a, p.m, p.hbar);
            let w = (2.0 * p.sigma * p.sigma / std::f64::consts::PI).sqrt()
                * (-2.0 * p.sigma * p.sigma * (k - p.k0).powi(2)).exp();
            w * t.norm_sqr()
        };
        // split at the barrier top where |T|^2 has a kink in its derivative
        let mut edges = vec![1e-9, p.k0 + 12.0];
        if v > 0.0 {
            edges.insert(1, (2.0 * p.m * v).sqrt());
        }
        let reference: f64 = edges
            .windows(2)
            .map(|w| de_integral(integrand, w[0], w[1]))
            .sum();
        let got = momentum_averaged_transmission(&p, ch).unwrap();
        assert!(
            (got - reference).abs() < 1e-10,
            "{ch:?}: {got} vs {reference}"
        );
    }
}

#[test]
fn ideal_round_trip() {
    let p = ModelParams::default();
    let top = 0.5 * std::f64::consts::PI * p.field_per_radian();
    for i in 0..1000 {
        let bx = top * i as f64 / 1000.0;
        let ideal = ideal_populations(bx, &p);
        let back = invert_reading(ideal.alpha, ideal.beta, &p).unwrap();
        assert!((back - bx).abs() < 1e-12, "{bx} -> {back}");
    }
}

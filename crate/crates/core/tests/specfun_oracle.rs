//! Macdonald functions against their integral representations
//! `K0(z) = int_0^inf exp(-z cosh u) du`, `K1(z) = int_0^inf cosh u exp(-z cosh u) du`.

use proptest::prelude::*;
use vacuum1d::quad::{integrate, QuadConfig};
use vacuum1d::specfun::{k0, k0_k1, k1, k1_prime, mdint_identity_residual};

fn integral(z: f64, order: i32) -> f64 {
    // exp(-z cosh u) is below 1e-320 past this point
    let upper = (740.0 / z).acosh();
    let cfg = QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-15,
        max_panels: 20_000,
    };
    integrate(|u| (order as f64 * u).cosh() * (-z * u.cosh()).exp(), 0.0, upper, cfg).value
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn matches_quadrature_on_log_grid() {
    let mut worst: f64 = 0.0;
    for z in log_grid(1e-3, 100.0, 61) {
        let (a, b) = k0_k1(z).unwrap();
        let r0 = ((a - integral(z, 0)) / a).abs();
        let r1 = ((b - integral(z, 1)) / b).abs();
        assert!(r0 < 1e-12, "K0({z}): {r0:e}");
        assert!(r1 < 1e-12, "K1({z}): {r1:e}");
        worst = worst.max(r0).max(r1);
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn integral_identity_several_pairs() {
    for (m, t) in [(1.0, 1.0), (0.3, 0.2), (4.0, 2.5), (1.0, 1e-3)] {
        assert!(mdint_identity_residual(m, t).unwrap() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ordering_and_positivity(z in 1e-3f64..100.0) {
        let (a, b) = k0_k1(z).unwrap();
        prop_assert!(a > 0.0 && b > a);
    }

    #[test]
    fn decreasing(z in 1e-3f64..100.0, dz in 1e-3f64..1.0) {
        prop_assert!(k0(z + dz).unwrap() < k0(z).unwrap());
        prop_assert!(k1(z + dz).unwrap() < k1(z).unwrap());
    }

    #[test]
    fn random_points_match_quadrature(lz in (1e-3f64).ln()..(100f64).ln()) {
        let z = lz.exp();
        let (a, b) = k0_k1(z).unwrap();
        prop_assert!(((a - integral(z, 0)) / a).abs() < 1e-12);
        prop_assert!(((b - integral(z, 1)) / b).abs() < 1e-12);
    }

    #[test]
    fn derivative_is_negative(z in 1e-3f64..100.0) {
        prop_assert!(k1_prime(z).unwrap() < 0.0);
    }
}

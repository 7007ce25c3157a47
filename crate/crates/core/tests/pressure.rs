use std::f64::consts::PI;

use proptest::prelude::*;
use vacuum1d::energy::{e_per, e_weyl};
use vacuum1d::pressure::{
    beta_bulk_numeric, cylinder_kernel, cylinder_kernel_modes, delta_e_beta_bdry, fd, p_bdry, p_bdry_numeric, p_per,
    p_weyl, stress_pair,
};
use vacuum1d::{BoundaryConfig, FieldSpec};

const DD: BoundaryConfig = BoundaryConfig::DD;

fn spec(m: f64, l: f64) -> FieldSpec {
    FieldSpec::new(m, l).unwrap()
}

fn total_per(m: f64, l: f64) -> f64 {
    l * e_per(0.0, &spec(m, l), DD).unwrap()
}

#[test]
fn virtual_work_grid() {
    for m in [0.5, 1.0, 2.0] {
        for l in [0.8, 1.0, 2.0] {
            let h = 1e-3 * l;
            let d1 = (total_per(m, l + h) - total_per(m, l - h)) / (2.0 * h);
            let d2 = (total_per(m, l + 0.5 * h) - total_per(m, l - 0.5 * h)) / h;
            let deriv = (4.0 * d2 - d1) / 3.0;
            let p = p_per(0.0, &spec(m, l), DD).unwrap();
            assert!(((p + deriv) / p).abs() < 1e-6, "m={m} L={l}: {p} vs {}", -deriv);
        }
    }
}

#[test]
fn massless_balance() {
    for l in [0.5, 1.0, 3.0] {
        let p = p_per(0.0, &spec(0.0, l), DD).unwrap();
        assert!((p + PI / (24.0 * l * l)).abs() < 1e-14);
        // E_per(L) = -pi/(24 L^2) so -d(L E)/dL = -pi/(24 L^2) as well
        assert_eq!(p, e_per(0.0, &spec(0.0, l), DD).unwrap());
    }
}

#[test]
fn kernel_matches_modes() {
    let s = spec(1.0, 1.0);
    for t in [0.2, 0.5] {
        for (x, y) in [(0.2, 0.3), (0.5, 0.5), (0.1, 0.9), (0.7, 0.35)] {
            let images = cylinder_kernel(t, x, y, &s, DD).unwrap().value;
            let modes = cylinder_kernel_modes(t, x, y, &s, DD).unwrap();
            assert!((images - modes).abs() < 1e-9 * (1.0 + modes.abs()), "t={t} ({x},{y})");
        }
    }
}

#[test]
fn kernel_operators_give_energy_and_pressure() {
    let s = FieldSpec::with_beta(1.0, 1.0, 0.3).unwrap();
    for t in [0.2, 0.4] {
        for x in [0.25, 0.5, 0.6] {
            let kernel = |t: f64, x: f64, y: f64| cylinder_kernel(t, x, y, &s, DD).map(|k| k.value);
            let h = fd::step(x);
            let ktt = fd::second_derivative(|dt| kernel(t + dt, x, x), h).unwrap();
            let plus = fd::paired_operator(|a, b| kernel(t, a, b), x, x, 1.0, h).unwrap();
            let minus = fd::paired_operator(|a, b| kernel(t, a, b), x, x, -1.0, h).unwrap();

            let pair = stress_pair(t, x, &s, DD).unwrap();
            let energy = -0.5 * ktt + 0.5 * s.beta() * plus;
            let pressure = minus / 8.0;
            assert!(
                (energy - pair.energy.total).abs() < 1e-6,
                "E t={t} x={x}: {energy} vs {}",
                pair.energy.total
            );
            assert!(
                (pressure - pair.pressure.total).abs() < 1e-6,
                "p t={t} x={x}: {pressure} vs {}",
                pair.pressure.total
            );
        }
    }
}

#[test]
fn small_cutoff_weyl_identities() {
    let (m, t) = (1.0, 0.01);
    let (pw, ew) = (p_weyl(t, m).unwrap(), e_weyl(t, m).unwrap());
    let trace = pw - ew - m * m / (2.0 * PI) * ((0.5 * m * t).ln() + 0.577_215_664_901_532_9);
    let sum = pw + ew - (1.0 / (t * t) - m * m / 4.0) / PI;
    assert!(trace.abs() < 1e-3);
    assert!(sum.abs() < 1e-2);
    for t in [1e-3, 0.1, 1.0] {
        assert_eq!(p_weyl(t, 0.0).unwrap(), e_weyl(t, 0.0).unwrap());
    }
}

#[test]
fn non_dirichlet_is_rejected() {
    let s = spec(1.0, 1.0);
    for bc in [BoundaryConfig::NN, BoundaryConfig::DN, BoundaryConfig::ND] {
        assert!(p_per(0.1, &s, bc).is_err());
        assert!(cylinder_kernel(0.1, 0.2, 0.3, &s, bc).is_err());
    }
    assert!(cylinder_kernel(0.1, 0.2, 0.3, &spec(0.0, 1.0), DD).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn boundary_pressure_vanishes(m in 0.2f64..3.0, t in 0.1f64..1.0, u in 0.05f64..0.95) {
        let s = spec(m, 1.0);
        prop_assert_eq!(p_bdry(t, u, &s, DD).unwrap(), 0.0);
        prop_assert!(p_bdry_numeric(t, u, &s, DD).unwrap().abs() < 1e-8);
    }

    #[test]
    fn bulk_beta_terms_vanish(m in 0.2f64..3.0, t in 0.1f64..1.0, u in 0.05f64..0.95, beta in -1.0f64..1.0) {
        let s = FieldSpec::with_beta(m, 1.0, beta).unwrap();
        prop_assert!(beta_bulk_numeric(t, u, &s, DD).unwrap().abs() < 1e-8);
    }

    #[test]
    fn pressure_is_beta_independent(m in 0.2f64..3.0, t in 0.05f64..1.0, u in 0.05f64..0.95, beta in -1.0f64..1.0) {
        let a = stress_pair(t, u, &FieldSpec::with_beta(m, 1.0, beta).unwrap(), DD).unwrap();
        let b = stress_pair(t, u, &spec(m, 1.0), DD).unwrap();
        prop_assert_eq!(a.pressure, b.pressure);
        let shift = delta_e_beta_bdry(t, u, &FieldSpec::with_beta(m, 1.0, beta).unwrap(), DD).unwrap();
        prop_assert!((a.energy.total - b.energy.total - shift).abs() <= 1e-12 * (1.0 + b.energy.total.abs()));
    }

    #[test]
    fn kernel_is_symmetric(m in 0.2f64..3.0, t in 0.05f64..1.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let s = spec(m, 1.0);
        prop_assert_eq!(
            cylinder_kernel(t, x, y, &s, DD).unwrap().value,
            cylinder_kernel(t, y, x, &s, DD).unwrap().value
        );
    }
}

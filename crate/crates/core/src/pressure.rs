//! Cylinder kernel and pressure `<T11>` for the Dirichlet–Dirichlet slab.
//!
//! The kernel of the free field is `-(1/pi) K0(m sqrt(t^2 + (x-y)^2))`; the
//! slab kernel adds its images at `x - y + 2nL` (sign `+`) and `x + y + 2nL`
//! (sign `-`). In terms of the kernel,
//!
//! ```text
//! E = -(1/2) d_t^2 T + (beta/2) (d_x + d_y)^2 T
//! p =  (1/8) (d_x - d_y)^2 T
//! ```
//!
//! at `y = x`. The pressure formulas below are the closed forms of those
//! derivatives; [`fd`] applies the operators to the kernel numerically and is
//! only used for cross-checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::{self, check_cutoff, image_sum, required_modes};
use crate::error::{Error, Result};
use crate::model::{BoundaryConfig, Components, FieldSpec};
use crate::series::SeriesPolicy;
use crate::specfun::k01;
use crate::spectral::{mode_frequency, mode_function};

/// A kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Energy and pressure at one point, each split into Weyl, periodic and boundary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressPair {
    pub energy: Components,
    pub pressure: Components,
}

fn require_dirichlet(bc: BoundaryConfig) -> Result<()> {
    if bc == BoundaryConfig::DD {
        Ok(())
    } else {
        Err(Error::UnsupportedBoundary(bc))
    }
}

fn check_massive(spec: &FieldSpec) -> Result<()> {
    if spec.mass() > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "the cylinder kernel needs m > 0 (K0 diverges logarithmically at m = 0)",
        ))
    }
}

fn k0_at(m: f64, t: f64, d: f64) -> f64 {
    let (k0, _) = k01(m * d.hypot(t));
    k0
}

/// Kernel image sums without argument checks: `(translation part, reflection part)`.
pub(crate) fn kernel_parts(t: f64, x: f64, y: f64, spec: &FieldSpec) -> Result<(f64, f64)> {
    let (m, length) = (spec.mass(), spec.length());
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let direct = image_sum((x - y).abs(), 2.0 * length, 1.0, policy, |d| k0_at(m, t, d))?;
    let reflected = image_sum(x + y, 2.0 * length, 1.0, policy, |d| k0_at(m, t, d))?;
    Ok((-direct / PI, reflected / PI))
}

/// Cylinder kernel `T(t, x, y)` of the Dirichlet–Dirichlet slab.
pub fn cylinder_kernel(t: f64, x: f64, y: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<KernelPoint> {
    require_dirichlet(bc)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("cylinder kernel needs t > 0, got {t}")));
    }
    check_massive(spec)?;
    let length = spec.length();
    for p in [x, y] {
        if !(0.0..=length).contains(&p) {
            return Err(Error::domain(format!("position {p} outside [0, {length}]")));
        }
    }
    let (direct, reflected) = kernel_parts(t, x, y, spec)?;
    Ok(KernelPoint {
        t,
        x,
        y,
        value: direct + reflected,
    })
}

/// The kernel from the eigenmodes, `-sum_n (1/omega_n) phi_n(x) phi_n(y) exp(-omega_n t)`.
pub fn cylinder_kernel_modes(t: f64, x: f64, y: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("cylinder kernel needs t > 0, got {t}")));
    }
    let length = spec.length();
    let n = required_modes(t, spec, bc);
    Ok(-(0..n)
        .map(|j| {
            let omega = mode_frequency(spec, bc, j);
            mode_function(bc, length, j, x) * mode_function(bc, length, j, y) * (-omega * t).exp() / omega
        })
        .sum::<f64>())
}

/// Weyl pressure `(m / 2 pi t) K1(m t)`; `1 / (2 pi t^2)` when massless.
pub fn p_weyl(t: f64, m: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("Weyl pressure diverges at t = {t}; need t > 0")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("mass must be finite and >= 0, got {m}")));
    }
    if m == 0.0 {
        return Ok(1.0 / (2.0 * PI * t * t));
    }
    let (_, k1) = k01(m * t);
    Ok(m / (2.0 * PI * t) * k1)
}

/// Periodic pressure, uniform in `x`.
///
/// At `t = 0` this is `(m^2/pi) sum_n K1'(2mLn)`. Massless, it coincides
/// with the periodic energy density for every `t`.
pub fn p_per(t: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    check_cutoff(t)?;
    let (m, length) = (spec.mass(), spec.length());
    if m == 0.0 {
        return Ok(energy::massless_per(t, length, bc));
    }
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let sum = policy.sum(|k| {
        let a = 2.0 * (k as f64 + 1.0) * length;
        let rho = a.hypot(t);
        let (k0, k1) = k01(m * rho);
        if k1 == 0.0 {
            return 0.0;
        }
        m * a * a * k0 / (rho * rho) - (t - a) * (t + a) * k1 / (rho * rho * rho)
    })?;
    Ok(-m / PI * sum)
}

/// Boundary pressure. The reflected images depend on `x + y` only and are
/// annihilated by `(d_x - d_y)^2`, so this is identically zero.
pub fn p_bdry(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    check_cutoff(t)?;
    energy::check_position(t, x, spec.length())?;
    Ok(0.0)
}

/// [`p_bdry`] computed by applying `(1/8)(d_x - d_y)^2` to the reflected
/// kernel images with finite differences. Should be zero up to roundoff.
pub fn p_bdry_numeric(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("numeric check needs t > 0, got {t}")));
    }
    check_massive(spec)?;
    let h = fd::step(x);
    fd::paired_operator(|x, y| kernel_parts(t, x, y, spec).map(|p| p.1), x, x, -1.0, h).map(|d| d / 8.0)
}

/// Change of the boundary energy density due to the coupling `beta`.
pub fn delta_e_beta_bdry(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    energy::beta_correction(t, x, spec, bc)
}

/// Translation images with `n != 0`, `-(1/pi) sum_{n>=1} [K0(.., 2nL + (x-y)) + K0(.., 2nL - (x-y))]`.
fn periodic_images(t: f64, x: f64, y: f64, spec: &FieldSpec) -> Result<f64> {
    let (m, length) = (spec.mass(), spec.length());
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let d = x - y;
    let sum = policy.sum(|k| {
        let a = 2.0 * (k as f64 + 1.0) * length;
        k0_at(m, t, a + d) + k0_at(m, t, a - d)
    })?;
    Ok(-sum / PI)
}

/// Periodic `beta` term, `(beta/2)(d_x + d_y)^2` applied numerically to the
/// `n >= 1` translation images. These depend on `x - y` only, so the result
/// is zero; the Weyl term is independent of `x` and drops out analytically.
pub fn beta_bulk_numeric(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    require_dirichlet(bc)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("numeric check needs t > 0, got {t}")));
    }
    check_massive(spec)?;
    let h = fd::step(x);
    fd::paired_operator(|x, y| periodic_images(t, x, y, spec), x, x, 1.0, h).map(|d| 0.5 * spec.beta() * d)
}

/// Energy and pressure at `(t, x)`, including the `beta` correction to the
/// boundary energy. The pressure carries no `beta` term.
pub fn stress_pair(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<StressPair> {
    require_dirichlet(bc)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("stress pair needs t > 0, got {t}")));
    }
    let mut energy = energy::energy_density(t, x, spec, bc)?;
    let beta = energy::beta_correction(t, x, spec, bc)?;
    energy = Components::new(energy.weyl, energy.periodic, energy.boundary + beta);
    let pressure = Components::new(p_weyl(t, spec.mass())?, p_per(t, spec, bc)?, p_bdry(t, x, spec, bc)?);
    Ok(StressPair { energy, pressure })
}

/// Central finite differences with one Richardson step, used to apply the
/// stress-tensor operators to the kernel.
pub mod fd {
    use crate::error::Result;

    /// Step for a point of magnitude `x`: `1e-3 max(1, |x|)`. After the
    /// Richardson step the truncation error is `O(h^4)`, so a larger step than
    /// plain central differences would need keeps roundoff near `1e-10`.
    pub fn step(x: f64) -> f64 {
        1e-3 * x.abs().max(1.0)
    }

    fn richardson(coarse: f64, fine: f64) -> f64 {
        (4.0 * fine - coarse) / 3.0
    }

    /// `f''(0)` from central differences at `h` and `h/2`.
    pub fn second_derivative<F>(mut f: F, h: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let f0 = f(0.0)?;
        let mut d = |h: f64| -> Result<f64> { Ok((f(h)? - 2.0 * f0 + f(-h)?) / (h * h)) };
        let coarse = d(h)?;
        let fine = d(0.5 * h)?;
        Ok(richardson(coarse, fine))
    }

    /// `(d_x + sign d_y)^2 f` at `(x, y)`, assembled from the separate
    /// `f_xx`, `f_yy` and `f_xy` stencils.
    pub fn paired_operator<F>(mut f: F, x: f64, y: f64, sign: f64, h: f64) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let f0 = f(x, y)?;
        let mut at = |h: f64| -> Result<f64> {
            let fxx = (f(x + h, y)? - 2.0 * f0 + f(x - h, y)?) / (h * h);
            let fyy = (f(x, y + h)? - 2.0 * f0 + f(x, y - h)?) / (h * h);
            let fxy = (f(x + h, y + h)? - f(x + h, y - h)? - f(x - h, y + h)? + f(x - h, y - h)?) / (4.0 * h * h);
            Ok(fxx + fyy + 2.0 * sign * fxy)
        };
        let coarse = at(h)?;
        let fine = at(0.5 * h)?;
        Ok(richardson(coarse, fine))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{e_per, e_weyl};
    use crate::specfun::EULER_GAMMA;

    const DD: BoundaryConfig = BoundaryConfig::DD;

    fn spec(m: f64, l: f64) -> FieldSpec {
        FieldSpec::new(m, l).unwrap()
    }

    #[test]
    fn kernel_matches_modes() {
        let s = spec(1.0, 1.0);
        let k = cylinder_kernel(0.3, 0.4, 0.7, &s, DD).unwrap().value;
        let modes = cylinder_kernel_modes(0.3, 0.4, 0.7, &s, DD).unwrap();
        assert!((k - modes).abs() < 1e-9, "{k} vs {modes}");
        assert!(k < 0.0);
    }

    #[test]
    fn kernel_symmetry_and_decay() {
        let s = spec(1.0, 1.0);
        let a = cylinder_kernel(0.2, 0.3, 0.8, &s, DD).unwrap().value;
        let b = cylinder_kernel(0.2, 0.8, 0.3, &s, DD).unwrap().value;
        assert_eq!(a, b);
        assert!(
            cylinder_kernel(0.5, 0.4, 0.6, &spec(60.0, 1.0), DD)
                .unwrap()
                .value
                .abs()
                < 1e-14
        );
        assert!(cylinder_kernel(0.0, 0.4, 0.6, &s, DD).is_err());
        assert!(cylinder_kernel(0.1, 0.4, 0.6, &spec(0.0, 1.0), DD).is_err());
        assert!(matches!(
            cylinder_kernel(0.1, 0.4, 0.6, &s, BoundaryConfig::NN),
            Err(Error::UnsupportedBoundary(_))
        ));
    }

    #[test]
    fn weyl_pressure_small_t() {
        assert!((p_weyl(0.2, 0.0).unwrap() - 1.0 / (2.0 * PI * 0.04)).abs() < 1e-12);
        let (m, t) = (1.0f64, 0.01f64);
        let (p, e) = (p_weyl(t, m).unwrap(), e_weyl(t, m).unwrap());
        let diff = m * m / (2.0 * PI) * ((m * t / 2.0).ln() + EULER_GAMMA);
        let sum = (1.0 / (t * t) - m * m / 4.0) / PI;
        assert!((p - e - diff).abs() < 1e-3);
        assert!((p + e - sum).abs() < 1e-2);
        for t in [0.01, 0.3, 2.0] {
            assert_eq!(p_weyl(t, 0.0).unwrap(), e_weyl(t, 0.0).unwrap());
        }
    }

    #[test]
    fn periodic_pressure_at_zero_cutoff() {
        let s = spec(1.0, 1.0);
        let k1p: f64 = (1..40).map(|n| crate::specfun::k1_prime(2.0 * n as f64).unwrap()).sum();
        assert!((p_per(0.0, &s, DD).unwrap() - k1p / PI).abs() < 1e-15);
        assert!(p_per(0.0, &spec(30.0, 1.0), DD).unwrap().abs() < 1e-20);
        assert_eq!(p_per(0.0, &spec(0.0, 1.0), DD).unwrap(), -PI / 24.0);
    }

    #[test]
    fn virtual_work() {
        for m in [0.5, 1.0, 2.0] {
            for l in [0.8, 1.0, 2.0] {
                let h = 1e-5;
                let total = |l: f64| l * e_per(0.0, &spec(m, l), DD).unwrap();
                let deriv = (total(l + h) - total(l - h)) / (2.0 * h);
                let p = p_per(0.0, &spec(m, l), DD).unwrap();
                assert!((p + deriv).abs() < 1e-6 * (1.0 + p.abs()), "m={m} L={l}");
            }
        }
    }

    #[test]
    fn boundary_pressure_vanishes_numerically() {
        assert_eq!(p_bdry(0.3, 0.25, &spec(1.0, 1.0), DD).unwrap(), 0.0);
        for (t, x, m) in [(0.3, 0.25, 1.0), (0.5, 0.9, 2.0)] {
            let v = p_bdry_numeric(t, x, &spec(m, 1.0), DD).unwrap();
            assert!(v.abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn bulk_beta_terms_vanish() {
        let s = FieldSpec::with_beta(1.0, 1.0, 1.0).unwrap();
        let v = beta_bulk_numeric(0.3, 0.4, &s, DD).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn kernel_operators_reproduce_closed_forms() {
        let (t, x) = (0.3, 0.4);
        let s = FieldSpec::with_beta(1.0, 1.0, -0.25).unwrap();
        let h = fd::step(x);
        let kernel = |x, y| Ok(cylinder_kernel(t, x, y, &s, DD)?.value);
        let p = fd::paired_operator(kernel, x, x, -1.0, h).unwrap() / 8.0;
        let want = p_weyl(t, 1.0).unwrap() + p_per(t, &s, DD).unwrap();
        assert!((p - want).abs() < 1e-6, "{p} vs {want}");

        let reflected = |x, y| Ok(kernel_parts(t, x, y, &s)?.1);
        let beta = fd::paired_operator(reflected, x, x, 1.0, h).unwrap() * 0.5 * s.beta();
        let closed = delta_e_beta_bdry(t, x, &s, DD).unwrap();
        assert!((beta - closed).abs() < 1e-6, "{beta} vs {closed}");
    }

    #[test]
    fn energy_operator_on_kernel() {
        // -(1/2) d_t^2 T reproduces the full energy density
        let s = spec(1.0, 1.0);
        let (t, x) = (0.3, 0.4);
        let d2 = fd::second_derivative(|u| Ok(cylinder_kernel(t + u, x, x, &s, DD)?.value), fd::step(t)).unwrap();
        let e = energy::energy_density(t, x, &s, DD).unwrap().total;
        assert!((-0.5 * d2 - e).abs() < 1e-6, "{} vs {e}", -0.5 * d2);
    }

    #[test]
    fn stress_pair_wiring() {
        let s = spec(1.0, 1.0);
        let pair = stress_pair(0.1, 0.5, &s, DD).unwrap();
        let e = energy::energy_density(0.1, 0.5, &s, DD).unwrap();
        assert!((pair.energy.total - e.total).abs() < 1e-10);

        let p: Vec<_> = [0.0, -0.25, 1.0]
            .iter()
            .map(|&b| {
                stress_pair(0.1, 0.5, &FieldSpec::with_beta(1.0, 1.0, b).unwrap(), DD)
                    .unwrap()
                    .pressure
            })
            .collect();
        assert!(p.windows(2).all(|w| w[0] == w[1]));

        let massless = stress_pair(0.1, 0.5, &spec(0.0, 1.0), DD).unwrap();
        assert_eq!(massless.energy.weyl, massless.pressure.weyl);
        assert_eq!(massless.energy.periodic, massless.pressure.periodic);
        let trace = massless.energy.total - massless.pressure.total;
        assert!((trace - massless.energy.boundary).abs() < 1e-12);
    }
}

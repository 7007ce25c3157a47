//! Local spectral density, eigenvalue density and counting function, split
//! into Weyl, periodic and boundary parts, plus the exact eigenmodes that
//! serve as a brute-force oracle.
//!
//! The counting function is evaluated from its closed sawtooth form. The
//! cosine series behind `sigma` and `rho` do not converge pointwise; they are
//! returned Abel-summed (each term damped by `exp(-eps * kappa * n)`, summed in
//! closed form), which makes them distribution-valued: peaks of width
//! `~eps` at the eigenvalues and the smooth background elsewhere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{kappa_of, BoundaryConfig, Components, FieldSpec, Kappa, SpectralPoint};

/// Default Abel damping for [`sigma_components`] and [`rho_components`].
pub const DEFAULT_ABEL_EPS: f64 = 1e-6;

/// Wave number of the `j`-th eigenmode (`j = 0, 1, ...`), in increasing order.
///
/// Even parity has `kappa = n pi / L` (Dirichlet from `n = 1`, Neumann from
/// `n = 0`); odd parity has `kappa = (n - 1/2) pi / L`.
pub fn mode_wave_number(bc: BoundaryConfig, length: f64, j: usize) -> f64 {
    let j = j as f64;
    let n = match (bc.l(), bc.r()) {
        (1, 1) => j + 1.0,
        (0, 0) => j,
        _ => j + 0.5,
    };
    n * PI / length
}

/// Normalized eigenfunction of the `j`-th mode at `x`.
pub fn mode_function(bc: BoundaryConfig, length: f64, j: usize, x: f64) -> f64 {
    let kappa = mode_wave_number(bc, length, j);
    let norm = (2.0 / length).sqrt();
    match bc.l() {
        // Dirichlet left end
        1 => norm * (kappa * x).sin(),
        _ if kappa == 0.0 => (1.0 / length).sqrt(),
        _ => norm * (kappa * x).cos(),
    }
}

/// Frequency `omega_j = sqrt(kappa_j^2 + m^2)` of the `j`-th mode.
pub fn mode_frequency(spec: &FieldSpec, bc: BoundaryConfig, j: usize) -> f64 {
    mode_wave_number(bc, spec.length(), j).hypot(spec.mass())
}

/// The first `count` eigenfrequencies in nondecreasing order.
pub fn exact_eigenvalues(spec: &FieldSpec, bc: BoundaryConfig, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("eigenvalue count must be at least 1"));
    }
    Ok((0..count).map(|j| mode_frequency(spec, bc, j)).collect())
}

/// Number of eigenfrequencies `<= omega`, by enumeration.
pub fn enumerate_count(spec: &FieldSpec, bc: BoundaryConfig, omega: f64) -> u64 {
    let mut n = 0;
    while mode_frequency(spec, bc, n as usize) <= omega {
        n += 1;
    }
    n
}

/// Counting function `N(omega) = #{eigenvalues <= omega}` and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingResult {
    pub omega: f64,
    pub n_weyl: f64,
    pub n_per: f64,
    pub n_bdry: f64,
    /// Integer-valued total; agrees with `n_weyl + n_per + n_bdry` to rounding.
    pub n_total: f64,
    pub exact_count: Option<u64>,
}

/// Closed-form counting function, right-continuous at eigenvalues.
///
/// With `y = L kappa / pi`: even parity has `N_per = 1/2 - frac(y)` and
/// `N_bdry = (-1)^l / 2`; odd parity has `N_per = floor(y + 1/2) - y` and
/// `N_bdry = 0`. Below threshold everything is zero.
pub fn counting(omega: f64, spec: &FieldSpec, bc: BoundaryConfig) -> CountingResult {
    let kappa = match kappa_of(omega, spec.mass()) {
        Kappa::Real(k) => k,
        Kappa::BelowThreshold => {
            return CountingResult {
                omega,
                n_weyl: 0.0,
                n_per: 0.0,
                n_bdry: 0.0,
                n_total: 0.0,
                exact_count: None,
            }
        }
    };
    let y = spec.length() * kappa / PI;
    let (n_per, n_bdry, n_total) = if bc.is_even() {
        let whole = y.floor();
        let n_bdry = 0.5 * bc.left_sign();
        let extra = if bc.l() == 0 { 1.0 } else { 0.0 };
        (0.5 - (y - whole), n_bdry, whole + extra)
    } else {
        let whole = (y + 0.5).floor();
        (whole - y, 0.0, whole)
    };
    CountingResult {
        omega,
        n_weyl: y,
        n_per,
        n_bdry,
        n_total,
        exact_count: None,
    }
}

/// [`counting`] with the brute-force eigenvalue count attached.
pub fn counting_with_oracle(omega: f64, spec: &FieldSpec, bc: BoundaryConfig) -> CountingResult {
    CountingResult {
        exact_count: Some(enumerate_count(spec, bc, omega)),
        ..counting(omega, spec, bc)
    }
}

/// Abel sums of the periodic cosine series at `theta = 2 kappa L`.
///
/// Returns `(sum_{n>=1} q^n cos(n theta), sum_{n in Z} q^{|n|} e^{i n theta})`
/// with `q = s exp(-eps kappa)`; the second (Poisson kernel) is real.
fn abel_sums(theta: f64, q: f64) -> (f64, f64) {
    let cos = theta.cos();
    let denom = 1.0 - 2.0 * q * cos + q * q;
    let one_sided = (q * cos - q * q) / denom;
    let poisson = (1.0 - q * q) / denom;
    (one_sided, poisson)
}

fn damping(bc: BoundaryConfig, kappa: f64, eps: f64) -> f64 {
    bc.period_sign() * (-eps * kappa).exp()
}

fn above_threshold(omega: f64, spec: &FieldSpec) -> Result<Option<f64>> {
    match kappa_of(omega, spec.mass()) {
        Kappa::BelowThreshold => Ok(None),
        Kappa::Real(0.0) => Err(Error::Pole { omega }),
        Kappa::Real(k) => Ok(Some(k)),
    }
}

/// Local spectral density `sigma(omega, x)` split by path type, Abel-summed with damping `eps`.
pub fn sigma_components_abel(
    omega: f64,
    x: f64,
    spec: &FieldSpec,
    bc: BoundaryConfig,
    eps: f64,
) -> Result<SpectralPoint> {
    let Some(kappa) = above_threshold(omega, spec)? else {
        return Ok(SpectralPoint::new(omega, spec.mass(), Components::zero()));
    };
    let prefactor = omega / (PI * kappa);
    let theta = 2.0 * kappa * spec.length();
    let (one_sided, poisson) = abel_sums(theta, damping(bc, kappa, eps));
    let weyl = prefactor;
    let periodic = 2.0 * prefactor * one_sided;
    let boundary = prefactor * bc.left_sign() * (2.0 * kappa * x).cos() * poisson;
    Ok(SpectralPoint::new(
        omega,
        spec.mass(),
        Components::new(weyl, periodic, boundary),
    ))
}

/// [`sigma_components_abel`] with the default damping.
pub fn sigma_components(omega: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<SpectralPoint> {
    sigma_components_abel(omega, x, spec, bc, DEFAULT_ABEL_EPS)
}

/// Eigenvalue density `rho(omega) = int_0^L sigma dx`, Abel-summed with damping `eps`.
pub fn rho_components_abel(omega: f64, spec: &FieldSpec, bc: BoundaryConfig, eps: f64) -> Result<SpectralPoint> {
    let Some(kappa) = above_threshold(omega, spec)? else {
        return Ok(SpectralPoint::new(omega, spec.mass(), Components::zero()));
    };
    let length = spec.length();
    let prefactor = omega / (PI * kappa);
    let theta = 2.0 * kappa * length;
    let (one_sided, poisson) = abel_sums(theta, damping(bc, kappa, eps));
    let weyl = length * prefactor;
    let periodic = 2.0 * length * prefactor * one_sided;
    // int_0^L cos(2 kappa x) dx = sin(theta) / (2 kappa)
    let boundary = prefactor * bc.left_sign() * poisson * theta.sin() / (2.0 * kappa);
    Ok(SpectralPoint::new(
        omega,
        spec.mass(),
        Components::new(weyl, periodic, boundary),
    ))
}

/// [`rho_components_abel`] with the default damping.
pub fn rho_components(omega: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<SpectralPoint> {
    rho_components_abel(omega, spec, bc, DEFAULT_ABEL_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: f64, l: f64) -> FieldSpec {
        FieldSpec::new(m, l).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let dd = exact_eigenvalues(&spec(0.0, 1.0), BoundaryConfig::DD, 3).unwrap();
        for (v, want) in dd.iter().zip([PI, 2.0 * PI, 3.0 * PI]) {
            assert!((v - want).abs() < 1e-14);
        }
        let nn = exact_eigenvalues(&spec(2.0, 1.0), BoundaryConfig::NN, 1).unwrap();
        assert_eq!(nn[0], 2.0);
        let dn = exact_eigenvalues(&spec(0.0, 1.0), BoundaryConfig::DN, 2).unwrap();
        assert!((dn[0] - PI / 2.0).abs() < 1e-14);
        assert!((dn[1] - 1.5 * PI).abs() < 1e-14);
        assert!(exact_eigenvalues(&spec(0.0, 1.0), BoundaryConfig::DN, 0).is_err());
    }

    #[test]
    fn eigenfunctions_satisfy_boundary_conditions() {
        let l = 1.7;
        for bc in BoundaryConfig::ALL {
            for j in 0..5 {
                let h = 1e-6;
                let at = |x: f64| mode_function(bc, l, j, x);
                let slope = |x: f64| (at(x + h) - at(x - h)) / (2.0 * h);
                let left = if bc.l() == 1 { at(0.0) } else { slope(0.0) };
                let right = if bc.r() == 1 { at(l) } else { slope(l) };
                assert!(left.abs() < 1e-6, "{bc} mode {j} left");
                assert!(right.abs() < 1e-6, "{bc} mode {j} right");
            }
        }
    }

    #[test]
    fn counting_examples() {
        // L = pi, m = 1: DD frequencies sqrt(n^2 + 1)
        let s = spec(1.0, PI);
        let c = counting_with_oracle(2.0, &s, BoundaryConfig::DD);
        assert_eq!(c.n_total, 1.0);
        assert_eq!(c.exact_count, Some(1));

        let s = spec(1.3, 1.0);
        assert_eq!(counting(1.3 + 1e-12, &s, BoundaryConfig::NN).n_total, 1.0);
        assert_eq!(counting(1.3, &s, BoundaryConfig::NN).n_total, 1.0);
        assert_eq!(counting(1.3 - 1e-12, &s, BoundaryConfig::NN).n_total, 0.0);

        // DN: jumps at kappa = (n - 1/2) pi / L
        let s = spec(0.5, 2.0);
        for n in 1..6 {
            let kappa = (n as f64 - 0.5) * PI / 2.0;
            let omega = kappa.hypot(0.5);
            assert_eq!(counting(omega + 1e-9, &s, BoundaryConfig::DN).n_total, n as f64);
            assert_eq!(counting(omega - 1e-9, &s, BoundaryConfig::DN).n_total, (n - 1) as f64);
        }
    }

    #[test]
    fn counting_zero_below_threshold() {
        let c = counting(0.5, &spec(1.0, 1.0), BoundaryConfig::NN);
        assert_eq!(c.n_total, 0.0);
        assert_eq!(c.n_per, 0.0);
    }

    #[test]
    fn counting_parts_sum_to_total() {
        let s = spec(0.8, 1.3);
        for bc in BoundaryConfig::ALL {
            let mut omega = 0.9;
            while omega < 40.0 {
                let c = counting(omega, &s, bc);
                let sum = c.n_weyl + c.n_per + c.n_bdry;
                assert!((sum - c.n_total).abs() < 1e-12, "{bc} at {omega}");
                assert_eq!(c.n_total, c.n_total.round());
                omega += 0.37;
            }
        }
    }

    #[test]
    fn sawtooth_jump_size() {
        let s = spec(1.0, 1.0);
        for bc in BoundaryConfig::ALL {
            for omega in exact_eigenvalues(&s, bc, 10).unwrap().into_iter().skip(1) {
                let right = counting(omega + 1e-9, &s, bc).n_per;
                let left = counting(omega - 1e-9, &s, bc).n_per;
                assert!((right - 0.5).abs() < 1e-6, "{bc} right {right}");
                assert!((left + 0.5).abs() < 1e-6, "{bc} left {left}");
            }
        }
    }

    #[test]
    fn density_examples() {
        let s = spec(3.0, 2.0);
        let sigma = sigma_components(5.0, 0.3, &s, BoundaryConfig::DD).unwrap();
        assert!((sigma.components.weyl - 5.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(sigma.kappa, Some(4.0));
        let rho = rho_components(5.0, &s, BoundaryConfig::DD).unwrap();
        assert!((rho.components.weyl - 10.0 / (4.0 * PI)).abs() < 1e-15);

        let below = rho_components(2.0, &s, BoundaryConfig::NN).unwrap();
        assert_eq!(below.components, Components::zero());
        assert_eq!(below.kappa, None);
        let below = sigma_components(2.0, 0.5, &s, BoundaryConfig::DN).unwrap();
        assert_eq!(below.components, Components::zero());

        assert!(matches!(
            sigma_components(3.0, 0.5, &s, BoundaryConfig::DD),
            Err(Error::Pole { .. })
        ));
        assert!(rho_components(3.0, &s, BoundaryConfig::DD).is_err());
    }

    #[test]
    fn abel_limit_cancels_weyl_off_resonance() {
        // between eigenvalues the regularized density vanishes
        let s = spec(1.0, 1.0);
        for bc in BoundaryConfig::ALL {
            let evs = exact_eigenvalues(&s, bc, 4).unwrap();
            let omega = 0.5 * (evs[2] + evs[3]);
            let rho = rho_components(omega, &s, bc).unwrap().components;
            assert!(rho.total.abs() < 1e-4, "{bc}: {}", rho.total);
        }
    }
}

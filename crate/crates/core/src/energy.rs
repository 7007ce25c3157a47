//! Vacuum energy density `<T00>` at `xi = 1/4` with an exponential frequency
//! cutoff `t`, decomposed by classical paths:
//!
//! * Weyl: zero-length paths, `(m^2 / 2 pi) (K1(mt)/(mt) + K0(mt))`.
//! * periodic: closed orbits of length `2nL`, uniform in `x`.
//! * boundary: paths reflected an odd number of times, concentrated near the walls.
//!
//! Every image term is `-d/dt [m t K1(m rho) / rho]` with
//! `rho = sqrt(a^2 + t^2)`; the derivative is taken analytically with
//! `K0' = -K1`, `K1' = -K1/z - K0`, which gives
//! `m K1(m rho) (a^2 - t^2) / rho^3 - m^2 t^2 K0(m rho) / rho^2`.
//!
//! The massless field never goes through the Macdonald series; its image
//! sums are evaluated in closed form (`sinh` for the periodic part, complex
//! `sin` for the boundary part).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundaryConfig, Components, FieldSpec};
use crate::series::SeriesPolicy;
use crate::specfun::k01;
use crate::spectral::{mode_frequency, mode_function, mode_wave_number};

/// Positions closer than `ENDPOINT_TOL * L` to a wall count as the wall at `t = 0`.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Modes are summed until `exp(-omega t)` drops below this.
pub const MODE_SUM_CUTOFF: f64 = 1e-16;

/// A point at which to evaluate the energy density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyQuery {
    pub t: f64,
    pub x: f64,
    pub spec: FieldSpec,
    pub bc: BoundaryConfig,
}

impl EnergyQuery {
    pub fn evaluate(&self) -> Result<Components> {
        energy_density(self.t, self.x, &self.spec, self.bc)
    }
}

/// `-d/dt [m t K1(m rho) / rho]`, up to sign: the `t`-derivative of one image term.
pub(crate) fn image_term_dt(a: f64, t: f64, m: f64) -> f64 {
    let rho = a.hypot(t);
    let (k0, k1) = k01(m * rho);
    if k1 == 0.0 {
        return 0.0;
    }
    m * k1 * (a - t) * (a + t) / (rho * rho * rho) - m * m * t * t * k0 / (rho * rho)
}

pub(crate) fn check_cutoff(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("cutoff t must be finite and >= 0, got {t}")))
    }
}

pub(crate) fn check_position(t: f64, x: f64, length: f64) -> Result<()> {
    if !(x.is_finite() && (0.0..=length).contains(&x)) {
        return Err(Error::domain(format!("position x = {x} outside [0, {length}]")));
    }
    if t == 0.0 && (x <= ENDPOINT_TOL * length || x >= length * (1.0 - ENDPOINT_TOL)) {
        return Err(Error::SingularPoint { x, length });
    }
    Ok(())
}

/// Sum over `n in Z` of `s^n f(x + nL)`, taking `n = k` and `n = -k-1` together.
pub(crate) fn image_sum<F>(x: f64, length: f64, sign: f64, policy: SeriesPolicy, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut weight = 1.0;
    policy.sum(|k| {
        let k = k as f64;
        let right = f(x + k * length);
        let left = f(x - (k + 1.0) * length);
        let pair = weight * (right + sign * left);
        weight *= sign;
        pair
    })
}

/// Weyl energy density; `1 / (2 pi t^2)` when massless.
pub fn e_weyl(t: f64, m: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("Weyl energy diverges at t = {t}; need t > 0")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("mass must be finite and >= 0, got {m}")));
    }
    if m == 0.0 {
        return Ok(1.0 / (2.0 * PI * t * t));
    }
    let z = m * t;
    let (k0, k1) = k01(z);
    Ok(m * m / (2.0 * PI) * (k1 / z + k0))
}

/// `1/u^2 - 1/sinh^2 u`, with its Taylor series near 0.
fn inv_sq_minus_csch_sq(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        1.0 / 3.0 + u2 * (-1.0 / 15.0 + u2 * (2.0 / 189.0 + u2 * (-1.0 / 675.0 + u2 * 2.0 / 10395.0)))
    } else {
        let s = u.sinh();
        1.0 / (u * u) - 1.0 / (s * s)
    }
}

/// `1/u^2 - cosh u / sinh^2 u`, with its Taylor series near 0.
fn inv_sq_minus_coth_csch(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        -1.0 / 6.0 + u2 * (7.0 / 120.0 + u2 * (-31.0 / 3024.0 + u2 * (127.0 / 86400.0 - u2 * 73.0 / 380160.0)))
    } else {
        let s = u.sinh();
        1.0 / (u * u) - u.cosh() / (s * s)
    }
}

pub(crate) fn massless_per(t: f64, length: f64, bc: BoundaryConfig) -> f64 {
    let u = PI * t / (2.0 * length);
    let g = if bc.is_even() {
        inv_sq_minus_csch_sq(u)
    } else {
        inv_sq_minus_coth_csch(u)
    };
    -PI / (8.0 * length * length) * g
}

/// Real part of `sum_n s^n / (n + w)^2` times `sin^2(pi w) / pi^2`-free form.
fn massless_image_lattice(w: Complex64, even: bool) -> f64 {
    if PI * w.im > 350.0 {
        return 0.0;
    }
    let pw = w * PI;
    let sin = pw.sin();
    let sum = if even {
        PI * PI / (sin * sin)
    } else {
        PI * PI * pw.cos() / (sin * sin)
    };
    sum.re
}

fn massless_bdry(t: f64, x: f64, length: f64, bc: BoundaryConfig) -> f64 {
    // image terms Re 1/(2(x + nL) + i t)^2 = Re 1/(4 L^2 (n + w)^2)
    let w = Complex64::new(x / length, 0.5 * t / length);
    let lattice = massless_image_lattice(w, bc.is_even());
    -bc.left_sign() / (2.0 * PI) / (4.0 * length * length) * lattice
}

/// Periodic (Casimir) energy density, uniform in `x`.
///
/// At `t = 0` this is `-(1/pi) sum_n s^n (m / 2nL) K1(2nLm)`; massless it is
/// `-pi/(24 L^2)` for even parity and `+pi/(48 L^2)` for odd parity.
pub fn e_per(t: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    check_cutoff(t)?;
    let m = spec.mass();
    let length = spec.length();
    if m == 0.0 {
        return Ok(massless_per(t, length, bc));
    }
    let sign = bc.period_sign();
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let mut weight = 1.0;
    let sum = policy.sum(|k| {
        weight *= sign;
        let a = 2.0 * (k as f64 + 1.0) * length;
        weight * image_term_dt(a, t, m)
    })?;
    Ok(-sum / PI)
}

/// Boundary energy density at `x`; singular at the walls when `t = 0`.
pub fn e_bdry(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    check_cutoff(t)?;
    let length = spec.length();
    check_position(t, x, length)?;
    let m = spec.mass();
    if m == 0.0 {
        return Ok(massless_bdry(t, x, length, bc));
    }
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let sum = image_sum(x, length, bc.period_sign(), policy, |a| image_term_dt(2.0 * a, t, m))?;
    Ok(-bc.left_sign() / (2.0 * PI) * sum)
}

/// All three components at `(t, x)`.
pub fn energy_density(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<Components> {
    Ok(Components::new(
        e_weyl(t, spec.mass())?,
        e_per(t, spec, bc)?,
        e_bdry(t, x, spec, bc)?,
    ))
}

/// Integrated boundary energy: `(-1)^l (m/4) exp(-m t)` for even parity, zero for odd.
pub fn total_bdry_energy(t: f64, m: f64, bc: BoundaryConfig) -> Result<f64> {
    check_cutoff(t)?;
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("mass must be finite and >= 0, got {m}")));
    }
    if !bc.is_even() {
        return Ok(0.0);
    }
    Ok(bc.left_sign() * 0.25 * m * (-m * t).exp())
}

/// Curvature-coupling correction to the boundary energy density.
///
/// `-(2 beta m / pi) (-1)^l sum_n s^n [m u^2 K0(m r)/r^2 + (u^2 - t^2) K1(m r)/r^3]`
/// with `u = 2(x + nL)`, `r = sqrt(u^2 + t^2)`. The Weyl and periodic
/// corrections cancel identically. Massless, this is `4 beta` times the
/// boundary energy density.
pub(crate) fn beta_correction(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    check_cutoff(t)?;
    let length = spec.length();
    check_position(t, x, length)?;
    let beta = spec.beta();
    if beta == 0.0 {
        return Ok(0.0);
    }
    let m = spec.mass();
    if m == 0.0 {
        return Ok(4.0 * beta * massless_bdry(t, x, length, bc));
    }
    let policy = SeriesPolicy::for_decay_rate(2.0 * m * length);
    let sum = image_sum(x, length, bc.period_sign(), policy, |a| {
        let u = 2.0 * a;
        let r = u.hypot(t);
        let (k0, k1) = k01(m * r);
        if k1 == 0.0 {
            return 0.0;
        }
        m * u * u * k0 / (r * r) + (u - t) * (u + t) * k1 / (r * r * r)
    })?;
    Ok(-2.0 * beta * m / PI * bc.left_sign() * sum)
}

/// Boundary energy density at `t = 0` for general coupling `beta`.
///
/// Only the pure configurations (DD, NN) are supported.
pub fn e_bdry_beta(x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    if !bc.is_even() {
        return Err(Error::UnsupportedBoundary(bc));
    }
    Ok(e_bdry(0.0, x, spec, bc)? + beta_correction(0.0, x, spec, bc)?)
}

/// Number of modes needed so that `exp(-omega t) < 1e-16` at the last one.
pub fn required_modes(t: f64, spec: &FieldSpec, bc: BoundaryConfig) -> usize {
    let omega_min = -MODE_SUM_CUTOFF.ln() / t;
    let kappa_min = if omega_min > spec.mass() {
        (omega_min * omega_min - spec.mass() * spec.mass()).sqrt()
    } else {
        0.0
    };
    // mode_wave_number(j) >= (j + 1/2 - 1/2) pi / L in every configuration
    let mut j = (kappa_min * spec.length() / PI).floor() as usize;
    while (-mode_frequency(spec, bc, j) * t).exp() >= MODE_SUM_CUTOFF {
        j += 1;
    }
    j + 1
}

/// Energy density from the exact eigenmodes, `(1/2) sum_j omega_j phi_j(x)^2 exp(-omega_j t)`.
///
/// Independent of the image decomposition; `n_max` modes are summed. A
/// nonzero `beta` adds `-(beta/2) sum_j (1/omega_j) (phi_j^2)'' exp(-omega_j t)`.
pub fn mode_sum_energy(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig, n_max: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("mode sum needs t > 0, got {t}")));
    }
    check_position(t, x, spec.length())?;
    let required = required_modes(t, spec, bc);
    if n_max < required {
        return Err(Error::InsufficientModes { n_max, required });
    }
    let length = spec.length();
    let beta = spec.beta();
    let total: f64 = (0..n_max)
        .map(|j| {
            let omega = mode_frequency(spec, bc, j);
            let phi = mode_function(bc, length, j, x);
            let mut term = omega * phi * phi;
            if beta != 0.0 {
                // -(beta/omega) (phi^2)'' with phi^2 = (1 -+ cos 2 kappa x) / L
                let kappa = mode_wave_number(bc, length, j);
                let wall = if bc.l() == 1 { 1.0 } else { -1.0 };
                let curvature = wall * 4.0 * kappa * kappa / length * (2.0 * kappa * x).cos();
                term -= beta * curvature / omega;
            }
            term * (-omega * t).exp()
        })
        .sum();
    Ok(0.5 * total)
}

/// [`mode_sum_energy`] with `n_max` from [`required_modes`].
pub fn mode_sum_energy_auto(t: f64, x: f64, spec: &FieldSpec, bc: BoundaryConfig) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("mode sum needs t > 0, got {t}")));
    }
    mode_sum_energy(t, x, spec, bc, required_modes(t, spec, bc))
}

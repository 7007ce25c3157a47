//! Macdonald functions `K0`, `K1` (modified Bessel functions of the second
//! kind) for positive real arguments.
//!
//! Two regimes are used:
//!
//! * `z <= 2`: the ascending series with harmonic-number (digamma) weights,
//!   `K0(z) = -(ln(z/2) + gamma) I0(z) + sum_k H_k (z^2/4)^k / (k!)^2`.
//! * `z > 2`: Steed's continued fraction for the scaled pair
//!   `exp(z) K0(z)`, `exp(z) K1(z)`, which converges to machine precision for
//!   every `z` in this range (a truncated asymptotic expansion cannot reach
//!   `1e-12` near `z = 2`).
//!
//! Arguments above [`UNDERFLOW_ARG`] return `0`; `exp(-z)` is below the
//! smallest normal double there and callers only ever sum such terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switchover between the ascending series and the continued fraction.
pub const SERIES_LIMIT: f64 = 2.0;

/// Arguments beyond this return exactly zero.
pub const UNDERFLOW_ARG: f64 = 705.0;

const CF_MAX_ITER: usize = 10_000;

fn check_arg(z: f64) -> Result<()> {
    if z > 0.0 && !z.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Macdonald function argument must be > 0, got {z}"
        )))
    }
}

/// `(K0(z), K1(z))` from the ascending series. Accurate for `z` up to about 3.
pub(crate) fn k01_series(z: f64) -> (f64, f64) {
    let y = 0.25 * z * z;
    let log_term = (0.5 * z).ln() + EULER_GAMMA;

    // K0 pieces: term_k = y^k / (k!)^2
    let mut term0 = 1.0;
    let mut i0 = 1.0;
    let mut h0_sum = 0.0;
    // K1 pieces: c_k = y^k / (k! (k+1)!)
    let mut c = 1.0;
    let mut c_sum = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut h1_sum = 1.0; // (H_0 + H_1) c_0
    let mut k = 0.0;
    loop {
        k += 1.0;
        harmonic += 1.0 / k;
        term0 *= y / (k * k);
        i0 += term0;
        h0_sum += harmonic * term0;

        c *= y / (k * (k + 1.0));
        c_sum += c;
        h1_sum += (2.0 * harmonic + 1.0 / (k + 1.0)) * c;

        if term0 < 1e-17 * i0 && c < 1e-17 * c_sum {
            break;
        }
    }
    let k0 = -log_term * i0 + h0_sum;
    let k1 = 1.0 / z + 0.5 * z * (log_term * c_sum - 0.5 * h1_sum);
    (k0, k1)
}

/// `(exp(z) K0(z), exp(z) K1(z))` from Steed's continued fraction (order 0).
pub(crate) fn k01_scaled_cf(z: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    let k0e = (PI / (2.0 * z)).sqrt() / s;
    let k1e = k0e * (z + 0.5 - h) / z;
    (k0e, k1e)
}

/// `(K0(z), K1(z))` without argument checking; `z` must be positive.
pub(crate) fn k01(z: f64) -> (f64, f64) {
    debug_assert!(z > 0.0);
    if z <= SERIES_LIMIT {
        k01_series(z)
    } else if z > UNDERFLOW_ARG {
        (0.0, 0.0)
    } else {
        let (k0e, k1e) = k01_scaled_cf(z);
        let e = (-z).exp();
        (k0e * e, k1e * e)
    }
}

/// `K0(z)` for `z > 0`.
pub fn k0(z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(k01(z).0)
}

/// `K1(z)` for `z > 0`.
pub fn k1(z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(k01(z).1)
}

/// Both functions from one evaluation.
pub fn k0_k1(z: f64) -> Result<(f64, f64)> {
    check_arg(z)?;
    Ok(k01(z))
}

/// `K0'(z) = -K1(z)`.
pub fn k0_prime(z: f64) -> Result<f64> {
    Ok(-k1(z)?)
}

/// `K1'(z) = -K1(z)/z - K0(z)`.
pub fn k1_prime(z: f64) -> Result<f64> {
    let (k0, k1) = k0_k1(z)?;
    Ok(-k1 / z - k0)
}

/// Residual of `int_t^inf K1(m u) / sqrt(u^2 - t^2) du = pi exp(-m t) / (2 m t)`.
///
/// The substitution `u = t cosh s` removes the endpoint singularity, leaving
/// `int_0^inf K1(m t cosh s) ds`, which is integrated adaptively up to the
/// point where `K1` underflows.
pub fn mdint_identity_residual(m: f64, t: f64) -> Result<f64> {
    if !(m > 0.0 && t > 0.0 && m.is_finite() && t.is_finite()) {
        return Err(Error::domain(format!(
            "identity requires m > 0 and t > 0, got m = {m}, t = {t}"
        )));
    }
    let mt = m * t;
    let rhs = PI * (-mt).exp() / (2.0 * mt);
    if mt >= UNDERFLOW_ARG {
        return Ok(rhs.abs());
    }
    let s_max = (UNDERFLOW_ARG / mt).acosh();
    let result = quad::integrate(
        |s| k01(mt * s.cosh()).1,
        0.0,
        s_max,
        QuadConfig {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            max_panels: 2000,
        },
    );
    Ok((result.value - rhs).abs())
}

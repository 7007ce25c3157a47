//! Truncation policy for the exponentially convergent image sums.
//!
//! A series is stopped once the current term is below
//! `rel_tol * (1 + |partial sum|)` and at least `min_terms` terms have been
//! added. Hitting `max_terms` is a [`Error::Convergence`] failure.
//!
//! The hard cap defaults to `10^6` and can be overridden for the whole process
//! with the `VACUUM1D_MAX_TERMS` environment variable.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_TERMS_ENV: &str = "VACUUM1D_MAX_TERMS";

const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Below this value of `2 m L` the per-period decay `exp(-2 m L)` is slow
/// enough that the cap is raised and a warning is logged.
pub const SLOW_DECAY_THRESHOLD: f64 = 1e-3;

const SLOW_CAP_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub rel_tol: f64,
    pub min_terms: usize,
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tol: 1e-15,
            min_terms: 8,
            max_terms: default_max_terms(),
        }
    }
}

fn default_max_terms() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_TERMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_TERMS)
    })
}

impl SeriesPolicy {
    /// Policy for a sum whose terms decay like `exp(-decay * n)`.
    pub fn for_decay_rate(decay: f64) -> Self {
        let mut policy = Self::default();
        if decay < SLOW_DECAY_THRESHOLD {
            log::warn!(
                "slow image-series convergence: per-period decay exp(-{decay:e}); \
                 raising term cap to {}",
                policy.max_terms.saturating_mul(SLOW_CAP_FACTOR)
            );
            policy.max_terms = policy.max_terms.saturating_mul(SLOW_CAP_FACTOR);
        }
        policy
    }

    /// Sums `term(0) + term(1) + ...` under this policy.
    pub fn sum<F>(&self, mut term: F) -> Result<f64>
    where
        F: FnMut(usize) -> f64,
    {
        let mut total = 0.0;
        let mut last = f64::INFINITY;
        for k in 0..self.max_terms {
            let t = term(k);
            total += t;
            last = t.abs();
            if k + 1 >= self.min_terms && last < self.rel_tol * (1.0 + total.abs()) {
                return Ok(total);
            }
        }
        Err(Error::Convergence {
            terms: self.max_terms,
            last_term: last,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let policy = SeriesPolicy::default();
        let s = policy.sum(|k| 0.5f64.powi(k as i32)).unwrap();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn minimum_term_floor() {
        // leading zeros must not stop the sum early
        let policy = SeriesPolicy::default();
        let s = policy
            .sum(|k| if k < 5 { 0.0 } else { 0.5f64.powi(k as i32 - 5) })
            .unwrap();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cap_reports_failure() {
        let policy = SeriesPolicy {
            max_terms: 100,
            ..SeriesPolicy::default()
        };
        let err = policy.sum(|k| 1.0 / (k as f64 + 1.0)).unwrap_err();
        assert!(matches!(err, Error::Convergence { terms: 100, .. }));
        assert!(err.is_convergence());
    }

    #[test]
    fn slow_decay_raises_cap() {
        let fast = SeriesPolicy::for_decay_rate(1.0);
        let slow = SeriesPolicy::for_decay_rate(1e-4);
        assert_eq!(slow.max_terms, fast.max_terms * SLOW_CAP_FACTOR);
    }
}

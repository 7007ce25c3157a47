//! Shared domain types: boundary configuration, field parameters and
//! component-decomposed results.
//!
//! Natural units are used throughout (`hbar = c = 1`); lengths are measured
//! in the same unit as `1 / mass`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition selector for the two ends of the interval.
///
/// `l` and `r` count the derivatives that vanish at the left and right end:
/// `0` is Neumann (`u'(0) = 0`), `1` is Dirichlet (`u(0) = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryConfig {
    l: u8,
    r: u8,
}

impl BoundaryConfig {
    pub const DD: BoundaryConfig = BoundaryConfig { l: 1, r: 1 };
    pub const NN: BoundaryConfig = BoundaryConfig { l: 0, r: 0 };
    pub const DN: BoundaryConfig = BoundaryConfig { l: 1, r: 0 };
    pub const ND: BoundaryConfig = BoundaryConfig { l: 0, r: 1 };

    pub const ALL: [BoundaryConfig; 4] = [Self::DD, Self::NN, Self::DN, Self::ND];

    pub fn new(l: u8, r: u8) -> Result<Self> {
        if l > 1 || r > 1 {
            return Err(Error::domain(format!(
                "boundary indices must be 0 or 1, got (l, r) = ({l}, {r})"
            )));
        }
        Ok(BoundaryConfig { l, r })
    }

    pub fn l(self) -> u8 {
        self.l
    }

    pub fn r(self) -> u8 {
        self.r
    }

    /// `(l + r) mod 2`.
    pub fn parity(self) -> u8 {
        (self.l + self.r) % 2
    }

    pub fn is_even(self) -> bool {
        self.parity() == 0
    }

    /// `(-1)^l`: `-1` for a Dirichlet left end.
    pub fn left_sign(self) -> f64 {
        if self.l == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `(-1)^(l + r)`, the sign picked up per period `2L` of an image path.
    pub fn period_sign(self) -> f64 {
        if self.is_even() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn label(self) -> &'static str {
        match (self.l, self.r) {
            (1, 1) => "dd",
            (0, 0) => "nn",
            (1, 0) => "dn",
            _ => "nd",
        }
    }
}

impl fmt::Display for BoundaryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (l={}, r={})", self.label().to_uppercase(), self.l, self.r)
    }
}

impl std::str::FromStr for BoundaryConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dd" => Ok(Self::DD),
            "nn" => Ok(Self::NN),
            "dn" => Ok(Self::DN),
            "nd" => Ok(Self::ND),
            other => Err(Error::domain(format!(
                "unknown boundary configuration '{other}' (expected dd, nn, dn or nd)"
            ))),
        }
    }
}

/// Mass, interval length and curvature coupling `beta = xi - 1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    mass: f64,
    length: f64,
    beta: f64,
}

impl FieldSpec {
    pub fn new(mass: f64, length: f64) -> Result<Self> {
        Self::with_beta(mass, length, 0.0)
    }

    pub fn with_beta(mass: f64, length: f64, beta: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::domain(format!("mass must be finite and >= 0, got {mass}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::domain(format!("length must be finite and > 0, got {length}")));
        }
        if !beta.is_finite() {
            return Err(Error::domain(format!("beta must be finite, got {beta}")));
        }
        Ok(FieldSpec { mass, length, beta })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Curvature coupling `xi = beta + 1/4`.
    pub fn xi(&self) -> f64 {
        self.beta + 0.25
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        Self::with_beta(mass, self.length, self.beta)
    }

    pub fn with_length(self, length: f64) -> Result<Self> {
        Self::with_beta(self.mass, length, self.beta)
    }
}

/// A (Weyl, periodic, boundary) decomposition together with its sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Components {
    pub weyl: f64,
    pub periodic: f64,
    pub boundary: f64,
    pub total: f64,
}

/// Energy density or pressure split by classical-path origin.
pub type StressComponents = Components;

impl Components {
    pub fn new(weyl: f64, periodic: f64, boundary: f64) -> Self {
        Components {
            weyl,
            periodic,
            boundary,
            total: weyl + periodic + boundary,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(factor * self.weyl, factor * self.periodic, factor * self.boundary)
    }

    pub fn add(&self, other: &Components) -> Self {
        Self::new(
            self.weyl + other.weyl,
            self.periodic + other.periodic,
            self.boundary + other.boundary,
        )
    }
}

/// Wave number above threshold, or the marker for the empty region `omega < m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Real(f64),
    BelowThreshold,
}

impl Kappa {
    pub fn value(self) -> Option<f64> {
        match self {
            Kappa::Real(k) => Some(k),
            Kappa::BelowThreshold => None,
        }
    }
}

/// `kappa = sqrt(omega^2 - m^2)` for `omega >= m`.
pub fn kappa_of(omega: f64, mass: f64) -> Kappa {
    if omega < mass {
        return Kappa::BelowThreshold;
    }
    // factored form keeps precision just above threshold
    Kappa::Real(((omega - mass) * (omega + mass)).sqrt())
}

/// One frequency sample of a spectral quantity (sigma, rho or N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub omega: f64,
    pub kappa: Option<f64>,
    pub components: Components,
}

impl SpectralPoint {
    pub fn new(omega: f64, mass: f64, components: Components) -> Self {
        SpectralPoint {
            omega,
            kappa: kappa_of(omega, mass).value(),
            components,
        }
    }

    /// `lambda = omega^2`.
    pub fn lambda(&self) -> f64 {
        self.omega * self.omega
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_of(5.0, 3.0), Kappa::Real(4.0));
        assert_eq!(kappa_of(2.0, 2.0), Kappa::Real(0.0));
        assert_eq!(kappa_of(1.0, 2.0), Kappa::BelowThreshold);
    }

    #[test]
    fn boundary_parity_and_signs() {
        assert_eq!(BoundaryConfig::DD.parity(), 0);
        assert_eq!(BoundaryConfig::NN.parity(), 0);
        assert_eq!(BoundaryConfig::DN.parity(), 1);
        assert_eq!(BoundaryConfig::ND.parity(), 1);
        assert_eq!(BoundaryConfig::DD.left_sign(), -1.0);
        assert_eq!(BoundaryConfig::ND.left_sign(), 1.0);
        assert_eq!(BoundaryConfig::DN.period_sign(), -1.0);
        assert!(BoundaryConfig::new(2, 0).is_err());
        assert_eq!("Nd".parse::<BoundaryConfig>().unwrap(), BoundaryConfig::ND);
    }

    #[test]
    fn field_spec_validation() {
        assert!(FieldSpec::new(-1.0, 1.0).is_err());
        assert!(FieldSpec::new(1.0, 0.0).is_err());
        assert!(FieldSpec::with_beta(1.0, 1.0, f64::NAN).is_err());
        let spec = FieldSpec::with_beta(0.0, 2.0, -0.25).unwrap();
        assert_eq!(spec.xi(), 0.0);
    }

    #[test]
    fn components_total() {
        let c = Components::new(1.5, -0.25, 0.125);
        assert_eq!(c.total, 1.375);
        assert_eq!(c.scaled(2.0).total, 2.75);
    }

    proptest! {
        #[test]
        fn kappa_round_trip(mass in 0.0f64..50.0, excess in 0.0f64..100.0) {
            let omega = mass + excess;
            let kappa = kappa_of(omega, mass).value().unwrap();
            let back = (kappa * kappa + mass * mass).sqrt();
            prop_assert!((back - omega).abs() <= 1e-12 * omega.max(1e-300));
        }
    }
}

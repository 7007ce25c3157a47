//! Vacuum energy density, pressure and spectral functions of a massive scalar
//! field on an interval `[0, L]` with Dirichlet or Neumann ends, regularized by
//! an exponential frequency cutoff `t`.
//!
//! Every quantity is split into a Weyl (bulk), periodic (Casimir) and
//! boundary part via the method of images. The exact eigenmodes are kept
//! alongside as an independent oracle.
//!
//! ```
//! use vacuum1d::{energy, BoundaryConfig, FieldSpec};
//!
//! let spec = FieldSpec::new(1.0, 1.0).unwrap();
//! let parts = energy::energy_density(0.1, 0.37, &spec, BoundaryConfig::DD).unwrap();
//! let modes = energy::mode_sum_energy_auto(0.1, 0.37, &spec, BoundaryConfig::DD).unwrap();
//! assert!((parts.total - modes).abs() < 1e-8);
//! ```

pub mod cli;
pub mod energy;
pub mod error;
pub mod model;
pub mod pauli_villars;
pub mod pressure;
pub mod quad;
pub mod series;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{BoundaryConfig, Components, FieldSpec, Kappa, SpectralPoint, StressComponents};

//! Pauli–Villars regularization with a finite set of regulator fields.
//!
//! A spectrum is a list of `(mass, coefficient)` pairs; entry 0 is the
//! physical field with coefficient `+1`. Regularized quantities are the
//! coefficient-weighted sums over the entries. The divergent `1/t^2` and
//! `ln t` pieces of the Weyl terms cancel when `sum f = 0` and
//! `sum f m^2 = 0`; the finite `m^2 ln m` remainder cancels only if
//! `sum f m^2 ln m = 0` as well.
//!
//! Logarithms of a zero mass are dropped: a massless entry contributes
//! nothing to `sum f ln m` or `sum f m^2 ln m`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::energy;
use crate::error::{Error, Result};
use crate::model::{BoundaryConfig, Components, FieldSpec};
use crate::pressure::{self, StressPair};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Fitted growth exponents below this count as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEntry {
    pub mass: f64,
    pub coefficient: f64,
}

/// Physical field plus regulators. Masses need not be ordered or distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSpectrum {
    entries: Vec<MassEntry>,
}

impl MassSpectrum {
    /// Builds a spectrum from `(mass, coefficient)` pairs, physical field first.
    pub fn new(entries: &[(f64, f64)]) -> Result<Self> {
        let Some(&(_, f0)) = entries.first() else {
            return Err(Error::InvalidSpectrum(
                "spectrum needs at least the physical field".into(),
            ));
        };
        if f0 != 1.0 {
            return Err(Error::InvalidSpectrum(format!(
                "physical field must have coefficient +1, got {f0}"
            )));
        }
        let mut zeros = 0;
        for &(m, f) in entries {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("mass must be finite and >= 0, got {m}")));
            }
            if !f.is_finite() {
                return Err(Error::InvalidSpectrum(format!("coefficient must be finite, got {f}")));
            }
            if m == 0.0 {
                zeros += 1;
            }
        }
        if zeros > 1 {
            return Err(Error::InvalidSpectrum("at most one massless entry is allowed".into()));
        }
        Ok(MassSpectrum {
            entries: entries
                .iter()
                .map(|&(mass, coefficient)| MassEntry { mass, coefficient })
                .collect(),
        })
    }

    /// The physical field alone.
    pub fn physical(mass: f64) -> Result<Self> {
        Self::new(&[(mass, 1.0)])
    }

    pub fn entries(&self) -> &[MassEntry] {
        &self.entries
    }

    pub fn physical_mass(&self) -> f64 {
        self.entries[0].mass
    }

    /// Regulator entries (everything after the physical field).
    pub fn regulators(&self) -> &[MassEntry] {
        &self.entries[1..]
    }

    /// Same coefficients with every mass multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let pairs: Vec<_> = self.entries.iter().map(|e| (e.mass * factor, e.coefficient)).collect();
        Self::new(&pairs)
    }

    fn weighted<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.entries.iter().map(|e| e.coefficient * g(e.mass)).sum()
    }
}

/// The moment sums of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    pub sum_f: f64,
    pub sum_f_m2: f64,
    pub sum_f_lnm: f64,
    pub sum_f_m2_lnm: f64,
    /// `sum f m`; its vanishing would remove the integrated boundary energy `-m/4`.
    pub sum_f_m: f64,
}

impl ConstraintResiduals {
    pub fn get(&self, c: Constraint) -> f64 {
        match c {
            Constraint::Sum => self.sum_f,
            Constraint::M2 => self.sum_f_m2,
            Constraint::LnM => self.sum_f_lnm,
            Constraint::M2LnM => self.sum_f_m2_lnm,
        }
    }
}

fn ln_or_zero(m: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m.ln()
    }
}

pub fn residuals(spectrum: &MassSpectrum) -> ConstraintResiduals {
    ConstraintResiduals {
        sum_f: spectrum.weighted(|_| 1.0),
        sum_f_m2: spectrum.weighted(|m| m * m),
        sum_f_lnm: spectrum.weighted(ln_or_zero),
        sum_f_m2_lnm: spectrum.weighted(|m| m * m * ln_or_zero(m)),
        sum_f_m: spectrum.weighted(|m| m),
    }
}

/// A linear condition on the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `sum f = 0`
    Sum,
    /// `sum f m^2 = 0`
    M2,
    /// `sum f ln m = 0`
    LnM,
    /// `sum f m^2 ln m = 0`
    M2LnM,
}

impl Constraint {
    pub const ALL: [Constraint; 4] = [Constraint::Sum, Constraint::M2, Constraint::LnM, Constraint::M2LnM];

    fn weight(self, m: f64) -> f64 {
        match self {
            Constraint::Sum => 1.0,
            Constraint::M2 => m * m,
            Constraint::LnM => ln_or_zero(m),
            Constraint::M2LnM => m * m * ln_or_zero(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Sum => "sum",
            Constraint::M2 => "m2",
            Constraint::LnM => "lnm",
            Constraint::M2LnM => "m2_lnm",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" => Ok(Constraint::Sum),
            "m2" => Ok(Constraint::M2),
            "lnm" => Ok(Constraint::LnM),
            "m2_lnm" | "m2lnm" => Ok(Constraint::M2LnM),
            other => Err(Error::domain(format!(
                "unknown constraint '{other}' (expected sum, m2, lnm or m2_lnm)"
            ))),
        }
    }
}

/// Result of [`solve_coefficients`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSolution {
    pub spectrum: MassSpectrum,
    pub constraints: Vec<Constraint>,
    pub residuals: ConstraintResiduals,
    /// Singular values of the row-normalized constraint matrix.
    pub singular_values: Vec<f64>,
}

impl PvSolution {
    /// Regulator coefficients in input order.
    pub fn coefficients(&self) -> Vec<f64> {
        self.spectrum.regulators().iter().map(|e| e.coefficient).collect()
    }

    /// Largest `|residual|` over the requested constraints.
    pub fn max_residual(&self) -> f64 {
        self.constraints
            .iter()
            .map(|&c| self.residuals.get(c).abs())
            .fold(0.0, f64::max)
    }
}

/// Finds regulator coefficients satisfying `constraints`, with the physical
/// coefficient fixed at `+1`. Underdetermined systems get the minimum-norm
/// solution.
pub fn solve_coefficients(
    physical_mass: f64,
    regulator_masses: &[f64],
    constraints: &[Constraint],
) -> Result<PvSolution> {
    if !(physical_mass >= 0.0 && physical_mass.is_finite()) {
        return Err(Error::InvalidSpectrum(format!(
            "physical mass must be finite and >= 0, got {physical_mass}"
        )));
    }
    for &m in regulator_masses {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("regulator masses must be > 0, got {m}")));
        }
    }
    for (i, &a) in regulator_masses.iter().enumerate() {
        for &b in &regulator_masses[i + 1..] {
            if (a - b).abs() <= 1e-12 * a.max(b) {
                return Err(Error::SingularSystem(format!("repeated regulator mass {a}")));
            }
        }
    }
    let mut constraints: Vec<Constraint> = constraints.to_vec();
    constraints.dedup();
    if constraints.is_empty() {
        return Err(Error::domain("at least one constraint is required"));
    }
    let (rows, cols) = (constraints.len(), regulator_masses.len());
    if rows > cols {
        return Err(Error::Infeasible {
            reason: format!("{rows} constraints but only {cols} regulators"),
            residual: f64::NAN,
        });
    }

    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, &c) in constraints.iter().enumerate() {
        for (j, &m) in regulator_masses.iter().enumerate() {
            a[(i, j)] = c.weight(m);
        }
        b[i] = -c.weight(physical_mass);
        let norm = a.row(i).norm();
        if norm == 0.0 {
            return Err(Error::SingularSystem(format!("constraint {c} has an all-zero row")));
        }
        a.row_mut(i).scale_mut(1.0 / norm);
        b[i] /= norm;
    }

    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * sigma_max)
        .count();
    let f = svd
        .solve(&b, RANK_TOL * sigma_max)
        .map_err(|e| Error::SingularSystem(e.to_string()))?;
    if rank < rows {
        let residual = (&a * &f - &b).norm();
        return Err(Error::Infeasible {
            reason: format!("constraint matrix has rank {rank} < {rows}"),
            residual,
        });
    }

    let mut pairs = vec![(physical_mass, 1.0)];
    pairs.extend(regulator_masses.iter().zip(f.iter()).map(|(&m, &c)| (m, c)));
    let spectrum = MassSpectrum::new(&pairs)?;
    Ok(PvSolution {
        residuals: residuals(&spectrum),
        spectrum,
        constraints,
        singular_values: svd.singular_values.iter().copied().collect(),
    })
}

/// `F(nu) = (1 + nu^2) ln(1 + nu^2) - 2 nu^2 ln nu`.
///
/// For the four-mass `+1, -1, +1, -1` family with `m2^2 = m1^2 + m3^2` and
/// `m3 = nu m1`, the `m^2 ln m` moment is `m1^2 F(nu) / 2`, which stays
/// bounded as `m1 -> inf` only if `F(nu) = 0`.
pub fn obstruction_f(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let s = 1.0 + nu * nu;
    Ok(s * s.ln() - 2.0 * nu * nu * nu.ln())
}

/// `F'(nu) = 2 nu ln((1 + nu^2) / nu^2)`, positive for all `nu`.
pub fn obstruction_f_prime(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(2.0 * nu * (1.0 + 1.0 / (nu * nu)).ln())
}

fn check_nu(nu: f64) -> Result<()> {
    if nu >= 1.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("obstruction function needs nu >= 1, got {nu}")))
    }
}

/// Growth of each moment sum along a mass ladder `M, 2M, 4M, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderGrowth {
    pub sum_f: f64,
    pub sum_f_m2: f64,
    pub sum_f_lnm: f64,
    pub sum_f_m2_lnm: f64,
}

impl LadderGrowth {
    pub fn get(&self, c: Constraint) -> f64 {
        match c {
            Constraint::Sum => self.sum_f,
            Constraint::M2 => self.sum_f_m2,
            Constraint::LnM => self.sum_f_lnm,
            Constraint::M2LnM => self.sum_f_m2_lnm,
        }
    }

    pub fn is_bounded(&self, c: Constraint) -> bool {
        self.get(c) < BOUNDED_SLOPE
    }
}

/// Least-squares slope of `ln|v|` against `ln scale`.
fn growth_exponent(scales: &[f64], values: &[f64]) -> f64 {
    let floor = f64::MIN_POSITIVE.sqrt();
    let xs: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().max(floor).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits growth exponents of the moment sums of `family(M)` for
/// `M = base, 2 base, ..., 2^(steps-1) base`. A sum that cancels to within
/// `1e-12` of the magnitude of its terms counts as zero, so an exactly
/// satisfied constraint reads as flat rather than growing with its roundoff.
pub fn ladder_growth<F>(family: F, base: f64, steps: usize) -> Result<LadderGrowth>
where
    F: Fn(f64) -> Result<MassSpectrum>,
{
    if steps < 2 || base.is_nan() || base <= 0.0 {
        return Err(Error::domain("mass ladder needs base > 0 and at least 2 steps"));
    }
    let scales: Vec<f64> = (0..steps).map(|k| base * 2f64.powi(k as i32)).collect();
    let spectra = scales.iter().map(|&s| family(s)).collect::<Result<Vec<_>>>()?;
    let slope = |c: Constraint| {
        let v: Vec<f64> = spectra
            .iter()
            .map(|sp| {
                let value = sp.weighted(|m| c.weight(m));
                let size: f64 = sp
                    .entries
                    .iter()
                    .map(|e| (e.coefficient * c.weight(e.mass)).abs())
                    .sum();
                if value.abs() <= 1e-12 * size {
                    0.0
                } else {
                    value
                }
            })
            .collect();
        growth_exponent(&scales, &v)
    };
    Ok(LadderGrowth {
        sum_f: slope(Constraint::Sum),
        sum_f_m2: slope(Constraint::M2),
        sum_f_lnm: slope(Constraint::LnM),
        sum_f_m2_lnm: slope(Constraint::M2LnM),
    })
}

/// The `+1, -1, +1, -1` family with massless physical field, masses
/// `(0, m1, sqrt(m1^2 + m3^2), m3)` and `m3 = nu m1`.
pub fn four_mass_family(m1: f64, nu: f64) -> Result<MassSpectrum> {
    let m3 = nu * m1;
    MassSpectrum::new(&[(0.0, 1.0), (m1, -1.0), (m1.hypot(m3), 1.0), (m3, -1.0)])
}

fn field(mass: f64, length: f64, beta: f64) -> Result<FieldSpec> {
    FieldSpec::with_beta(mass, length, beta)
}

/// Regularized Weyl energy and pressure, `(sum f E_Weyl[m], sum f p_Weyl[m])`.
pub fn regularized_weyl(t: f64, spectrum: &MassSpectrum) -> Result<(f64, f64)> {
    let mut e = 0.0;
    let mut p = 0.0;
    for entry in spectrum.entries() {
        e += entry.coefficient * energy::e_weyl(t, entry.mass)?;
        p += entry.coefficient * pressure::p_weyl(t, entry.mass)?;
    }
    Ok((e, p))
}

/// Regularized energy density at `(t, x)` for any boundary configuration.
pub fn regularized_energy(
    t: f64,
    x: f64,
    spectrum: &MassSpectrum,
    length: f64,
    beta: f64,
    bc: BoundaryConfig,
) -> Result<Components> {
    let mut total = Components::zero();
    for entry in spectrum.entries() {
        let spec = field(entry.mass, length, beta)?;
        let mut e = energy::energy_density(t, x, &spec, bc)?;
        if bc.is_even() {
            let beta_term = energy::beta_correction(t, x, &spec, bc)?;
            e = Components::new(e.weyl, e.periodic, e.boundary + beta_term);
        }
        total = total.add(&e.scaled(entry.coefficient));
    }
    Ok(total)
}

/// Regularized energy and pressure for the Dirichlet–Dirichlet slab.
pub fn regularized_stress(
    t: f64,
    x: f64,
    spectrum: &MassSpectrum,
    length: f64,
    beta: f64,
    bc: BoundaryConfig,
) -> Result<StressPair> {
    let mut energy = Components::zero();
    let mut pressure = Components::zero();
    for entry in spectrum.entries() {
        let spec = field(entry.mass, length, beta)?;
        let pair = pressure::stress_pair(t, x, &spec, bc)?;
        energy = energy.add(&pair.energy.scaled(entry.coefficient));
        pressure = pressure.add(&pair.pressure.scaled(entry.coefficient));
    }
    Ok(StressPair { energy, pressure })
}

/// Limit of `E_Weyl,reg - p_Weyl,reg` as `t -> 0` when `sum f = sum f m^2 = 0`:
/// `-(1/2 pi) sum f m^2 (ln(m/2) + gamma)`.
pub fn weyl_trace_limit(spectrum: &MassSpectrum) -> f64 {
    use crate::specfun::EULER_GAMMA;
    -spectrum.weighted(|m| {
        if m == 0.0 {
            0.0
        } else {
            m * m * ((0.5 * m).ln() + EULER_GAMMA)
        }
    }) / (2.0 * std::f64::consts::PI)
}

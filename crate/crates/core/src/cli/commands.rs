use std::f64::consts::PI;

use rayon::prelude::*;

use super::{param, Cell, CliError, RunConfig, Sweep, Table};
use crate::energy::{self, beta_correction, e_bdry, e_per, e_weyl, mode_sum_energy_auto, total_bdry_energy};
use crate::error::{Error, Result};
use crate::model::{BoundaryConfig, FieldSpec};
use crate::pauli_villars::{self, solve_coefficients, PvSolution};
use crate::pressure::{p_bdry, p_bdry_numeric, p_per, p_weyl};
use crate::quad::{self, QuadConfig};
use crate::specfun::{mdint_identity_residual, EULER_GAMMA};
use crate::spectral::{counting_with_oracle, rho_components_abel, sigma_components_abel};

fn field(cfg: &RunConfig) -> Result<FieldSpec> {
    FieldSpec::with_beta(cfg.mass, cfg.length, cfg.beta)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Evaluates `row` at every point in parallel, keeping input order.
fn sweep<F>(columns: &[&'static str], points: &[f64], row: F) -> std::result::Result<Table, CliError>
where
    F: Fn(f64) -> Result<Vec<Cell>> + Sync,
{
    let rows = points.par_iter().map(|&p| row(p)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(columns);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

pub(super) fn density(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let spec = field(cfg)?;
    let (t, bc, length) = (cfg.cutoff_t, cfg.bc, cfg.length);
    let xs: Vec<f64> = if t == 0.0 {
        // the walls are singular without a cutoff
        (0..cfg.grid)
            .map(|i| length * (i + 1) as f64 / (cfg.grid + 1) as f64)
            .collect()
    } else {
        linspace(0.0, length, cfg.grid)
    };
    let columns = ["x", "E_weyl", "E_per", "E_bdry", "E_total", "E_mode_sum_oracle"];
    let weyl = if t > 0.0 { e_weyl(t, spec.mass())? } else { f64::NAN };
    let per = e_per(t, &spec, bc)?;
    sweep(&columns, &xs, |x| {
        let bdry = e_bdry(t, x, &spec, bc)? + beta_correction(t, x, &spec, bc)?;
        let oracle = if t > 0.0 {
            Some(mode_sum_energy_auto(t, x, &spec, bc)?)
        } else {
            None
        };
        Ok(vec![
            x.into(),
            weyl.into(),
            per.into(),
            bdry.into(),
            (weyl + per + bdry).into(),
            oracle.into(),
        ])
    })
}

pub(super) fn spectrum(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let spec = field(cfg)?;
    if cfg.omega_max <= cfg.mass {
        return Err(param(format!(
            "--omega-max = {} must exceed the mass {}",
            cfg.omega_max, cfg.mass
        )));
    }
    let eps = cfg.eps.unwrap_or(crate::spectral::DEFAULT_ABEL_EPS);
    let step = (cfg.omega_max - cfg.mass) / cfg.grid as f64;
    let omegas: Vec<f64> = (0..cfg.grid).map(|i| cfg.mass + step * (i + 1) as f64).collect();
    let columns = ["omega", "kappa", "weyl", "periodic", "boundary", "total"];
    sweep(&columns, &omegas, |omega| {
        let point = match cfg.x {
            Some(x) => sigma_components_abel(omega, x, &spec, cfg.bc, eps)?,
            None => rho_components_abel(omega, &spec, cfg.bc, eps)?,
        };
        let c = point.components;
        Ok(vec![
            omega.into(),
            point.kappa.into(),
            c.weyl.into(),
            c.periodic.into(),
            c.boundary.into(),
            c.total.into(),
        ])
    })
}

pub(super) fn counting(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let spec = field(cfg)?;
    let omegas = linspace(0.0, cfg.omega_max, cfg.grid);
    let columns = ["omega", "N_weyl", "N_per", "N_bdry", "N_total", "exact_count"];
    sweep(&columns, &omegas, |omega| {
        let c = counting_with_oracle(omega, &spec, cfg.bc);
        Ok(vec![
            omega.into(),
            c.n_weyl.into(),
            c.n_per.into(),
            c.n_bdry.into(),
            c.n_total.into(),
            c.exact_count.map_or(Cell::Missing, Cell::Int),
        ])
    })
}

pub(super) fn pressure(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let spec = field(cfg)?;
    let bc = cfg.bc;
    if bc != BoundaryConfig::DD {
        return Err(Error::UnsupportedBoundary(bc).into());
    }
    if cfg.cutoff_t <= 0.0 {
        return Err(param("pressure needs --cutoff-t > 0 (the Weyl term diverges at t = 0)"));
    }
    let row = |t: f64, x: f64, lead: f64| -> Result<Vec<Cell>> {
        let w = p_weyl(t, spec.mass())?;
        let p = p_per(t, &spec, bc)?;
        let b = p_bdry(t, x, &spec, bc)?;
        Ok(vec![lead.into(), w.into(), p.into(), b.into(), (w + p + b).into()])
    };
    match cfg.sweep.unwrap_or(Sweep::X) {
        Sweep::X => {
            let xs = linspace(0.0, cfg.length, cfg.grid);
            sweep(&["x", "p_weyl", "p_per", "p_bdry", "p_total"], &xs, |x| {
                row(cfg.cutoff_t, x, x)
            })
        }
        Sweep::T => {
            let x = cfg.x.unwrap_or(0.5 * cfg.length);
            let ts = logspace(cfg.t_min.unwrap_or(1e-3), cfg.cutoff_t, cfg.grid);
            sweep(&["t", "p_weyl", "p_per", "p_bdry", "p_total"], &ts, |t| row(t, x, t))
        }
    }
}

fn solve(cfg: &RunConfig) -> std::result::Result<PvSolution, CliError> {
    let regs = cfg.regulators.as_deref().unwrap_or_default();
    let constraints = cfg.constraints.as_deref().unwrap_or_default();
    Ok(solve_coefficients(cfg.physical_mass.unwrap_or(0.0), regs, constraints)?)
}

pub(super) fn pv_solve(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let sol = solve(cfg)?;
    let mut table = Table::new(&["name", "value"]);
    for (i, e) in sol.spectrum.entries().iter().enumerate() {
        table.push(vec![format!("mass_{i}").into(), e.mass.into()]);
        table.push(vec![format!("coefficient_{i}").into(), e.coefficient.into()]);
    }
    let r = sol.residuals;
    for (name, v) in [
        ("sum_f", r.sum_f),
        ("sum_f_m2", r.sum_f_m2),
        ("sum_f_lnm", r.sum_f_lnm),
        ("sum_f_m2_lnm", r.sum_f_m2_lnm),
        ("sum_f_m", r.sum_f_m),
        ("max_residual", sol.max_residual()),
    ] {
        table.push(vec![name.into(), v.into()]);
    }
    for (i, s) in sol.singular_values.iter().enumerate() {
        table.push(vec![format!("singular_value_{i}").into(), (*s).into()]);
    }
    Ok(table)
}

pub(super) fn pv_stress(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let sol = solve(cfg)?;
    log::info!("regulator coefficients {:?}", sol.coefficients());
    let x = cfg.x.unwrap_or(0.5 * cfg.length);
    if cfg.cutoff_t <= 0.0 {
        return Err(param("pv-stress needs --cutoff-t > 0"));
    }
    let ts = logspace(cfg.t_min.unwrap_or(1e-4), cfg.cutoff_t, cfg.grid);
    let columns = [
        "t", "E_weyl", "E_per", "E_bdry", "E_total", "p_weyl", "p_per", "p_bdry", "p_total",
    ];
    let spectrum = &sol.spectrum;
    sweep(&columns, &ts, |t| {
        let (e, p) = if cfg.bc == BoundaryConfig::DD {
            let pair = pauli_villars::regularized_stress(t, x, spectrum, cfg.length, cfg.beta, cfg.bc)?;
            (pair.energy, Some(pair.pressure))
        } else {
            let e = pauli_villars::regularized_energy(t, x, spectrum, cfg.length, cfg.beta, cfg.bc)?;
            (e, None)
        };
        let mut row: Vec<Cell> = vec![
            t.into(),
            e.weyl.into(),
            e.periodic.into(),
            e.boundary.into(),
            e.total.into(),
        ];
        match p {
            Some(p) => row.extend([p.weyl, p.periodic, p.boundary, p.total].map(Cell::from)),
            None => row.extend((0..4).map(|_| Cell::Missing)),
        }
        Ok(row)
    })
}

struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
}

impl Check {
    fn row(self) -> Vec<Cell> {
        let pass = self.measured.is_finite() && self.measured <= self.tolerance;
        vec![
            self.name.into(),
            self.measured.into(),
            self.tolerance.into(),
            pass.into(),
        ]
    }
}

pub(super) fn diagnostics(cfg: &RunConfig) -> std::result::Result<Table, CliError> {
    let (m, length, t) = (cfg.mass, cfg.length, cfg.cutoff_t);
    if t <= 0.0 {
        return Err(param("diagnostics needs --cutoff-t > 0"));
    }
    let spec = FieldSpec::new(m, length)?;
    let dd = BoundaryConfig::DD;
    let mut checks = Vec::new();

    let (pw, ew) = (p_weyl(t, m)?, e_weyl(t, m)?);
    let log_term = if m > 0.0 { (0.5 * m * t).ln() + EULER_GAMMA } else { 0.0 };
    checks.push(Check {
        name: "weyl_trace_small_t",
        measured: (pw - ew - m * m / (2.0 * PI) * log_term).abs(),
        tolerance: 1e-3,
    });
    checks.push(Check {
        name: "weyl_sum_small_t",
        measured: (pw + ew - (1.0 / (t * t) - m * m / 4.0) / PI).abs(),
        tolerance: 1e-2,
    });
    checks.push(Check {
        name: "massless_weyl_traceless",
        measured: (p_weyl(t, 0.0)? - e_weyl(t, 0.0)?).abs(),
        tolerance: 0.0,
    });

    let per = p_per(0.0, &spec, dd)?;
    let h = 1e-5 * length;
    let total = |l: f64| -> Result<f64> { Ok(l * e_per(0.0, &spec.with_length(l)?, dd)?) };
    let deriv = (total(length + h)? - total(length - h)?) / (2.0 * h);
    checks.push(Check {
        name: "periodic_virtual_work",
        measured: (per + deriv).abs() / (1.0 + per.abs()),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "massless_pressure_balance",
        measured: (p_per(0.0, &spec.with_mass(0.0)?, dd)? + PI / (24.0 * length * length)).abs(),
        tolerance: 1e-14,
    });
    if m > 0.0 {
        checks.push(Check {
            name: "boundary_pressure_numeric",
            measured: p_bdry_numeric(t.max(0.1), 0.3 * length, &spec, dd)?.abs(),
            tolerance: 1e-8,
        });
        checks.push(Check {
            name: "bessel_integral_identity",
            measured: mdint_identity_residual(m, t.max(0.1))?,
            tolerance: 1e-8,
        });
    }

    let tq = t.max(0.05);
    let x = 0.37 * length;
    let e = energy::energy_density(tq, x, &spec, cfg.bc)?;
    let oracle = mode_sum_energy_auto(tq, x, &spec, cfg.bc)?;
    checks.push(Check {
        name: "decomposition_vs_mode_sum",
        measured: (e.total - oracle).abs() / (1.0 + oracle.abs()),
        tolerance: 1e-8,
    });

    let integral = quad::integrate(
        |x| e_bdry(tq, x, &spec, cfg.bc).unwrap_or(f64::NAN),
        0.0,
        length,
        QuadConfig::default(),
    );
    let want = total_bdry_energy(tq, m, cfg.bc)?;
    checks.push(Check {
        name: "total_boundary_energy",
        measured: (integral.value - want).abs() / want.abs().max(1.0),
        tolerance: 1e-6,
    });

    let mut table = Table::new(&["check", "measured", "tolerance", "pass"]);
    for c in checks {
        table.push(c.row());
    }
    Ok(table)
}

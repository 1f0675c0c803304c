//! Independent referee for Clebsch-evolved states: the relativistic charged
//! Euler residual
//!
//! ```text
//! R⃗ = d(λv⃗)/dt + (1/ρ)∇P₀ − k(v⃗×B⃗ + E⃗)
//! ```
//!
//! evaluated from three stored time levels, never from the evolver's
//! right-hand sides.

mod convergence;

pub use convergence::{
    convergence_study, time_refinement_study, write_report_csv, ChargedEquilibriumScenario, ConvergenceStudy, DtRule,
    EvolvedScenario, OscillatingUniformScenario, ResidualScenario,
};

use serde::Serialize;
use thiserror::Error;

use crate::clebsch::{reconstruct_velocity, ClebschError, ClebschFieldState, Grid, VelocityField};
use crate::spacetime::Vec3;
use crate::thermo::{BarotropicEos, ThermoError};

/// Cells with `ρ < RHO_FLOOR · max ρ` are left out of the norms.
pub const RHO_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("need at least 3 time levels (got {0})")]
    InsufficientLevels(usize),
    #[error("need at least 3 resolutions for an order fit (got {0})")]
    TooFewResolutions(usize),
    #[error("states are inconsistent: {0}")]
    Mismatch(String),
    #[error("every cell is below the density floor")]
    AllMasked,
    #[error("the alternative residual is for neutral fluids only (k = {0})")]
    Charged(f64),
    #[error("residual does not decrease under refinement ({prev} -> {next} at {at}); order fit refused")]
    NonMonotone { prev: f64, next: f64, at: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("equation of state at cell {cell}: {source}")]
    Eos { cell: usize, source: ThermoError },
    #[error(transparent)]
    Clebsch(#[from] ClebschError),
    #[error("report output failed: {0}")]
    Io(#[from] std::io::Error),
}

/// L² and L∞ norms of one vector field over unmasked cells.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TermNorms {
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TermBreakdown {
    /// `d(λv⃗)/dt`
    pub inertia: TermNorms,
    /// `(1/ρ)∇P₀`
    pub pressure: TermNorms,
    /// `−kE⃗`
    pub electric: TermNorms,
    /// `−k v⃗×B⃗`
    pub magnetic: TermNorms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub grid: Grid,
    pub dt: f64,
    /// Time of the middle level.
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    /// Pairwise order against the previous, coarser entry of a study.
    pub order: Option<f64>,
    pub terms: TermBreakdown,
    pub masked_cells: usize,
    #[serde(skip)]
    pub residual: Vec<Vec3>,
}

/// `∂ₜg + v⃗·∇g` at the middle of an odd number of equally spaced levels.
pub fn material_derivative(grid: &Grid, levels: &[&[f64]], v: &[Vec3], dt: f64) -> Result<Vec<f64>, ValidateError> {
    if levels.len() < 3 {
        return Err(ValidateError::InsufficientLevels(levels.len()));
    }
    if levels.len().is_multiple_of(2) {
        return Err(ValidateError::Mismatch("need an odd number of levels".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ValidateError::InvalidParameter(format!("dt must be > 0 (got {dt})")));
    }
    let n = grid.len();
    if levels.iter().any(|l| l.len() != n) || v.len() != n {
        return Err(ValidateError::Mismatch("field length differs from grid".into()));
    }
    let m = levels.len() / 2;
    let (prev, mid, next) = (levels[m - 1], levels[m], levels[m + 1]);
    let adv = grid.advect(v, mid);
    Ok((0..n).map(|i| (next[i] - prev[i]) / (2.0 * dt) + adv[i]).collect())
}

fn material_derivative_vec(grid: &Grid, levels: [&[Vec3]; 3], v: &[Vec3], dt: f64) -> Result<Vec<Vec3>, ValidateError> {
    let mut out = vec![Vec3::zeros(); grid.len()];
    for axis in 0..3 {
        let comp: Vec<Vec<f64>> = levels.iter().map(|l| l.iter().map(|x| x[axis]).collect()).collect();
        if comp.iter().all(|c| c.iter().all(|&x| x == 0.0)) {
            continue;
        }
        let refs: Vec<&[f64]> = comp.iter().map(|c| c.as_slice()).collect();
        for (o, d) in out.iter_mut().zip(material_derivative(grid, &refs, v, dt)?) {
            o[axis] = d;
        }
    }
    Ok(out)
}

/// Checks shared grid/parameters and spacing `dt`, then reconstructs all
/// three velocities.
fn prepare(states: &[ClebschFieldState], dt: f64) -> Result<[VelocityField; 3], ValidateError> {
    if states.len() != 3 {
        return Err(ValidateError::InsufficientLevels(states.len()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ValidateError::InvalidParameter(format!("dt must be > 0 (got {dt})")));
    }
    let s0 = &states[0];
    for s in &states[1..] {
        if s.grid != s0.grid || s.params != s0.params || s.nu_winding != s0.nu_winding {
            return Err(ValidateError::Mismatch("grid, parameters or winding differ".into()));
        }
    }
    let tol = 1e-9 * dt + 64.0 * f64::EPSILON * states[2].t.abs();
    for w in states.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > tol {
            return Err(ValidateError::Mismatch(format!(
                "levels at t = {} and {} are not {dt} apart",
                w[0].t, w[1].t
            )));
        }
    }
    Ok([
        reconstruct_velocity(&states[0])?,
        reconstruct_velocity(&states[1])?,
        reconstruct_velocity(&states[2])?,
    ])
}

fn mask(rho: &[f64]) -> Result<(Vec<bool>, usize), ValidateError> {
    let max = rho.iter().cloned().fold(0.0, f64::max);
    let floor = RHO_FLOOR * max;
    let keep: Vec<bool> = rho.iter().map(|&r| r >= floor && r > 0.0).collect();
    let masked = keep.iter().filter(|k| !**k).count();
    if masked == rho.len() {
        return Err(ValidateError::AllMasked);
    }
    Ok((keep, masked))
}

fn norms(grid: &Grid, field: &[Vec3], keep: &[bool]) -> TermNorms {
    let mut sum = 0.0;
    let mut linf: f64 = 0.0;
    for (f, k) in field.iter().zip(keep) {
        if *k {
            let m = f.norm();
            sum += m * m;
            linf = linf.max(m);
        }
    }
    TermNorms {
        l2: (sum * grid.cell_volume()).sqrt(),
        linf,
    }
}

fn pressure_field(eos: &BarotropicEos, rho0: &[f64]) -> Result<Vec<f64>, ValidateError> {
    rho0.iter()
        .enumerate()
        .map(|(cell, &r)| eos.eval(r).map(|e| e.p0).map_err(|source| ValidateError::Eos { cell, source }))
        .collect()
}

fn finish(grid: Grid, dt: f64, t: f64, terms: [Vec<Vec3>; 4], keep: &[bool], masked: usize) -> ResidualReport {
    let residual: Vec<Vec3> = (0..grid.len())
        .map(|i| {
            if keep[i] {
                terms[0][i] + terms[1][i] + terms[2][i] + terms[3][i]
            } else {
                Vec3::zeros()
            }
        })
        .collect();
    let total = norms(&grid, &residual, keep);
    ResidualReport {
        grid,
        dt,
        t,
        l2: total.l2,
        linf: total.linf,
        order: None,
        terms: TermBreakdown {
            inertia: norms(&grid, &terms[0], keep),
            pressure: norms(&grid, &terms[1], keep),
            electric: norms(&grid, &terms[2], keep),
            magnetic: norms(&grid, &terms[3], keep),
        },
        masked_cells: masked,
        residual,
    }
}

/// Residual of `d(λv⃗)/dt = −(1/ρ)∇P₀ + k(v⃗×B⃗ + E⃗)` at the middle of three
/// consecutive states spaced by `dt`.
pub fn euler_residual(states: &[ClebschFieldState], dt: f64) -> Result<ResidualReport, ValidateError> {
    let vel = prepare(states, dt)?;
    let mid = &states[1];
    let g = mid.grid;
    let k = mid.params.k;
    let (keep, masked) = mask(&mid.rho)?;

    let momentum: Vec<Vec<Vec3>> = vel
        .iter()
        .map(|v| v.v.iter().zip(&v.lambda).map(|(v, l)| v * *l).collect())
        .collect();
    let inertia = material_derivative_vec(&g, [&momentum[0], &momentum[1], &momentum[2]], &vel[1].v, dt)?;

    let p0 = pressure_field(&mid.params.eos, &vel[1].rho0)?;
    let grad_p = g.gradient(&p0);
    let pressure: Vec<Vec3> = grad_p
        .iter()
        .zip(&mid.rho)
        .zip(&keep)
        .map(|((gp, r), k)| if *k { gp / *r } else { Vec3::zeros() })
        .collect();

    let mut electric = vec![Vec3::zeros(); g.len()];
    let mut magnetic = vec![Vec3::zeros(); g.len()];
    if k != 0.0 {
        for i in 0..g.len() {
            let f = mid.params.field.evaluate(&g.position(i), mid.t);
            electric[i] = -f.e * k;
            magnetic[i] = -vel[1].v[i].cross(&f.b) * k;
        }
    }
    Ok(finish(g, dt, mid.t, [inertia, pressure, electric, magnetic], &keep, masked))
}

/// Residual of the neutral form
/// `ρ₀(c² + w₀)(γ/c²) d(γv⃗)/dt + ∇P₀ + (γ²/c²)(dP₀/dt) v⃗`.
///
/// Its `inertia` term is the first product, `pressure` the remaining two.
/// On smooth states it is `ρ` times the residual of [`euler_residual`].
pub fn euler_residual_alt(states: &[ClebschFieldState], dt: f64) -> Result<ResidualReport, ValidateError> {
    if let Some(s) = states.iter().find(|s| s.params.k != 0.0) {
        return Err(ValidateError::Charged(s.params.k));
    }
    let vel = prepare(states, dt)?;
    let mid = &states[1];
    let g = mid.grid;
    let c2 = mid.params.c * mid.params.c;
    let (keep, masked) = mask(&mid.rho)?;

    let u: Vec<Vec<Vec3>> = vel
        .iter()
        .map(|v| v.v.iter().zip(&v.gamma).map(|(v, g)| v * *g).collect())
        .collect();
    let du = material_derivative_vec(&g, [&u[0], &u[1], &u[2]], &vel[1].v, dt)?;
    let p: Vec<Vec<f64>> = vel
        .iter()
        .map(|v| pressure_field(&mid.params.eos, &v.rho0))
        .collect::<Result<_, _>>()?;
    let dp = material_derivative(&g, &[&p[0], &p[1], &p[2]], &vel[1].v, dt)?;
    let grad_p = g.gradient(&p[1]);

    let v = &vel[1];
    let inertia: Vec<Vec3> = (0..g.len())
        .map(|i| du[i] * (v.rho0[i] * (c2 + v.w0[i]) * v.gamma[i] / c2))
        .collect();
    let pressure: Vec<Vec3> = (0..g.len())
        .map(|i| grad_p[i] + v.v[i] * (v.gamma[i] * v.gamma[i] / c2 * dp[i]))
        .collect();
    let zero = vec![Vec3::zeros(); g.len()];
    Ok(finish(g, dt, mid.t, [inertia, pressure, zero.clone(), zero], &keep, masked))
}

/// `∇w₀ − (1/ρ₀)∇P₀` for gridded rest density; zero in exact arithmetic.
pub fn pressure_identity_defect(grid: &Grid, rho0: &[f64], eos: &BarotropicEos) -> Result<Vec<Vec3>, ValidateError> {
    let vals: Vec<_> = rho0
        .iter()
        .enumerate()
        .map(|(cell, &r)| eos.eval(r).map_err(|source| ValidateError::Eos { cell, source }))
        .collect::<Result<_, _>>()?;
    let w0: Vec<f64> = vals.iter().map(|v| v.w0).collect();
    let p0: Vec<f64> = vals.iter().map(|v| v.p0).collect();
    let gw = grid.gradient(&w0);
    let gp = grid.gradient(&p0);
    Ok((0..grid.len()).map(|i| gw[i] - gp[i] / rho0[i]).collect())
}

use rayon::prelude::*;
use thiserror::Error;

use super::{ClebschError, ClebschFieldState};
use crate::spacetime::Vec3;
use crate::thermo::{BarotropicEos, ThermoError};

/// Fraction of `c` that bounds the bracket from above.
const UPPER_BRACKET: f64 = 1.0 - 1e-12;
/// Points in the optional sign-change scan.
const SCAN_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [0, c(1-1e-12)] for |w| = {s}")]
    NoBracket { s: f64 },
    #[error("{count} sign changes found scanning for |w| = {s}; root is not unique")]
    MultipleRoots { s: f64, count: usize },
    #[error("non-finite Clebsch momentum")]
    NonFinite,
    #[error(transparent)]
    Eos(#[from] ThermoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReconstructOptions {
    /// Scan 64 points for extra sign changes before bisecting.
    pub scan_roots: bool,
}

/// Reconstructed kinematics at every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub v: Vec<Vec3>,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub rho0: Vec<f64>,
    /// Rest-frame specific enthalpy at `rho0`.
    pub w0: Vec<f64>,
}

impl VelocityField {
    pub fn max_speed(&self) -> f64 {
        self.v.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `λ(v, ρ)·v − s` together with `γ` and the rest-frame enthalpy.
fn residual(v: f64, s: f64, rho: f64, eos: &BarotropicEos, c: f64) -> Result<(f64, f64, f64), ThermoError> {
    let beta = v / c;
    let g = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    let w0 = eos.eval(rho / g)?.w0;
    let lambda = g * (1.0 + w0 / (c * c));
    Ok((lambda * v - s, g, w0))
}

/// Speed `v ∈ [0, c)` solving `γ(v)(1 + w₀(ρ/γ(v))/c²)·v = s` by bisection
/// down to adjacent floating-point values.
pub fn solve_speed(s: f64, rho: f64, eos: &BarotropicEos, c: f64, scan: bool) -> Result<f64, RootError> {
    if !s.is_finite() || !rho.is_finite() {
        return Err(RootError::NonFinite);
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = c * UPPER_BRACKET;
    let (f_hi, _, _) = residual(hi, s, rho, eos, c)?;
    if !(f_hi > 0.0) {
        return Err(RootError::NoBracket { s });
    }
    // λ ≥ 1, so the root never exceeds s.
    if s < hi {
        let (f_s, _, _) = residual(s, s, rho, eos, c)?;
        if f_s == 0.0 {
            return Ok(s);
        }
        if f_s > 0.0 {
            hi = s;
        }
    }
    if scan {
        let c_hi = c * UPPER_BRACKET;
        let mut count = 0;
        let mut prev = -s;
        for i in 1..=SCAN_POINTS {
            let v = c_hi * i as f64 / SCAN_POINTS as f64;
            let (f, _, _) = residual(v, s, rho, eos, c)?;
            if (f > 0.0) != (prev > 0.0) {
                count += 1;
            }
            prev = f;
        }
        if count > 1 {
            return Err(RootError::MultipleRoots { s, count });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (f, _, _) = residual(mid, s, rho, eos, c)?;
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_lo, _, _) = residual(lo, s, rho, eos, c)?;
    let (f_hi, _, _) = residual(hi, s, rho, eos, c)?;
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

pub fn reconstruct_velocity(state: &ClebschFieldState) -> Result<VelocityField, ClebschError> {
    reconstruct_velocity_with(state, &ReconstructOptions::default())
}

/// Solve `λv⃗ = α∇β + ∇ν − kA⃗` for `v⃗` cell by cell.
/// Velocity, γ, λ, ρ₀ and w₀ at one cell.
type CellSolution = (Vec3, f64, f64, f64, f64);

pub fn reconstruct_velocity_with(
    state: &ClebschFieldState,
    opts: &ReconstructOptions,
) -> Result<VelocityField, ClebschError> {
    let w = state.clebsch_momentum();
    let eos = state.params.eos;
    let c = state.params.c;
    let cells: Result<Vec<CellSolution>, ClebschError> = w
        .par_iter()
        .zip(state.rho.par_iter())
        .enumerate()
        .with_min_len(64)
        .map(|(cell, (w, &rho))| {
            let s = w.norm();
            let speed = solve_speed(s, rho, &eos, c, opts.scan_roots)
                .map_err(|source| ClebschError::Reconstruction { cell, source })?;
            let (_, g, w0) = residual(speed, s, rho, &eos, c)
                .map_err(|source| ClebschError::Eos { cell, source })?;
            let v = if s > 0.0 { w * (speed / s) } else { Vec3::zeros() };
            let lambda = g * (1.0 + w0 / (c * c));
            Ok((v, g, lambda, rho / g, w0))
        })
        .collect();
    let cells = cells?;
    let mut out = VelocityField {
        v: Vec::with_capacity(cells.len()),
        gamma: Vec::with_capacity(cells.len()),
        lambda: Vec::with_capacity(cells.len()),
        rho0: Vec::with_capacity(cells.len()),
        w0: Vec::with_capacity(cells.len()),
    };
    for (v, g, l, r0, w0) in cells {
        out.v.push(v);
        out.gamma.push(g);
        out.lambda.push(l);
        out.rho0.push(r0);
        out.w0.push(w0);
    }
    Ok(out)
}

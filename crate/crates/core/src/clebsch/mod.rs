//! Eulerian Clebsch fields `(ρ, α, β, ν)` for a relativistic charged
//! barotropic fluid on periodic grids.
//!
//! The physical velocity is never stored. It is reconstructed from
//! `λv⃗ = α∇β + ∇ν − kA⃗`, where `λ = γ(1 + w₀/c²)` itself depends on `v⃗`.

mod evolve;
mod grid;
mod lagrangian;
mod reconstruct;
mod snapshot;

pub use evolve::{evolve_step, evolve_step_with, EvolveOptions, Rates};
pub use grid::Grid;
pub use lagrangian::{
    clebsch_four_vectors, coordinate_velocity_lower, reduced_density_point, reduced_lagrangian_density,
    ClebschFourVectors,
};
pub use reconstruct::{
    reconstruct_velocity, reconstruct_velocity_with, solve_speed, ReconstructOptions, RootError, VelocityField,
};
pub use snapshot::{write_snapshot_csv, SnapshotMeta};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacetime::{FieldConfiguration, KinematicsError, Vec3};
use crate::thermo::{BarotropicEos, ThermoError};

#[derive(Debug, Error)]
pub enum ClebschError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field `{name}` has {got} cells, grid has {expected}")]
    FieldLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("negative density {value} at cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("non-finite value in `{name}` at cell {cell}")]
    NonFinite { name: &'static str, cell: usize },
    #[error("field configuration incompatible with grid: {0}")]
    IncompatibleField(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("velocity reconstruction failed at cell {cell}: {source}")]
    Reconstruction { cell: usize, source: RootError },
    #[error("time step {dt} exceeds CFL limit {max_dt}")]
    CflViolation { dt: f64, max_dt: f64 },
    #[error("negative Clebsch four-vector norm {norm} at cell {cell}")]
    NegativeNorm { cell: usize, norm: f64 },
    #[error("equation of state at cell {cell}: {source}")]
    Eos { cell: usize, source: ThermoError },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("snapshot output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("snapshot metadata failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Physical parameters shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Charge-to-mass ratio `e/m`.
    pub k: f64,
    pub c: f64,
    pub eos: BarotropicEos,
    pub field: FieldConfiguration,
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            k: 0.0,
            c: 1.0,
            eos: BarotropicEos::Dust,
            field: FieldConfiguration::Zero,
        }
    }
}

/// Gridded Clebsch fields at one time level.
///
/// `nu` holds the periodic part of `ν`. A uniform background gradient
/// (`nu_winding`) is carried separately so that flows with a nonzero mean
/// momentum fit on the periodic domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ClebschFieldState {
    pub t: f64,
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_winding: Vec3,
    pub params: FluidParams,
}

impl ClebschFieldState {
    pub fn new(
        grid: Grid,
        t: f64,
        rho: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        nu: Vec<f64>,
        params: FluidParams,
    ) -> Result<Self, ClebschError> {
        let s = Self {
            t,
            grid,
            rho,
            alpha,
            beta,
            nu,
            nu_winding: Vec3::zeros(),
            params,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_nu_winding(mut self, winding: Vec3) -> Result<Self, ClebschError> {
        if !winding.iter().all(|w| w.is_finite()) {
            return Err(ClebschError::InvalidParameter("non-finite nu winding".into()));
        }
        if self.grid.dim == 1 && (winding.y != 0.0 || winding.z != 0.0) || winding.z != 0.0 {
            return Err(ClebschError::InvalidParameter(
                "nu winding must lie along grid axes".into(),
            ));
        }
        self.nu_winding = winding;
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.params.c
    }

    pub fn k(&self) -> f64 {
        self.params.k
    }

    pub fn eos(&self) -> &BarotropicEos {
        &self.params.eos
    }

    pub fn field(&self) -> &FieldConfiguration {
        &self.params.field
    }

    pub fn validate(&self) -> Result<(), ClebschError> {
        self.grid.validate()?;
        let p = &self.params;
        if !(p.c.is_finite() && p.c > 0.0) {
            return Err(ClebschError::InvalidParameter(format!("c must be > 0 (got {})", p.c)));
        }
        if !p.k.is_finite() {
            return Err(ClebschError::InvalidParameter("k must be finite".into()));
        }
        p.eos.validate().map_err(|e| ClebschError::InvalidParameter(e.to_string()))?;
        let n = self.grid.len();
        for (name, f) in [
            ("rho", &self.rho),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("nu", &self.nu),
        ] {
            if f.len() != n {
                return Err(ClebschError::FieldLength {
                    name,
                    expected: n,
                    got: f.len(),
                });
            }
            if let Some(cell) = f.iter().position(|x| !x.is_finite()) {
                return Err(ClebschError::NonFinite { name, cell });
            }
        }
        if let Some(cell) = self.rho.iter().position(|&r| r < 0.0) {
            return Err(ClebschError::NegativeDensity {
                cell,
                value: self.rho[cell],
            });
        }
        check_field_compatibility(&p.field, &self.grid, self.t)
    }

    /// `α∇β + ∇ν − kA⃗` at every cell, using the potentials at time `self.t`.
    pub fn clebsch_momentum(&self) -> Vec<Vec3> {
        let gb = self.grid.gradient(&self.beta);
        let gn = self.grid.gradient(&self.nu);
        let k = self.params.k;
        gb.iter()
            .zip(&gn)
            .enumerate()
            .map(|(i, (gb, gn))| {
                let mut w = gb * self.alpha[i] + gn + self.nu_winding;
                if k != 0.0 {
                    let f = self.params.field.evaluate(&self.grid.position(i), self.t);
                    w -= f.a * k;
                }
                w
            })
            .collect()
    }

    /// Total ν including the background winding, at each cell position.
    pub fn nu_total(&self) -> Vec<f64> {
        self.nu
            .iter()
            .enumerate()
            .map(|(i, v)| v + self.nu_winding.dot(&self.grid.position(i)))
            .collect()
    }

    /// `Σρ hᵈ`
    pub fn total_mass(&self) -> f64 {
        self.grid.integrate(&self.rho)
    }
}

/// Potentials must not vary along axes the grid does not resolve, and must
/// be periodic on the grid's domain.
pub fn check_field_compatibility(field: &FieldConfiguration, grid: &Grid, t: f64) -> Result<(), ClebschError> {
    if !field.is_finite() {
        return Err(ClebschError::IncompatibleField("non-finite parameters".into()));
    }
    for axis in grid.dim..3 {
        if !field.is_invariant_along(axis) {
            return Err(ClebschError::IncompatibleField(format!(
                "potentials vary along axis {axis}, which a {}D grid does not resolve",
                grid.dim
            )));
        }
    }
    let l = grid.length;
    for axis in 0..grid.dim {
        for s in 0..5 {
            let frac = s as f64 / 5.0 + 0.037;
            let mut p = Vec3::new(frac * l, 0.61 * l, 0.0);
            if grid.dim == 1 {
                p.y = 0.0;
            }
            let a = field.evaluate(&p, t);
            p[axis] += l;
            let b = field.evaluate(&p, t);
            let scale = 1.0 + a.phi.abs().max(a.a.norm());
            if (a.phi - b.phi).abs() > 1e-9 * scale || (a.a - b.a).norm() > 1e-9 * scale {
                return Err(ClebschError::IncompatibleField(format!(
                    "potentials are not periodic along axis {axis} with period {l}"
                )));
            }
        }
    }
    Ok(())
}

//! Fisher-information quantum Lagrangian
//!
//! ```text
//! ℒ = ρ₀[c√(v_E·v_E) − c²] − (ħ²/2m) ∂^μa₀ ∂_μa₀,   a₀ = √(ρ₀/m)
//! ```
//!
//! and the classical non-relativistic density it is compared with. Only
//! densities are evaluated; no field equations are derived from them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clebsch::{
    clebsch_four_vectors, reconstruct_velocity, reduced_density_point, ClebschError, ClebschFieldState, FluidParams,
    Grid,
};
use crate::presets::gaussian_amplitude;
use crate::spacetime::{FieldConfiguration, Vec3};
use crate::thermo::{BarotropicEos, ThermoError};

#[derive(Debug, Error)]
pub enum FisherError {
    #[error("negative rest density {value} at cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field `{name}` has {got} cells, grid has {expected}")]
    FieldLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("negative four-vector norm {norm} at cell {cell}")]
    NegativeNorm { cell: usize, norm: f64 },
    #[error("equation of state at cell {cell}: {source}")]
    Eos { cell: usize, source: ThermoError },
    #[error(transparent)]
    Clebsch(#[from] ClebschError),
}

/// Rest density and Clebsch labels for the quantum density.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumFieldState {
    pub grid: Grid,
    pub t: f64,
    pub rho0: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_winding: Vec3,
    pub m: f64,
    pub hbar: f64,
    pub c: f64,
}

impl QuantumFieldState {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid,
        t: f64,
        rho0: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        nu: Vec<f64>,
        m: f64,
        hbar: f64,
        c: f64,
    ) -> Result<Self, FisherError> {
        let s = Self {
            grid,
            t,
            rho0,
            alpha,
            beta,
            nu,
            nu_winding: Vec3::zeros(),
            m,
            hbar,
            c,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), FisherError> {
        self.grid.validate()?;
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(FisherError::InvalidParameter(format!("m must be > 0 (got {})", self.m)));
        }
        if !(self.hbar.is_finite() && self.hbar >= 0.0) {
            return Err(FisherError::InvalidParameter(format!("hbar must be >= 0 (got {})", self.hbar)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(FisherError::InvalidParameter(format!("c must be > 0 (got {})", self.c)));
        }
        let n = self.grid.len();
        for (name, f) in [
            ("rho0", &self.rho0),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("nu", &self.nu),
        ] {
            if f.len() != n {
                return Err(FisherError::FieldLength {
                    name,
                    expected: n,
                    got: f.len(),
                });
            }
        }
        check_density(&self.rho0)
    }

    /// Takes the rest density reconstructed from a Clebsch state.
    pub fn from_clebsch(state: &ClebschFieldState, m: f64, hbar: f64) -> Result<Self, FisherError> {
        let vel = reconstruct_velocity(state)?;
        let mut q = Self::new(
            state.grid,
            state.t,
            vel.rho0,
            state.alpha.clone(),
            state.beta.clone(),
            state.nu.clone(),
            m,
            hbar,
            state.params.c,
        )?;
        q.nu_winding = state.nu_winding;
        Ok(q)
    }

    /// Static normalised Gaussian amplitude with flat labels.
    pub fn gaussian_packet(grid: Grid, width: f64, center: f64, m: f64, hbar: f64, c: f64) -> Result<Self, FisherError> {
        let rho0 = grid.sample(|p| m * gaussian_amplitude(p.x - center, width).powi(2));
        let n = grid.len();
        Self::new(grid, 0.0, rho0, vec![0.0; n], vec![0.0; n], vec![0.0; n], m, hbar, c)
    }

    /// `a₀ = √(ρ₀/m)`
    pub fn amplitude(&self) -> Vec<f64> {
        self.rho0.iter().map(|r| (r / self.m).sqrt()).collect()
    }
}

fn check_density(rho0: &[f64]) -> Result<(), FisherError> {
    match rho0.iter().position(|r| !(*r >= 0.0)) {
        Some(cell) => Err(FisherError::NegativeDensity {
            cell,
            value: rho0[cell],
        }),
        None => Ok(()),
    }
}

/// Where `∂ₜρ₀` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeLevels<'a> {
    Static,
    /// Rest densities at `t − dt` and `t + dt`.
    Central { prev: &'a [f64], next: &'a [f64], dt: f64 },
}

/// `−(ħ²/2m)[(∂ₜa₀/c)² − |∇a₀|²]` from an amplitude field.
pub fn fisher_density_from_amplitude(
    grid: &Grid,
    a0: &[f64],
    da0_dt: Option<&[f64]>,
    hbar: f64,
    m: f64,
    c: f64,
) -> Vec<f64> {
    let coef = -hbar * hbar / (2.0 * m);
    let grad = grid.gradient(a0);
    (0..grid.len())
        .map(|i| {
            let at = da0_dt.map_or(0.0, |d| d[i] / c);
            coef * (at * at - grad[i].norm_squared())
        })
        .collect()
}

pub fn fisher_density(state: &QuantumFieldState, levels: &TimeLevels<'_>) -> Result<Vec<f64>, FisherError> {
    state.validate()?;
    let a0 = state.amplitude();
    let rate = match *levels {
        TimeLevels::Static => None,
        TimeLevels::Central { prev, next, dt } => {
            let n = state.grid.len();
            for (name, f) in [("prev", prev), ("next", next)] {
                if f.len() != n {
                    return Err(FisherError::FieldLength {
                        name,
                        expected: n,
                        got: f.len(),
                    });
                }
                check_density(f)?;
            }
            if !(dt.is_finite() && dt > 0.0) {
                return Err(FisherError::InvalidParameter(format!("dt must be > 0 (got {dt})")));
            }
            let m = state.m;
            Some(
                prev.iter()
                    .zip(next)
                    .map(|(p, q)| ((q / m).sqrt() - (p / m).sqrt()) / (2.0 * dt))
                    .collect::<Vec<_>>(),
            )
        }
    };
    Ok(fisher_density_from_amplitude(
        &state.grid,
        &a0,
        rate.as_deref(),
        state.hbar,
        state.m,
        state.c,
    ))
}

/// Whether a classical internal energy is kept next to the Fisher term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuantumMode {
    /// `ε₀ ≡ 0`; the Fisher term replaces the internal energy.
    #[default]
    FisherOnly,
    /// Also subtract `ρ₀ε₀(ρ₀)` for the given equation of state.
    WithInternalEnergy { eos: BarotropicEos },
}

/// Pointwise quantum Lagrangian density. The four-vector `v_E` comes from
/// the Clebsch labels with `ε₀`-free rates, so that at `ħ = 0` the result
/// equals the dust reduced Lagrangian term by term.
pub fn quantum_lagrangian_density(
    state: &QuantumFieldState,
    field: &FieldConfiguration,
    k: f64,
    levels: &TimeLevels<'_>,
    mode: &QuantumMode,
) -> Result<Vec<f64>, FisherError> {
    let fisher = fisher_density(state, levels)?;
    let params = FluidParams {
        k,
        c: state.c,
        eos: BarotropicEos::Dust,
        field: field.clone(),
    };
    // Dust kinematics do not depend on the density itself.
    let cs = ClebschFieldState::new(
        state.grid,
        state.t,
        state.rho0.clone(),
        state.alpha.clone(),
        state.beta.clone(),
        state.nu.clone(),
        params,
    )?
    .with_nu_winding(state.nu_winding)?;
    let fv = clebsch_four_vectors(&cs)?;
    fv.electromagnetic
        .iter()
        .enumerate()
        .map(|(cell, ve)| {
            let norm = ve.norm_sqr();
            if !(norm >= 0.0) {
                return Err(FisherError::NegativeNorm { cell, norm });
            }
            let rho0 = state.rho0[cell];
            let eps0 = match mode {
                QuantumMode::FisherOnly => 0.0,
                QuantumMode::WithInternalEnergy { eos } => {
                    eos.eval(rho0).map_err(|source| FisherError::Eos { cell, source })?.eps0
                }
            };
            Ok(reduced_density_point(rho0, norm, eps0, state.c) + fisher[cell])
        })
        .collect()
}

/// Non-relativistic density `ρ(½v² − ε − c²)` with `ε` taken as `ε₀(ρ)`.
pub fn classical_limit_density(rho: f64, v: &Vec3, eos: &BarotropicEos, c: f64) -> Result<f64, ThermoError> {
    let eps = eos.eval(rho)?.eps0;
    Ok(rho * (0.5 * v.norm_squared() - eps - c * c))
}

/// [`classical_limit_density`] over a field.
pub fn classical_limit_field(rho: &[f64], v: &[Vec3], eos: &BarotropicEos, c: f64) -> Result<Vec<f64>, ThermoError> {
    rho.iter().zip(v).map(|(r, v)| classical_limit_density(*r, v, eos, c)).collect()
}

//! Clebsch four-vectors and the reduced Lagrangian density.
//!
//! Variance: `A_μ = (φ/c, A⃗)` so `A^μ = (φ/c, −A⃗)`. Both `v_C^μ` and
//! `v_E^μ` below are stored with upper indices.

use super::{ClebschError, ClebschFieldState, VelocityField};
use crate::spacetime::{FourVector, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct ClebschFourVectors {
    /// `v_C^μ = ((α∂ₜβ + ∂ₜν)/c, α∇β + ∇ν)`
    pub clebsch: Vec<FourVector>,
    /// `v_E^μ = v_C^μ + kA^μ`
    pub electromagnetic: Vec<FourVector>,
    /// Velocity reconstructed from the same state.
    pub velocity: VelocityField,
}

/// Evaluates both four-vectors at every cell, taking time derivatives from
/// the evolution right-hand sides.
pub fn clebsch_four_vectors(state: &ClebschFieldState) -> Result<ClebschFourVectors, ClebschError> {
    let (rates, velocity) = state.time_derivatives()?;
    let g = &state.grid;
    let c = state.params.c;
    let k = state.params.k;
    let gb = g.gradient(&state.beta);
    let gn = g.gradient(&state.nu);
    let mut clebsch = Vec::with_capacity(g.len());
    let mut electromagnetic = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let a = state.alpha[i];
        let vc = FourVector::from_parts(
            (a * rates.beta[i] + rates.nu[i]) / c,
            gb[i] * a + gn[i] + state.nu_winding,
        );
        let ve = if k != 0.0 {
            let f = state.params.field.evaluate(&g.position(i), state.t);
            vc + f.potential_upper(c).scale(k)
        } else {
            vc
        };
        clebsch.push(vc);
        electromagnetic.push(ve);
    }
    Ok(ClebschFourVectors {
        clebsch,
        electromagnetic,
        velocity,
    })
}

/// Coordinate velocity with a lower index, `v_μ = (c, −v⃗)`.
pub fn coordinate_velocity_lower(v: &Vec3, c: f64) -> FourVector {
    FourVector::from_parts(c, -v)
}

/// `ρ₀[c√(v_E·v_E) − ε₀ − c²]` at one point.
pub fn reduced_density_point(rho0: f64, norm: f64, eps0: f64, c: f64) -> f64 {
    rho0 * (c * norm.sqrt() - eps0 - c * c)
}

/// Reduced Lagrangian density at every cell. On-shell this equals `P₀`.
pub fn reduced_lagrangian_density(state: &ClebschFieldState) -> Result<Vec<f64>, ClebschError> {
    let fv = clebsch_four_vectors(state)?;
    let c = state.params.c;
    fv.electromagnetic
        .iter()
        .enumerate()
        .map(|(cell, ve)| {
            let norm = ve.norm_sqr();
            if !(norm >= 0.0) {
                return Err(ClebschError::NegativeNorm { cell, norm });
            }
            let rho0 = fv.velocity.rho0[cell];
            let eps0 = state
                .params
                .eos
                .eval(rho0)
                .map_err(|source| ClebschError::Eos { cell, source })?
                .eps0;
            Ok(reduced_density_point(rho0, norm, eps0, c))
        })
        .collect()
}

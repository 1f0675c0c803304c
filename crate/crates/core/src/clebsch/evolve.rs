//! Method-of-lines evolution of `(ρ, α, β, ν)` with classical RK4.

use rayon::prelude::*;

use super::reconstruct::{reconstruct_velocity_with, ReconstructOptions, VelocityField};
use super::{ClebschError, ClebschFieldState};

/// Time derivatives of the four evolved fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub rho: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub cfl: f64,
    pub scan_roots: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            scan_roots: false,
        }
    }
}

impl ClebschFieldState {
    /// Right-hand sides for a given reconstructed velocity.
    ///
    /// ```text
    /// ∂ρ/∂t = −∇·(ρv⃗)
    /// ∂α/∂t = −v⃗·∇α,   ∂β/∂t = −v⃗·∇β
    /// ∂ν/∂t = −v⃗·∇ν − (c² + w₀)/γ + k(A⃗·v⃗ − φ)
    /// ```
    pub fn rates_with_velocity(&self, vel: &VelocityField) -> Rates {
        let g = &self.grid;
        let c2 = self.params.c * self.params.c;
        let k = self.params.k;
        let flux: Vec<_> = self.rho.iter().zip(&vel.v).map(|(r, v)| v * *r).collect();
        let rho: Vec<f64> = g.divergence(&flux).into_iter().map(|d| -d).collect();
        let alpha: Vec<f64> = g.advect(&vel.v, &self.alpha).into_iter().map(|d| -d).collect();
        let beta: Vec<f64> = g.advect(&vel.v, &self.beta).into_iter().map(|d| -d).collect();
        let grad_nu = g.gradient(&self.nu);
        let nu = (0..g.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|i| {
                let v = &vel.v[i];
                let mut r = -v.dot(&(grad_nu[i] + self.nu_winding)) - (c2 + vel.w0[i]) / vel.gamma[i];
                if k != 0.0 {
                    let f = self.params.field.evaluate(&g.position(i), self.t);
                    r += k * (f.a.dot(v) - f.phi);
                }
                r
            })
            .collect();
        Rates { rho, alpha, beta, nu }
    }

    /// Reconstructs `v⃗` and evaluates the right-hand sides.
    pub fn time_derivatives(&self) -> Result<(Rates, VelocityField), ClebschError> {
        self.time_derivatives_with(&ReconstructOptions::default())
    }

    pub fn time_derivatives_with(&self, opts: &ReconstructOptions) -> Result<(Rates, VelocityField), ClebschError> {
        let vel = reconstruct_velocity_with(self, opts)?;
        Ok((self.rates_with_velocity(&vel), vel))
    }

    /// Largest `dt` allowed by `dt ≤ cfl·h / max(|v| + c_s)`. Infinite when
    /// nothing propagates.
    pub fn max_stable_dt(&self, vel: &VelocityField, cfl: f64) -> Result<f64, ClebschError> {
        let c = self.params.c;
        let mut fastest: f64 = 0.0;
        for (i, v) in vel.v.iter().enumerate() {
            let cs = self
                .params
                .eos
                .sound_speed(vel.rho0[i], c)
                .map_err(|source| ClebschError::Eos { cell: i, source })?;
            fastest = fastest.max(v.norm() + cs);
        }
        Ok(if fastest > 0.0 {
            cfl * self.grid.spacing() / fastest
        } else {
            f64::INFINITY
        })
    }

    /// `self + dt·r`, without revalidation; used for RK stages.
    fn shifted(&self, r: &Rates, dt: f64) -> ClebschFieldState {
        let axpy = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| x + dt * y).collect();
        ClebschFieldState {
            t: self.t + dt,
            grid: self.grid,
            rho: axpy(&self.rho, &r.rho),
            alpha: axpy(&self.alpha, &r.alpha),
            beta: axpy(&self.beta, &r.beta),
            nu: axpy(&self.nu, &r.nu),
            nu_winding: self.nu_winding,
            params: self.params.clone(),
        }
    }
}

pub fn evolve_step(state: &ClebschFieldState, dt: f64) -> Result<ClebschFieldState, ClebschError> {
    evolve_step_with(state, dt, &EvolveOptions::default())
}

/// One RK4 step; the velocity is reconstructed afresh at every stage.
pub fn evolve_step_with(
    state: &ClebschFieldState,
    dt: f64,
    opts: &EvolveOptions,
) -> Result<ClebschFieldState, ClebschError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ClebschError::InvalidParameter(format!("dt must be > 0 (got {dt})")));
    }
    if !(opts.cfl.is_finite() && opts.cfl > 0.0) {
        return Err(ClebschError::InvalidParameter(format!("cfl must be > 0 (got {})", opts.cfl)));
    }
    let ropts = ReconstructOptions {
        scan_roots: opts.scan_roots,
    };
    let (k1, vel) = state.time_derivatives_with(&ropts)?;
    let max_dt = state.max_stable_dt(&vel, opts.cfl)?;
    if dt > max_dt {
        return Err(ClebschError::CflViolation { dt, max_dt });
    }
    let (k2, _) = state.shifted(&k1, 0.5 * dt).time_derivatives_with(&ropts)?;
    let (k3, _) = state.shifted(&k2, 0.5 * dt).time_derivatives_with(&ropts)?;
    let (k4, _) = state.shifted(&k3, dt).time_derivatives_with(&ropts)?;

    let combine = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..y.len())
            .map(|i| y[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    let next = ClebschFieldState {
        t: state.t + dt,
        grid: state.grid,
        rho: combine(&state.rho, &k1.rho, &k2.rho, &k3.rho, &k4.rho),
        alpha: combine(&state.alpha, &k1.alpha, &k2.alpha, &k3.alpha, &k4.alpha),
        beta: combine(&state.beta, &k1.beta, &k2.beta, &k3.beta, &k4.beta),
        nu: combine(&state.nu, &k1.nu, &k2.nu, &k3.nu, &k4.nu),
        nu_winding: state.nu_winding,
        params: state.params.clone(),
    };
    next.validate()?;
    Ok(next)
}

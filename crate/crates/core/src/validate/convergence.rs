//! Refinement studies of the Euler residual.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{euler_residual, euler_residual_alt, ResidualReport, ValidateError};
use crate::clebsch::{evolve_step_with, ClebschFieldState, EvolveOptions, FluidParams, Grid};
use crate::numerics::log_log_slope;
use crate::presets::{charged_equilibrium_params, InitialCondition};
use crate::spacetime::{FieldConfiguration, Vec3};
use crate::thermo::BarotropicEos;

/// Anything that can produce a residual report at a given resolution and
/// time step.
pub trait ResidualScenario: Sync {
    fn label(&self) -> String;
    fn length(&self) -> f64;
    fn c(&self) -> f64;
    fn residual(&self, n: usize, dt: f64) -> Result<ResidualReport, ValidateError>;
}

/// How `dt` follows the grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DtRule {
    /// `dt = courant·h/c`
    Courant { courant: f64 },
    Fixed { dt: f64 },
}

impl Default for DtRule {
    fn default() -> Self {
        DtRule::Courant { courant: 0.4 }
    }
}

impl DtRule {
    pub fn dt(&self, h: f64, c: f64) -> f64 {
        match *self {
            DtRule::Courant { courant } => courant * h / c,
            DtRule::Fixed { dt } => dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub label: String,
    /// `"h"` for grid refinement, `"dt"` for time-step refinement.
    pub refined: &'static str,
    pub reports: Vec<ResidualReport>,
    pub order_l2: f64,
    pub order_linf: f64,
}

impl ConvergenceStudy {
    fn assemble(
        label: String,
        refined: &'static str,
        steps: Vec<f64>,
        mut reports: Vec<ResidualReport>,
    ) -> Result<Self, ValidateError> {
        for (i, w) in reports.windows(2).enumerate() {
            if !(w[1].l2 < w[0].l2) {
                return Err(ValidateError::NonMonotone {
                    prev: w[0].l2,
                    next: w[1].l2,
                    at: i + 1,
                });
            }
        }
        for i in 1..reports.len() {
            let o = (reports[i - 1].l2 / reports[i].l2).ln() / (steps[i - 1] / steps[i]).ln();
            reports[i].order = Some(o);
        }
        let l2: Vec<f64> = reports.iter().map(|r| r.l2).collect();
        let linf: Vec<f64> = reports.iter().map(|r| r.linf).collect();
        let fit = |y: &[f64]| log_log_slope(&steps, y).unwrap_or(f64::NAN);
        Ok(Self {
            label,
            refined,
            order_l2: fit(&l2),
            order_linf: fit(&linf),
            reports,
        })
    }

    pub fn finest(&self) -> &ResidualReport {
        self.reports.last().expect("a study holds at least three reports")
    }
}

impl fmt::Display for ConvergenceStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} refinement)", self.label, self.refined)?;
        writeln!(f, "{:>6} {:>12} {:>12} {:>12} {:>7}", "n", "dt", "l2", "linf", "order")?;
        for r in &self.reports {
            let o = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
            writeln!(f, "{:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>7}", r.grid.n, r.dt, r.l2, r.linf, o)?;
        }
        write!(f, "fitted order: l2 {:.3}, linf {:.3}", self.order_l2, self.order_linf)
    }
}

/// Joint `(h, dt)` refinement with `dt` from `rule`.
pub fn convergence_study(
    scenario: &dyn ResidualScenario,
    resolutions: &[usize],
    rule: &DtRule,
) -> Result<ConvergenceStudy, ValidateError> {
    if resolutions.len() < 3 {
        return Err(ValidateError::TooFewResolutions(resolutions.len()));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ValidateError::InvalidParameter("resolutions must increase".into()));
    }
    let hs: Vec<f64> = resolutions.iter().map(|&n| scenario.length() / n as f64).collect();
    let reports = resolutions
        .iter()
        .zip(&hs)
        .map(|(&n, &h)| scenario.residual(n, rule.dt(h, scenario.c())))
        .collect::<Result<Vec<_>, _>>()?;
    ConvergenceStudy::assemble(scenario.label(), "h", hs, reports)
}

/// `dt`-only refinement on a fixed grid.
pub fn time_refinement_study(
    scenario: &dyn ResidualScenario,
    n: usize,
    dts: &[f64],
) -> Result<ConvergenceStudy, ValidateError> {
    if dts.len() < 3 {
        return Err(ValidateError::TooFewResolutions(dts.len()));
    }
    if dts.windows(2).any(|w| w[1] >= w[0]) || dts.iter().any(|&d| !(d > 0.0)) {
        return Err(ValidateError::InvalidParameter("time steps must be positive and decreasing".into()));
    }
    let reports = dts
        .iter()
        .map(|&dt| scenario.residual(n, dt))
        .collect::<Result<Vec<_>, _>>()?;
    ConvergenceStudy::assemble(scenario.label(), "dt", dts.to_vec(), reports)
}

/// `n,dt,l2,linf,order_estimate`; the order is empty on the first row.
pub fn write_report_csv<W: Write>(mut w: W, study: &ConvergenceStudy) -> Result<(), ValidateError> {
    writeln!(w, "n,dt,l2,linf,order_estimate")?;
    for r in &study.reports {
        let o = r.order.map(|o| o.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.grid.n, r.dt, r.l2, r.linf, o)?;
    }
    w.flush()?;
    Ok(())
}

/// Evolve a preset to `t_end`, then take the residual over the last three
/// levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedScenario {
    pub ic: InitialCondition,
    pub params: FluidParams,
    pub dim: usize,
    pub length: f64,
    pub t_end: f64,
    /// Use the neutral alternative form instead.
    pub alternative: bool,
    pub options: EvolveOptions,
}

impl EvolvedScenario {
    /// The acoustic preset with `K = 1`, `Γ = 2`, `c = 1` on the unit interval.
    pub fn acoustic(amplitude: f64) -> Self {
        Self {
            ic: InitialCondition::acoustic(amplitude),
            params: FluidParams {
                eos: BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 },
                ..Default::default()
            },
            dim: 1,
            length: 1.0,
            t_end: 0.25,
            alternative: false,
            options: EvolveOptions::default(),
        }
    }

    /// The last three time levels of the run.
    pub fn levels(&self, n: usize, dt: f64) -> Result<Vec<ClebschFieldState>, ValidateError> {
        let grid = Grid::new(self.dim, n, self.length)?;
        let mut s = self.ic.build(grid, &self.params)?;
        let steps = ((self.t_end / dt).round() as usize).max(2);
        let mut hist = Vec::with_capacity(3);
        hist.push(s.clone());
        for _ in 0..steps {
            s = evolve_step_with(&s, dt, &self.options)?;
            if hist.len() == 3 {
                hist.remove(0);
            }
            hist.push(s.clone());
        }
        Ok(hist)
    }
}

impl ResidualScenario for EvolvedScenario {
    fn label(&self) -> String {
        let form = if self.alternative { "alternative" } else { "charged" };
        format!("evolved {} ({form} form)", self.ic.name())
    }

    fn length(&self) -> f64 {
        self.length
    }

    fn c(&self) -> f64 {
        self.params.c
    }

    fn residual(&self, n: usize, dt: f64) -> Result<ResidualReport, ValidateError> {
        let lv = self.levels(n, dt)?;
        if self.alternative {
            euler_residual_alt(&lv, dt)
        } else {
            euler_residual(&lv, dt)
        }
    }
}

/// Fluid at rest held by a periodic electrostatic potential. The exact
/// solution is stationary except for a uniform drift of `ν`, so the
/// residual is pure spatial discretization error.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargedEquilibriumScenario {
    pub params: FluidParams,
    pub rho_ref: f64,
    pub length: f64,
}

impl ChargedEquilibriumScenario {
    pub fn new(amplitude: f64) -> Self {
        Self {
            params: charged_equilibrium_params(amplitude, 1.0),
            rho_ref: 1.0,
            length: 1.0,
        }
    }

    pub fn levels(&self, n: usize, dt: f64) -> Result<Vec<ClebschFieldState>, ValidateError> {
        let grid = Grid::new(1, n, self.length)?;
        let base = InitialCondition::ChargedEquilibrium { rho_ref: self.rho_ref }.build(grid, &self.params)?;
        let w_ref = self.params.eos.eval(self.rho_ref).map_err(|e| ValidateError::InvalidParameter(e.to_string()))?.w0;
        let rate = -(self.params.c * self.params.c + w_ref);
        Ok((0..3)
            .map(|l| {
                let t = (l as f64 - 1.0) * dt;
                let mut s = base.clone();
                s.t = t;
                s.nu.iter_mut().for_each(|nu| *nu = rate * t);
                s
            })
            .collect())
    }
}

impl ResidualScenario for ChargedEquilibriumScenario {
    fn label(&self) -> String {
        "manufactured charged equilibrium".into()
    }

    fn length(&self) -> f64 {
        self.length
    }

    fn c(&self) -> f64 {
        self.params.c
    }

    fn residual(&self, n: usize, dt: f64) -> Result<ResidualReport, ValidateError> {
        euler_residual(&self.levels(n, dt)?, dt)
    }
}

/// Uniform charged fluid in a spatially uniform oscillating potential
/// `A⃗ = a x̂ cos ωt`. The exact solution `λv⃗ = −kA⃗(t)` has no spatial
/// structure, so the residual is pure time-differencing error.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatingUniformScenario {
    pub params: FluidParams,
    pub rho: f64,
    pub length: f64,
    /// Time of the middle level.
    pub t0: f64,
}

impl OscillatingUniformScenario {
    pub fn new(amplitude: f64, omega: f64, eos: BarotropicEos) -> Self {
        Self {
            params: FluidParams {
                k: 1.0,
                c: 1.0,
                eos,
                field: FieldConfiguration::HarmonicWave {
                    amplitude,
                    wave_vector: Vec3::zeros(),
                    polarization: Vec3::x(),
                    omega,
                },
            },
            rho: 1.0,
            length: 1.0,
            t0: 0.3,
        }
    }

    pub fn levels(&self, n: usize, dt: f64) -> Result<Vec<ClebschFieldState>, ValidateError> {
        let grid = Grid::new(1, n, self.length)?;
        let len = grid.len();
        (0..3)
            .map(|l| {
                let t = self.t0 + (l as f64 - 1.0) * dt;
                let mut s = ClebschFieldState::new(
                    grid,
                    t,
                    vec![self.rho; len],
                    vec![0.0; len],
                    vec![0.0; len],
                    vec![0.0; len],
                    self.params.clone(),
                )?;
                s.t = t;
                Ok(s)
            })
            .collect()
    }
}

impl ResidualScenario for OscillatingUniformScenario {
    fn label(&self) -> String {
        "manufactured oscillating uniform flow".into()
    }

    fn length(&self) -> f64 {
        self.length
    }

    fn c(&self) -> f64 {
        self.params.c
    }

    fn residual(&self, n: usize, dt: f64) -> Result<ResidualReport, ValidateError> {
        euler_residual(&self.levels(n, dt)?, dt)
    }
}

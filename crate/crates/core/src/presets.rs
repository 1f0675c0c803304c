//! Named initial conditions for fluid and particle runs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::clebsch::{ClebschError, ClebschFieldState, FluidParams, Grid};
use crate::particles::ParticleState;
use crate::spacetime::{FieldConfiguration, PotentialProfile, Vec3};
use crate::thermo::BarotropicEos;

fn one() -> f64 {
    1.0
}

/// Fluid initial conditions. `rho` is the lab density unless stated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Uniform density at rest with constant labels.
    Static {
        #[serde(default = "one")]
        rho: f64,
        #[serde(default)]
        nu0: f64,
    },
    /// Constant velocity `v0` along x carrying a sinusoidal `α` label.
    UniformFlow {
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "UniformFlowDefaults::v0")]
        v0: f64,
        #[serde(default = "UniformFlowDefaults::label")]
        label_amplitude: f64,
    },
    /// Small density perturbation of a fluid at rest, with nontrivial
    /// labels arranged so that `α∇β + ∇ν = 0` initially.
    Acoustic {
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "AcousticDefaults::amplitude")]
        amplitude: f64,
        #[serde(default = "AcousticDefaults::mode")]
        mode: u32,
        #[serde(default = "AcousticDefaults::label")]
        label_a: f64,
        #[serde(default = "AcousticDefaults::label")]
        label_b: f64,
    },
    /// Fluid at rest whose pressure gradient balances a periodic
    /// electrostatic field, `w₀(x) + kφ(x) = const`. Needs a power law EOS.
    ChargedEquilibrium {
        /// Rest density where `φ = 0`.
        #[serde(default = "one")]
        rho_ref: f64,
    },
    /// Normalised Gaussian amplitude `a₀`, `ρ = m a₀² + background`.
    GaussianPacket {
        #[serde(default = "one")]
        width: f64,
        /// Defaults to the domain centre.
        #[serde(default)]
        center: Option<f64>,
        #[serde(default = "one")]
        mass: f64,
        #[serde(default)]
        background: f64,
    },
}

struct UniformFlowDefaults;
impl UniformFlowDefaults {
    fn v0() -> f64 {
        0.5
    }
    fn label() -> f64 {
        0.1
    }
}

struct AcousticDefaults;
impl AcousticDefaults {
    fn amplitude() -> f64 {
        1e-3
    }
    fn mode() -> u32 {
        1
    }
    fn label() -> f64 {
        0.1
    }
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Static { .. } => "static",
            InitialCondition::UniformFlow { .. } => "uniform_flow",
            InitialCondition::Acoustic { .. } => "acoustic",
            InitialCondition::ChargedEquilibrium { .. } => "charged_equilibrium",
            InitialCondition::GaussianPacket { .. } => "gaussian_packet",
        }
    }

    pub fn acoustic(amplitude: f64) -> Self {
        InitialCondition::Acoustic {
            rho: 1.0,
            amplitude,
            mode: 1,
            label_a: 0.1,
            label_b: 0.1,
        }
    }

    /// Builds the state at `t = 0` on `grid`.
    pub fn build(&self, grid: Grid, params: &FluidParams) -> Result<ClebschFieldState, ClebschError> {
        grid.validate()?;
        let n = grid.len();
        let l = grid.length;
        let bad = |msg: String| ClebschError::InvalidParameter(msg);
        match *self {
            InitialCondition::Static { rho, nu0 } => ClebschFieldState::new(
                grid,
                0.0,
                vec![rho; n],
                vec![0.0; n],
                vec![0.0; n],
                vec![nu0; n],
                params.clone(),
            ),
            InitialCondition::UniformFlow {
                rho,
                v0,
                label_amplitude,
            } => {
                let c = params.c;
                if !(v0.abs() < c) {
                    return Err(bad(format!("v0 must satisfy |v0| < c (got {v0})")));
                }
                let g = 1.0 / (1.0 - (v0 / c).powi(2)).sqrt();
                let w0 = params.eos.eval(rho / g).map_err(|e| bad(e.to_string()))?.w0;
                let lambda = g * (1.0 + w0 / (c * c));
                let kappa = 2.0 * PI / l;
                let alpha = grid.sample(|p| 1.0 + label_amplitude * (kappa * p.x).sin());
                ClebschFieldState::new(grid, 0.0, vec![rho; n], alpha, vec![0.0; n], vec![0.0; n], params.clone())?
                    .with_nu_winding(Vec3::new(lambda * v0, 0.0, 0.0))
            }
            InitialCondition::Acoustic {
                rho,
                amplitude,
                mode,
                label_a: a,
                label_b: b,
            } => {
                if mode == 0 {
                    return Err(bad("mode must be >= 1".into()));
                }
                let kappa = 2.0 * PI * mode as f64 / l;
                let two_d = grid.dim == 2;
                let density = grid.sample(|p| {
                    let shape = if two_d { (kappa * p.y).cos() } else { 1.0 };
                    rho * (1.0 + amplitude * (kappa * p.x).sin() * shape)
                });
                let alpha = grid.sample(|p| 1.0 + a * (kappa * p.x).cos());
                let beta = grid.sample(|p| b * (2.0 * kappa * p.x).sin());
                let nu = grid.sample(|p| {
                    let x = kappa * p.x;
                    -b * ((2.0 * x).sin() + a * (x.sin() + (3.0 * x).sin() / 3.0))
                });
                ClebschFieldState::new(grid, 0.0, density, alpha, beta, nu, params.clone())
            }
            InitialCondition::ChargedEquilibrium { rho_ref } => {
                if params.eos.is_dust() {
                    return Err(bad("charged_equilibrium needs a power_law eos".into()));
                }
                if params.k == 0.0 {
                    return Err(bad("charged_equilibrium needs k != 0".into()));
                }
                let w_ref = params.eos.eval(rho_ref).map_err(|e| bad(e.to_string()))?.w0;
                let mut rho = Vec::with_capacity(n);
                for p in grid.positions() {
                    let phi = params.field.evaluate(&p, 0.0).phi;
                    let w0 = w_ref - params.k * phi;
                    let r = params
                        .eos
                        .rest_density_for_enthalpy(w0)
                        .ok_or_else(|| bad(format!("enthalpy {w0} has no rest density; lower k or the potential")))?;
                    rho.push(r);
                }
                ClebschFieldState::new(grid, 0.0, rho, vec![0.0; n], vec![0.0; n], vec![0.0; n], params.clone())
            }
            InitialCondition::GaussianPacket {
                width,
                center,
                mass,
                background,
            } => {
                if !(width > 0.0 && mass > 0.0) {
                    return Err(bad("width and mass must be > 0".into()));
                }
                let x0 = center.unwrap_or(0.5 * l);
                let rho = grid.sample(|p| mass * gaussian_amplitude(p.x - x0, width).powi(2) + background);
                ClebschFieldState::new(grid, 0.0, rho, vec![0.0; n], vec![0.0; n], vec![0.0; n], params.clone())
            }
        }
    }
}

/// `π^(−1/4) w^(−1/2) exp(−x²/(2w²))`, normalised so that `∫a² dx = 1`.
pub fn gaussian_amplitude(x: f64, width: f64) -> f64 {
    PI.powf(-0.25) / width.sqrt() * (-0.5 * (x / width).powi(2)).exp()
}

/// Fluid parameters that the charged equilibrium preset is usually run with.
pub fn charged_equilibrium_params(amplitude: f64, length: f64) -> FluidParams {
    FluidParams {
        k: 1.0,
        c: 1.0,
        eos: BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 },
        field: FieldConfiguration::Electrostatic {
            profile: PotentialProfile::Cosine {
                amplitude,
                wavenumber: 2.0 * PI / length,
                phase: 0.0,
            },
        },
    }
}

/// Particle initial conditions. Presets other than `custom` also fix the
/// field configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParticlePreset {
    /// Unit charge and mass moving with `u = (u0, 0, 0)` in `B = b0 ẑ`.
    Gyration {
        #[serde(default = "one")]
        u0: f64,
        #[serde(default = "one")]
        b0: f64,
    },
    /// From rest in `E = e0 x̂`.
    ConstantE {
        #[serde(default = "one")]
        e0: f64,
    },
    /// From rest in `E = e0 x̂`, `B = b0 ẑ`; drifts along `−ŷ` at `e0/b0`.
    ExbDrift { e0: f64, b0: f64 },
    /// Uses the scenario's own field configuration.
    Custom { particles: Vec<ParticleState> },
}

impl ParticlePreset {
    pub fn name(&self) -> &'static str {
        match self {
            ParticlePreset::Gyration { .. } => "gyration",
            ParticlePreset::ConstantE { .. } => "constant_e",
            ParticlePreset::ExbDrift { .. } => "exb_drift",
            ParticlePreset::Custom { .. } => "custom",
        }
    }

    /// Particles and the field they move in. `field` is used by `custom` only.
    pub fn build(&self, field: &FieldConfiguration) -> (Vec<ParticleState>, FieldConfiguration) {
        let unit = |u: Vec3| ParticleState {
            x: Vec3::zeros(),
            u,
            m: 1.0,
            e: 1.0,
        };
        match self {
            ParticlePreset::Gyration { u0, b0 } => (
                vec![unit(Vec3::new(*u0, 0.0, 0.0))],
                FieldConfiguration::UniformB { b: Vec3::new(0.0, 0.0, *b0) },
            ),
            ParticlePreset::ConstantE { e0 } => (
                vec![unit(Vec3::zeros())],
                FieldConfiguration::UniformE { e: Vec3::new(*e0, 0.0, 0.0) },
            ),
            ParticlePreset::ExbDrift { e0, b0 } => (
                vec![unit(Vec3::zeros())],
                FieldConfiguration::CrossedEb {
                    e: Vec3::new(*e0, 0.0, 0.0),
                    b: Vec3::new(0.0, 0.0, *b0),
                },
            ),
            ParticlePreset::Custom { particles } => (particles.clone(), field.clone()),
        }
    }
}

/// One line per preset: `(name, description)`.
pub fn preset_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("static", "fluid: uniform density at rest; nu decreases at rate c^2 + w0"),
        ("uniform_flow", "fluid: constant velocity v0 along x advecting a sinusoidal alpha label"),
        ("acoustic", "fluid: small sinusoidal density perturbation at rest (power_law eos)"),
        ("charged_equilibrium", "fluid: pressure balancing a periodic electrostatic potential"),
        ("gaussian_packet", "fluid/fisher: normalised Gaussian amplitude a0 = sqrt(rho0/m)"),
        ("gyration", "particle: cyclotron motion in uniform B"),
        ("constant_e", "particle: acceleration from rest in uniform E"),
        ("exb_drift", "particle: drift in crossed E and B"),
        ("custom", "particle: explicit particle list in the scenario field"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clebsch::reconstruct_velocity;

    #[test]
    fn acoustic_starts_at_rest() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let p = FluidParams {
            eos: BarotropicEos::power_law(1.0, 2.0).unwrap(),
            ..Default::default()
        };
        let s = InitialCondition::acoustic(1e-3).build(g, &p).unwrap();
        let v = reconstruct_velocity(&s).unwrap();
        // Only the stencil's product-rule defect survives.
        assert!(v.max_speed() < 1e-5, "{}", v.max_speed());
    }

    #[test]
    fn uniform_flow_has_requested_speed() {
        let g = Grid::new(1, 32, 1.0).unwrap();
        let p = FluidParams {
            eos: BarotropicEos::power_law(0.3, 1.5).unwrap(),
            ..Default::default()
        };
        let ic = InitialCondition::UniformFlow {
            rho: 2.0,
            v0: 0.3,
            label_amplitude: 0.1,
        };
        let v = reconstruct_velocity(&ic.build(g, &p).unwrap()).unwrap();
        assert!(v.v.iter().all(|v| (v.x - 0.3).abs() < 1e-14));
    }

    #[test]
    fn charged_equilibrium_balances() {
        let g = Grid::new(1, 32, 1.0).unwrap();
        let p = charged_equilibrium_params(1e-3, 1.0);
        let s = InitialCondition::ChargedEquilibrium { rho_ref: 1.0 }.build(g, &p).unwrap();
        for (i, pos) in g.positions().enumerate() {
            let w0 = p.eos.eval(s.rho[i]).unwrap().w0;
            let phi = p.field.evaluate(&pos, 0.0).phi;
            assert!((w0 + phi - 2.0).abs() < 1e-14);
        }
        let dust = FluidParams { eos: BarotropicEos::Dust, ..p };
        assert!(InitialCondition::ChargedEquilibrium { rho_ref: 1.0 }.build(g, &dust).is_err());
    }

    #[test]
    fn gaussian_is_normalised() {
        let g = Grid::new(1, 512, 20.0).unwrap();
        let s = InitialCondition::GaussianPacket {
            width: 1.0,
            center: None,
            mass: 2.0,
            background: 0.0,
        }
        .build(g, &FluidParams::default())
        .unwrap();
        assert!((s.total_mass() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn presets_parse_with_defaults() {
        let ic: InitialCondition = serde_json::from_str(r#"{"preset":"acoustic"}"#).unwrap();
        assert_eq!(ic, InitialCondition::acoustic(1e-3));
        assert!(serde_json::from_str::<InitialCondition>(r#"{"preset":"acoustic","bogus":1}"#).is_err());
        let pp: ParticlePreset = serde_json::from_str(r#"{"preset":"gyration"}"#).unwrap();
        assert_eq!(pp, ParticlePreset::Gyration { u0: 1.0, b0: 1.0 });
    }
}

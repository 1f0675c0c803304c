//! Scenario configuration: JSON parsing, command-line overrides and
//! validation.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use relflow_core::clebsch::{check_field_compatibility, EvolveOptions};
use relflow_core::validate::DtRule;
use relflow_core::{
    BarotropicEos, FieldConfiguration, FluidParams, Grid, InitialCondition, ParticlePreset, ParticleState, QuantumMode,
    Scheme, UnitSystem, Vec3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Particle,
    Fluid,
    EulerCheck,
    Convergence,
    Fisher,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Particle => "particle",
            ScenarioKind::Fluid => "fluid",
            ScenarioKind::EulerCheck => "euler_check",
            ScenarioKind::Convergence => "convergence",
            ScenarioKind::Fisher => "fisher",
        }
    }
}

/// Equation of state as written in a config. Parameters are optional here
/// so that a missing or bad value gets a message naming the key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EosConfig {
    #[default]
    Dust,
    PowerLaw {
        #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
}

impl EosConfig {
    pub fn resolve(&self) -> Result<BarotropicEos> {
        match *self {
            EosConfig::Dust => Ok(BarotropicEos::Dust),
            EosConfig::PowerLaw { k, gamma } => {
                let k = k.ok_or_else(|| anyhow!("eos.K is required for power_law"))?;
                if !(k.is_finite() && k > 0.0) {
                    bail!("eos: K must be > 0 (got {k})");
                }
                let gamma = gamma.ok_or_else(|| anyhow!("eos.Gamma is required for power_law"))?;
                let eos = BarotropicEos::power_law(k, gamma).map_err(|e| anyhow!("eos: {e}"))?;
                Ok(eos)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "GridSpec::default_dim")]
    pub dim: usize,
    #[serde(default = "GridSpec::default_n")]
    pub n: usize,
    #[serde(rename = "L", default = "GridSpec::default_length")]
    pub length: f64,
}

impl GridSpec {
    fn default_dim() -> usize {
        1
    }
    fn default_n() -> usize {
        64
    }
    fn default_length() -> f64 {
        1.0
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 64,
            length: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "IntegratorSpec::default_dt")]
    pub dt: f64,
    #[serde(default = "IntegratorSpec::default_steps")]
    pub n_steps: usize,
    #[serde(default = "IntegratorSpec::default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Scan for several velocity roots before bisecting.
    #[serde(default)]
    pub scan_roots: bool,
}

impl IntegratorSpec {
    fn default_dt() -> f64 {
        1e-3
    }
    fn default_steps() -> usize {
        1000
    }
    fn default_cfl() -> f64 {
        0.4
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            cfl: self.cfl,
            scan_roots: self.scan_roots,
        }
    }
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            n_steps: 1000,
            cfl: 0.4,
            scheme: Scheme::default(),
            scan_roots: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualForm {
    #[default]
    Charged,
    Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    #[default]
    H,
    Dt,
}

/// Residual scenarios with a known exact solution. They fix their own
/// fluid parameters apart from the EOS of `oscillating_uniform`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case", deny_unknown_fields)]
pub enum Manufactured {
    ChargedEquilibrium {
        #[serde(default = "Manufactured::default_eq_amplitude")]
        amplitude: f64,
    },
    OscillatingUniform {
        #[serde(default = "Manufactured::default_osc_amplitude")]
        amplitude: f64,
        #[serde(default = "Manufactured::default_omega")]
        omega: f64,
    },
}

impl Manufactured {
    fn default_eq_amplitude() -> f64 {
        1e-3
    }
    fn default_osc_amplitude() -> f64 {
        0.2
    }
    fn default_omega() -> f64 {
        3.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSpec {
    /// Defaults to `[n/4, n/2, n]`.
    #[serde(default)]
    pub resolutions: Option<Vec<usize>>,
    #[serde(default)]
    pub dt_rule: DtRule,
    /// Evolution time before the residual is taken.
    #[serde(default = "ValidationSpec::default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub form: ResidualForm,
    #[serde(default)]
    pub refine: Refinement,
    /// Time steps for `refine = dt`, coarsest first.
    #[serde(default)]
    pub dts: Option<Vec<f64>>,
    #[serde(default)]
    pub manufactured: Option<Manufactured>,
}

impl ValidationSpec {
    fn default_t_end() -> f64 {
        0.25
    }
}

impl Default for ValidationSpec {
    fn default() -> Self {
        Self {
            resolutions: None,
            dt_rule: DtRule::default(),
            t_end: 0.25,
            form: ResidualForm::default(),
            refine: Refinement::default(),
            dts: None,
            manufactured: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    #[serde(default = "QuantumSpec::one")]
    pub m: f64,
    #[serde(default = "QuantumSpec::one")]
    pub hbar: f64,
    /// Keep `ρ₀ε₀` of the scenario EOS next to the Fisher term.
    #[serde(default)]
    pub internal_energy: bool,
}

impl QuantumSpec {
    fn one() -> f64 {
        1.0
    }
}

impl Default for QuantumSpec {
    fn default() -> Self {
        Self {
            m: 1.0,
            hbar: 1.0,
            internal_energy: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Overridden by `--out`.
    #[serde(default)]
    pub dir: Option<String>,
    /// Write every `stride`-th step.
    #[serde(default = "OutputSpec::default_stride")]
    pub stride: usize,
}

impl OutputSpec {
    fn default_stride() -> usize {
        100
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, stride: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub field: FieldConfiguration,
    #[serde(default)]
    pub eos: EosConfig,
    /// Charge-to-mass ratio of the fluid.
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub initial_condition: Option<InitialCondition>,
    #[serde(default)]
    pub particles: Option<ParticlePreset>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub validation: ValidationSpec,
    #[serde(default)]
    pub quantum: QuantumSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Upper bounds on norms, except `order`, which is a lower bound.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

/// Parse a config document with optional `path=value` overrides applied to
/// the JSON tree first, then validate it.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Scenario> {
    let mut doc: Value = serde_json::from_str(text).context("config is not valid JSON")?;
    for ov in overrides {
        apply_override(&mut doc, ov)?;
    }
    let scenario: Scenario = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("at `{path}`: {}", e.into_inner())
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// `a.b.c=value`. The value is read as JSON when it parses, else as a string.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{spec}` is not of the form key=value"))?;
    if path.is_empty() {
        bail!("override `{spec}` has an empty key");
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (depth, key) in keys.iter().enumerate() {
        let last = depth + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| anyhow!("override `{path}`: `{key}` is not an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| anyhow!("override `{path}`: index {idx} out of range (len {len})"))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => bail!("override `{path}`: `{key}` is inside a non-object value"),
        };
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        bail!("{name} must be > 0 (got {x})");
    }
    Ok(())
}

impl Scenario {
    pub fn c(&self) -> f64 {
        self.units.c
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.dim, self.grid.n, self.grid.length).map_err(|e| anyhow!("grid: {e}"))
    }

    pub fn fluid_params(&self) -> Result<FluidParams> {
        Ok(FluidParams {
            k: self.k,
            c: self.c(),
            eos: self.eos.resolve()?,
            field: self.field.clone(),
        })
    }

    /// Explicit initial condition or the default for the scenario kind.
    pub fn initial_condition(&self) -> InitialCondition {
        if let Some(ic) = &self.initial_condition {
            return ic.clone();
        }
        match self.kind {
            ScenarioKind::EulerCheck | ScenarioKind::Convergence => InitialCondition::acoustic(1e-3),
            ScenarioKind::Fisher => InitialCondition::GaussianPacket {
                width: 0.1 * self.grid.length,
                center: None,
                mass: self.quantum.m,
                background: 0.0,
            },
            _ => InitialCondition::Static { rho: 1.0, nu0: 0.0 },
        }
    }

    /// Explicit particle preset, or one unit particle at rest in `field`.
    pub fn particle_preset(&self) -> ParticlePreset {
        self.particles.clone().unwrap_or(ParticlePreset::Custom {
            particles: vec![ParticleState::at_rest(Vec3::zeros(), 1.0, 1.0)],
        })
    }

    pub fn quantum_mode(&self) -> Result<QuantumMode> {
        Ok(if self.quantum.internal_energy {
            QuantumMode::WithInternalEnergy {
                eos: self.eos.resolve()?,
            }
        } else {
            QuantumMode::FisherOnly
        })
    }

    pub fn resolutions(&self) -> Vec<usize> {
        self.validation
            .resolutions
            .clone()
            .unwrap_or_else(|| vec![self.grid.n / 4, self.grid.n / 2, self.grid.n])
    }

    /// Tolerance keys that the scenario produces a norm for.
    pub fn allowed_tolerances(&self) -> Vec<&'static str> {
        match self.kind {
            ScenarioKind::Particle => {
                let mut keys = vec!["mass_shell"];
                match self.particle_preset() {
                    ParticlePreset::Gyration { .. } => keys.extend(["period", "speed_drift"]),
                    ParticlePreset::ConstantE { .. } => keys.push("closed_form"),
                    ParticlePreset::ExbDrift { .. } => {}
                    ParticlePreset::Custom { .. } => {
                        if matches!(self.field, FieldConfiguration::UniformB { .. }) {
                            keys.push("speed_drift");
                        }
                    }
                }
                keys
            }
            ScenarioKind::Fluid => vec!["mass_drift"],
            ScenarioKind::EulerCheck | ScenarioKind::Convergence => vec!["l2", "linf", "order"],
            ScenarioKind::Fisher => {
                let mut keys = vec!["hbar_zero"];
                if self.gaussian_oracle().is_some() {
                    keys.push("gaussian_integral");
                }
                keys
            }
        }
    }

    /// Width of a Gaussian packet whose `∫(∂ₓa₀)²dx = 1/(2w²)` is known.
    pub fn gaussian_oracle(&self) -> Option<f64> {
        match self.initial_condition() {
            InitialCondition::GaussianPacket {
                width,
                mass,
                background,
                ..
            } if self.grid.dim == 1 && background == 0.0 && mass == self.quantum.m => Some(width),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("units.c", self.units.c)?;
        let params = self.fluid_params()?;
        if !self.k.is_finite() {
            bail!("k must be finite (got {})", self.k);
        }
        if !self.field.is_finite() {
            bail!("field has non-finite parameters");
        }
        let it = &self.integrator;
        positive("integrator.dt", it.dt)?;
        if !(it.cfl > 0.0 && it.cfl <= 1.0) {
            bail!("integrator.cfl must be in (0, 1] (got {})", it.cfl);
        }
        if self.output.stride == 0 {
            bail!("output.stride must be >= 1");
        }
        for (key, &tol) in &self.tolerances {
            if !self.allowed_tolerances().contains(&key.as_str()) {
                bail!(
                    "tolerances.{key} is not produced by this scenario (allowed: {})",
                    self.allowed_tolerances().join(", ")
                );
            }
            if !(tol.is_finite() && tol >= 0.0) {
                bail!("tolerances.{key} must be finite and >= 0 (got {tol})");
            }
        }
        match self.kind {
            ScenarioKind::Particle => {
                if self.initial_condition.is_some() {
                    bail!("initial_condition is for grid scenarios; particle runs use `particles`");
                }
                if !matches!(self.particle_preset(), ParticlePreset::Custom { .. }) && !self.field.is_zero() {
                    bail!("field is fixed by the `{}` preset; drop it or use custom", self.particle_preset().name());
                }
                let (particles, _) = self.particle_preset().build(&self.field);
                if particles.is_empty() {
                    bail!("particles.particles must not be empty");
                }
                for (i, p) in particles.iter().enumerate() {
                    positive(&format!("particles.particles[{i}].m"), p.m)?;
                }
            }
            _ => {
                if self.particles.is_some() {
                    bail!("particles is only used by particle scenarios");
                }
                let grid = self.grid()?;
                check_field_compatibility(&self.field, &grid, 0.0).map_err(|e| anyhow!("field: {e}"))?;
                let v = &self.validation;
                if matches!(self.kind, ScenarioKind::EulerCheck | ScenarioKind::Convergence) {
                    positive("validation.t_end", v.t_end)?;
                    if let DtRule::Courant { courant } = v.dt_rule {
                        positive("validation.dt_rule.courant", courant)?;
                    }
                    if let DtRule::Fixed { dt } = v.dt_rule {
                        positive("validation.dt_rule.dt", dt)?;
                    }
                }
                if matches!(self.kind, ScenarioKind::EulerCheck | ScenarioKind::Convergence) && v.refine == Refinement::H {
                    let res = self.resolutions();
                    if res.len() < 3 {
                        bail!("validation.resolutions needs at least 3 entries (got {})", res.len());
                    }
                    if res.windows(2).any(|w| w[1] <= w[0]) {
                        bail!("validation.resolutions must be strictly increasing");
                    }
                    if res[0] < 8 {
                        bail!("validation.resolutions entries must be >= 8 (got {})", res[0]);
                    }
                }
                if self.kind == ScenarioKind::EulerCheck && v.manufactured.is_some() {
                    bail!("validation.manufactured is for convergence scenarios");
                }
                if v.refine == Refinement::Dt {
                    if self.kind != ScenarioKind::Convergence {
                        bail!("validation.refine = dt is for convergence scenarios");
                    }
                    let dts = v.dts.as_ref().ok_or_else(|| anyhow!("validation.dts is required when refine = dt"))?;
                    if dts.len() < 3 {
                        bail!("validation.dts needs at least 3 entries (got {})", dts.len());
                    }
                    for &dt in dts {
                        positive("validation.dts entries", dt)?;
                    }
                    if dts.windows(2).any(|w| w[1] >= w[0]) {
                        bail!("validation.dts must be strictly decreasing");
                    }
                }
                if v.form == ResidualForm::Alternative && self.k != 0.0 {
                    bail!("validation.form = alternative needs k = 0 (got {})", self.k);
                }
                if self.kind == ScenarioKind::Fisher {
                    positive("quantum.m", self.quantum.m)?;
                    if !(self.quantum.hbar.is_finite() && self.quantum.hbar >= 0.0) {
                        bail!("quantum.hbar must be >= 0 (got {})", self.quantum.hbar);
                    }
                }
                if v.manufactured.is_none() {
                    self.initial_condition()
                        .build(grid, &params)
                        .map_err(|e| anyhow!("initial_condition: {e}"))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_config(text, &[])
    }

    #[test]
    fn minimal_particle_defaults() {
        let s = parse(r#"{"kind":"particle","field":{"kind":"zero"}}"#).unwrap();
        assert_eq!(s.c(), 1.0);
        assert_eq!(s.integrator.dt, 1e-3);
        assert_eq!(s.integrator.scheme, Scheme::Boris);
    }

    #[test]
    fn power_law_binding() {
        let s = parse(r#"{"kind":"fluid","eos":{"kind":"power_law","K":1,"Gamma":2}}"#).unwrap();
        assert_eq!(s.eos.resolve().unwrap(), BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 });
    }

    #[test]
    fn negative_k_names_the_key() {
        let err = parse(r#"{"kind":"fluid","eos":{"kind":"power_law","K":-1}}"#).unwrap_err();
        assert!(err.to_string().contains("K must be > 0"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse(r#"{"kind":"fluid","grid":{"n":32,"size":2}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid") && msg.contains("size"), "{msg}");
        assert!(parse(r#"{"kind":"fluid","bogus":1}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let texts = [
            r#"{"kind":"particle","particles":{"preset":"gyration","u0":2.0},"tolerances":{"period":1e-6}}"#,
            r#"{"kind":"euler_check","eos":{"kind":"power_law","K":1,"Gamma":2},"grid":{"n":128}}"#,
            r#"{"kind":"convergence","validation":{"manufactured":{"scenario":"charged_equilibrium"}}}"#,
            r#"{"kind":"fisher","quantum":{"hbar":0.5},"k":0.5,"field":{"kind":"harmonic_wave","amplitude":0.1,"wave_vector":[6.283185307179586,0,0],"polarization":[0,1,0],"omega":1}}"#,
        ];
        for t in texts {
            let a = parse(t).unwrap();
            let text = serde_json::to_string(&a).unwrap();
            let b = parse(&text).unwrap();
            assert_eq!(a, b, "{text}");
        }
    }

    #[test]
    fn overrides_edit_nested_keys() {
        let s = parse_config(
            r#"{"kind":"fluid"}"#,
            &["grid.n=32".into(), "integrator.scheme=rk4".into(), "eos.kind=dust".into()],
        )
        .unwrap();
        assert_eq!(s.grid.n, 32);
        assert_eq!(s.integrator.scheme, Scheme::Rk4);
        let err = parse_config(r#"{"kind":"fluid"}"#, &["grid.n".into()]).unwrap_err();
        assert!(err.to_string().contains("key=value"));
    }

    #[test]
    fn tolerance_keys_follow_the_scenario() {
        let err = parse(r#"{"kind":"fluid","tolerances":{"period":1}}"#).unwrap_err();
        assert!(err.to_string().contains("tolerances.period"), "{err}");
        assert!(parse(r#"{"kind":"fluid","tolerances":{"mass_drift":1e-12}}"#).is_ok());
    }

    #[test]
    fn bad_preset_parameters_are_config_errors() {
        let err = parse(r#"{"kind":"fluid","initial_condition":{"preset":"uniform_flow","v0":2}}"#).unwrap_err();
        assert!(err.to_string().contains("v0"), "{err}");
        let err = parse(r#"{"kind":"fluid","grid":{"n":2}}"#).unwrap_err();
        assert!(err.to_string().contains("grid"), "{err}");
    }
}

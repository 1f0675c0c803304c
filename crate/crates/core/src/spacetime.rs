//! Minkowski kinematics and prescribed electromagnetic potentials.
//!
//! The metric signature is fixed to (+,−,−,−). Index 0 of a [`FourVector`]
//! is the temporal component (`x0 = c t` for positions).

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Spatial three-vector.
pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("superluminal speed {speed} for c = {c}")]
    Superluminal { speed: f64, c: f64 },
    #[error("non-finite velocity component")]
    NonFinite,
    #[error("invalid speed of light {0}")]
    InvalidC(f64),
}

/// Unit system context. Only the speed of light is needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSystem {
    #[serde(default = "UnitSystem::natural_c")]
    pub c: f64,
}

impl UnitSystem {
    pub const SI_C: f64 = 299_792_458.0;

    fn natural_c() -> f64 {
        1.0
    }

    pub fn natural() -> Self {
        Self { c: 1.0 }
    }

    pub fn si() -> Self {
        Self { c: Self::SI_C }
    }

    pub fn new(c: f64) -> Result<Self, KinematicsError> {
        if c.is_finite() && c > 0.0 {
            Ok(Self { c })
        } else {
            Err(KinematicsError::InvalidC(c))
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::natural()
    }
}

/// Four real components, index 0 temporal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self([x0, x1, x2, x3])
    }

    pub fn from_parts(temporal: f64, spatial: Vec3) -> Self {
        Self([temporal, spatial.x, spatial.y, spatial.z])
    }

    pub fn temporal(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vec3 {
        Vec3::new(self.0[1], self.0[2], self.0[3])
    }

    /// Raise or lower an index: flips the sign of the spatial components.
    pub fn flip_index(&self) -> Self {
        Self([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    /// `a·a` with the Minkowski metric.
    pub fn norm_sqr(&self) -> f64 {
        minkowski_dot(self, self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for FourVector {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for FourVector {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Minkowski product, `a·b = a0 b0 − a⃗·b⃗`.
impl Mul for FourVector {
    type Output = f64;

    fn mul(self, rhs: Self) -> f64 {
        minkowski_dot(&self, &rhs)
    }
}

/// Returns `a0·b0 − a⃗·b⃗`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Lorentz factor `1/√(1 − v²/c²)` for a subluminal velocity.
pub fn gamma(v: &Vec3, c: f64) -> Result<f64, KinematicsError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(KinematicsError::InvalidC(c));
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(KinematicsError::NonFinite);
    }
    let speed = v.norm();
    if speed >= c {
        return Err(KinematicsError::Superluminal { speed, c });
    }
    let beta2 = v.norm_squared() / (c * c);
    Ok(1.0 / (1.0 - beta2).sqrt())
}

/// `γ(c, v⃗)`; satisfies `u·u = c²`.
pub fn four_velocity(v: &Vec3, c: f64) -> Result<FourVector, KinematicsError> {
    let g = gamma(v, c)?;
    Ok(FourVector::from_parts(g * c, v * g))
}

/// Lorentz factor from the reduced momentum `u⃗ = γv⃗`. Never fails.
pub fn gamma_from_momentum(u: &Vec3, c: f64) -> f64 {
    (1.0 + u.norm_squared() / (c * c)).sqrt()
}

/// Coordinate velocity from `u⃗ = γv⃗`; always subluminal.
pub fn velocity_from_momentum(u: &Vec3, c: f64) -> Vec3 {
    u / gamma_from_momentum(u, c)
}

/// One-dimensional electrostatic potential profile `φ(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialProfile {
    /// `φ(x) = Σ coeffs[i]·xⁱ`
    Polynomial { coeffs: Vec<f64> },
    /// `φ(x) = amplitude·cos(wavenumber·x + phase)`
    Cosine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl PotentialProfile {
    fn value_and_slope(&self, x: f64) -> (f64, f64) {
        match self {
            PotentialProfile::Polynomial { coeffs } => {
                // Horner for the value and the derivative together.
                let mut p = 0.0;
                let mut dp = 0.0;
                for &c in coeffs.iter().rev() {
                    dp = dp * x + p;
                    p = p * x + c;
                }
                (p, dp)
            }
            PotentialProfile::Cosine {
                amplitude,
                wavenumber,
                phase,
            } => {
                let arg = wavenumber * x + phase;
                (amplitude * arg.cos(), -amplitude * wavenumber * arg.sin())
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            PotentialProfile::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            PotentialProfile::Cosine {
                amplitude,
                wavenumber,
                phase,
            } => amplitude.is_finite() && wavenumber.is_finite() && phase.is_finite(),
        }
    }
}

/// Closed catalog of prescribed electromagnetic potentials `(φ, A⃗)`.
///
/// Gauges: uniform E uses `φ = −E⃗·r⃗`, uniform B uses `A⃗ = ½ B⃗×r⃗`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfiguration {
    #[default]
    Zero,
    UniformE { e: Vec3 },
    UniformB { b: Vec3 },
    CrossedEb { e: Vec3, b: Vec3 },
    /// `A⃗ = amplitude·p̂·cos(k⃗·r⃗ − ωt)`, `φ = 0`.
    HarmonicWave {
        amplitude: f64,
        wave_vector: Vec3,
        polarization: Vec3,
        omega: f64,
    },
    /// `φ = φ(x)`, `A⃗ = 0`.
    Electrostatic { profile: PotentialProfile },
}

/// Potentials and fields at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValues {
    pub e: Vec3,
    pub b: Vec3,
    pub phi: f64,
    pub a: Vec3,
}

impl FieldValues {
    pub fn zero() -> Self {
        Self {
            e: Vec3::zeros(),
            b: Vec3::zeros(),
            phi: 0.0,
            a: Vec3::zeros(),
        }
    }

    /// Covariant potential `A_α = (φ/c, A⃗)`.
    pub fn potential_lower(&self, c: f64) -> FourVector {
        FourVector::from_parts(self.phi / c, self.a)
    }

    /// Contravariant potential `A^α = (φ/c, −A⃗)`.
    pub fn potential_upper(&self, c: f64) -> FourVector {
        self.potential_lower(c).flip_index()
    }
}

impl FieldConfiguration {
    pub fn is_zero(&self) -> bool {
        matches!(self, FieldConfiguration::Zero)
    }

    pub fn is_finite(&self) -> bool {
        let fin = |v: &Vec3| v.iter().all(|x| x.is_finite());
        match self {
            FieldConfiguration::Zero => true,
            FieldConfiguration::UniformE { e } => fin(e),
            FieldConfiguration::UniformB { b } => fin(b),
            FieldConfiguration::CrossedEb { e, b } => fin(e) && fin(b),
            FieldConfiguration::HarmonicWave {
                amplitude,
                wave_vector,
                polarization,
                omega,
            } => amplitude.is_finite() && fin(wave_vector) && fin(polarization) && omega.is_finite(),
            FieldConfiguration::Electrostatic { profile } => profile.is_finite(),
        }
    }

    /// Whether `φ` and `A⃗` are independent of coordinate `axis` (0, 1, 2).
    pub fn is_invariant_along(&self, axis: usize) -> bool {
        let unit = Vec3::ith(axis, 1.0);
        match self {
            FieldConfiguration::Zero => true,
            FieldConfiguration::UniformE { e } => e[axis] == 0.0,
            FieldConfiguration::UniformB { b } => b.cross(&unit) == Vec3::zeros(),
            FieldConfiguration::CrossedEb { e, b } => {
                e[axis] == 0.0 && b.cross(&unit) == Vec3::zeros()
            }
            FieldConfiguration::HarmonicWave {
                amplitude,
                wave_vector,
                ..
            } => *amplitude == 0.0 || wave_vector[axis] == 0.0,
            FieldConfiguration::Electrostatic { .. } => axis != 0,
        }
    }

    /// Potentials and their exact analytic derivatives at `(x⃗, t)`.
    pub fn evaluate(&self, x: &Vec3, t: f64) -> FieldValues {
        match self {
            FieldConfiguration::Zero => FieldValues::zero(),
            FieldConfiguration::UniformE { e } => FieldValues {
                e: *e,
                b: Vec3::zeros(),
                phi: -e.dot(x),
                a: Vec3::zeros(),
            },
            FieldConfiguration::UniformB { b } => FieldValues {
                e: Vec3::zeros(),
                b: *b,
                phi: 0.0,
                a: 0.5 * b.cross(x),
            },
            FieldConfiguration::CrossedEb { e, b } => FieldValues {
                e: *e,
                b: *b,
                phi: -e.dot(x),
                a: 0.5 * b.cross(x),
            },
            FieldConfiguration::HarmonicWave {
                amplitude,
                wave_vector,
                polarization,
                omega,
            } => {
                let phase = wave_vector.dot(x) - omega * t;
                let (s, c) = phase.sin_cos();
                let p = polarization * *amplitude;
                // E = −∂A/∂t, B = ∇×A = ∇cos(·) × p
                FieldValues {
                    e: -p * (omega * s),
                    b: -wave_vector.cross(&p) * s,
                    phi: 0.0,
                    a: p * c,
                }
            }
            FieldConfiguration::Electrostatic { profile } => {
                let (phi, slope) = profile.value_and_slope(x.x);
                FieldValues {
                    e: Vec3::new(-slope, 0.0, 0.0),
                    b: Vec3::zeros(),
                    phi,
                    a: Vec3::zeros(),
                }
            }
        }
    }
}

/// Free-function form of [`FieldConfiguration::evaluate`].
pub fn evaluate_fields(cfg: &FieldConfiguration, x: &Vec3, t: f64) -> FieldValues {
    cfg.evaluate(x, t)
}

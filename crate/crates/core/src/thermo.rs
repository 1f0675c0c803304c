//! Barotropic equations of state and rest-frame/lab-frame conversions.
//!
//! All specific quantities (subscript 0) live in the fluid element's rest
//! frame. Closed-form derivatives are used throughout; nothing here
//! differentiates numerically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacetime::{gamma, KinematicsError, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("negative rest density {0}")]
    NegativeDensity(f64),
    #[error("non-finite density")]
    NonFinite,
    #[error("power law with Gamma = {gamma} is singular at zero density")]
    Degenerate { gamma: f64 },
    #[error("K must be > 0 (got {0})")]
    InvalidK(f64),
    #[error("Gamma must be > 1 (got {0})")]
    InvalidGamma(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Barotropic equation of state `ε₀(ρ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BarotropicEos {
    /// Pressureless matter, `ε₀ = 0`.
    #[default]
    Dust,
    /// `ε₀ = K ρ₀^(Γ−1) / (Γ−1)`, `P₀ = K ρ₀^Γ`.
    PowerLaw {
        #[serde(rename = "K")]
        k: f64,
        #[serde(rename = "Gamma")]
        gamma: f64,
    },
}

/// Rest-frame thermodynamic state at one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosValues {
    /// Specific internal energy `ε₀`.
    pub eps0: f64,
    /// Specific enthalpy `w₀ = ∂(ρ₀ε₀)/∂ρ₀`.
    pub w0: f64,
    /// Pressure `P₀ = ρ₀² ∂ε₀/∂ρ₀`.
    pub p0: f64,
    pub dw0_drho0: f64,
    pub dp0_drho0: f64,
}

impl EosValues {
    const ZERO: EosValues = EosValues {
        eps0: 0.0,
        w0: 0.0,
        p0: 0.0,
        dw0_drho0: 0.0,
        dp0_drho0: 0.0,
    };
}

impl BarotropicEos {
    pub fn power_law(k: f64, gamma: f64) -> Result<Self, ThermoError> {
        let eos = BarotropicEos::PowerLaw { k, gamma };
        eos.validate()?;
        Ok(eos)
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        match *self {
            BarotropicEos::Dust => Ok(()),
            BarotropicEos::PowerLaw { k, gamma } => {
                if !(k.is_finite() && k > 0.0) {
                    Err(ThermoError::InvalidK(k))
                } else if !(gamma.is_finite() && gamma > 1.0) {
                    Err(ThermoError::InvalidGamma(gamma))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_dust(&self) -> bool {
        matches!(self, BarotropicEos::Dust)
    }

    pub fn eval(&self, rho0: f64) -> Result<EosValues, ThermoError> {
        if rho0.is_nan() || rho0.is_infinite() {
            return Err(ThermoError::NonFinite);
        }
        if rho0 < 0.0 {
            return Err(ThermoError::NegativeDensity(rho0));
        }
        match *self {
            BarotropicEos::Dust => Ok(EosValues::ZERO),
            BarotropicEos::PowerLaw { k, gamma } => {
                if rho0 == 0.0 {
                    if gamma < 2.0 {
                        return Err(ThermoError::Degenerate { gamma });
                    }
                    let dw = if gamma == 2.0 { k * gamma } else { 0.0 };
                    return Ok(EosValues {
                        dw0_drho0: dw,
                        ..EosValues::ZERO
                    });
                }
                // One shared power keeps w₀ = ε₀ + P₀/ρ₀ tight in floating point.
                let q = rho0.powf(gamma - 1.0);
                let eps0 = k * q / (gamma - 1.0);
                let w0 = k * gamma * q / (gamma - 1.0);
                let p0 = k * rho0 * q;
                Ok(EosValues {
                    eps0,
                    w0,
                    p0,
                    dw0_drho0: k * gamma * q / rho0,
                    dp0_drho0: k * gamma * q,
                })
            }
        }
    }

    /// Inverse of `w₀(ρ₀)`. Dust has no inverse and returns `None`.
    pub fn rest_density_for_enthalpy(&self, w0: f64) -> Option<f64> {
        match *self {
            BarotropicEos::Dust => None,
            BarotropicEos::PowerLaw { k, gamma } => {
                if w0 < 0.0 {
                    return None;
                }
                Some(((gamma - 1.0) * w0 / (k * gamma)).powf(1.0 / (gamma - 1.0)))
            }
        }
    }

    /// Relativistic sound speed `√(dP₀/de₀)`, with `de₀/dρ₀ = c² + w₀`.
    pub fn sound_speed(&self, rho0: f64, c: f64) -> Result<f64, ThermoError> {
        let v = self.eval(rho0)?;
        let cs2 = c * c * v.dp0_drho0 / (c * c + v.w0);
        Ok(cs2.max(0.0).sqrt().min(c))
    }
}

/// Free-function form of [`BarotropicEos::eval`].
pub fn eos_eval(eos: &BarotropicEos, rho0: f64) -> Result<EosValues, ThermoError> {
    eos.eval(rho0)
}

/// Rest density from lab density, `ρ₀ = ρ/γ`.
pub fn lab_to_rest(rho: f64, v: &Vec3, c: f64) -> Result<f64, ThermoError> {
    if rho < 0.0 {
        return Err(ThermoError::NegativeDensity(rho));
    }
    Ok(rho / gamma(v, c)?)
}

/// Everything the fluid equations need at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameQuantities {
    pub rho: f64,
    pub rho0: f64,
    pub gamma: f64,
    pub w0: f64,
    pub eps0: f64,
    pub p0: f64,
    /// Rest-frame energy density `e₀ = ρ₀c² + ρ₀ε₀`.
    pub e0: f64,
    /// `γ(1 + w₀/c²)`
    pub lambda: f64,
    /// `1 + w₀/c²`
    pub bar_lambda: f64,
}

impl FrameQuantities {
    pub fn new(rho: f64, v: &Vec3, eos: &BarotropicEos, c: f64) -> Result<Self, ThermoError> {
        let g = gamma(v, c)?;
        Self::from_gamma(rho, g, eos, c)
    }

    /// Same as [`FrameQuantities::new`] when `γ` is already known.
    pub fn from_gamma(rho: f64, gamma: f64, eos: &BarotropicEos, c: f64) -> Result<Self, ThermoError> {
        if rho < 0.0 {
            return Err(ThermoError::NegativeDensity(rho));
        }
        let rho0 = rho / gamma;
        let ev = eos.eval(rho0)?;
        let bar_lambda = 1.0 + ev.w0 / (c * c);
        Ok(Self {
            rho,
            rho0,
            gamma,
            w0: ev.w0,
            eps0: ev.eps0,
            p0: ev.p0,
            e0: rho0 * c * c + rho0 * ev.eps0,
            lambda: gamma * bar_lambda,
            bar_lambda,
        })
    }

    /// `λ̄` through the energy density, `(e₀ + P₀)/(ρ₀c²)`.
    pub fn bar_lambda_from_energy(&self, c: f64) -> f64 {
        (self.e0 + self.p0) / (self.rho0 * c * c)
    }
}

/// Returns `(λ, λ̄)` for lab density `rho` moving with `v`.
pub fn lambda_factor(v: &Vec3, rho: f64, eos: &BarotropicEos, c: f64) -> Result<(f64, f64), ThermoError> {
    let fq = FrameQuantities::new(rho, v, eos, c)?;
    Ok((fq.lambda, fq.bar_lambda))
}

/// Relativistic kinetic-plus-internal Lagrangian density `−ρ₀(c² + ε₀)`.
pub fn rest_energy_lagrangian(rho: f64, v: &Vec3, eos: &BarotropicEos, c: f64) -> Result<f64, ThermoError> {
    let fq = FrameQuantities::new(rho, v, eos, c)?;
    Ok(-fq.rho0 * (c * c + fq.eps0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ulp_distance;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn dust_is_all_zero() {
        for rho0 in [0.0, 1e-9, 1.0, 1e6] {
            let v = BarotropicEos::Dust.eval(rho0).unwrap();
            assert_eq!((v.eps0, v.w0, v.p0, v.dw0_drho0), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn power_law_closed_forms() {
        let eos = BarotropicEos::power_law(1.0, 2.0).unwrap();
        let v = eos.eval(1.0).unwrap();
        assert_eq!((v.eps0, v.w0, v.p0, v.dw0_drho0), (1.0, 2.0, 1.0, 2.0));
        let v = eos.eval(2.0).unwrap();
        assert_eq!((v.eps0, v.w0, v.p0), (2.0, 4.0, 4.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            BarotropicEos::power_law(-1.0, 2.0),
            Err(ThermoError::InvalidK(-1.0))
        );
        assert_eq!(
            BarotropicEos::power_law(1.0, 1.0),
            Err(ThermoError::InvalidGamma(1.0))
        );
        assert_eq!(
            BarotropicEos::Dust.eval(-1.0),
            Err(ThermoError::NegativeDensity(-1.0))
        );
        let soft = BarotropicEos::power_law(1.0, 1.5).unwrap();
        assert!(matches!(soft.eval(0.0), Err(ThermoError::Degenerate { .. })));
        let stiff = BarotropicEos::power_law(1.0, 2.5).unwrap();
        assert_eq!(stiff.eval(0.0).unwrap().w0, 0.0);
    }

    #[test]
    fn frame_relations() {
        let c = 1.0;
        assert_eq!(lab_to_rest(3.0, &Vec3::zeros(), c).unwrap(), 3.0);
        assert_relative_eq!(lab_to_rest(1.25, &Vec3::new(0.6, 0.0, 0.0), c).unwrap(), 1.0, epsilon = 1e-15);
        assert!(lab_to_rest(1.0, &Vec3::new(1.0, 0.0, 0.0), c).is_err());

        let (l, lb) = lambda_factor(&Vec3::new(0.6, 0.0, 0.0), 1.0, &BarotropicEos::Dust, c).unwrap();
        assert_relative_eq!(l, 1.25, epsilon = 1e-15);
        assert_eq!(lb, 1.0);

        let eos = BarotropicEos::power_law(1.0, 2.0).unwrap();
        let (l, _) = lambda_factor(&Vec3::zeros(), 1.0, &eos, c).unwrap();
        assert_eq!(l, 3.0);
    }

    #[test]
    fn enthalpy_inverse() {
        let eos = BarotropicEos::power_law(0.7, 1.6).unwrap();
        let w = eos.eval(2.3).unwrap().w0;
        assert_relative_eq!(eos.rest_density_for_enthalpy(w).unwrap(), 2.3, epsilon = 1e-13);
        assert!(BarotropicEos::Dust.rest_density_for_enthalpy(1.0).is_none());
    }

    #[test]
    fn sound_speed_is_causal() {
        let eos = BarotropicEos::power_law(1.0, 2.0).unwrap();
        // dP/dρ₀ = 2, de₀/dρ₀ = 3
        assert_relative_eq!(eos.sound_speed(1.0, 1.0).unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_eq!(BarotropicEos::Dust.sound_speed(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn eos_json_shape() {
        let eos: BarotropicEos = serde_json::from_str(r#"{"kind":"power_law","K":1.0,"Gamma":2.0}"#).unwrap();
        assert_eq!(eos, BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 });
        let dust: BarotropicEos = serde_json::from_str(r#"{"kind":"dust"}"#).unwrap();
        assert!(dust.is_dust());
    }

    proptest! {
        #[test]
        fn enthalpy_identity(k in 0.01f64..10.0, g in 1.05f64..3.0, rho0 in 1e-3f64..1e3) {
            let v = BarotropicEos::PowerLaw { k, gamma: g }.eval(rho0).unwrap();
            prop_assert!(ulp_distance(v.w0, v.eps0 + v.p0 / rho0) <= 4);
        }
    }
}

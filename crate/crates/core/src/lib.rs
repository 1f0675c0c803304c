//! Relativistic charged particles and relativistic charged barotropic
//! fluids in Clebsch variables.
//!
//! * [`spacetime`]: four-vectors, Lorentz factors, prescribed fields.
//! * [`particles`]: Boris and RK4 pushers for non-interacting particles.
//! * [`thermo`]: barotropic equations of state and frame conversions.
//! * [`clebsch`]: gridded `(ρ, α, β, ν)` fields, velocity reconstruction,
//!   RK4 evolution, four-vectors and the reduced Lagrangian.
//! * [`validate`]: the charged Euler residual and refinement studies.
//! * [`fisher`]: the Fisher-information quantum Lagrangian density.

// NaN must fail range checks, so negated comparisons are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clebsch;
pub mod fisher;
pub mod numerics;
pub mod particles;
pub mod presets;
pub mod spacetime;
pub mod thermo;
pub mod validate;

pub use clebsch::{ClebschError, ClebschFieldState, FluidParams, Grid};
pub use fisher::{FisherError, QuantumFieldState, QuantumMode};
pub use particles::{ParticleError, ParticleState, ParticleSystem, Scheme, Trajectory};
pub use presets::{InitialCondition, ParticlePreset};
pub use spacetime::{FieldConfiguration, FieldValues, FourVector, PotentialProfile, UnitSystem, Vec3};
pub use thermo::{BarotropicEos, EosValues, FrameQuantities, ThermoError};
pub use validate::{ResidualReport, ValidateError};

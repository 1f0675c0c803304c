//! Relativistic charged particles in prescribed fields.
//!
//! The state carries the reduced momentum `u⃗ = γv⃗`, so the equation of
//! motion is `du⃗/dt = (e/m)(E⃗ + v⃗×B⃗)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacetime::{gamma_from_momentum, FieldConfiguration, Vec3};

#[derive(Debug, Error)]
pub enum ParticleError {
    #[error("particle {particle}: non-finite state at step {step}")]
    NonFinite { particle: usize, step: usize },
    #[error("invalid particle {particle}: {reason}")]
    Invalid { particle: usize, reason: String },
    #[error("time step must be positive and finite (got {0})")]
    InvalidStep(f64),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleState {
    pub x: Vec3,
    /// Reduced momentum `γv⃗`.
    pub u: Vec3,
    pub m: f64,
    pub e: f64,
}

impl ParticleState {
    pub fn at_rest(x: Vec3, m: f64, e: f64) -> Self {
        Self { x, u: Vec3::zeros(), m, e }
    }

    pub fn gamma(&self, c: f64) -> f64 {
        gamma_from_momentum(&self.u, c)
    }

    pub fn velocity(&self, c: f64) -> Vec3 {
        self.u / self.gamma(c)
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.u.iter()).all(|v| v.is_finite())
    }

    fn validate(&self, index: usize) -> Result<(), ParticleError> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(ParticleError::Invalid {
                particle: index,
                reason: format!("mass must be > 0 (got {})", self.m),
            });
        }
        if !self.e.is_finite() || !self.is_finite() {
            return Err(ParticleError::Invalid {
                particle: index,
                reason: "non-finite component".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Boris,
    Rk4,
}

/// `d(γv⃗)/dt` at the particle's position and time `t`.
pub fn lorentz_acceleration(p: &ParticleState, field: &FieldConfiguration, t: f64, c: f64) -> Vec3 {
    let f = field.evaluate(&p.x, t);
    let v = p.velocity(c);
    (f.e + v.cross(&f.b)) * (p.e / p.m)
}

/// One synchronised relativistic Boris step (drift, kick-rotate-kick, drift).
///
/// Fields are sampled at the half-step position and time. In a pure
/// magnetic field the kick is a rotation, so `|u⃗|` is preserved to roundoff.
pub fn step_boris(p: &ParticleState, field: &FieldConfiguration, t: f64, dt: f64, c: f64) -> ParticleState {
    let half = 0.5 * dt;
    let x_half = p.x + p.velocity(c) * half;
    let f = field.evaluate(&x_half, t + half);
    let qh = p.e / p.m * half;

    let u_minus = p.u + f.e * qh;
    let g_minus = gamma_from_momentum(&u_minus, c);
    let tv = f.b * (qh / g_minus);
    let sv = tv * (2.0 / (1.0 + tv.norm_squared()));
    let u_prime = u_minus + u_minus.cross(&tv);
    let u_plus = u_minus + u_prime.cross(&sv);
    let u_new = u_plus + f.e * qh;

    let x_new = x_half + u_new / gamma_from_momentum(&u_new, c) * half;
    ParticleState {
        x: x_new,
        u: u_new,
        ..*p
    }
}

/// Classical fourth-order Runge–Kutta step on `(x⃗, u⃗)`.
pub fn step_rk4(p: &ParticleState, field: &FieldConfiguration, t: f64, dt: f64, c: f64) -> ParticleState {
    let deriv = |x: Vec3, u: Vec3, t: f64| -> (Vec3, Vec3) {
        let s = ParticleState { x, u, ..*p };
        (s.velocity(c), lorentz_acceleration(&s, field, t, c))
    };
    let (k1x, k1u) = deriv(p.x, p.u, t);
    let (k2x, k2u) = deriv(p.x + k1x * (0.5 * dt), p.u + k1u * (0.5 * dt), t + 0.5 * dt);
    let (k3x, k3u) = deriv(p.x + k2x * (0.5 * dt), p.u + k2u * (0.5 * dt), t + 0.5 * dt);
    let (k4x, k4u) = deriv(p.x + k3x * dt, p.u + k3u * dt, t + dt);
    ParticleState {
        x: p.x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0),
        u: p.u + (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (dt / 6.0),
        ..*p
    }
}

pub fn step(scheme: Scheme, p: &ParticleState, field: &FieldConfiguration, t: f64, dt: f64, c: f64) -> ParticleState {
    match scheme {
        Scheme::Boris => step_boris(p, field, t, dt, c),
        Scheme::Rk4 => step_rk4(p, field, t, dt, c),
    }
}

/// Non-interacting particles in a shared prescribed field.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub particles: Vec<ParticleState>,
    pub field: FieldConfiguration,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub particle_id: usize,
    pub x: Vec3,
    pub u: Vec3,
    pub gamma: f64,
}

/// Samples ordered by time, then by particle index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub n_particles: usize,
}

impl Trajectory {
    /// Time series of one particle.
    pub fn particle(&self, id: usize) -> impl Iterator<Item = &TrajectorySample> + '_ {
        self.samples.iter().filter(move |s| s.particle_id == id)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ParticleError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "particle_id", "x", "y", "z", "ux", "uy", "uz", "gamma"])?;
        for s in &self.samples {
            wtr.write_record(&[
                s.t.to_string(),
                s.particle_id.to_string(),
                s.x.x.to_string(),
                s.x.y.to_string(),
                s.x.z.to_string(),
                s.u.x.to_string(),
                s.u.y.to_string(),
                s.u.z.to_string(),
                s.gamma.to_string(),
            ])?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

impl ParticleSystem {
    pub fn new(particles: Vec<ParticleState>, field: FieldConfiguration) -> Self {
        Self { particles, field, t: 0.0 }
    }

    fn record(&self, out: &mut Vec<TrajectorySample>, c: f64) {
        out.extend(self.particles.iter().enumerate().map(|(id, p)| TrajectorySample {
            t: self.t,
            particle_id: id,
            x: p.x,
            u: p.u,
            gamma: p.gamma(c),
        }));
    }

    /// Advance every particle `n_steps` times, sampling every `stride` steps
    /// (the initial and final states are always recorded).
    pub fn simulate(
        &mut self,
        dt: f64,
        n_steps: usize,
        scheme: Scheme,
        stride: usize,
        c: f64,
    ) -> Result<Trajectory, ParticleError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ParticleError::InvalidStep(dt));
        }
        for (i, p) in self.particles.iter().enumerate() {
            p.validate(i)?;
        }
        let stride = stride.max(1);
        let mut samples = Vec::new();
        self.record(&mut samples, c);
        let t0 = self.t;
        for step_no in 1..=n_steps {
            let t = self.t;
            let field = &self.field;
            let next: Vec<ParticleState> = self
                .particles
                .par_iter()
                .map(|p| step(scheme, p, field, t, dt, c))
                .collect();
            if let Some(bad) = next.iter().position(|p| !p.is_finite()) {
                return Err(ParticleError::NonFinite {
                    particle: bad,
                    step: step_no,
                });
            }
            self.particles = next;
            // Avoid accumulating t += dt drift over long runs.
            self.t = t0 + step_no as f64 * dt;
            if step_no % stride == 0 || step_no == n_steps {
                self.record(&mut samples, c);
            }
        }
        Ok(Trajectory {
            samples,
            n_particles: self.particles.len(),
        })
    }
}

/// Convenience wrapper matching [`ParticleSystem::simulate`] with stride 1.
pub fn simulate_system(
    sys: &mut ParticleSystem,
    dt: f64,
    n_steps: usize,
    scheme: Scheme,
    c: f64,
) -> Result<Trajectory, ParticleError> {
    sys.simulate(dt, n_steps, scheme, 1, c)
}

/// Relativistic cyclotron period `2πγm/(|e|B)`.
pub fn cyclotron_period(p: &ParticleState, b: f64, c: f64) -> f64 {
    2.0 * std::f64::consts::PI * p.gamma(c) * p.m / (p.e.abs() * b.abs())
}

/// Gyration period measured from the unwrapped rotation angle of `u⃗`
/// in the plane perpendicular to `axis`.
pub fn measured_gyration_period(samples: &[TrajectorySample], axis: &Vec3) -> Option<f64> {
    if samples.len() < 3 {
        return None;
    }
    let n = axis.normalize();
    let e1 = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (e1 - n * n.dot(&e1)).normalize();
    let e2 = n.cross(&e1);
    let angle = |u: &Vec3| u.dot(&e2).atan2(u.dot(&e1));
    let mut total = 0.0;
    let mut prev = angle(&samples[0].u);
    for s in &samples[1..] {
        let a = angle(&s.u);
        let mut d = a - prev;
        if d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        } else if d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = a;
    }
    let elapsed = samples.last()?.t - samples[0].t;
    if total == 0.0 || elapsed <= 0.0 {
        return None;
    }
    Some(2.0 * std::f64::consts::PI * elapsed / total.abs())
}

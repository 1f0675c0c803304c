//! Scenario pipelines. Each runner fills a [`Summary`] and stages its
//! artifacts; gating against tolerances happens in the caller.

use anyhow::{anyhow, Context, Result};

use relflow_core::clebsch::{
    evolve_step_with, reconstruct_velocity_with, reduced_lagrangian_density, write_snapshot_csv, ReconstructOptions,
    SnapshotMeta,
};
use relflow_core::fisher::{fisher_density, quantum_lagrangian_density, TimeLevels};
use relflow_core::particles::{cyclotron_period, measured_gyration_period, TrajectorySample};
use relflow_core::validate::{
    convergence_study, time_refinement_study, write_report_csv, ChargedEquilibriumScenario, ConvergenceStudy,
    EvolvedScenario, OscillatingUniformScenario, ResidualScenario, ValidateError,
};
use relflow_core::{
    FieldConfiguration, ParticlePreset, ParticleSystem, QuantumFieldState, QuantumMode, Trajectory,
};

use crate::config::{Manufactured, Refinement, ResidualForm, Scenario, ScenarioKind};
use crate::output::{Staging, Summary};

pub fn run_scenario(s: &Scenario, staging: &mut Staging) -> Result<Summary> {
    let mut summary = Summary::new(s.kind);
    match s.kind {
        ScenarioKind::Particle => run_particles(s, staging, &mut summary)?,
        ScenarioKind::Fluid => run_fluid(s, staging, &mut summary)?,
        ScenarioKind::EulerCheck | ScenarioKind::Convergence => run_study(s, staging, &mut summary)?,
        ScenarioKind::Fisher => run_fisher(s, staging, &mut summary)?,
    }
    summary.gate(&s.tolerances);
    Ok(summary)
}

fn run_particles(s: &Scenario, staging: &mut Staging, summary: &mut Summary) -> Result<()> {
    let c = s.c();
    let preset = s.particle_preset();
    let (particles, field) = preset.build(&s.field);
    let initial = particles.clone();
    let mut sys = ParticleSystem::new(particles, field.clone());
    let it = &s.integrator;
    let traj = sys
        .simulate(it.dt, it.n_steps, it.scheme, 1, c)
        .context("particle push failed")?;

    let shell = traj
        .samples
        .iter()
        .map(|p| {
            let v = p.u / p.gamma;
            (p.gamma * p.gamma * (c * c - v.norm_squared()) / (c * c) - 1.0).abs()
        })
        .fold(0.0f64, f64::max);
    summary.norms.insert("mass_shell".into(), shell);

    let pure_b = matches!(field, FieldConfiguration::UniformB { .. });
    if pure_b {
        let drift = traj
            .samples
            .iter()
            .map(|p| {
                let u0 = initial[p.particle_id].u.norm();
                if u0 > 0.0 {
                    (p.u.norm() - u0).abs() / u0
                } else {
                    p.u.norm()
                }
            })
            .fold(0.0f64, f64::max);
        summary.norms.insert("speed_drift".into(), drift);
    }
    match (&preset, &field) {
        (ParticlePreset::Gyration { .. }, FieldConfiguration::UniformB { b }) => {
            let expected = cyclotron_period(&initial[0], b.norm(), c);
            let first: Vec<TrajectorySample> = traj.particle(0).copied().collect();
            if let Some(measured) = measured_gyration_period(&first, b) {
                summary.norms.insert("period".into(), (measured - expected).abs() / expected);
            }
        }
        (ParticlePreset::ConstantE { e0 }, _) => {
            let p = &initial[0];
            let a = p.e * e0 / p.m;
            let err = traj
                .particle(0)
                .map(|q| {
                    let x = if a == 0.0 {
                        0.0
                    } else {
                        c * c / a * ((1.0 + (a * q.t / c).powi(2)).sqrt() - 1.0)
                    };
                    (q.x.x - x).abs()
                })
                .fold(0.0f64, f64::max);
            summary.norms.insert("closed_form".into(), err);
        }
        _ => {}
    }

    let kept = thin(&traj, s.output.stride);
    staging.write("trajectory.csv", |w| Ok(kept.write_csv(w)?))?;
    Ok(())
}

/// Keep every `stride`-th step and the last one.
fn thin(traj: &Trajectory, stride: usize) -> Trajectory {
    let np = traj.n_particles.max(1);
    let steps = traj.samples.len() / np;
    let samples = traj
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let step = i / np;
            step.is_multiple_of(stride) || step + 1 == steps
        })
        .map(|(_, p)| *p)
        .collect();
    Trajectory {
        samples,
        n_particles: traj.n_particles,
    }
}

fn run_fluid(s: &Scenario, staging: &mut Staging, summary: &mut Summary) -> Result<()> {
    let params = s.fluid_params()?;
    let mut state = s.initial_condition().build(s.grid()?, &params)?;
    let it = &s.integrator;
    let evolve = it.evolve_options();
    let recon = ReconstructOptions {
        scan_roots: it.scan_roots,
    };
    let stride = s.output.stride;
    let m0 = state.total_mass();
    let mut rows = Vec::with_capacity(it.n_steps / stride + 2);
    let mut drift = 0.0f64;
    for step in 0..=it.n_steps {
        if step > 0 {
            let t = state.t;
            state = evolve_step_with(&state, it.dt, &evolve).with_context(|| format!("step {step} at t = {t}"))?;
        }
        let mass = state.total_mass();
        let d = (mass - m0).abs() / m0;
        drift = drift.max(d);
        if step % stride == 0 || step == it.n_steps {
            let vel = reconstruct_velocity_with(&state, &recon)?;
            rows.push((step, state.t, mass, d, vel.max_speed()));
            staging.write(&format!("snapshot_{step:06}.csv"), |w| {
                Ok(write_snapshot_csv(w, &state, &vel, None)?)
            })?;
        }
    }
    summary.norms.insert("mass_drift".into(), drift);
    summary
        .norms
        .insert("max_speed".into(), rows.last().map_or(0.0, |r| r.4));
    let meta = SnapshotMeta::from_state(&state);
    staging.write("snapshot_meta.json", |w| Ok(meta.write_json(w)?))?;
    staging.write("diagnostics.csv", |w| {
        writeln!(w, "step,t,mass,mass_drift,max_speed")?;
        for (step, t, mass, d, v) in &rows {
            writeln!(w, "{step},{t},{mass},{d},{v}")?;
        }
        Ok(())
    })?;
    Ok(())
}

fn study_scenario(s: &Scenario) -> Result<Box<dyn ResidualScenario>> {
    let v = &s.validation;
    Ok(match v.manufactured {
        Some(Manufactured::ChargedEquilibrium { amplitude }) => Box::new(ChargedEquilibriumScenario::new(amplitude)),
        Some(Manufactured::OscillatingUniform { amplitude, omega }) => {
            Box::new(OscillatingUniformScenario::new(amplitude, omega, s.eos.resolve()?))
        }
        None => Box::new(EvolvedScenario {
            ic: s.initial_condition(),
            params: s.fluid_params()?,
            dim: s.grid.dim,
            length: s.grid.length,
            t_end: v.t_end,
            alternative: v.form == ResidualForm::Alternative,
            options: s.integrator.evolve_options(),
        }),
    })
}

fn run_study(s: &Scenario, staging: &mut Staging, summary: &mut Summary) -> Result<()> {
    let scenario = study_scenario(s)?;
    let v = &s.validation;
    let result = match v.refine {
        Refinement::H => convergence_study(scenario.as_ref(), &s.resolutions(), &v.dt_rule),
        Refinement::Dt => {
            let dts = v.dts.as_deref().ok_or_else(|| anyhow!("validation.dts missing"))?;
            time_refinement_study(scenario.as_ref(), s.grid.n, dts)
        }
    };
    let study = match result {
        Ok(st) => st,
        // A residual that fails to shrink is a failed check, not a crash.
        Err(e @ ValidateError::NonMonotone { .. }) => {
            summary.error = Some(e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e).context(scenario.label()),
    };
    record_study(&study, summary);
    staging.write("convergence.csv", |w| Ok(write_report_csv(w, &study)?))?;
    let finest = study.finest();
    staging.write("residual.csv", |w| {
        let g = &finest.grid;
        if g.dim == 2 {
            writeln!(w, "i,j,x,y,Rx,Ry,Rz")?;
        } else {
            writeln!(w, "i,x,Rx,Ry,Rz")?;
        }
        for (idx, r) in finest.residual.iter().enumerate() {
            let (i, j) = g.coords(idx);
            let p = g.position(idx);
            if g.dim == 2 {
                writeln!(w, "{i},{j},{},{},{},{},{}", p.x, p.y, r.x, r.y, r.z)?;
            } else {
                writeln!(w, "{i},{},{},{},{}", p.x, r.x, r.y, r.z)?;
            }
        }
        Ok(())
    })?;
    Ok(())
}

fn record_study(study: &ConvergenceStudy, summary: &mut Summary) {
    let f = study.finest();
    summary.norms.insert("l2".into(), f.l2);
    summary.norms.insert("linf".into(), f.linf);
    summary.orders.insert("l2".into(), study.order_l2);
    summary.orders.insert("linf".into(), study.order_linf);
}

fn run_fisher(s: &Scenario, staging: &mut Staging, summary: &mut Summary) -> Result<()> {
    let params = s.fluid_params()?;
    let grid = s.grid()?;
    let state = s.initial_condition().build(grid, &params)?;
    let q = &s.quantum;
    let qs = QuantumFieldState::from_clebsch(&state, q.m, q.hbar)?;
    let mode = s.quantum_mode()?;
    let fisher = fisher_density(&qs, &TimeLevels::Static)?;
    let lagr = quantum_lagrangian_density(&qs, &s.field, s.k, &TimeLevels::Static, &mode)?;
    summary.norms.insert("fisher_integral".into(), grid.integrate(&fisher));
    summary.norms.insert("lagrangian_integral".into(), grid.integrate(&lagr));

    if let Some(width) = s.gaussian_oracle() {
        let grad = grid.gradient(&qs.amplitude());
        let integral = grid.integrate(&grad.iter().map(|g| g.norm_squared()).collect::<Vec<_>>());
        let exact = 1.0 / (2.0 * width * width);
        summary.norms.insert("gaussian_integral".into(), (integral - exact).abs() / exact);
    }

    // At ħ = 0 the density must coincide with the dust reduced Lagrangian.
    let mut dust = state.clone();
    dust.params.eos = Default::default();
    let reduced = reduced_lagrangian_density(&dust)?;
    let q0 = QuantumFieldState::from_clebsch(&dust, q.m, 0.0)?;
    let l0 = quantum_lagrangian_density(&q0, &s.field, s.k, &TimeLevels::Static, &QuantumMode::FisherOnly)?;
    let defect = l0
        .iter()
        .zip(&reduced)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    summary.norms.insert("hbar_zero".into(), defect);

    let vel = reconstruct_velocity_with(&state, &ReconstructOptions::default())?;
    staging.write("fisher.csv", |w| {
        Ok(write_snapshot_csv(w, &state, &vel, Some(("lagrangian_density", &lagr)))?)
    })?;
    staging.write("snapshot_meta.json", |w| Ok(SnapshotMeta::from_state(&state).write_json(w)?))?;
    Ok(())
}

//! Evolution, reconstruction and four-vector checks for Clebsch fields.

use std::f64::consts::PI;

use proptest::prelude::*;

use relflow_core::clebsch::{
    clebsch_four_vectors, coordinate_velocity_lower, evolve_step, solve_speed, ClebschFieldState, FluidParams, Grid,
};
use relflow_core::numerics::log_log_slope;
use relflow_core::presets::InitialCondition;
use relflow_core::thermo::BarotropicEos;
use relflow_core::Vec3;

fn uniform_flow(n: usize) -> ClebschFieldState {
    let grid = Grid::new(1, n, 1.0).unwrap();
    InitialCondition::UniformFlow {
        rho: 1.0,
        v0: 0.5,
        label_amplitude: 0.1,
    }
    .build(grid, &FluidParams::default())
    .unwrap()
}

// Label error after the flow has carried α once around the domain.
fn one_period_error(n: usize) -> (f64, f64) {
    let s0 = uniform_flow(n);
    let h = s0.grid.spacing();
    let steps = (2.0 / (0.8 * h)).round() as usize;
    let dt = 2.0 / steps as f64;
    let mut s = s0.clone();
    for _ in 0..steps {
        s = evolve_step(&s, dt).unwrap();
    }
    let diff: Vec<f64> = s.alpha.iter().zip(&s0.alpha).map(|(a, b)| a - b).collect();
    let linf = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let l2 = (diff.iter().map(|d| d * d).sum::<f64>() * h).sqrt();
    (l2, linf)
}

#[test]
fn uniform_flow_returns_after_one_period() {
    let (_, linf) = one_period_error(256);
    assert!(linf < 1e-6, "linf {linf}");
}

#[test]
fn label_extrema_do_not_grow() {
    let s0 = uniform_flow(128);
    let dt = 0.8 * s0.grid.spacing();
    let mut s = s0.clone();
    for _ in 0..200 {
        s = evolve_step(&s, dt).unwrap();
    }
    let max = |f: &[f64]| f.iter().cloned().fold(f64::MIN, f64::max);
    let min = |f: &[f64]| f.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max(&s.alpha) <= max(&s0.alpha) + 1e-6);
    assert!(min(&s.alpha) >= min(&s0.alpha) - 1e-6);
}

#[test]
fn label_transport_converges() {
    let ns = [32, 64, 128];
    let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let errs: Vec<f64> = ns.iter().map(|&n| one_period_error(n).0).collect();
    let order = log_log_slope(&hs, &errs).unwrap();
    assert!(order >= 2.0, "errors {errs:?}, order {order}");
}

// α = 0.3cos, β = 0.2sin, ν = 0.15sin plus a winding, with the exact
// Clebsch momentum available in closed form.
fn smooth_state(n: usize, eos: BarotropicEos) -> (ClebschFieldState, impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let kap = 2.0 * PI;
    let grid = Grid::new(1, n, 1.0).unwrap();
    let rho = move |x: f64| 1.0 + 0.2 * (kap * x).sin();
    let momentum = move |x: f64| 0.3 * 0.2 * kap * (kap * x).cos().powi(2) + 0.15 * kap * (kap * x).cos() + 0.1;
    let s = ClebschFieldState::new(
        grid,
        0.0,
        grid.sample(|p| rho(p.x)),
        grid.sample(|p| 0.3 * (kap * p.x).cos()),
        grid.sample(|p| 0.2 * (kap * p.x).sin()),
        grid.sample(|p| 0.15 * (kap * p.x).sin()),
        FluidParams {
            eos,
            ..Default::default()
        },
    )
    .unwrap()
    .with_nu_winding(Vec3::new(0.1, 0.0, 0.0))
    .unwrap();
    (s, rho, momentum)
}

#[test]
fn four_velocity_relation_converges() {
    let eos = BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 };
    let (mut hs, mut rel, mut norm) = (Vec::new(), Vec::new(), Vec::new());
    for n in [16, 32, 64, 128] {
        let (s, rho, momentum) = smooth_state(n, eos);
        let fv = clebsch_four_vectors(&s).unwrap();
        let (mut e_rel, mut e_norm) = (0.0f64, 0.0f64);
        for (i, p) in s.grid.positions().enumerate() {
            let m = momentum(p.x);
            let speed = solve_speed(m.abs(), rho(p.x), &eos, 1.0, false).unwrap();
            let v = Vec3::new(speed.copysign(m), 0.0, 0.0);
            let g = 1.0 / (1.0 - speed * speed).sqrt();
            let w0 = eos.eval(rho(p.x) / g).unwrap().w0;
            let lambda = g * (1.0 + w0);
            let d = coordinate_velocity_lower(&v, 1.0) + fv.electromagnetic[i].scale(1.0 / lambda);
            e_rel = e_rel.max(d.0.iter().fold(0.0f64, |a, x| a.max(x.abs())));
            e_norm = e_norm.max((fv.electromagnetic[i].norm_sqr() - (1.0 + w0).powi(2)).abs());
        }
        hs.push(s.grid.spacing());
        rel.push(e_rel);
        norm.push(e_norm);
    }
    let p_rel = log_log_slope(&hs, &rel).unwrap();
    let p_norm = log_log_slope(&hs, &norm).unwrap();
    assert!(p_rel >= 2.0, "relation errors {rel:?}");
    assert!(p_norm >= 2.0, "norm errors {norm:?}");
}

#[test]
fn dust_four_vector_is_exact_for_uniform_flow() {
    let s = uniform_flow(32);
    let fv = clebsch_four_vectors(&s).unwrap();
    for (i, ve) in fv.electromagnetic.iter().enumerate() {
        let lambda = fv.velocity.lambda[i];
        let d = coordinate_velocity_lower(&fv.velocity.v[i], 1.0) + ve.scale(1.0 / lambda);
        assert!(d.0.iter().all(|x| x.abs() < 1e-14), "cell {i}: {d:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reconstruction_inverts_the_momentum_map(
        s in -5.0f64..5.0,
        rho in 0.1f64..2.0,
        k in 0.1f64..1.0,
        gamma in 1.2f64..2.5,
        c in 1.0f64..3.0,
    ) {
        let eos = BarotropicEos::PowerLaw { k, gamma };
        let speed = solve_speed(s.abs(), rho, &eos, c, true).unwrap();
        prop_assert!(speed < c);
        let g = 1.0 / (1.0 - (speed / c).powi(2)).sqrt();
        let w0 = eos.eval(rho / g).unwrap().w0;
        let back = g * (1.0 + w0 / (c * c)) * speed;
        prop_assert!((back - s.abs()).abs() <= 1e-12 * s.abs().max(1.0), "{back} vs {s}");
    }
}

proptest! {
    #[test]
    fn reconstruction_recovers_sampled_speeds(
        frac in 0.0f64..0.99,
        rho in 0.1f64..2.0,
        gamma in 1.2f64..2.5,
    ) {
        let eos = BarotropicEos::PowerLaw { k: 0.5, gamma };
        let v = frac;
        let g = 1.0 / (1.0 - v * v).sqrt();
        let w = g * (1.0 + eos.eval(rho / g).unwrap().w0) * v;
        let back = solve_speed(w, rho, &eos, 1.0, true).unwrap();
        prop_assert!((back - v).abs() < 1e-10, "{back} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn evolution_conserves_mass(
        amplitude in 1e-3f64..5e-2,
        label_a in 0.0f64..0.3,
        label_b in 0.0f64..0.3,
        dim in 1usize..3,
    ) {
        let n = if dim == 1 { 32 } else { 16 };
        let grid = Grid::new(dim, n, 1.0).unwrap();
        let params = FluidParams { eos: BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 }, ..Default::default() };
        let mut s = InitialCondition::Acoustic { rho: 1.0, amplitude, mode: 1, label_a, label_b }
            .build(grid, &params)
            .unwrap();
        let m0 = s.total_mass();
        let dt = 0.2 * grid.spacing();
        for _ in 0..50 {
            s = evolve_step(&s, dt).unwrap();
        }
        prop_assert!((s.total_mass() - m0).abs() <= 1e-12 * m0);
    }
}

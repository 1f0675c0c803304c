//! Trajectory-level checks of the particle pushers.

use relflow_core::particles::{cyclotron_period, measured_gyration_period};
use relflow_core::{FieldConfiguration, ParticleState, ParticleSystem, Scheme, Vec3};

#[test]
fn exb_drift_velocity_from_cusps() {
    let (e0, b0) = (0.1, 1.0);
    let field = FieldConfiguration::CrossedEb {
        e: Vec3::new(0.0, e0, 0.0),
        b: Vec3::new(0.0, 0.0, b0),
    };
    let mut sys = ParticleSystem::new(vec![ParticleState::at_rest(Vec3::zeros(), 1.0, 1.0)], field);
    let dt = 1e-3;
    // The particle starts at a cusp; leave room for ten more.
    let steps = (11.0 * 2.0 * std::f64::consts::PI / dt) as usize;
    let traj = sys.simulate(dt, steps, Scheme::Boris, 1, 1.0).unwrap();
    let s = &traj.samples;
    let speed: Vec<f64> = s.iter().map(|p| p.u.norm()).collect();
    let cusps: Vec<usize> = std::iter::once(0)
        .chain((1..speed.len() - 1).filter(|&i| speed[i] < speed[i - 1] && speed[i] <= speed[i + 1]))
        .collect();
    assert!(cusps.len() >= 11, "found {} cusps", cusps.len());
    let (a, b) = (cusps[0], cusps[10]);
    let drift = (s[b].x - s[a].x) / (s[b].t - s[a].t);
    let expected = e0 / b0;
    assert!((drift.x - expected).abs() < 1e-4, "drift {drift:?}");
    assert!(drift.y.abs() < 1e-4 && drift.z.abs() < 1e-12, "drift {drift:?}");
}

fn hyperbolic_x(a: f64, t: f64, c: f64) -> f64 {
    c * c / a * ((1.0 + (a * t / c).powi(2)).sqrt() - 1.0)
}

#[test]
fn rk4_position_order_under_constant_e() {
    let e0 = 1.0;
    let field = FieldConfiguration::UniformE {
        e: Vec3::new(e0, 0.0, 0.0),
    };
    let t_end: f64 = 2.0;
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| {
            let mut sys = ParticleSystem::new(vec![ParticleState::at_rest(Vec3::zeros(), 1.0, 1.0)], field.clone());
            let steps = (t_end / dt).round() as usize;
            let tr = sys.simulate(dt, steps, Scheme::Rk4, steps, 1.0).unwrap();
            let last = tr.samples.last().unwrap();
            (last.x.x - hyperbolic_x(e0, t_end, 1.0)).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.7, "errors {errors:?}");
    }
}

#[test]
fn mass_shell_along_trajectories() {
    for c in [1.0, 3.0] {
        let field = FieldConfiguration::CrossedEb {
            e: Vec3::new(0.2 * c, 0.1 * c, 0.0),
            b: Vec3::new(0.1, 0.3, 1.0),
        };
        let p = ParticleState {
            x: Vec3::zeros(),
            u: Vec3::new(2.0, -1.0, 0.5) * c,
            m: 1.0,
            e: -1.0,
        };
        for scheme in [Scheme::Boris, Scheme::Rk4] {
            let mut sys = ParticleSystem::new(vec![p], field.clone());
            let tr = sys.simulate(0.01, 2000, scheme, 10, c).unwrap();
            for s in &tr.samples {
                let v = s.u / s.gamma;
                let lhs = s.gamma * s.gamma * (c * c - v.norm_squared());
                assert!((lhs - c * c).abs() <= 1e-10 * c * c, "{scheme:?} c={c}: {lhs}");
                assert!(v.norm() < c);
            }
        }
    }
}

#[test]
fn relativistic_gyration_period_matches_theory() {
    let b0 = 2.0;
    let field = FieldConfiguration::UniformB {
        b: Vec3::new(0.0, 0.0, b0),
    };
    let p = ParticleState {
        x: Vec3::zeros(),
        u: Vec3::new(3.0, 0.0, 0.0),
        m: 1.0,
        e: 1.0,
    };
    let expected = cyclotron_period(&p, b0, 1.0);
    let mut sys = ParticleSystem::new(vec![p], field);
    let steps = (5.0 * expected / 1e-3) as usize;
    let tr = sys.simulate(1e-3, steps, Scheme::Boris, 1, 1.0).unwrap();
    let measured = measured_gyration_period(&tr.samples, &Vec3::z()).unwrap();
    assert!((measured - expected).abs() / expected < 1e-5, "{measured} vs {expected}");
}

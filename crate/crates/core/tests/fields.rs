//! Finite-difference checks of the prescribed field catalog.

use relflow_core::spacetime::PotentialProfile;
use relflow_core::{FieldConfiguration, Vec3};

fn catalog() -> Vec<FieldConfiguration> {
    vec![
        FieldConfiguration::Zero,
        FieldConfiguration::UniformE {
            e: Vec3::new(0.3, -0.2, 0.7),
        },
        FieldConfiguration::UniformB {
            b: Vec3::new(-0.4, 0.9, 0.25),
        },
        FieldConfiguration::CrossedEb {
            e: Vec3::new(0.0, 0.5, 0.0),
            b: Vec3::new(0.0, 0.0, 1.2),
        },
        FieldConfiguration::HarmonicWave {
            amplitude: 0.7,
            wave_vector: Vec3::new(1.3, -0.6, 0.4),
            polarization: Vec3::new(0.2, 1.0, -0.5),
            omega: 1.7,
        },
        FieldConfiguration::HarmonicWave {
            amplitude: 0.2,
            wave_vector: Vec3::zeros(),
            polarization: Vec3::x(),
            omega: 3.0,
        },
        FieldConfiguration::Electrostatic {
            profile: PotentialProfile::Cosine {
                amplitude: 0.4,
                wavenumber: 2.1,
                phase: 0.3,
            },
        },
        FieldConfiguration::Electrostatic {
            profile: PotentialProfile::Polynomial {
                coeffs: vec![0.1, -0.5, 0.25, 0.05],
            },
        },
    ]
}

// Fourth-order central difference of a vector function along one direction.
fn d4<F: Fn(f64) -> Vec3>(f: F, h: f64) -> Vec3 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

fn d4s<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

struct Defects {
    div_b: f64,
    faraday: f64,
    e_from_potentials: f64,
    b_from_potentials: f64,
}

fn defects(cfg: &FieldConfiguration, x: &Vec3, t: f64, h: f64) -> Defects {
    let at = |dx: Vec3, dt: f64| cfg.evaluate(&(x + dx), t + dt);
    let axis_d = |i: usize, g: &dyn Fn(Vec3) -> Vec3| d4(|s| g(Vec3::ith(i, s)), h);
    let db: Vec<Vec3> = (0..3).map(|i| axis_d(i, &|d| at(d, 0.0).b)).collect();
    let de: Vec<Vec3> = (0..3).map(|i| axis_d(i, &|d| at(d, 0.0).e)).collect();
    let da: Vec<Vec3> = (0..3).map(|i| axis_d(i, &|d| at(d, 0.0).a)).collect();
    let curl = |d: &[Vec3]| Vec3::new(d[1].z - d[2].y, d[2].x - d[0].z, d[0].y - d[1].x);
    let grad_phi = Vec3::from_fn(|i, _| d4s(|s| at(Vec3::ith(i, s), 0.0).phi, h));
    let dadt = d4(|s| at(Vec3::zeros(), s).a, h);
    let dbdt = d4(|s| at(Vec3::zeros(), s).b, h);
    let here = at(Vec3::zeros(), 0.0);
    Defects {
        div_b: (db[0].x + db[1].y + db[2].z).abs(),
        faraday: (curl(&de) + dbdt).norm(),
        e_from_potentials: (here.e + grad_phi + dadt).norm(),
        b_from_potentials: (here.b - curl(&da)).norm(),
    }
}

fn worst(cfg: &FieldConfiguration, h: f64) -> [f64; 4] {
    let points = [
        (Vec3::new(0.1, 0.2, -0.3), 0.0),
        (Vec3::new(-1.4, 0.7, 2.2), 0.9),
        (Vec3::new(0.55, -2.0, 0.05), 2.3),
    ];
    let mut out = [0.0f64; 4];
    for (x, t) in points {
        let d = defects(cfg, &x, t, h);
        for (o, v) in out.iter_mut().zip([d.div_b, d.faraday, d.e_from_potentials, d.b_from_potentials]) {
            *o = o.max(v);
        }
    }
    out
}

#[test]
fn maxwell_identities_hold_for_every_configuration() {
    let names = ["div B", "Faraday", "E = -grad phi - dA/dt", "B = curl A"];
    for cfg in catalog() {
        let coarse = worst(&cfg, 0.02);
        let fine = worst(&cfg, 0.01);
        for k in 0..4 {
            // Configurations with linear potentials are differentiated exactly.
            if coarse[k] < 1e-11 {
                assert!(fine[k] < 1e-11, "{cfg:?} {}: {}", names[k], fine[k]);
                continue;
            }
            let order = (coarse[k] / fine[k]).log2();
            assert!(order >= 2.0, "{cfg:?} {}: order {order}", names[k]);
        }
    }
}

#[test]
fn invariance_flags_agree_with_finite_differences() {
    for cfg in catalog() {
        for axis in 0..3 {
            if !cfg.is_invariant_along(axis) {
                continue;
            }
            let x = Vec3::new(0.3, -0.7, 1.1);
            let shifted = x + Vec3::ith(axis, 0.37);
            let a = cfg.evaluate(&x, 0.4);
            let b = cfg.evaluate(&shifted, 0.4);
            assert!((a.phi - b.phi).abs() < 1e-14, "{cfg:?} axis {axis}");
            assert!((a.a - b.a).norm() < 1e-14, "{cfg:?} axis {axis}");
        }
    }
}

#[test]
fn catalog_round_trips_through_json() {
    for cfg in catalog() {
        let text = serde_json::to_string(&cfg).unwrap();
        let back: FieldConfiguration = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}

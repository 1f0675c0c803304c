//! Frame conversions and the two routes to λ̄.

use proptest::prelude::*;

use relflow_core::numerics::ulp_distance;
use relflow_core::spacetime::gamma;
use relflow_core::thermo::{lab_to_rest, BarotropicEos, FrameQuantities};
use relflow_core::Vec3;

fn velocity(frac: f64, theta: f64, phi: f64, c: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()) * (frac * c)
}

proptest! {
    #[test]
    fn rest_density_round_trip(
        rho in 1e-3f64..1e3,
        frac in 0.0f64..0.99,
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        c in 0.5f64..10.0,
    ) {
        let v = velocity(frac, theta, phi, c);
        let rho0 = lab_to_rest(rho, &v, c).unwrap();
        let back = rho0 * gamma(&v, c).unwrap();
        prop_assert!(ulp_distance(back, rho) <= 2, "{back} vs {rho}");
    }

    #[test]
    fn bar_lambda_two_ways(
        rho in 1e-2f64..1e2,
        frac in 0.0f64..0.99,
        k in 0.01f64..10.0,
        g in 1.05f64..3.0,
        c in 0.5f64..10.0,
    ) {
        let eos = BarotropicEos::PowerLaw { k, gamma: g };
        let fq = FrameQuantities::new(rho, &velocity(frac, 0.3, 1.1, c), &eos, c).unwrap();
        let alt = fq.bar_lambda_from_energy(c);
        prop_assert!(ulp_distance(fq.bar_lambda, alt) <= 4, "{} vs {alt}", fq.bar_lambda);
    }
}

#[test]
fn dust_has_no_thermodynamic_terms() {
    let fq = FrameQuantities::new(2.5, &Vec3::new(0.6, 0.0, 0.0), &BarotropicEos::Dust, 1.0).unwrap();
    assert_eq!(fq.lambda, fq.gamma);
    assert_eq!(fq.bar_lambda, 1.0);
}

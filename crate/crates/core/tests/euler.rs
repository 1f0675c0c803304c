//! Euler residual on evolved and manufactured states.

use proptest::prelude::*;

use relflow_core::clebsch::EvolveOptions;
use relflow_core::numerics::log_log_slope;
use relflow_core::presets::InitialCondition;
use relflow_core::thermo::BarotropicEos;
use relflow_core::validate::{
    convergence_study, euler_residual, euler_residual_alt, ChargedEquilibriumScenario, DtRule, EvolvedScenario,
    ResidualScenario,
};
use relflow_core::FluidParams;

#[test]
fn charged_equilibrium_residual_is_tiny_at_128() {
    let s = ChargedEquilibriumScenario::new(1e-3);
    let r = s.residual(128, 0.4 / 128.0).unwrap();
    assert!(r.linf < 1e-8, "linf {}", r.linf);
    assert!(r.terms.electric.linf > 1e-5, "the potential must do work: {:?}", r.terms);
    assert_eq!(r.terms.magnetic.linf, 0.0);
}

#[test]
fn alternative_form_tracks_the_charged_form() {
    let sc = EvolvedScenario::acoustic(1e-3);
    let eos = sc.params.eos;
    let (mut hs, mut main, mut alt) = (Vec::new(), Vec::new(), Vec::new());
    for n in [64, 128, 256] {
        let h = 1.0 / n as f64;
        let dt = 0.4 * h;
        let lv = sc.levels(n, dt).unwrap();
        let r = euler_residual(&lv, dt).unwrap();
        let ra = euler_residual_alt(&lv, dt).unwrap();
        // (e₀ + P₀)/(ρc²/γ) with c = 1 and γ ≈ 1 for a weak wave.
        let scale = lv[1]
            .rho
            .iter()
            .map(|&rho| {
                let e = eos.eval(rho).unwrap();
                rho * (1.0 + e.eps0) + e.p0
            })
            .zip(&lv[1].rho)
            .map(|(en, &rho)| en / rho)
            .fold(1.0f64, f64::max);
        let ratio = ra.l2 / r.l2;
        assert!(ratio <= 2.0 * scale && ratio >= 1.0 / (2.0 * scale), "n={n}: ratio {ratio}, scale {scale}");
        hs.push(h);
        main.push(r.l2);
        alt.push(ra.l2);
    }
    let pm = log_log_slope(&hs, &main).unwrap();
    let pa = log_log_slope(&hs, &alt).unwrap();
    assert!(pm >= 2.0 && pa >= 2.0, "orders {pm} {pa}");
    assert!((pm - pa).abs() < 0.2, "orders {pm} {pa}");
}

#[test]
fn neutral_flow_has_no_field_terms() {
    let sc = EvolvedScenario::acoustic(1e-3);
    let r = sc.residual(64, 0.4 / 64.0).unwrap();
    assert_eq!(r.terms.electric.linf, 0.0);
    assert_eq!(r.terms.magnetic.linf, 0.0);
    assert!(r.terms.pressure.linf > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    // Smooth data evolved by the Clebsch equations satisfies the Euler
    // equation up to discretization error.
    #[test]
    fn evolved_states_satisfy_euler(
        amplitude in 1e-3f64..1e-2,
        label_a in 0.0f64..0.2,
        label_b in 0.0f64..0.2,
        gamma in 1.5f64..2.5,
    ) {
        let sc = EvolvedScenario {
            ic: InitialCondition::Acoustic { rho: 1.0, amplitude, mode: 1, label_a, label_b },
            params: FluidParams { eos: BarotropicEos::PowerLaw { k: 1.0, gamma }, ..Default::default() },
            dim: 1,
            length: 1.0,
            t_end: 0.1,
            alternative: false,
            options: EvolveOptions::default(),
        };
        let st = convergence_study(&sc, &[32, 64, 128], &DtRule::Courant { courant: 0.2 }).unwrap();
        prop_assert!(st.order_l2 >= 2.0, "{}", st);
    }
}

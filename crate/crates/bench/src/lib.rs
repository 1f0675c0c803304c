//! Fixtures shared by the criterion benches in `benches/`.

use relflow_core::presets::InitialCondition;
use relflow_core::{
    BarotropicEos, ClebschFieldState, FieldConfiguration, FluidParams, Grid, ParticleState, ParticleSystem, Vec3,
};

/// Acoustic state with a power-law EOS on a `dim`-dimensional grid.
pub fn acoustic_state(dim: usize, n: usize) -> ClebschFieldState {
    let grid = Grid::new(dim, n, 1.0).expect("grid");
    let params = FluidParams {
        eos: BarotropicEos::PowerLaw { k: 1.0, gamma: 2.0 },
        ..Default::default()
    };
    InitialCondition::Acoustic {
        rho: 1.0,
        amplitude: 1e-2,
        mode: 1,
        label_a: 0.2,
        label_b: 0.2,
    }
    .build(grid, &params)
    .expect("acoustic preset")
}

/// `count` particles on a ring in crossed E and B fields.
pub fn particle_ring(count: usize) -> ParticleSystem {
    let particles = (0..count)
        .map(|i| {
            let a = i as f64 / count as f64 * std::f64::consts::TAU;
            ParticleState {
                x: Vec3::new(a.cos(), a.sin(), 0.0),
                u: Vec3::new(-a.sin(), a.cos(), 0.1),
                m: 1.0,
                e: 1.0,
            }
        })
        .collect();
    let field = FieldConfiguration::CrossedEb {
        e: Vec3::new(0.0, 0.1, 0.0),
        b: Vec3::new(0.0, 0.0, 1.0),
    };
    ParticleSystem::new(particles, field)
}

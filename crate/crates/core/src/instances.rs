//! Reference problems with known or characteristic behaviour.
//!
//! The same configurations ship as JSON files under `problems/`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::pauli::sigma_z;
use crate::linalg::{ComplexMatrix, HermitianOperator, PureState, C64};
use crate::sampling::{random_hermitian, random_state};
use crate::solver::NavigationProblem;

fn plus() -> PureState {
    PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("unit vector")
}

/// |0⟩ → |1⟩ with no wind. Journey time π.
pub fn orthogonal_zero_wind() -> NavigationProblem {
    NavigationProblem::new(HermitianOperator::zeros(2), PureState::basis(2, 0), PureState::basis(2, 1))
        .expect("consistent dimensions")
}

/// Wind `(ε/2)σ_z` pushing `(1,1)/√2` toward `(1,−1)/√2` along the equator.
/// Journey time π/(1+ε).
pub fn tailwind(epsilon: f64) -> NavigationProblem {
    let minus = PureState::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).expect("unit vector");
    NavigationProblem::new(sigma_z().scale(epsilon / 2.0), plus(), minus).expect("consistent dimensions")
}

/// Latitude offset of the head-on target above the equator.
pub const HEAD_ON_LATITUDE: f64 = 0.25;

/// Bloch-sphere point as a state: polar angle from +z, azimuth from +x.
pub fn bloch_state(polar: f64, azimuth: f64) -> PureState {
    PureState::new(vec![
        C64::new((polar / 2.0).cos(), 0.0),
        C64::from_polar((polar / 2.0).sin(), azimuth),
    ])
    .expect("unit vector")
}

/// Wind `ε σ_z` rotating the equator against the short way from +x to a
/// target a quarter turn clockwise and slightly north. For weak wind the
/// short way wins; for strong wind it is faster to go around with the wind.
pub fn head_on_wind(epsilon: f64) -> NavigationProblem {
    let target = bloch_state(FRAC_PI_2 - HEAD_ON_LATITUDE, -FRAC_PI_2);
    NavigationProblem::new(sigma_z().scale(epsilon), plus(), target).expect("consistent dimensions")
}

/// Three levels coupled in a chain, transfer from the bottom to the top.
pub fn qutrit_ladder() -> NavigationProblem {
    let r = |x: f64| C64::new(x, 0.0);
    let h0 = ComplexMatrix::from_rows(vec![
        vec![r(0.3), r(0.4), r(0.0)],
        vec![r(0.4), r(0.0), r(0.4)],
        vec![r(0.0), r(0.4), r(-0.3)],
    ])
    .and_then(HermitianOperator::new)
    .expect("real symmetric");
    NavigationProblem::new(h0, PureState::basis(3, 0), PureState::basis(3, 2)).expect("consistent dimensions")
}

/// Seeded random instance: wind with spectral norm up to `max_wind`.
pub fn random_instance(seed: u64, dim: usize, max_wind: f64) -> NavigationProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h0 = random_hermitian(&mut rng, dim, max_wind);
    let psi_i = random_state(&mut rng, dim);
    let psi_f = random_state(&mut rng, dim);
    NavigationProblem::new(h0, psi_i, psi_f).expect("consistent dimensions")
}

/// Instances for the optimality certificate. Each crosses its journey time
/// with slope at least 0.6, so threshold-based arrival of a near-optimal
/// competitor cannot precede the journey time by more than a few steps.
pub fn regression_set() -> Vec<(String, NavigationProblem)> {
    vec![
        ("orthogonal_zero_wind".into(), orthogonal_zero_wind()),
        ("tailwind_0.25".into(), tailwind(0.25)),
        ("tailwind_0.5".into(), tailwind(0.5)),
        ("tailwind_1".into(), tailwind(1.0)),
        ("head_on_0.1".into(), head_on_wind(0.1)),
        ("head_on_0.5".into(), head_on_wind(0.5)),
        ("head_on_1".into(), head_on_wind(1.0)),
        ("qutrit_ladder".into(), qutrit_ladder()),
        ("random_3_level".into(), random_instance(REGRESSION_SEEDS[0], 3, 1.0)),
        ("random_4_level".into(), random_instance(REGRESSION_SEEDS[1], 4, 1.0)),
    ]
}

const REGRESSION_SEEDS: [u64; 2] = [1, 2];

//! Random operators and states for ensembles and competitor controls.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, HermitianOperator, PureState, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// GUE-shaped Hermitian matrix rescaled to a spectral norm drawn uniformly
/// from `(0, max_spectral_norm]`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, max_spectral_norm: f64) -> HermitianOperator {
    let raw = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let h = HermitianOperator::from_hermitian_part(&raw);
    let norm = h.spectral_norm();
    let target = max_spectral_norm * (1.0 - rng.gen::<f64>());
    if norm == 0.0 {
        return h;
    }
    h.scale(target / norm)
}

/// Random traceless Hermitian matrix with unit Hilbert–Schmidt norm scaled by
/// a factor drawn from `(0, max_scale]`.
pub fn random_traceless_hermitian(rng: &mut impl Rng, dim: usize, max_scale: f64) -> HermitianOperator {
    let raw = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let h = HermitianOperator::from_hermitian_part(&raw).traceless_part();
    let norm = h.matrix().frobenius_norm();
    h.scale(max_scale * (1.0 - rng.gen::<f64>()) / norm)
}

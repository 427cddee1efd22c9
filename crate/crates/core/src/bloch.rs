//! Bloch-sphere coordinates of two-level states and planarity of sampled paths.

use serde::Serialize;

use crate::linalg::{ComplexMatrix, HermitianOperator, LinalgError, PureState, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    /// `ψ = (a, b) ↦ (2 Re(ā b), 2 Im(ā b), |a|² − |b|²)`
    pub fn from_state(t: f64, psi: &PureState) -> Result<Self, LinalgError> {
        if psi.dim() != 2 {
            return Err(LinalgError::DimensionMismatch { left: 2, right: psi.dim() });
        }
        let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
        let ab = a.conj() * b;
        Ok(Self { t, x: 2.0 * ab.re, y: 2.0 * ab.im, z: a.norm_sqr() - b.norm_sqr() })
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Unit normal of the plane through the origin that best fits `points`, from
/// the smallest-eigenvalue eigenvector of their scatter matrix.
pub fn best_fit_normal(points: &[[f64; 3]]) -> [f64; 3] {
    let scatter = ComplexMatrix::from_fn(3, |j, k| C64::new(points.iter().map(|p| p[j] * p[k]).sum(), 0.0));
    let eig = HermitianOperator::from_hermitian_part(&scatter).eigen();
    let v = eig.eigenvectors().matrix();
    // The column is real up to a global phase.
    let column: Vec<C64> = (0..3).map(|j| v[(j, 0)]).collect();
    let pivot = column.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(C64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    let n: Vec<f64> = column.iter().map(|c| (c * phase).re).collect();
    let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    [n[0] / len, n[1] / len, n[2] / len]
}

/// Largest distance from a sampled path to its best-fit plane through the
/// origin. Zero for arcs of great circles.
pub fn plane_fit_residual(points: &[[f64; 3]]) -> f64 {
    let n = best_fit_normal(points);
    points.iter().map(|p| (p[0] * n[0] + p[1] * n[1] + p[2] * n[2]).abs()).fold(0.0, f64::max)
}

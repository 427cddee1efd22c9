//! Vertical/horizontal decomposition of Hamiltonians relative to a ray, the
//! stabiliser algebra of a state, and the universal speed limit
//! `4ΔH² ≤ 2 tr(H²)` on traceless Hamiltonians.
//!
//! All constructions work in a frame `Q` whose first column is `ψ`. There a
//! traceless Hamiltonian has the block form
//!
//! ```text
//! [ μ   z† ]
//! [ z   C  ]
//! ```
//!
//! The block-diagonal part (μ, C) fixes the ray and is vertical; the
//! off-diagonal column `z` moves the state and is horizontal.

use thiserror::Error;

use crate::linalg::{
    hs_inner, variance, ComplexMatrix, HermitianOperator, LinalgError, PureState, UnitaryOperator, C64,
};

/// Tolerance on |tr h| for [`speed_limit_gap`].
pub const TRACELESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HorizontalityError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Hamiltonian must be traceless, tr h = {trace:e}")]
    NotTraceless { trace: f64 },
    #[error("frame's first column is not the state's ray (|overlap| = {overlap})")]
    FrameMismatch { overlap: f64 },
}

pub type Result<T> = std::result::Result<T, HorizontalityError>;

/// `h = trace_part·1 + vertical + horizontal`, with `vertical` traceless.
#[derive(Debug, Clone)]
pub struct VerticalHorizontalSplit {
    pub trace_part: f64,
    pub vertical: HermitianOperator,
    pub horizontal: HermitianOperator,
    /// |z|², equal to the variance of `h` at the state.
    pub z_norm_sq: f64,
}

impl VerticalHorizontalSplit {
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.vertical.dim();
        let shift = HermitianOperator::identity(dim).scale(self.trace_part);
        &(&shift + &self.vertical) + &self.horizontal
    }

    /// Hilbert–Schmidt norm of the vertical part.
    pub fn vertical_norm(&self) -> f64 {
        hs_inner(&self.vertical, &self.vertical).unwrap_or(0.0).max(0.0).sqrt()
    }
}

/// Unitary whose first column is `ψ`, completed with a Householder reflector.
pub fn frame_for(psi: &PureState) -> UnitaryOperator {
    let n = psi.dim();
    let amps = psi.amplitudes();
    let phase = if amps[0].norm() > 0.0 { amps[0] / amps[0].norm() } else { C64::new(1.0, 0.0) };
    // φ = e^{−iα}ψ has a real non-negative first entry; w = φ + e₀ never degenerates.
    let mut w: Vec<C64> = amps.iter().map(|z| z * phase.conj()).collect();
    w[0] += 1.0;
    let w_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let reflector = ComplexMatrix::from_fn(n, |j, k| {
        let delta = if j == k { 1.0 } else { 0.0 };
        C64::new(delta, 0.0) - w[j] * w[k].conj() * (2.0 / w_sq)
    });
    // R e₀ = −φ, so Q = −e^{iα}R sends e₀ to ψ.
    UnitaryOperator::new_unchecked(reflector.scale(-phase))
}

/// Orthonormal basis (under tr(ab)) of the traceless Hermitian generators that
/// fix the ray of `ψ`. There are (dim − 1)² of them.
pub fn stabilizer_basis(psi: &PureState) -> Vec<HermitianOperator> {
    let n = psi.dim();
    let frame = frame_for(psi);
    let mut local = Vec::with_capacity((n - 1) * (n - 1));

    // traceless diagonals, generalised Gell-Mann normalisation
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..n)
            .map(|j| match j.cmp(&k) {
                std::cmp::Ordering::Less => 1.0 / norm,
                std::cmp::Ordering::Equal => -(k as f64) / norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        local.push(HermitianOperator::from_real_diagonal(&diag));
    }
    // off-diagonal pairs inside the block orthogonal to ψ
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 1..n {
        for k in (j + 1)..n {
            let mut sym = ComplexMatrix::zeros(n);
            sym[(j, k)] = C64::new(r, 0.0);
            sym[(k, j)] = C64::new(r, 0.0);
            local.push(HermitianOperator::from_hermitian_part(&sym));
            let mut anti = ComplexMatrix::zeros(n);
            anti[(j, k)] = C64::new(0.0, -r);
            anti[(k, j)] = C64::new(0.0, r);
            local.push(HermitianOperator::from_hermitian_part(&anti));
        }
    }
    local.iter().map(|g| g.conjugate_by(&frame)).collect()
}

/// Splits `h` relative to `ψ` using the Householder frame.
pub fn split(h: &HermitianOperator, psi: &PureState) -> Result<VerticalHorizontalSplit> {
    split_in_frame(h, psi, &frame_for(psi))
}

/// Splits `h` relative to `ψ` in a caller-supplied frame whose first column
/// spans the ray of `ψ`. The result does not depend on the completion.
pub fn split_in_frame(
    h: &HermitianOperator,
    psi: &PureState,
    frame: &UnitaryOperator,
) -> Result<VerticalHorizontalSplit> {
    let n = psi.dim();
    if h.dim() != n || frame.dim() != n {
        return Err(LinalgError::DimensionMismatch { left: h.dim(), right: n }.into());
    }
    let first: Vec<C64> = (0..n).map(|j| frame.matrix()[(j, 0)]).collect();
    let overlap: C64 = first.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
    if (overlap.norm() - 1.0).abs() > 1e-10 {
        return Err(HorizontalityError::FrameMismatch { overlap: overlap.norm() });
    }

    let trace_part = h.trace() / n as f64;
    let q = frame.matrix();
    let rotated = q.adjoint().matmul(h.traceless_part().matrix()).matmul(q);

    let mut vertical = rotated.clone();
    let mut horizontal = ComplexMatrix::zeros(n);
    let mut z_norm_sq = 0.0;
    for k in 1..n {
        horizontal[(k, 0)] = rotated[(k, 0)];
        horizontal[(0, k)] = rotated[(0, k)];
        vertical[(k, 0)] = C64::new(0.0, 0.0);
        vertical[(0, k)] = C64::new(0.0, 0.0);
        z_norm_sq += rotated[(k, 0)].norm_sqr();
    }
    let back = |m: &ComplexMatrix| HermitianOperator::from_hermitian_part(&q.matmul(m).matmul(&q.adjoint()));
    Ok(VerticalHorizontalSplit { trace_part, vertical: back(&vertical), horizontal: back(&horizontal), z_norm_sq })
}

/// Horizontal Hamiltonian at `ψ` with off-diagonal column `z` (length dim − 1)
/// in the Householder frame.
pub fn horizontal_from_column(psi: &PureState, z: &[C64]) -> HermitianOperator {
    let n = psi.dim();
    assert_eq!(z.len(), n - 1, "column length must be dim - 1");
    let mut local = ComplexMatrix::zeros(n);
    for (k, zk) in z.iter().enumerate() {
        local[(k + 1, 0)] = *zk;
        local[(0, k + 1)] = zk.conj();
    }
    HermitianOperator::from_hermitian_part(&local).conjugate_by(&frame_for(psi))
}

/// max_g |tr(h g)| over the stabiliser basis.
pub fn horizontality_residual(h: &HermitianOperator, psi: &PureState) -> Result<f64> {
    let mut worst = 0.0_f64;
    for g in stabilizer_basis(psi) {
        worst = worst.max(hs_inner(h, &g)?.abs());
    }
    Ok(worst)
}

/// True iff `h` is Hilbert–Schmidt orthogonal (to `tol`) to every generator
/// fixing the ray of `ψ`.
pub fn is_horizontal(h: &HermitianOperator, psi: &PureState, tol: f64) -> Result<bool> {
    Ok(horizontality_residual(h, psi)? < tol)
}

/// Same test through the norm of the vertical part.
pub fn is_horizontal_by_split(h: &HermitianOperator, psi: &PureState, tol: f64) -> Result<bool> {
    Ok(split(h, psi)?.vertical_norm() < tol)
}

/// Squared Fubini–Study speed 4ΔH² of the motion `h` generates at `ψ`.
pub fn aa_speed_sq(h: &HermitianOperator, psi: &PureState) -> Result<f64> {
    Ok(4.0 * variance(h, psi)?)
}

/// `2 tr(h²) − 4ΔH²` for traceless `h`; zero exactly when `h` is horizontal.
pub fn speed_limit_gap(h: &HermitianOperator, psi: &PureState) -> Result<f64> {
    let trace = h.trace();
    if trace.abs() > TRACELESS_TOL {
        return Err(HorizontalityError::NotTraceless { trace });
    }
    Ok(2.0 * hs_inner(h, h)? - aa_speed_sq(h, psi)?)
}

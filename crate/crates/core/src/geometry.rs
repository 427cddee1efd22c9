//! Travel time through wind on a tangent space, its Kropina limit, and the
//! Fubini–Study angular distance between rays.
//!
//! Tangent vectors on state space are represented by the Hamiltonians that
//! generate them. The squared Fubini–Study speed of the motion generated by `h`
//! at `ψ` is `4ΔH²`, and the pairing of two such velocities is four times the
//! symmetrised covariance.

use thiserror::Error;

use crate::linalg::{covariance, inner, variance, HermitianOperator, LinalgError, PureState};
use crate::propagator::Trajectory;

/// Width of the band around `|w|² = 1` where the Kropina form is used.
pub const KROPINA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid tangent data: {0}")]
    InvalidTangent(String),
    #[error("direction unreachable against dominant wind (|w|² = {wind_norm_sq}, ⟨w,ξ⟩ = {wind_dot_xi})")]
    Unreachable { wind_norm_sq: f64, wind_dot_xi: f64 },
    #[error("trajectory needs at least two samples, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Squared lengths and pairing of the wind `w` and a displacement `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentData {
    wind_norm_sq: f64,
    xi_norm_sq: f64,
    wind_dot_xi: f64,
}

impl TangentData {
    pub fn new(wind_norm_sq: f64, xi_norm_sq: f64, wind_dot_xi: f64) -> Result<Self> {
        if !(wind_norm_sq >= 0.0 && xi_norm_sq >= 0.0 && wind_dot_xi.is_finite()) {
            return Err(GeometryError::InvalidTangent(format!(
                "|w|² = {wind_norm_sq}, |ξ|² = {xi_norm_sq}, ⟨w,ξ⟩ = {wind_dot_xi}"
            )));
        }
        let bound = wind_norm_sq * xi_norm_sq;
        if wind_dot_xi * wind_dot_xi > bound + 1e-12 * (1.0 + bound) {
            return Err(GeometryError::InvalidTangent(format!(
                "Cauchy-Schwarz violated: ⟨w,ξ⟩² = {} > |w|²|ξ|² = {bound}",
                wind_dot_xi * wind_dot_xi
            )));
        }
        Ok(Self { wind_norm_sq, xi_norm_sq, wind_dot_xi })
    }

    pub fn wind_norm_sq(&self) -> f64 {
        self.wind_norm_sq
    }

    pub fn xi_norm_sq(&self) -> f64 {
        self.xi_norm_sq
    }

    pub fn wind_dot_xi(&self) -> f64 {
        self.wind_dot_xi
    }

    /// Same wind, displacement scaled by `s`.
    pub fn scale_xi(&self, s: f64) -> Self {
        Self { xi_norm_sq: s * s * self.xi_norm_sq, wind_dot_xi: s * self.wind_dot_xi, ..*self }
    }
}

/// Time needed to cover the displacement ξ at unit own-speed through wind w.
///
/// For weak wind this is the Randers form
/// `(√(⟨w,ξ⟩² + |ξ|²(1−|w|²)) − ⟨w,ξ⟩) / (1−|w|²)`; at `|w| = 1` it becomes
/// `|ξ|² / 2⟨w,ξ⟩`, and for dominant wind it is the smaller positive root of
/// `(1−|w|²)F² + 2⟨w,ξ⟩F − |ξ|² = 0`. All branches are evaluated through the
/// rationalised form `|ξ|² / (⟨w,ξ⟩ + √D)` whenever `⟨w,ξ⟩ > 0`, which avoids
/// cancellation.
pub fn randers_time(td: &TangentData) -> Result<f64> {
    let TangentData { wind_norm_sq: w2, xi_norm_sq: x2, wind_dot_xi: b } = *td;
    if x2 == 0.0 {
        return Ok(0.0);
    }
    let gap = 1.0 - w2;
    if gap.abs() < KROPINA_TOL && b > 0.0 {
        return Ok(x2 / (2.0 * b));
    }
    if gap > 0.0 {
        let root = (b * b + x2 * gap).sqrt();
        return Ok(if b > 0.0 { x2 / (b + root) } else { (root - b) / gap });
    }
    let unreachable = GeometryError::Unreachable { wind_norm_sq: w2, wind_dot_xi: b };
    if b <= 0.0 {
        return Err(unreachable);
    }
    let disc = b * b + x2 * gap;
    if disc < 0.0 {
        return Err(unreachable);
    }
    Ok(x2 / (b + disc.sqrt()))
}

/// Fubini–Study angle θ ∈ [0, π] with cos(θ/2) = |⟨a|b⟩|.
///
/// Evaluated as `2·atan2(‖b − ⟨a|b⟩a‖, |⟨a|b⟩|)`, which equals
/// `2·arccos|⟨a|b⟩|` but stays accurate for nearly coincident rays.
pub fn fubini_study_angle(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = inner(a, b)?;
    let perp: f64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (y - overlap * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(2.0 * perp.atan2(overlap.norm()))
}

/// Tangent data of the velocity generated by `h0 + h1` against the wind
/// generated by `h0`, both at `ψ`.
pub fn quantum_tangent_data(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    psi: &PureState,
) -> Result<TangentData> {
    if h0.dim() != h1.dim() {
        return Err(LinalgError::DimensionMismatch { left: h0.dim(), right: h1.dim() }.into());
    }
    let total = h0 + h1;
    let wind_norm_sq = 4.0 * variance(h0, psi)?;
    let xi_norm_sq = 4.0 * variance(&total, psi)?;
    let wind_dot_xi = 4.0 * covariance(h0, &total, psi)?;
    TangentData::new(wind_norm_sq, xi_norm_sq, wind_dot_xi)
}

/// Left Riemann sum of the travel time along a sampled trajectory, using the
/// control recorded at each sample.
pub fn path_journey_time(trajectory: &Trajectory, h0: &HermitianOperator) -> Result<f64> {
    let n = trajectory.len();
    if n < 2 {
        return Err(GeometryError::TooFewSamples(n));
    }
    let times = trajectory.times();
    let mut total = 0.0;
    for k in 0..n - 1 {
        let td = quantum_tangent_data(h0, &trajectory.controls()[k], &trajectory.states()[k])?;
        total += randers_time(&td)? * (times[k + 1] - times[k]);
    }
    Ok(total)
}

//! Minimal-time navigation between two pure states under a fixed wind
//! Hamiltonian.
//!
//! The journey time is the smallest positive root of
//!
//! ```text
//! f(T) = 2 arccos |⟨ψ_I| e^{iH₀T} |ψ_F⟩| − T
//! ```
//!
//! In the frame co-moving with the wind the target drifts along
//! `e^{iH₀t}ψ_F` while the controlled state moves at unit speed, so it can
//! reach the target no earlier than the first time `f` reaches zero. The
//! optimal control travels the geodesic of that frame and is carried along
//! the wind's adjoint orbit in the lab frame.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{fubini_study_angle, GeometryError, quantum_tangent_data, randers_time};
use crate::horizontality::horizontality_residual;
use crate::linalg::{
    expm_unitary, hs_inner, inner, projective_fidelity, variance, ComplexMatrix, Eigendecomposition,
    HermitianOperator, LinalgError, PureState, UnitaryOperator, C64,
};
use crate::propagator::{propagate_ordered, AdjointOrbitSchedule, PropagatorError, Trajectory};

pub const DEFAULT_T_MAX: f64 = 4.0 * PI;
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Below this value of sin(T/2) the control formula is treated as singular.
pub const SINGULAR_SIN_TOL: f64 = 1e-9;
/// Overlaps smaller than this carry no usable phase.
const ZERO_OVERLAP: f64 = 1e-14;
/// Number of samples in the verification grid over [0, T].
pub const VERIFY_GRID: usize = 100;

pub const ARRIVAL_TOL: f64 = 1e-9;
pub const NORM_CONDITION_TOL: f64 = 1e-9;
pub const HORIZONTALITY_TOL: f64 = 1e-8;
pub const THROTTLE_TOL: f64 = 1e-6;
pub const UNIT_TIME_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no journey time found in (0, {t_max}]; smallest mismatch observed was {min_mismatch:.6e} at t = {argmin:.6}; raise t_max")]
    HorizonExceeded { t_max: f64, min_mismatch: f64, argmin: f64 },
    #[error("control formula is singular at T = {t_star:e} (sin(T/2) = {sin_half:e}); inspect the root scan near 0")]
    Singular { t_star: f64, sin_half: f64 },
}

pub type Result<T> = std::result::Result<T, SolveError>;

/// Wind, endpoints, and root-finding settings.
#[derive(Debug, Clone)]
pub struct NavigationProblem {
    h0: HermitianOperator,
    psi_i: PureState,
    psi_f: PureState,
    t_max: f64,
    root_tol: f64,
    scan_step: Option<f64>,
}

impl NavigationProblem {
    pub fn new(h0: HermitianOperator, psi_i: PureState, psi_f: PureState) -> Result<Self> {
        for dim in [psi_i.dim(), psi_f.dim()] {
            if dim != h0.dim() {
                return Err(LinalgError::DimensionMismatch { left: h0.dim(), right: dim }.into());
            }
        }
        Ok(Self { h0, psi_i, psi_f, t_max: DEFAULT_T_MAX, root_tol: DEFAULT_ROOT_TOL, scan_step: None })
    }

    pub fn with_t_max(mut self, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(SolveError::InvalidProblem(format!("t_max must be positive and finite, got {t_max}")));
        }
        self.t_max = t_max;
        Ok(self)
    }

    pub fn with_root_tol(mut self, root_tol: f64) -> Result<Self> {
        if !(root_tol > 0.0 && root_tol.is_finite()) {
            return Err(SolveError::InvalidProblem(format!("root_tol must be positive, got {root_tol}")));
        }
        self.root_tol = root_tol;
        Ok(self)
    }

    pub fn with_scan_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(SolveError::InvalidProblem(format!("scan step must be positive, got {step}")));
        }
        self.scan_step = Some(step);
        Ok(self)
    }

    /// Same endpoints and settings under the wind `ε·H₀`.
    pub fn with_wind_scale(&self, epsilon: f64) -> Self {
        Self { h0: self.h0.scale(epsilon), ..self.clone() }
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn psi_i(&self) -> &PureState {
        &self.psi_i
    }

    pub fn psi_f(&self) -> &PureState {
        &self.psi_f
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn root_tol(&self) -> f64 {
        self.root_tol
    }

    /// Explicit scan step, or `min(0.01, π/(64(1 + ‖H₀‖)))`.
    pub fn scan_step(&self) -> f64 {
        self.scan_step.unwrap_or_else(|| (PI / (64.0 * (1.0 + self.h0.spectral_norm()))).min(0.01))
    }

    /// `f(t)` evaluated directly, without the eigenbasis shortcut.
    pub fn mismatch(&self, t: f64) -> f64 {
        let moved = expm_unitary(&self.h0, -t).apply(&self.psi_f);
        fubini_study_angle(&self.psi_i, &moved).expect("dimensions checked on construction") - t
    }
}

/// `f(t)` in O(n) per evaluation, in the eigenbasis of the wind.
struct MismatchFn {
    eigenvalues: Vec<f64>,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl MismatchFn {
    fn new(p: &NavigationProblem, eig: &Eigendecomposition) -> Self {
        let v = eig.eigenvectors().adjoint();
        Self {
            eigenvalues: eig.eigenvalues().to_vec(),
            a: v.matrix().mul_vec(p.psi_i.amplitudes()),
            b: v.matrix().mul_vec(p.psi_f.amplitudes()),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let moved: Vec<C64> =
            self.b.iter().zip(&self.eigenvalues).map(|(bk, l)| bk * C64::from_polar(1.0, l * t)).collect();
        let ov: C64 = self.a.iter().zip(&moved).map(|(x, y)| x.conj() * y).sum();
        let perp_sq: f64 = self.a.iter().zip(&moved).map(|(x, y)| (y - x * ov).norm_sqr()).sum();
        2.0 * perp_sq.sqrt().atan2(ov.norm()) - t
    }
}

/// Outcome of the root search for the journey time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootReport {
    pub t_star: f64,
    /// f(T) at the returned root.
    pub residual: f64,
    /// Smallest f on the scan grid strictly before the bracket. A value near
    /// zero flags a near-tangent earlier root that the scan stepped over.
    pub scan_min_before_root: f64,
    pub scan_step: f64,
    /// −f'(T) by central difference. Arrival tests with a fidelity threshold
    /// fire roughly (distance at threshold)/slope before T.
    pub crossing_slope: f64,
    pub trivial: bool,
}

/// Locates the smallest root of `f` in (0, t_max] with full diagnostics.
pub fn find_journey_time(p: &NavigationProblem) -> Result<RootReport> {
    let f = MismatchFn::new(p, &p.h0.eigen());
    let step = p.scan_step();
    let f0 = f.eval(0.0);
    if f0 <= p.root_tol {
        return Ok(RootReport {
            t_star: 0.0,
            residual: f0,
            scan_min_before_root: f64::INFINITY,
            scan_step: step,
            crossing_slope: f64::NAN,
            trivial: true,
        });
    }

    let mut lo = 0.0;
    let mut f_lo = f0;
    let mut min_seen = f0;
    let mut argmin = 0.0;
    let mut k = 1usize;
    loop {
        let t = (k as f64 * step).min(p.t_max);
        let ft = f.eval(t);
        if ft <= 0.0 {
            let (t_star, residual) = bisect(&f, lo, t, f_lo, p.root_tol);
            let h = 1e-6;
            let crossing_slope = (f.eval((t_star - h).max(0.0)) - f.eval(t_star + h)) / (t_star + h - (t_star - h).max(0.0));
            return Ok(RootReport {
                t_star,
                residual,
                scan_min_before_root: min_seen,
                scan_step: step,
                crossing_slope,
                trivial: false,
            });
        }
        if ft < min_seen {
            min_seen = ft;
            argmin = t;
        }
        if t >= p.t_max {
            return Err(SolveError::HorizonExceeded { t_max: p.t_max, min_mismatch: min_seen, argmin });
        }
        lo = t;
        f_lo = ft;
        k += 1;
    }
}

/// Bisection on a bracket with f(lo) > 0 ≥ f(hi).
fn bisect(f: &MismatchFn, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> (f64, f64) {
    let f_hi = f.eval(hi);
    let (mut best, mut best_f) = if f_hi.abs() < f_lo.abs() { (hi, f_hi) } else { (lo, f_lo) };
    for _ in 0..200 {
        if best_f.abs() < 0.1 * tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f.eval(mid);
        if fm.abs() < best_f.abs() {
            best = mid;
            best_f = fm;
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (best, best_f)
}

/// Smallest positive journey time; 0 when the endpoints share a ray.
pub fn journey_time(p: &NavigationProblem) -> Result<f64> {
    Ok(find_journey_time(p)?.t_star)
}

/// ⟨ψ_I| e^{iH₀t} |ψ_F⟩
fn moving_overlap(p: &NavigationProblem, t: f64) -> (PureState, C64) {
    let moved = expm_unitary(&p.h0, -t).apply(&p.psi_f);
    let ov = inner(&p.psi_i, &moved).expect("dimensions checked on construction");
    (moved, ov)
}

/// `e^{iφ}ψ_F` with `⟨ψ_I|e^{iH₀t}|·⟩` real and non-negative.
pub fn align_phase(p: &NavigationProblem, t_star: f64) -> PureState {
    let (_, ov) = moving_overlap(p, t_star);
    if ov.norm() < ZERO_OVERLAP {
        return p.psi_f.clone();
    }
    p.psi_f.times_unit(ov.conj() / ov.norm())
}

/// Control Hamiltonian at time zero,
/// `i(|ψ_I⟩⟨χ| − |χ⟩⟨ψ_I|) / (2 sin(T/2))` with `χ = e^{iH₀T}ψ_F`.
///
/// With `⟨ψ_I|χ⟩ = c > 0` the generated rotation ends on the reflection of
/// `χ` through `ψ_I`, not on its ray. The representative of `χ` with real
/// non-positive overlap is therefore used, and the rotation ends at `−χ`.
pub fn initial_control(p: &NavigationProblem, t_star: f64) -> Result<HermitianOperator> {
    let (moved, ov) = moving_overlap(p, t_star);
    if t_star == 0.0 && fubini_study_angle(&p.psi_i, &moved)? <= p.root_tol {
        return Ok(HermitianOperator::zeros(p.dim()));
    }
    let sin_half = (0.5 * t_star).sin();
    if t_star <= 0.0 || sin_half.abs() < SINGULAR_SIN_TOL {
        return Err(SolveError::Singular { t_star, sin_half });
    }
    let chi = if ov.norm() < ZERO_OVERLAP { moved } else { moved.times_unit(-ov.conj() / ov.norm()) };
    let a = ComplexMatrix::outer(p.psi_i.amplitudes(), chi.amplitudes())?;
    let raw = (&a - &a.adjoint()).scale(C64::new(0.0, 1.0 / (2.0 * sin_half)));
    Ok(HermitianOperator::from_hermitian_part(&raw))
}

/// Residuals of a solution against the properties an optimal control must have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub trivial: bool,
    /// |ψ(T)| overlap with ψ_F along the closed-form trajectory.
    pub arrival_fidelity: f64,
    /// |2 tr(H₁(0)²) − 1|, or |2 tr(H₁(0)²)| for the trivial instance.
    pub norm_residual: f64,
    /// Max over the grid of |tr(H₁(t) g)| for stabiliser generators g of ψ(t).
    pub horizontality_residual: f64,
    /// Max over the grid of |4 Var(H₁(t), ψ(t)) − 1|.
    pub full_throttle_residual: f64,
    /// Max over the grid of |F(velocity) − 1| for the travel-time function.
    pub unit_time_residual: f64,
    /// Overlap of e^{−iH₁(0)T}ψ_I with e^{iH₀T}ψ_F.
    pub moving_frame_fidelity: f64,
    /// |θ(T) − T|.
    pub theta_residual: f64,
    /// Spread of the spectrum of H₁(t) over t ∈ {0, T/2, T}.
    pub spectrum_drift: f64,
    pub root_residual: f64,
    pub scan_min_before_root: f64,
    #[serde(skip)]
    root_tol: f64,
}

/// One named residual with its limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    /// `true` when the value must reach the limit from above, as for fidelities.
    pub at_least: bool,
    pub pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, at_least: false, pass: value < limit }
    }

    fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, at_least: true, pass: value >= limit }
    }
}

impl Diagnostics {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_least("arrival_fidelity", self.arrival_fidelity, 1.0 - ARRIVAL_TOL),
            Check::below("norm_condition", self.norm_residual, NORM_CONDITION_TOL),
            Check::below("horizontality", self.horizontality_residual, HORIZONTALITY_TOL),
            Check::below("full_throttle", self.full_throttle_residual, THROTTLE_TOL),
            Check::below("unit_travel_time", self.unit_time_residual, UNIT_TIME_TOL),
            Check::at_least("moving_frame_fidelity", self.moving_frame_fidelity, 1.0 - ARRIVAL_TOL),
            Check::below("theta", self.theta_residual, 10.0 * self.root_tol),
            Check::below("spectrum_drift", self.spectrum_drift, NORM_CONDITION_TOL),
        ]
    }

    /// Names of the checks that fail their limits.
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks().into_iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }
}

/// Journey time, optimal control, and the data needed to evaluate both along
/// the path.
#[derive(Debug, Clone)]
pub struct NavigationSolution {
    pub t_star: f64,
    pub theta: f64,
    pub h1_initial: HermitianOperator,
    pub aligned_psi_f: PureState,
    pub root: RootReport,
    pub diagnostics: Diagnostics,
    wind: HermitianOperator,
    psi_i: PureState,
    wind_eig: Eigendecomposition,
    control_eig: Eigendecomposition,
}

impl NavigationSolution {
    fn assemble(p: &NavigationProblem, root: RootReport, h1_initial: HermitianOperator) -> Self {
        let t_star = root.t_star;
        let (moved, _) = moving_overlap(p, t_star);
        let theta = fubini_study_angle(&p.psi_i, &moved).expect("dimensions checked");
        let control_eig = h1_initial.eigen();
        let mut sol = Self {
            t_star,
            theta,
            h1_initial,
            aligned_psi_f: align_phase(p, t_star),
            root,
            diagnostics: Diagnostics {
                trivial: root.trivial,
                arrival_fidelity: f64::NAN,
                norm_residual: f64::NAN,
                horizontality_residual: f64::NAN,
                full_throttle_residual: f64::NAN,
                unit_time_residual: f64::NAN,
                moving_frame_fidelity: f64::NAN,
                theta_residual: f64::NAN,
                spectrum_drift: f64::NAN,
                root_residual: root.residual,
                scan_min_before_root: root.scan_min_before_root,
                root_tol: p.root_tol,
            },
            wind: p.h0.clone(),
            psi_i: p.psi_i.clone(),
            wind_eig: p.h0.eigen(),
            control_eig,
        };
        sol.diagnostics = verify_solution(p, &sol);
        sol
    }

    /// Same journey time with a different initial control, re-verified. Used
    /// to inspect how the checks respond to a deliberately wrong control.
    pub fn with_initial_control(&self, p: &NavigationProblem, h1: HermitianOperator) -> Self {
        Self::assemble(p, self.root, h1)
    }

    pub fn wind(&self) -> &HermitianOperator {
        &self.wind
    }

    pub fn psi_i(&self) -> &PureState {
        &self.psi_i
    }

    /// `H₁(t) = e^{−iH₀t} H₁(0) e^{iH₀t}`
    pub fn control_at(&self, t: f64) -> HermitianOperator {
        if t == 0.0 {
            return self.h1_initial.clone();
        }
        self.h1_initial.conjugate_by(&self.wind_eig.exp_unitary(t))
    }

    /// `û(t) = e^{−iH₀t} e^{−iH₁(0)t}`
    pub fn unitary_at(&self, t: f64) -> UnitaryOperator {
        self.wind_eig.exp_unitary(t).compose(&self.control_eig.exp_unitary(t))
    }

    /// `ψ(t) = e^{−iH₀t} e^{−iH₁(0)t} ψ_I`
    pub fn propagate_closed_form(&self, t: f64) -> PureState {
        self.wind_eig.evolve(&self.control_eig.evolve(&self.psi_i, t), t)
    }

    /// The optimal control as a schedule for the time-ordered propagator.
    pub fn schedule(&self) -> AdjointOrbitSchedule {
        AdjointOrbitSchedule::new(&self.wind, self.h1_initial.clone())
    }

    /// Closed-form samples on the grid `⌈T/dt⌉` equal steps over [0, T].
    pub fn trajectory(&self, dt: f64) -> Result<Trajectory> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PropagatorError::InvalidStep(dt).into());
        }
        let steps = crate::propagator::grid_steps(self.t_star, dt);
        let step = if steps == 0 { dt } else { self.t_star / steps as f64 };
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * step).collect();
        let states = times.iter().map(|&t| self.propagate_closed_form(t)).collect();
        let controls = times.iter().map(|&t| self.control_at(t)).collect();
        Ok(Trajectory::from_parts(times, states, controls, step))
    }

    /// Time-ordered propagation of the optimal control over [0, T].
    pub fn propagate_ordered(&self, dt: f64) -> Result<Trajectory> {
        Ok(propagate_ordered(&self.wind, self.schedule(), self.psi_i.clone(), self.t_star, dt)?)
    }
}

/// Journey time, control, and verification in one call.
pub fn solve(p: &NavigationProblem) -> Result<NavigationSolution> {
    let root = find_journey_time(p)?;
    let h1 = initial_control(p, root.t_star)?;
    Ok(NavigationSolution::assemble(p, root, h1))
}

/// Recomputes every residual from the problem and the solution's control,
/// using the general-purpose routines rather than the solver's shortcuts.
pub fn verify_solution(p: &NavigationProblem, sol: &NavigationSolution) -> Diagnostics {
    let t_star = sol.t_star;
    let h1 = &sol.h1_initial;
    let trivial = sol.root.trivial;

    let closed = |t: f64| expm_unitary(&p.h0, t).apply(&expm_unitary(h1, t).apply(&p.psi_i));
    let fidelity = |a: &PureState, b: &PureState| projective_fidelity(a, b).unwrap_or(f64::NAN);

    let arrival_fidelity = fidelity(&closed(t_star), &p.psi_f);
    let target_in_frame = expm_unitary(&p.h0, -t_star).apply(&p.psi_f);
    let moving_frame_fidelity = fidelity(&expm_unitary(h1, t_star).apply(&p.psi_i), &target_in_frame);
    let hs = hs_inner(h1, h1).unwrap_or(f64::NAN);
    let norm_residual = if trivial { (2.0 * hs).abs() } else { (2.0 * hs - 1.0).abs() };
    let theta = fubini_study_angle(&p.psi_i, &target_in_frame).unwrap_or(f64::NAN);

    let mut horizontality = 0.0_f64;
    let mut throttle = 0.0_f64;
    let mut unit_time = 0.0_f64;
    for k in 0..VERIFY_GRID {
        let t = t_star * k as f64 / (VERIFY_GRID - 1) as f64;
        let psi = closed(t);
        let control = h1.conjugate_by(&expm_unitary(&p.h0, t));
        horizontality = horizontality.max(horizontality_residual(&control, &psi).unwrap_or(f64::NAN));
        if trivial {
            continue;
        }
        let speed_sq = 4.0 * variance(&control, &psi).unwrap_or(f64::NAN);
        throttle = throttle.max((speed_sq - 1.0).abs());
        let f = quantum_tangent_data(&p.h0, &control, &psi)
            .ok()
            .and_then(|td| randers_time(&td).ok())
            .unwrap_or(f64::INFINITY);
        unit_time = unit_time.max((f - 1.0).abs());
    }

    let spectrum = |t: f64| h1.conjugate_by(&expm_unitary(&p.h0, t)).eigen().eigenvalues().to_vec();
    let base = spectrum(0.0);
    let spectrum_drift = [0.5 * t_star, t_star]
        .iter()
        .map(|&t| spectrum(t).iter().zip(&base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);

    Diagnostics {
        trivial,
        arrival_fidelity,
        norm_residual,
        horizontality_residual: horizontality,
        full_throttle_residual: throttle,
        unit_time_residual: unit_time,
        moving_frame_fidelity,
        theta_residual: (theta - t_star).abs(),
        spectrum_drift,
        root_residual: sol.root.residual,
        scan_min_before_root: sol.root.scan_min_before_root,
        root_tol: p.root_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horizontality::is_horizontal;
    use crate::linalg::pauli::*;
    use crate::sampling::{random_hermitian, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn orthogonal_zero_wind() -> NavigationProblem {
        NavigationProblem::new(HermitianOperator::zeros(2), PureState::basis(2, 0), PureState::basis(2, 1)).unwrap()
    }

    fn tailwind(eps: f64) -> NavigationProblem {
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let minus = PureState::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        NavigationProblem::new(sigma_z().scale(eps / 2.0), plus, minus).unwrap()
    }

    #[test]
    fn orthogonal_states_without_wind() {
        let p = orthogonal_zero_wind();
        let sol = solve(&p).unwrap();
        assert!((sol.t_star - PI).abs() < 1e-12);
        let expected = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 0.5)], vec![c(0.0, -0.5), c(0.0, 0.0)]])
            .unwrap();
        assert!(sol.h1_initial.matrix().max_abs_diff(&expected) < 1e-12);
        assert!(sol.h1_initial.matrix().max_abs_diff(sigma_y().scale(-0.5).matrix()) < 1e-12);
        let end = expm_unitary(&sol.h1_initial, PI).apply(p.psi_i());
        assert!(end.distance(&PureState::new(vec![c(0.0, 0.0), c(-1.0, 0.0)]).unwrap()) < 1e-12);
        let mid = sol.propagate_closed_form(FRAC_PI_2);
        assert!((projective_fidelity(&mid, p.psi_i()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((projective_fidelity(&mid, p.psi_f()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(sol.diagnostics.passed(), "{:?}", sol.diagnostics);
        assert!(sol.diagnostics.full_throttle_residual < 1e-10);
    }

    #[test]
    fn tailwind_family_closed_form() {
        for k in 0..=10 {
            let eps = k as f64 / 10.0;
            let p = tailwind(eps);
            let sol = solve(&p).unwrap();
            assert!((sol.t_star - PI / (1.0 + eps)).abs() < 1e-10, "eps = {eps}");
            assert!(sol.diagnostics.passed(), "eps = {eps}: {:?}", sol.diagnostics.failures());
        }
    }

    #[test]
    fn same_ray_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_state(&mut rng, 3);
        let p = NavigationProblem::new(random_hermitian(&mut rng, 3, 1.0), psi.clone(), psi.with_phase(1.3)).unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.t_star, 0.0);
        assert!(sol.root.trivial);
        assert_eq!(sol.h1_initial.matrix().max_abs(), 0.0);
        assert!(sol.diagnostics.passed(), "{:?}", sol.diagnostics.failures());
    }

    #[test]
    fn mismatch_shortcut_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = NavigationProblem::new(
            random_hermitian(&mut rng, 4, 2.0),
            random_state(&mut rng, 4),
            random_state(&mut rng, 4),
        )
        .unwrap();
        let f = MismatchFn::new(&p, &p.h0.eigen());
        for t in [0.0, 0.3, 1.1, 2.9] {
            assert!((f.eval(t) - p.mismatch(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_alignment() {
        let p = orthogonal_zero_wind();
        assert_eq!(align_phase(&p, PI).amplitudes(), p.psi_f().amplitudes());

        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let p = NavigationProblem::new(HermitianOperator::zeros(2), plus.clone(), plus.times_unit(c(0.0, 1.0))).unwrap();
        let aligned = align_phase(&p, 0.0);
        assert!(aligned.distance(&plus) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let p = NavigationProblem::new(
                random_hermitian(&mut rng, 3, 2.0),
                random_state(&mut rng, 3),
                random_state(&mut rng, 3),
            )
            .unwrap();
            let t = journey_time(&p).unwrap();
            let aligned = align_phase(&p, t);
            let ov = inner(p.psi_i(), &expm_unitary(p.h0(), -t).apply(&aligned)).unwrap();
            assert!(ov.im.abs() < 1e-12 && ov.re >= 0.0);
        }
    }

    #[test]
    fn horizon_exceeded_reports_minimum() {
        let p = orthogonal_zero_wind().with_t_max(1.0).unwrap();
        match journey_time(&p) {
            Err(SolveError::HorizonExceeded { t_max, min_mismatch, .. }) => {
                assert_eq!(t_max, 1.0);
                assert!((min_mismatch - (PI - 1.0)).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tiny_separation_is_singular() {
        let psi_f = PureState::normalized(vec![c(1.0, 0.0), c(1e-10, 0.0)]).unwrap();
        let p = NavigationProblem::new(HermitianOperator::zeros(2), PureState::basis(2, 0), psi_f).unwrap();
        assert!(matches!(solve(&p), Err(SolveError::Singular { .. })));
    }

    #[test]
    fn control_orbit_examples() {
        let sol = solve(&orthogonal_zero_wind()).unwrap();
        assert_eq!(sol.control_at(0.0).matrix(), sol.h1_initial.matrix());
        assert!(sol.control_at(1.2).matrix().max_abs_diff(sol.h1_initial.matrix()) < 1e-15);

        // H₀ ∝ H₁(0) commutes with it.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = NavigationProblem::new(HermitianOperator::zeros(3), random_state(&mut rng, 3), random_state(&mut rng, 3))
            .unwrap();
        let sol = solve(&p).unwrap();
        let p = NavigationProblem::new(sol.h1_initial.scale(0.4), p.psi_i().clone(), p.psi_f().clone()).unwrap();
        let sol = solve(&p).unwrap();
        assert!(sol.control_at(0.7).matrix().max_abs_diff(sol.h1_initial.matrix()) < 1e-12);
    }

    #[test]
    fn perturbation_is_flagged_as_horizontality() {
        // σ_z fixes the ray of ψ_I = |0⟩, so the perturbation is purely vertical.
        let p = orthogonal_zero_wind();
        let sol = solve(&p).unwrap();
        let bad = sol.with_initial_control(&p, &sol.h1_initial + &sigma_z().scale(0.01));
        assert!(bad.diagnostics.horizontality_residual > 1e-3);
        assert!(bad.diagnostics.failures().contains(&"horizontality"));
    }

    #[test]
    fn random_instances_satisfy_every_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in [2, 3, 4] {
            for _ in 0..10 {
                let p = NavigationProblem::new(
                    random_hermitian(&mut rng, dim, 2.0),
                    random_state(&mut rng, dim),
                    random_state(&mut rng, dim),
                )
                .unwrap();
                let sol = solve(&p).unwrap();
                assert!(sol.diagnostics.passed(), "{:?}", sol.diagnostics);
                assert!(is_horizontal(&sol.h1_initial, p.psi_i(), 1e-8).unwrap());
                assert!((sol.theta - sol.t_star).abs() < 1e-11);
                // f stays positive on the scan grid before the root.
                let step = p.scan_step();
                let mut t = step;
                while t < sol.t_star - p.root_tol {
                    assert!(p.mismatch(t) > 0.0);
                    t += step;
                }
            }
        }
    }

    #[test]
    fn geodesic_speed_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = NavigationProblem::new(
            random_hermitian(&mut rng, 3, 1.5),
            random_state(&mut rng, 3),
            random_state(&mut rng, 3),
        )
        .unwrap();
        let sol = solve(&p).unwrap();
        let delta = 1e-4;
        for t in [0.1, 0.5 * sol.t_star, sol.t_star - 0.1] {
            let d = fubini_study_angle(&sol.propagate_closed_form(t), &sol.propagate_closed_form(t + delta)).unwrap();
            // The lab-frame speed includes the wind; unit speed holds for the control part.
            let moving = fubini_study_angle(
                &expm_unitary(&sol.h1_initial, t).apply(p.psi_i()),
                &expm_unitary(&sol.h1_initial, t + delta).apply(p.psi_i()),
            )
            .unwrap();
            assert!((moving - delta).abs() < 1e-9);
            assert!(d > 0.0);
        }
    }
}

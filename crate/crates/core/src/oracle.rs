//! Sampled optimality evidence: admissible competitor controls are propagated
//! and none may reach the target noticeably before the solver's journey time.
//!
//! The evidence is statistical. Competitors are drawn from two families:
//! the optimal family with a wrong aim (`e^{−iH₀t}K e^{iH₀t}` for random
//! horizontal unit-norm `K`), and four-segment piecewise-constant controls
//! that are re-horizontalised at the state where each segment starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::horizontality::{horizontal_from_column, split};
use crate::linalg::{hs_inner, projective_fidelity, HermitianOperator, PureState, UnitaryOperator, C64};
use crate::propagator::{grid_steps, AdjointOrbitSchedule, HamiltonianSource, OrderedStepper, PropagatorError};
use crate::solver::{solve, NavigationProblem, SolveError};

pub const DEFAULT_FID_THRESHOLD: f64 = 1.0 - 1e-6;
/// Slack on `2 tr(H₁²) ≤ 1` for admissible schedules.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;
/// Competitors may arrive this many steps before the journey time.
pub const MARGIN_STEPS: f64 = 5.0;
pub const PIECEWISE_SEGMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("inadmissible control at t = {t}: 2 tr(H₁²) = {norm}")]
    Inadmissible { t: f64, norm: f64 },
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Horizontal control at `ψ` with `2 tr(H²) = 1`, uniform on the sphere of
/// off-diagonal columns of length 1/2 in the frame of `ψ`.
pub fn random_horizontal_control(psi: &PureState, rng: &mut impl Rng) -> HermitianOperator {
    let n = psi.dim();
    loop {
        let z: Vec<C64> =
            (0..n - 1).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let z: Vec<C64> = z.iter().map(|v| v * (0.5 / norm)).collect();
            return horizontal_from_column(psi, &z);
        }
    }
}

/// Piecewise-constant control. At the start of each segment the stored
/// generator is projected onto the horizontal space of the current state and
/// rescaled to unit norm.
#[derive(Debug, Clone)]
pub struct PiecewiseSchedule {
    segment_length: f64,
    generators: Vec<HermitianOperator>,
    active: Option<(usize, HermitianOperator)>,
}

impl PiecewiseSchedule {
    pub fn new(segment_length: f64, generators: Vec<HermitianOperator>) -> Self {
        assert!(!generators.is_empty(), "at least one segment");
        Self { segment_length, generators, active: None }
    }

    fn segment(&self, t: f64) -> usize {
        if self.segment_length <= 0.0 {
            return 0;
        }
        ((t / self.segment_length) as usize).min(self.generators.len() - 1)
    }
}

fn unit_horizontal(raw: &HermitianOperator, psi: &PureState) -> HermitianOperator {
    let horizontal = split(raw, psi).map(|s| s.horizontal).unwrap_or_else(|_| HermitianOperator::zeros(psi.dim()));
    let norm = 2.0 * hs_inner(&horizontal, &horizontal).unwrap_or(0.0);
    if norm > 1e-20 {
        horizontal.scale(norm.sqrt().recip())
    } else {
        let mut z = vec![C64::new(0.0, 0.0); psi.dim() - 1];
        z[0] = C64::new(0.5, 0.0);
        horizontal_from_column(psi, &z)
    }
}

impl HamiltonianSource for PiecewiseSchedule {
    fn control(&mut self, t: f64, state: &PureState) -> HermitianOperator {
        let seg = self.segment(t);
        match &self.active {
            Some((k, h)) if *k == seg => h.clone(),
            _ => {
                let h = unit_horizontal(&self.generators[seg], state);
                self.active = Some((seg, h.clone()));
                h
            }
        }
    }
}

/// Rejects any control exceeding the throttle bound at the times it is used.
struct Checked<S> {
    inner: S,
    violation: Option<(f64, f64)>,
}

impl<S: HamiltonianSource> Checked<S> {
    fn check(&mut self, t: f64, h: &HermitianOperator) {
        let norm = 2.0 * hs_inner(h, h).unwrap_or(f64::INFINITY);
        if !(norm <= 1.0 + ADMISSIBILITY_TOL) && self.violation.is_none() {
            self.violation = Some((t, norm));
        }
    }
}

impl<S: HamiltonianSource> HamiltonianSource for Checked<S> {
    fn control(&mut self, t: f64, state: &PureState) -> HermitianOperator {
        let h = self.inner.control(t, state);
        self.check(t, &h);
        h
    }

    fn step_unitary(
        &mut self,
        h0: &HermitianOperator,
        t_mid: f64,
        dt: f64,
        state: &PureState,
    ) -> Option<UnitaryOperator> {
        let u = self.inner.step_unitary(h0, t_mid, dt, state)?;
        let h = self.inner.control(t_mid, state);
        self.check(t_mid, &h);
        Some(u)
    }
}

/// Earliest grid time in [0, p.t_max()] at which the propagated state reaches
/// `fid_threshold` fidelity with ψ_F, or `None`.
pub fn first_arrival_time<S: HamiltonianSource>(
    schedule: S,
    p: &NavigationProblem,
    fid_threshold: f64,
    dt: f64,
) -> Result<Option<f64>> {
    let horizon = p.t_max();
    let steps = grid_steps(horizon, dt);
    let step = horizon / steps.max(1) as f64;
    let checked = Checked { inner: schedule, violation: None };
    let mut stepper = OrderedStepper::new(p.h0(), checked, p.psi_i().clone(), step)?;
    for k in 0..=steps {
        if k > 0 {
            stepper.step();
        }
        if let Some((t, norm)) = stepper.source_mut().violation {
            return Err(OracleError::Inadmissible { t, norm });
        }
        if projective_fidelity(stepper.state(), p.psi_f()).unwrap_or(0.0) >= fid_threshold {
            return Ok(Some(k as f64 * step));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateConfig {
    pub n_samples: usize,
    pub dt: f64,
    pub fid_threshold: f64,
    pub seed: u64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self { n_samples: 2000, dt: 1e-3, fid_threshold: DEFAULT_FID_THRESHOLD, seed: 0 }
    }
}

/// Outcome of [`optimality_certificate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub kind: &'static str,
    pub seed: u64,
    pub n_samples: usize,
    pub dt: f64,
    pub fid_threshold: f64,
    pub t_star: f64,
    /// Competitors arriving before `t_star − margin` fail the certificate.
    pub margin: f64,
    /// Propagation horizon for competitors.
    pub horizon: f64,
    pub solver_arrival: Option<f64>,
    pub orbit_min_arrival: Option<f64>,
    pub piecewise_min_arrival: Option<f64>,
    pub min_observed: Option<f64>,
    pub orbit_arrivals: usize,
    pub piecewise_arrivals: usize,
    pub pass: bool,
}

#[derive(Clone, Copy)]
enum Family {
    Orbit = 0,
    Piecewise = 1,
}

fn sample_rng(seed: u64, family: Family, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 32) | index as u64);
    rng
}

fn min_option(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().reduce(f64::min)
}

/// Propagates the solver's control and `2·n_samples` sampled competitors.
///
/// Passes iff the solver's control arrives by `t_star + margin` and no
/// competitor arrives before `t_star − margin`, with `margin = 5·dt`.
pub fn optimality_certificate(p: &NavigationProblem, config: &CertificateConfig) -> Result<CertificateReport> {
    let sol = solve(p)?;
    let t_star = sol.t_star;
    let dt = config.dt;
    let margin = MARGIN_STEPS * dt;
    let threshold = config.fid_threshold;

    let own = p.clone().with_t_max(t_star + margin)?;
    let solver_arrival = first_arrival_time(sol.schedule(), &own, threshold, dt)?;

    // Arrivals after t_star cannot fail the certificate.
    let horizon = t_star.max(dt);
    let race = p.clone().with_t_max(horizon)?;
    let run = |family: Family, i: usize| -> Result<Option<f64>> {
        let mut rng = sample_rng(config.seed, family, i);
        match family {
            Family::Orbit => {
                let k = random_horizontal_control(p.psi_i(), &mut rng);
                first_arrival_time(AdjointOrbitSchedule::new(p.h0(), k), &race, threshold, dt)
            }
            Family::Piecewise => {
                let generators =
                    (0..PIECEWISE_SEGMENTS).map(|_| random_horizontal_control(p.psi_i(), &mut rng)).collect();
                let schedule = PiecewiseSchedule::new(horizon / PIECEWISE_SEGMENTS as f64, generators);
                first_arrival_time(schedule, &race, threshold, dt)
            }
        }
    };

    let orbit: Vec<Option<f64>> =
        (0..config.n_samples).into_par_iter().map(|i| run(Family::Orbit, i)).collect::<Result<_>>()?;
    let piecewise: Vec<Option<f64>> =
        (0..config.n_samples).into_par_iter().map(|i| run(Family::Piecewise, i)).collect::<Result<_>>()?;

    let orbit_min_arrival = min_option(orbit.iter().copied());
    let piecewise_min_arrival = min_option(piecewise.iter().copied());
    let min_observed = min_option([orbit_min_arrival, piecewise_min_arrival].into_iter());
    let pass = solver_arrival.is_some() && min_observed.is_none_or(|m| m >= t_star - margin);

    Ok(CertificateReport {
        kind: "statistical",
        seed: config.seed,
        n_samples: config.n_samples,
        dt,
        fid_threshold: threshold,
        t_star,
        margin,
        horizon,
        solver_arrival,
        orbit_min_arrival,
        piecewise_min_arrival,
        min_observed,
        orbit_arrivals: orbit.iter().flatten().count(),
        piecewise_arrivals: piecewise.iter().flatten().count(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horizontality::{aa_speed_sq, is_horizontal};
    use crate::linalg::pauli::*;
    use crate::propagator::ConstantControl;
    use crate::sampling::random_state;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn orthogonal_zero_wind() -> NavigationProblem {
        NavigationProblem::new(HermitianOperator::zeros(2), PureState::basis(2, 0), PureState::basis(2, 1)).unwrap()
    }

    fn tailwind(eps: f64) -> NavigationProblem {
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let minus = PureState::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        NavigationProblem::new(sigma_z().scale(eps / 2.0), plus, minus).unwrap()
    }

    #[test]
    fn horizontal_samples_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2, 3, 5] {
            let psi = random_state(&mut rng, dim);
            for _ in 0..20 {
                let h = random_horizontal_control(&psi, &mut rng);
                assert!((2.0 * hs_inner(&h, &h).unwrap() - 1.0).abs() < 1e-12);
                assert!(is_horizontal(&h, &psi, 1e-10).unwrap());
                assert!((aa_speed_sq(&h, &psi).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_level_samples_lie_on_the_xy_circle() {
        let psi = PureState::basis(2, 0);
        let h = random_horizontal_control(&psi, &mut ChaCha8Rng::seed_from_u64(1));
        let (x, y, z) = (
            hs_inner(&h, &sigma_x()).unwrap() / 2.0,
            hs_inner(&h, &sigma_y()).unwrap() / 2.0,
            hs_inner(&h, &sigma_z()).unwrap() / 2.0,
        );
        assert!(z.abs() < 1e-15);
        assert!(((x * x + y * y).sqrt() - 0.5).abs() < 1e-12);
        let other = random_horizontal_control(&psi, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(other.matrix().max_abs_diff(h.matrix()) > 1e-6);
    }

    #[test]
    fn solver_schedule_arrives_on_time() {
        let p = tailwind(0.5);
        let sol = solve(&p).unwrap();
        let dt = 1e-3;
        let own = p.clone().with_t_max(sol.t_star + 5.0 * dt).unwrap();
        let t = first_arrival_time(sol.schedule(), &own, 1.0 - 1e-9, dt).unwrap().unwrap();
        assert!((t - sol.t_star).abs() <= 2.0 * dt, "{t} vs {}", sol.t_star);
    }

    #[test]
    fn wind_alone_does_not_arrive() {
        let p = tailwind(1.0).with_t_max(10.0).unwrap();
        let zero = ConstantControl(HermitianOperator::zeros(2));
        // σ_z only rotates the equator; |0⟩ and |1⟩ are fixed, so start at |0⟩.
        let p0 = NavigationProblem::new(p.h0().clone(), PureState::basis(2, 0), p.psi_f().clone())
            .unwrap()
            .with_t_max(10.0)
            .unwrap();
        assert_eq!(first_arrival_time(zero, &p0, DEFAULT_FID_THRESHOLD, 1e-2).unwrap(), None);
    }

    #[test]
    fn misaimed_control_is_late() {
        let p = orthogonal_zero_wind().with_t_max(2.0 * PI).unwrap();
        // Rotation about an axis 30° from the poles circles the north pole only.
        let tilted = &sigma_x().scale(0.25) + &sigma_z().scale(0.25 * 3f64.sqrt());
        let arrival = first_arrival_time(ConstantControl(tilted), &p, DEFAULT_FID_THRESHOLD, 1e-3).unwrap();
        assert!(arrival.is_none_or(|t| t > PI));
    }

    #[test]
    fn inadmissible_schedule_is_rejected() {
        let p = orthogonal_zero_wind();
        let loud = ConstantControl(sigma_x());
        assert!(matches!(
            first_arrival_time(loud, &p, DEFAULT_FID_THRESHOLD, 1e-2),
            Err(OracleError::Inadmissible { .. })
        ));
    }

    #[test]
    fn piecewise_controls_stay_horizontal_at_segment_starts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(&mut rng, 3);
        let gens = (0..4).map(|_| random_horizontal_control(&psi, &mut rng)).collect();
        let mut sched = PiecewiseSchedule::new(0.5, gens);
        let other = random_state(&mut rng, 3);
        let h = sched.control(1.2, &other);
        assert!(is_horizontal(&h, &other, 1e-10).unwrap());
        assert!((2.0 * hs_inner(&h, &h).unwrap() - 1.0).abs() < 1e-12);
        // Held for the rest of the segment regardless of the state passed in.
        assert_eq!(sched.control(1.4, &psi).matrix(), h.matrix());
    }

    #[test]
    fn small_certificates() {
        let config = CertificateConfig { n_samples: 40, dt: 2e-3, ..CertificateConfig::default() };
        let report = optimality_certificate(&orthogonal_zero_wind(), &config).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.min_observed.is_none_or(|m| m >= PI - 5.0 * config.dt));

        let report = optimality_certificate(&tailwind(1.0), &config).unwrap();
        assert!(report.pass, "{report:?}");

        let psi = PureState::basis(2, 0);
        let trivial = NavigationProblem::new(sigma_x(), psi.clone(), psi).unwrap();
        let report = optimality_certificate(&trivial, &config).unwrap();
        assert!(report.pass);
        assert_eq!(report.t_star, 0.0);
    }

    #[test]
    fn certificate_is_deterministic() {
        let config = CertificateConfig { n_samples: 10, dt: 5e-3, seed: 77, ..CertificateConfig::default() };
        let a = serde_json::to_string(&optimality_certificate(&tailwind(0.3), &config).unwrap()).unwrap();
        let b = serde_json::to_string(&optimality_certificate(&tailwind(0.3), &config).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

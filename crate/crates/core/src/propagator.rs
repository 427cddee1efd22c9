//! Time-ordered propagation of `H(t) = H₀ + H₁(t)` with the midpoint
//! exponential rule `ψ_{k+1} = exp(−i H((k+½)dt) dt) ψ_k`.

use thiserror::Error;

use crate::linalg::{
    expm_unitary, ComplexMatrix, Eigendecomposition, HermitianOperator, LinalgError, PureState, UnitaryOperator, C64,
};
use crate::solver::NavigationSolution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("end time must be non-negative and finite, got {0}")]
    InvalidEndTime(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, PropagatorError>;

/// Uniformly sampled states with the control in force at each sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PureState>,
    controls: Vec<HermitianOperator>,
    step: f64,
}

impl Trajectory {
    pub fn from_parts(
        times: Vec<f64>,
        states: Vec<PureState>,
        controls: Vec<HermitianOperator>,
        step: f64,
    ) -> Self {
        assert_eq!(times.len(), states.len());
        assert_eq!(times.len(), controls.len());
        Self { times, states, controls, step }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn controls(&self) -> &[HermitianOperator] {
        &self.controls
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn final_state(&self) -> Option<&PureState> {
        self.states.last()
    }
}

/// Supplies the control Hamiltonian H₁(t). The wind H₀ is passed separately
/// to the propagator.
pub trait HamiltonianSource {
    /// Control at time `t`; `state` is the state at the start of the current
    /// step, for schedules that adapt to it.
    fn control(&mut self, t: f64, state: &PureState) -> HermitianOperator;

    /// Optional closed form of `exp(−i(H₀ + H₁(t_mid))dt)`. Returning `None`
    /// makes the stepper exponentiate the sum itself.
    fn step_unitary(
        &mut self,
        _h0: &HermitianOperator,
        _t_mid: f64,
        _dt: f64,
        _state: &PureState,
    ) -> Option<UnitaryOperator> {
        None
    }
}

impl<S: HamiltonianSource + ?Sized> HamiltonianSource for &mut S {
    fn control(&mut self, t: f64, state: &PureState) -> HermitianOperator {
        (**self).control(t, state)
    }

    fn step_unitary(
        &mut self,
        h0: &HermitianOperator,
        t_mid: f64,
        dt: f64,
        state: &PureState,
    ) -> Option<UnitaryOperator> {
        (**self).step_unitary(h0, t_mid, dt, state)
    }
}

/// Time-independent control.
#[derive(Debug, Clone)]
pub struct ConstantControl(pub HermitianOperator);

impl HamiltonianSource for ConstantControl {
    fn control(&mut self, _t: f64, _state: &PureState) -> HermitianOperator {
        self.0.clone()
    }
}

/// Any closure `t ↦ H₁(t)`.
pub struct FnControl<F>(pub F);

impl<F: FnMut(f64) -> HermitianOperator> HamiltonianSource for FnControl<F> {
    fn control(&mut self, t: f64, _state: &PureState) -> HermitianOperator {
        (self.0)(t)
    }
}

/// `H₁(t) = e^{−iH₀t} K e^{iH₀t}`, the orbit of a fixed generator under the wind.
///
/// Steps use `exp(−i H(t) dt) = E(t) exp(−i(H₀+K)dt) E(t)†` with
/// `E(t) = e^{−iH₀t}`, which is the same midpoint step without a fresh
/// eigendecomposition per step.
#[derive(Debug, Clone)]
pub struct AdjointOrbitSchedule {
    wind: HermitianOperator,
    wind_eig: Eigendecomposition,
    generator: HermitianOperator,
    total_eig: Eigendecomposition,
    frozen_step: Option<(f64, UnitaryOperator)>,
}

impl AdjointOrbitSchedule {
    pub fn new(h0: &HermitianOperator, generator: HermitianOperator) -> Self {
        let total_eig = (h0 + &generator).eigen();
        Self { wind: h0.clone(), wind_eig: h0.eigen(), generator, total_eig, frozen_step: None }
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.generator
    }

    fn wind_flow(&self, t: f64) -> UnitaryOperator {
        self.wind_eig.exp_unitary(t)
    }
}

impl HamiltonianSource for AdjointOrbitSchedule {
    fn control(&mut self, t: f64, _state: &PureState) -> HermitianOperator {
        self.generator.conjugate_by(&self.wind_flow(t))
    }

    fn step_unitary(
        &mut self,
        h0: &HermitianOperator,
        t_mid: f64,
        dt: f64,
        _state: &PureState,
    ) -> Option<UnitaryOperator> {
        if h0.matrix() != self.wind.matrix() {
            return None;
        }
        let frozen = match &self.frozen_step {
            Some((cached_dt, u)) if *cached_dt == dt => u.clone(),
            _ => {
                let u = self.total_eig.exp_unitary(dt);
                self.frozen_step = Some((dt, u.clone()));
                u
            }
        };
        let e = self.wind_flow(t_mid);
        Some(e.compose(&frozen).compose(&e.adjoint()))
    }
}

/// Lazily advances a state through the midpoint rule on a fixed grid.
pub struct OrderedStepper<'a, S> {
    h0: &'a HermitianOperator,
    source: S,
    state: PureState,
    dt: f64,
    index: usize,
    last: Option<(ComplexMatrix, UnitaryOperator)>,
}

impl<'a, S: HamiltonianSource> OrderedStepper<'a, S> {
    pub fn new(h0: &'a HermitianOperator, source: S, psi0: PureState, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(PropagatorError::InvalidStep(dt));
        }
        if h0.dim() != psi0.dim() {
            return Err(LinalgError::DimensionMismatch { left: h0.dim(), right: psi0.dim() }.into());
        }
        Ok(Self { h0, source, state: psi0, dt, index: 0, last: None })
    }

    pub fn time(&self) -> f64 {
        self.index as f64 * self.dt
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn source_mut(&mut self) -> &mut S {
        &mut self.source
    }

    /// Control in force at the current grid time.
    pub fn current_control(&mut self) -> HermitianOperator {
        let t = self.time();
        self.source.control(t, &self.state)
    }

    pub fn step(&mut self) -> &PureState {
        let t_mid = (self.index as f64 + 0.5) * self.dt;
        let u = match self.source.step_unitary(self.h0, t_mid, self.dt, &self.state) {
            Some(u) => u,
            None => {
                let total = self.h0 + &self.source.control(t_mid, &self.state);
                match &self.last {
                    Some((m, u)) if m == total.matrix() => u.clone(),
                    _ => {
                        let u = expm_unitary(&total, self.dt);
                        self.last = Some((total.into_matrix(), u.clone()));
                        u
                    }
                }
            }
        };
        self.state = u.apply(&self.state);
        self.index += 1;
        &self.state
    }
}

/// Propagates `psi0` from 0 to `t_end` and records every grid sample.
///
/// The grid has `⌈t_end/dt⌉` equal steps, so the recorded step may be slightly
/// smaller than `dt` and the last sample lands exactly on `t_end`.
pub fn propagate_ordered<S: HamiltonianSource>(
    h0: &HermitianOperator,
    source: S,
    psi0: PureState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(PropagatorError::InvalidEndTime(t_end));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PropagatorError::InvalidStep(dt));
    }
    let steps = grid_steps(t_end, dt);
    let step = if steps == 0 { dt } else { t_end / steps as f64 };
    let mut stepper = OrderedStepper::new(h0, source, psi0, step)?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            stepper.step();
        }
        times.push(k as f64 * step);
        controls.push(stepper.current_control());
        states.push(stepper.state().clone());
    }
    Ok(Trajectory { times, states, controls, step })
}

pub(crate) fn grid_steps(t_end: f64, dt: f64) -> usize {
    if t_end == 0.0 {
        0
    } else {
        ((t_end / dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Max-abs entrywise residual of `∂ₜû = −iH(t)û` for
/// `û(t) = e^{−iH₀t} e^{−iH₁(0)t}`, with a central difference of width `delta`.
pub fn derivative_residual(sol: &NavigationSolution, t: f64, delta: f64) -> f64 {
    let u = |s: f64| sol.unitary_at(s);
    let forward = u(t + delta);
    let backward = u(t - delta);
    let fd = (forward.matrix() - backward.matrix()).scale(C64::new(1.0 / (2.0 * delta), 0.0));
    let total = sol.wind() + &sol.control_at(t);
    let rhs = total.matrix().matmul(u(t).matrix()).scale(C64::new(0.0, -1.0));
    fd.max_abs_diff(&rhs)
}

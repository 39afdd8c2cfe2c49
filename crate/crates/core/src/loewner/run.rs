use num_complex::Complex;

use super::{FlowState, LoewnerFlow};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::Driver;
use crate::sampler::{simulate_theta_with, ThetaConfig, ThetaMeasure, ThetaPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Conformal radius fell to `threshold * upsilon_0`.
    Threshold,
    /// Time horizon exhausted first.
    Horizon,
    /// The point was absorbed by the hull.
    Swallowed,
    /// The conformal radius reached its final value without the point being
    /// absorbed (the curve is simple for kappa <= 4).
    Settled,
    /// Further shrinking of the conformal radius has negligible probability.
    Negligible,
}

/// When to stop a path. Swallowing always stops it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule<T> {
    pub horizon: T,
    /// Relative conformal-radius threshold `eps`: stop once `upsilon_t <= eps upsilon_0`.
    pub threshold: Option<T>,
    /// Stop once the residual weight drops below this. With a threshold the
    /// weight is `c* lambda_t^{4a-1} (eps upsilon_0 / upsilon_t)^{2-d}`, the
    /// scale of the conditional probability of still crossing it.
    pub negligible_tol: Option<T>,
}

impl<T: Real> StopRule<T> {
    pub fn horizon(horizon: T) -> Self {
        StopRule { horizon, threshold: None, negligible_tol: None }
    }

    pub fn with_threshold(mut self, eps: T) -> Self {
        self.threshold = Some(eps);
        self
    }

    pub fn with_negligible(mut self, tol: T) -> Self {
        self.negligible_tol = Some(tol);
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub start: FlowState<T>,
    pub state: FlowState<T>,
    pub reason: StopReason,
    /// First time `upsilon_t = eps upsilon_0`, by linear interpolation in `log upsilon`.
    pub tau: Option<T>,
    pub steps: u64,
    /// State at each requested checkpoint; the stopped state for checkpoints after the stop.
    pub checkpoints: Vec<FlowState<T>>,
}

/// Crossing time of `log upsilon = level` between two consecutive states.
fn interpolate_crossing<T: Real>(prev: &FlowState<T>, next: &FlowState<T>, level: T) -> T {
    let (l0, l1) = (prev.upsilon.ln(), next.upsilon.ln());
    if l0 <= level {
        return prev.t;
    }
    let frac = ((l0 - level) / (l0 - l1)).min(T::one());
    prev.t + (next.t - prev.t) * frac
}

fn check_stop<T: Real, F: LoewnerFlow<T>>(
    flow: &F,
    state: &FlowState<T>,
    upsilon0: T,
    stop: &StopRule<T>,
) -> Option<StopReason> {
    if let Some(eps) = stop.threshold {
        if state.upsilon <= eps * upsilon0 {
            return Some(StopReason::Threshold);
        }
    }
    if let Some(tol) = stop.negligible_tol {
        let mut weight = flow.residual_weight(state);
        if let Some(eps) = stop.threshold {
            let p = flow.params();
            weight = weight * (eps * upsilon0 / state.upsilon).powf(p.scaling_exponent()).min(T::one());
        }
        if weight < tol {
            return Some(StopReason::Negligible);
        }
    }
    if state.t >= stop.horizon {
        return Some(StopReason::Horizon);
    }
    None
}

/// Finishes a path that came within `terminal_radius` of the driving point.
///
/// There the flow is the scale-invariant chordal one to `O(|Z|^2)`. In the
/// clock `s` with `upsilon = e^{-2as} upsilon_now`, the angle `arg Z` is the
/// plain angle diffusion, and the conformal radius stops shrinking when the
/// angle is absorbed. Only the angle is simulated, with increments drawn from
/// `driver`; the flow time `t` is left where it was, since the remaining
/// flow time is `O(|Z|^2)`.
fn finish_near_singularity<T, F, D>(
    flow: &F,
    state: &FlowState<T>,
    upsilon0: T,
    stop: &StopRule<T>,
    driver: &mut D,
) -> Result<(FlowState<T>, StopReason, u64)>
where
    T: Real,
    F: LoewnerFlow<T>,
    D: Driver<T>,
{
    let p = flow.params();
    let two_a = T::lit(2.0) * p.a;
    // Clock time after which the smallest threshold is crossed.
    let s_cap = match stop.threshold {
        Some(eps) => (state.upsilon / (eps * upsilon0)).ln() / two_a,
        None => T::lit(1e3),
    };
    let cfg = ThetaConfig { dt_base: flow.config().dt_base, ..ThetaConfig::default() };
    let theta0 = state.z.arg();
    let pi = T::PI();
    let path = if theta0 <= cfg.absorb_floor || theta0 >= pi - cfg.absorb_floor {
        let side = if theta0 <= cfg.absorb_floor { T::zero() } else { pi };
        ThetaPath { theta: side, absorbed_at: Some(T::zero()), recorded: Vec::new(), steps: 0 }
    } else {
        simulate_theta_with(theta0, p, ThetaMeasure::Plain, s_cap, &cfg, None, |ds| driver.increment(ds))?
    };
    let (s_end, reason) = match path.absorbed_at {
        Some(s) if p.kappa > T::lit(4.0) => (s, StopReason::Swallowed),
        Some(s) => (s, StopReason::Settled),
        None if stop.threshold.is_some() => (s_cap, StopReason::Threshold),
        None => (s_cap, StopReason::Horizon),
    };
    let mut next = *state;
    next.z = Complex::from_polar(state.z.norm(), path.theta);
    next.upsilon = state.upsilon * (-two_a * s_end).exp();
    next.lambda = if path.absorbed_at.is_some() { T::zero() } else { path.theta.sin() };
    Ok((next, reason, path.steps))
}

/// Runs one marked point until the stop rule fires. `checkpoints` must be
/// sorted; steps are shortened to land on them exactly. `observe` sees every
/// accepted step as `(previous, next)`.
pub fn run_flow<T, F, D>(
    flow: &F,
    z: Complex<T>,
    driver: &mut D,
    stop: &StopRule<T>,
    checkpoints: &[T],
    mut observe: impl FnMut(&FlowState<T>, &FlowState<T>),
) -> Result<RunOutcome<T>>
where
    T: Real,
    F: LoewnerFlow<T>,
    D: Driver<T>,
{
    let start = flow.start(z)?;
    let upsilon0 = start.upsilon;
    let level = stop.threshold.map(|eps| (eps * upsilon0).ln());
    let mut state = start;
    let mut steps = 0u64;
    let mut tau = None;
    let mut recorded = Vec::with_capacity(checkpoints.len());
    while recorded.len() < checkpoints.len() && checkpoints[recorded.len()] <= state.t {
        recorded.push(state);
    }
    if state.upsilon <= stop.threshold.unwrap_or(T::zero()) * upsilon0 {
        tau = Some(T::zero());
    }
    let reason = loop {
        if let Some(r) = check_stop(flow, &state, upsilon0, stop) {
            break r;
        }
        if steps >= flow.config().max_steps {
            return Err(Error::StepBudget { steps, t: state.t.to_f64_lossy(), modulus: state.z.norm().to_f64_lossy() });
        }
        let r = flow.config().terminal_radius;
        if flow.singular_distance_sq(&state) < r * r {
            let (next, reason, used) = finish_near_singularity(flow, &state, upsilon0, stop, driver)?;
            steps += used;
            if reason == StopReason::Threshold && tau.is_none() {
                tau = Some(state.t);
            }
            observe(&state, &next);
            state = next;
            break reason;
        }
        let mut dt = flow.adaptive_dt(&state).min(stop.horizon - state.t);
        let mut landing = None;
        if let Some(&cp) = checkpoints.get(recorded.len()) {
            if state.t + dt >= cp {
                dt = cp - state.t;
                landing = Some(cp);
            }
        }
        let db = driver.increment(dt);
        steps += 1;
        match flow.step(&state, db, dt) {
            Ok(mut next) => {
                if let Some(cp) = landing {
                    next.t = cp;
                    recorded.push(next);
                }
                if tau.is_none() {
                    if let (Some(level), Some(eps)) = (level, stop.threshold) {
                        if next.upsilon <= eps * upsilon0 {
                            tau = Some(interpolate_crossing(&state, &next, level));
                        }
                    }
                }
                observe(&state, &next);
                state = next;
            }
            Err(Error::Swallowed { .. }) => break StopReason::Swallowed,
            Err(e) => return Err(e),
        }
    };
    while recorded.len() < checkpoints.len() {
        recorded.push(state);
    }
    Ok(RunOutcome { start, state, reason, tau, steps, checkpoints: recorded })
}

/// Recorded path of one marked point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub states: Vec<FlowState<T>>,
    pub reason: StopReason,
    pub tau: Option<T>,
}

/// Runs several marked points under one common driving function. All active
/// points share each step, whose length is the smallest adaptive step among
/// them, so every point sees the same Brownian increments. There is no
/// hand-over to the angle diffusion here; points run on the flow until the
/// swallow floor.
pub fn simulate_paths<T, F, D>(flow: &F, points: &[Complex<T>], driver: &mut D, stop: &StopRule<T>) -> Result<Vec<Trajectory<T>>>
where
    T: Real,
    F: LoewnerFlow<T>,
    D: Driver<T>,
{
    let mut trajectories = Vec::with_capacity(points.len());
    for &z in points {
        let s = flow.start(z)?;
        let tau = match stop.threshold {
            Some(eps) if eps >= T::one() => Some(T::zero()),
            _ => None,
        };
        trajectories.push(Trajectory { states: vec![s], reason: StopReason::Horizon, tau });
    }
    let mut active: Vec<bool> = vec![true; points.len()];
    let mut steps = 0u64;
    loop {
        for (traj, live) in trajectories.iter_mut().zip(active.iter_mut()) {
            if *live {
                let first = traj.states[0];
                let last = traj.states.last().unwrap();
                if let Some(r) = check_stop(flow, last, first.upsilon, stop) {
                    traj.reason = r;
                    *live = false;
                }
            }
        }
        if !active.iter().any(|&b| b) {
            break;
        }
        if steps >= flow.config().max_steps {
            return Err(Error::StepBudget { steps, t: f64::NAN, modulus: f64::NAN });
        }
        let now = trajectories.iter().zip(&active).find(|(_, &b)| b).map(|(tr, _)| tr.states.last().unwrap().t).unwrap();
        let dt = trajectories
            .iter()
            .zip(&active)
            .filter(|(_, &b)| b)
            .map(|(tr, _)| flow.adaptive_dt(tr.states.last().unwrap()))
            .fold(stop.horizon - now, |m, d| m.min(d));
        let db = driver.increment(dt);
        steps += 1;
        for (traj, live) in trajectories.iter_mut().zip(active.iter_mut()) {
            if !*live {
                continue;
            }
            let prev = *traj.states.last().unwrap();
            match flow.step(&prev, db, dt) {
                Ok(next) => {
                    if traj.tau.is_none() {
                        if let Some(eps) = stop.threshold {
                            let ups0 = traj.states[0].upsilon;
                            if next.upsilon <= eps * ups0 {
                                traj.tau = Some(interpolate_crossing(&prev, &next, (eps * ups0).ln()));
                            }
                        }
                    }
                    traj.states.push(next);
                }
                Err(Error::Swallowed { .. }) => {
                    traj.reason = StopReason::Swallowed;
                    *live = false;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(trajectories)
}

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::Estimate;
use crate::formulas::CylinderFields;
use crate::geometry::{wrap_x, CylinderPoint};
use crate::params::SleParams;
use crate::parallel::try_replica_map;
use crate::real::Real;
use crate::rng::replica_stream;

/// State of the two-sided radial diffusion on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedState<T> {
    pub x: T,
    pub y: T,
    pub t: T,
}

impl<T: Real> TiltedState<T> {
    pub fn new(z: &CylinderPoint<T>) -> Self {
        TiltedState { x: z.x(), y: z.y(), t: T::zero() }
    }

    /// Distance to the target point `0`, with `x` canonical.
    pub fn modulus(&self) -> T {
        self.x.hypot(self.y)
    }
}

/// Discretization of the tilted diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedConfig<T> {
    /// Step used where `|Z| >= 1`; shrinks like `|Z|^2` closer in.
    pub dt_base: T,
    /// The path is stopped once `|Z| <= delta_stop`.
    pub delta_stop: T,
    /// A remainder bound `|Z_stop|^2 / a` above this sets the truncation flag.
    pub tol_t: T,
    pub max_steps: u64,
}

impl<T: Real> Default for TiltedConfig<T> {
    fn default() -> Self {
        TiltedConfig { dt_base: T::lit(1e-3), delta_stop: T::lit(1e-3), tol_t: T::lit(1e-4), max_steps: 50_000_000 }
    }
}

/// One hitting-time sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitSample<T> {
    /// Stopping time plus the remainder bound `|Z_stop|^2 / a`.
    pub t_hat: T,
    /// `|Z|` when the path was stopped.
    pub stopped_at: T,
    pub truncated: bool,
    pub steps: u64,
}

/// Drift of `X` under the untilted flow and the extra drift from the change
/// of measure: `a v` and `(1 - 4a) v`. Their sum is the tilted drift `(1 - 3a) v`.
pub fn girsanov_split<T: Real>(f: &CylinderFields<T>, a: T) -> (T, T) {
    let v = f.v();
    (a * v, (T::one() - T::lit(4.0) * a) * v)
}

/// `((1 - 3a) v, -a u)`
#[inline]
pub fn tilted_drift<T: Real>(x: T, y: T, a: T) -> (T, T) {
    let f = CylinderFields::at(x, y);
    ((T::one() - T::lit(3.0) * a) * f.v(), -a * f.u())
}

/// One Heun step of `dX = (1 - 3a) v dt + dW`, `dY = -a u dt`.
pub fn step_tilted<T: Real>(state: &TiltedState<T>, dw: T, dt: T, params: &SleParams<T>) -> Result<TiltedState<T>> {
    let a = params.a;
    let (dx0, dy0) = tilted_drift(state.x, state.y, a);
    let (xp, yp) = (state.x + dx0 * dt + dw, state.y + dy0 * dt);
    if !(yp > T::zero()) {
        return Err(Error::Discretization(format!("Y left the cylinder at t = {}", state.t)));
    }
    let (dx1, dy1) = tilted_drift(xp, yp, a);
    let half = dt / T::lit(2.0);
    let x = state.x + (dx0 + dx1) * half + dw;
    let y = state.y + (dy0 + dy1) * half;
    if !(y > T::zero()) {
        return Err(Error::Discretization(format!("Y left the cylinder at t = {}", state.t)));
    }
    Ok(TiltedState { x: wrap_x(x), y, t: state.t + dt })
}

/// `dt_base min(1, |Z|^2)`
#[inline]
pub fn tilted_dt<T: Real>(state: &TiltedState<T>, cfg: &TiltedConfig<T>) -> T {
    let r2 = state.x * state.x + state.y * state.y;
    cfg.dt_base * r2.min(T::one())
}

/// Runs the tilted diffusion from `z` until it is within `delta_stop` of the target.
pub fn simulate_to_hit<T: Real, R: Rng + ?Sized>(
    z: &CylinderPoint<T>,
    params: &SleParams<T>,
    cfg: &TiltedConfig<T>,
    rng: &mut R,
) -> Result<HitSample<T>> {
    let mut s = TiltedState::new(z);
    let mut steps = 0u64;
    while s.modulus() > cfg.delta_stop {
        if steps >= cfg.max_steps {
            return Err(Error::StepBudget { steps, t: s.t.to_f64_lossy(), modulus: s.modulus().to_f64_lossy() });
        }
        let dt = tilted_dt(&s, cfg);
        let dw = dt.sqrt() * T::standard_normal(rng);
        s = step_tilted(&s, dw, dt, params)?;
        steps += 1;
    }
    let r = s.modulus();
    let remainder = r * r / params.a;
    Ok(HitSample { t_hat: s.t + remainder, stopped_at: r, truncated: remainder > cfg.tol_t, steps })
}

/// Largest excursion of `Y` outside the deterministic envelope
/// `e^{-at} cosh y0 <= cosh Y_t`, `sinh Y_t <= e^{-at} sinh y0` along one
/// path run to the stop radius, in log units. The exact flow has
/// `tanh Y <= u <= coth Y` and stays inside, so anything positive is
/// discretization error.
pub fn envelope_excess<T: Real, R: Rng + ?Sized>(
    z: &CylinderPoint<T>,
    params: &SleParams<T>,
    cfg: &TiltedConfig<T>,
    rng: &mut R,
) -> Result<T> {
    let y0 = z.y();
    let (lc0, ls0) = (y0.cosh().ln(), y0.sinh().ln());
    let mut s = TiltedState::new(z);
    let mut worst = T::neg_infinity();
    let mut steps = 0u64;
    while s.modulus() > cfg.delta_stop {
        if steps >= cfg.max_steps {
            return Err(Error::StepBudget { steps, t: s.t.to_f64_lossy(), modulus: s.modulus().to_f64_lossy() });
        }
        let dt = tilted_dt(&s, cfg);
        let dw = dt.sqrt() * T::standard_normal(rng);
        s = step_tilted(&s, dw, dt, params)?;
        steps += 1;
        let decay = params.a * s.t;
        let below = lc0 - decay - s.y.cosh().ln();
        let above = s.y.sinh().ln() - (ls0 - decay);
        worst = worst.max(below).max(above);
    }
    Ok(worst)
}

/// Weights `e^{-beta T}` of `n` independent replicas, in replica order.
pub fn phi_weights<T: Real>(
    z: &CylinderPoint<T>,
    params: &SleParams<T>,
    n: u64,
    cfg: &TiltedConfig<T>,
    seed: u64,
) -> Result<Vec<(T, HitSample<T>)>> {
    try_replica_map(n, |rep| {
        let mut rng = replica_stream(seed, rep);
        let hit = simulate_to_hit(z, params, cfg, &mut rng)?;
        Ok(((-params.beta * hit.t_hat).exp(), hit))
    })
}

/// Kish effective sample size `(sum w)^2 / sum w^2`.
pub fn effective_sample_size<T: Real>(weights: &[T]) -> T {
    let (s, s2) = weights.iter().fold((T::zero(), T::zero()), |(s, s2), &w| (s + w, s2 + w * w));
    if s2 == T::zero() {
        return T::zero();
    }
    s * s / s2
}

/// `Phi(z) = E*[e^{-beta T}]` from `n` tilted paths. At kappa = 4 this is
/// exactly 1 and nothing is simulated. For kappa > 4 the weights are
/// unbounded, and the estimate is refused when the effective sample size
/// drops below `n / 100`.
pub fn estimate_phi<T: Real>(
    z: &CylinderPoint<T>,
    params: &SleParams<T>,
    n: u64,
    cfg: &TiltedConfig<T>,
    seed: u64,
) -> Result<Estimate<T>> {
    if params.is_kappa_four() {
        return Ok(Estimate::new(T::one(), T::zero(), n));
    }
    if n < 100 {
        return Err(Error::TooFewSamples { need: 100, got: n as usize });
    }
    let samples = phi_weights(z, params, n, cfg, seed)?;
    let weights: Vec<T> = samples.iter().map(|s| s.0).collect();
    if params.beta < T::zero() {
        let ess = effective_sample_size(&weights);
        let min = T::lit(0.01 * n as f64);
        if ess < min {
            return Err(Error::LowEffectiveSampleSize { ess: ess.to_f64_lossy(), min: min.to_f64_lossy(), n: n as usize });
        }
    }
    let m: crate::estimators::Moments<T> = weights.into_iter().collect();
    Ok(m.estimate())
}

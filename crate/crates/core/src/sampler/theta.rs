//! The angle process `Theta = arg Z` in its natural clock.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::SleParams;
use crate::parallel::try_replica_map;
use crate::quadrature;
use crate::real::Real;
use crate::rng::replica_stream;

/// Which law of the angle process to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMeasure {
    /// `dTheta = (1 - 2a) cot(Theta) dt + dB`, absorbed at 0 or pi.
    Plain,
    /// `dTheta = 2a cot(Theta) dt + dW`, which never reaches the boundary.
    Tilted,
}

impl ThetaMeasure {
    pub fn drift_coefficient<T: Real>(self, params: &SleParams<T>) -> T {
        match self {
            ThetaMeasure::Plain => T::one() - T::lit(2.0) * params.a,
            ThetaMeasure::Tilted => T::lit(2.0) * params.a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaConfig<T> {
    pub dt_base: T,
    /// The step is `dt_base min(1, c_adapt sin^2 theta)`.
    pub c_adapt: T,
    /// A plain path closer than this to the boundary counts as absorbed.
    pub absorb_floor: T,
    pub max_steps: u64,
}

impl<T: Real> Default for ThetaConfig<T> {
    fn default() -> Self {
        ThetaConfig { dt_base: T::lit(1e-3), c_adapt: T::lit(100.0), absorb_floor: T::lit(1e-8), max_steps: 200_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPath<T> {
    /// Last value: the position at the horizon, or the boundary point hit.
    pub theta: T,
    /// Absorption time under the plain law.
    pub absorbed_at: Option<T>,
    /// Values at `record_from, record_from + every, ...` up to the horizon.
    pub recorded: Vec<T>,
    pub steps: u64,
}

/// Sampling schedule along one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recording<T> {
    pub from: T,
    pub every: T,
}

/// Simulates the angle process from `theta0` up to `horizon` with a Heun step,
/// shortened near the boundary. Tilted paths that overshoot the boundary
/// inside a step are reflected back.
pub fn simulate_theta<T: Real, R: Rng + ?Sized>(
    theta0: T,
    params: &SleParams<T>,
    measure: ThetaMeasure,
    horizon: T,
    cfg: &ThetaConfig<T>,
    record: Option<Recording<T>>,
    rng: &mut R,
) -> Result<ThetaPath<T>> {
    simulate_theta_with(theta0, params, measure, horizon, cfg, record, |dt| dt.sqrt() * T::standard_normal(rng))
}

/// [`simulate_theta`] with the Brownian increment over `dt` supplied by `noise`.
pub fn simulate_theta_with<T: Real>(
    theta0: T,
    params: &SleParams<T>,
    measure: ThetaMeasure,
    horizon: T,
    cfg: &ThetaConfig<T>,
    record: Option<Recording<T>>,
    mut noise: impl FnMut(T) -> T,
) -> Result<ThetaPath<T>> {
    let pi = T::PI();
    if !(theta0 > T::zero() && theta0 < pi) {
        return Err(Error::OutsideDomain(format!("theta = {theta0}"), "need 0 < theta < pi"));
    }
    let c = measure.drift_coefficient(params);
    let drift = |th: T| c / th.tan();
    let mut theta = theta0;
    let mut t = T::zero();
    let mut steps = 0u64;
    let mut recorded = Vec::new();
    let mut k = 0usize;
    let record_time = |k: usize| record.map(|r| r.from + r.every * T::lit(k as f64));
    let mut next_record = record_time(0);
    while t < horizon {
        if steps >= cfg.max_steps {
            return Err(Error::StepBudget { steps, t: t.to_f64_lossy(), modulus: theta.to_f64_lossy() });
        }
        let s = theta.sin();
        let mut dt = (cfg.dt_base * (cfg.c_adapt * s * s).min(T::one())).min(horizon - t);
        let mut landing = false;
        if let Some(tr) = next_record {
            if t + dt >= tr {
                dt = tr - t;
                landing = true;
            }
        }
        if dt > T::zero() {
            let db = noise(dt);
            let d0 = drift(theta);
            let mut pred = theta + d0 * dt + db;
            if measure == ThetaMeasure::Tilted {
                pred = reflect(pred);
            }
            let mut next = if pred > T::zero() && pred < pi { theta + (d0 + drift(pred)) * dt / T::lit(2.0) + db } else { pred };
            match measure {
                ThetaMeasure::Plain => {
                    if next <= cfg.absorb_floor || next >= pi - cfg.absorb_floor {
                        let side = if next <= cfg.absorb_floor { T::zero() } else { pi };
                        return Ok(ThetaPath { theta: side, absorbed_at: Some(t + dt), recorded, steps: steps + 1 });
                    }
                }
                ThetaMeasure::Tilted => {
                    next = reflect(next);
                    if !(next > T::zero() && next < pi) {
                        // A predictor landing next to the boundary makes the
                        // corrector drift blow up; fall back to the reflected
                        // Euler value.
                        next = pred;
                    }
                    if !(next > T::zero() && next < pi) {
                        return Err(Error::Discretization(format!("tilted angle reached the boundary at t = {t}")));
                    }
                }
            }
            theta = next;
            t = t + dt;
            steps += 1;
        }
        if landing {
            recorded.push(theta);
            k += 1;
            next_record = record_time(k);
        }
    }
    Ok(ThetaPath { theta, absorbed_at: None, recorded, steps })
}

fn reflect<T: Real>(th: T) -> T {
    let pi = T::PI();
    if th < T::zero() {
        -th
    } else if th > pi {
        pi + pi - th
    } else {
        th
    }
}

/// Schedule for collecting stationary samples of the tilted angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarySampling<T> {
    pub theta0: T,
    pub burn_in: T,
    /// Time between samples taken from one path.
    pub thin: T,
    pub per_replica: usize,
    pub replicas: u64,
}

impl<T: Real> Default for StationarySampling<T> {
    fn default() -> Self {
        StationarySampling { theta0: T::FRAC_PI_2(), burn_in: T::lit(10.0), thin: T::lit(0.1), per_replica: 1, replicas: 10_000 }
    }
}

/// Samples of the tilted angle after burn-in, `per_replica` thinned values
/// from each of `replicas` independent paths, in replica order.
pub fn sample_stationary<T: Real>(
    params: &SleParams<T>,
    plan: &StationarySampling<T>,
    cfg: &ThetaConfig<T>,
    seed: u64,
) -> Result<Vec<T>> {
    let horizon = plan.burn_in + plan.thin * T::lit((plan.per_replica - 1) as f64);
    let rec = Recording { from: plan.burn_in, every: plan.thin };
    let paths = try_replica_map(plan.replicas, |rep| {
        let mut rng = replica_stream(seed, rep);
        simulate_theta(plan.theta0, params, ThetaMeasure::Tilted, horizon, cfg, Some(rec), &mut rng).map(|p| p.recorded)
    })?;
    Ok(paths.into_iter().flatten().collect())
}

/// CDF of the stationary density `(c*/2) sin^{4a}` at each of the sorted
/// points, accumulated panel by panel.
fn stationary_cdf_sorted<T: Real>(sorted: &[T], params: &SleParams<T>) -> Result<Vec<T>> {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    let mut out = Vec::with_capacity(sorted.len());
    let mut acc = T::zero();
    let mut prev = T::zero();
    for &x in sorted {
        if x > prev {
            acc = acc + quadrature::integrate(|t| params.angle_density(t), prev, x, tol)?;
            prev = x;
        }
        out.push(acc.min(T::one()));
    }
    Ok(out)
}

/// Outcome of the Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome<T> {
    pub statistic: T,
    pub pass: bool,
}

/// Kolmogorov–Smirnov distance between the samples and `(c*/2) sin^{4a}`.
pub fn stationary_density_test<T: Real>(samples: &[T], params: &SleParams<T>, threshold: T) -> Result<KsOutcome<T>> {
    if samples.len() < 1000 {
        return Err(Error::TooFewSamples { need: 1000, got: samples.len() });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("angle samples are finite"));
    let cdf = stationary_cdf_sorted(&sorted, params)?;
    let n = T::lit(sorted.len() as f64);
    let mut d = T::zero();
    for (i, &f) in cdf.iter().enumerate() {
        let lo = T::lit(i as f64) / n;
        let hi = T::lit((i + 1) as f64) / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    Ok(KsOutcome { statistic: d, pass: d < threshold })
}

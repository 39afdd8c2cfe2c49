//! Monte Carlo estimators of the Green's function and its ingredients.
//!
//! The direct route counts radial paths whose conformal radius at the marked
//! point falls to `eps` times its initial value; the other route multiplies
//! the closed-form `H` by a tilted-measure estimate of `Phi`.

mod estimate;
mod fit;
mod martingale;

pub use estimate::{Estimate, Moments, WILSON_BELOW};
pub use fit::{exponent_fit, SlopeFit};
pub use martingale::{martingale_diagnostic, MartingaleKind, MartingaleReport, BLOWUP_FACTOR};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::formulas::h_field;
use crate::geometry::CylinderPoint;
use crate::loewner::{run_flow, ChordalFlow, LoewnerFlow, RadialFlow, StepConfig, StopReason, StopRule};
use crate::params::SleParams;
use crate::parallel::try_replica_map;
use crate::real::Real;
use crate::rng::DrivingPath;
use crate::sampler::{estimate_phi, TiltedConfig};

/// Geometric thresholds `eps_k = eps0 2^{-k}`, `k = 0..=octaves`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonLadder<T> {
    values: Vec<T>,
}

impl<T: Real> EpsilonLadder<T> {
    pub fn new(eps0: T, octaves: usize) -> Result<Self> {
        if !(eps0 > T::zero() && eps0 <= T::one()) {
            return Err(Error::InvalidArgument(format!("eps0 must lie in (0, 1], got {eps0}")));
        }
        if octaves < 3 {
            return Err(Error::InvalidArgument(format!("a ladder needs at least 3 octaves, got {octaves}")));
        }
        let values = (0..=octaves).map(|k| eps0 * T::lit(0.5f64.powi(k as i32))).collect();
        Ok(EpsilonLadder { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn smallest(&self) -> T {
        *self.values.last().unwrap()
    }
}

/// Which Loewner flow carries the marked point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    /// Radial SLE on the cylinder, point given as `x + iy`.
    Radial,
    /// Chordal SLE in the upper half-plane.
    Chordal,
}

/// Simulation settings shared by the path-counting estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions<T> {
    pub step: StepConfig<T>,
    /// Paths stop once the conditional chance of a further crossing is below this.
    pub negligible_tol: T,
    /// Hard cap on flow time.
    pub horizon: T,
    pub seed: u64,
}

impl<T: Real> Default for McOptions<T> {
    fn default() -> Self {
        McOptions { step: StepConfig::default(), negligible_tol: T::lit(1e-5), horizon: T::lit(1e3), seed: 0 }
    }
}

/// Per-rung result of a ladder run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung<T> {
    pub eps: T,
    pub successes: u64,
    /// `P{upsilon_inf <= eps upsilon_0}`
    pub prob: Estimate<T>,
    /// `(eps upsilon_0)^{d-2} P / c*`
    pub green: Estimate<T>,
}

/// Path-counting run over an [`EpsilonLadder`].
#[derive(Debug, Clone, PartialEq)]
pub struct LadderEstimate<T> {
    pub rungs: Vec<Rung<T>>,
    pub n: u64,
    /// Paths cut off by the horizon.
    pub horizon_stops: u64,
    /// Crossings of the smallest rung in the last tenth of the horizon.
    pub late_crossings: u64,
    pub steps: u64,
}

impl<T: Real> LadderEstimate<T> {
    /// True when more than 1% of deepest-rung crossings came late, so the horizon may be too short.
    pub fn horizon_truncated(&self) -> bool {
        let last = self.rungs.last().map(|r| r.successes).unwrap_or(0);
        self.late_crossings * 100 > last
    }
}

struct PathSummary<T> {
    /// Final `upsilon / upsilon_0`.
    ratio: T,
    tau: Option<T>,
    reason: StopReason,
    steps: u64,
}

fn run_one<T: Real, F: LoewnerFlow<T> + Sync>(flow: &F, z: Complex<T>, eps_min: T, opts: &McOptions<T>, rep: u64) -> Result<PathSummary<T>> {
    let stop = StopRule::horizon(opts.horizon).with_threshold(eps_min).with_negligible(opts.negligible_tol);
    let mut drv = DrivingPath::new(opts.seed, rep);
    let out = run_flow(flow, z, &mut drv, &stop, &[], |_, _| {})?;
    Ok(PathSummary { ratio: out.state.upsilon / out.start.upsilon, tau: out.tau, reason: out.reason, steps: out.steps })
}

/// Counts, for each rung, the paths whose conformal radius at `z` falls to
/// `eps upsilon_0`, and converts the fractions to Green's-function estimates.
pub fn estimate_ladder<T: Real>(
    kind: FlowKind,
    z: Complex<T>,
    params: &SleParams<T>,
    ladder: &EpsilonLadder<T>,
    n: u64,
    opts: &McOptions<T>,
) -> Result<LadderEstimate<T>> {
    if n == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let eps_min = ladder.smallest();
    let summaries = match kind {
        FlowKind::Radial => {
            let flow = RadialFlow::new(*params, opts.step);
            try_replica_map(n, |rep| run_one(&flow, z, eps_min, opts, rep))?
        }
        FlowKind::Chordal => {
            let flow = ChordalFlow::new(*params, opts.step);
            try_replica_map(n, |rep| run_one(&flow, z, eps_min, opts, rep))?
        }
    };
    let upsilon0 = match kind {
        FlowKind::Radial => RadialFlow::new(*params, opts.step).start(z)?.upsilon,
        FlowKind::Chordal => ChordalFlow::new(*params, opts.step).start(z)?.upsilon,
    };
    let late_from = opts.horizon * T::lit(0.9);
    let mut horizon_stops = 0;
    let mut late_crossings = 0;
    let mut steps = 0;
    let mut counts = vec![0u64; ladder.values().len()];
    for s in &summaries {
        steps += s.steps;
        if s.reason == StopReason::Horizon {
            horizon_stops += 1;
        }
        if s.tau.is_some_and(|t| t >= late_from) {
            late_crossings += 1;
        }
        for (c, &eps) in counts.iter_mut().zip(ladder.values()) {
            if s.reason == StopReason::Threshold || s.ratio <= eps {
                *c += 1;
            }
        }
    }
    let rungs = counts
        .iter()
        .zip(ladder.values())
        .map(|(&k, &eps)| {
            let prob = Estimate::bernoulli(k, n);
            let norm = (eps * upsilon0).powf(params.d - T::lit(2.0)) / params.c_star;
            Rung { eps, successes: k, prob, green: prob.scale(norm) }
        })
        .collect();
    Ok(LadderEstimate { rungs, n, horizon_stops, late_crossings, steps })
}

/// `P{upsilon_inf(z) <= eps upsilon_0(z)}` under radial SLE on the cylinder.
pub fn estimate_hit_prob<T: Real>(z: &CylinderPoint<T>, params: &SleParams<T>, eps: T, n: u64, opts: &McOptions<T>) -> Result<Estimate<T>> {
    if !(eps > T::zero() && eps <= T::one()) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1], got {eps}")));
    }
    if n < 1000 {
        return Err(Error::TooFewSamples { need: 1000, got: n as usize });
    }
    if eps == T::one() {
        return Ok(Estimate::bernoulli(n, n));
    }
    let ladder = EpsilonLadder { values: vec![eps] };
    let est = estimate_ladder(FlowKind::Radial, z.to_complex(), params, &ladder, n, opts)?;
    Ok(est.rungs[0].prob)
}

/// Direction of the Green's-function estimates along the ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trend<T> {
    /// Largest step against the overall direction, in combined standard errors.
    pub worst_reversal: T,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenDirect<T> {
    /// Estimate at the smallest rung, widened when the trend is flagged.
    pub estimate: Estimate<T>,
    pub ladder: LadderEstimate<T>,
    pub trend: Trend<T>,
}

/// Reversals larger than this many combined standard errors flag the trend.
pub const TREND_SIGMAS: f64 = 2.0;

fn trend<T: Real>(rungs: &[Rung<T>]) -> Trend<T> {
    let first = rungs.first().unwrap().green.mean;
    let last = rungs.last().unwrap().green.mean;
    let dir = if last >= first { T::one() } else { -T::one() };
    let mut worst = T::zero();
    for w in rungs.windows(2) {
        let step = (w[1].green.mean - w[0].green.mean) * dir;
        let se = (w[0].green.stderr.powi(2) + w[1].green.stderr.powi(2)).sqrt();
        if step < T::zero() && se > T::zero() {
            worst = worst.max(-step / se);
        }
    }
    Trend { worst_reversal: worst, flagged: worst > T::lit(TREND_SIGMAS) }
}

/// Green's function at `z` on the cylinder from threshold probabilities.
pub fn green_direct<T: Real>(
    z: &CylinderPoint<T>,
    params: &SleParams<T>,
    ladder: &EpsilonLadder<T>,
    n: u64,
    opts: &McOptions<T>,
) -> Result<GreenDirect<T>> {
    let lad = estimate_ladder(FlowKind::Radial, z.to_complex(), params, ladder, n, opts)?;
    let tr = trend(&lad.rungs);
    let k = lad.rungs.len();
    let mut estimate = lad.rungs[k - 1].green;
    if tr.flagged {
        estimate = estimate.widen((lad.rungs[k - 1].green.mean - lad.rungs[k - 2].green.mean).abs());
    }
    Ok(GreenDirect { estimate, ladder: lad, trend: tr })
}

/// `H(z) Phi(z)`, with `Phi` from the tilted sampler.
pub fn green_via_phi<T: Real>(z: &CylinderPoint<T>, params: &SleParams<T>, n: u64, cfg: &TiltedConfig<T>, seed: u64) -> Result<Estimate<T>> {
    let phi = estimate_phi(z, params, n, cfg, seed)?;
    Ok(phi.scale(h_field(z, params)))
}

#[cfg(test)]
mod tests;

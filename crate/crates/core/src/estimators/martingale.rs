use num_complex::Complex;

use super::estimate::{Estimate, Moments};
use super::McOptions;
use crate::error::{Error, Result};
use crate::loewner::{run_flow, ChordalFlow, FlowState, LoewnerFlow, RadialFlow, StopRule};
use crate::params::SleParams;
use crate::parallel::try_replica_map;
use crate::real::Real;
use crate::rng::DrivingPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MartingaleKind {
    /// `M_t = upsilon_t^{d-2} S_t^{4a-1}` under chordal SLE.
    ChordalM,
    /// `N_t = e^{beta t} upsilon_t^{d-2} Lambda_t^{4a-1}` under radial SLE on the cylinder.
    RadialN,
}

/// A single path contributing more than this multiple of the initial value counts as a blow-up.
pub const BLOWUP_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleReport<T> {
    pub initial: T,
    /// `(t, empirical mean of the stopped process at t)`
    pub rows: Vec<(T, Estimate<T>)>,
    /// Path values above `BLOWUP_FACTOR * initial`, over all grid times.
    pub blowups: u64,
    /// Paths absorbed before the last grid time.
    pub swallowed: u64,
}

fn value<T: Real>(kind: MartingaleKind, p: &SleParams<T>, s: &FlowState<T>) -> T {
    let base = s.upsilon.powf(p.d - T::lit(2.0)) * s.lambda.powf(p.boundary_exponent());
    match kind {
        MartingaleKind::ChordalM => base,
        MartingaleKind::RadialN => (p.beta * s.t).exp() * base,
    }
}

fn paths<T: Real, F: LoewnerFlow<T> + Sync>(
    flow: &F,
    kind: MartingaleKind,
    z: Complex<T>,
    grid: &[T],
    n: u64,
    opts: &McOptions<T>,
) -> Result<(T, Vec<(Vec<T>, bool)>)> {
    let p = *flow.params();
    let initial = value(kind, &p, &flow.start(z)?);
    let horizon = *grid.last().unwrap();
    let stop = StopRule::horizon(horizon);
    let rows = try_replica_map(n, |rep| {
        let mut drv = DrivingPath::new(opts.seed, rep);
        let out = run_flow(flow, z, &mut drv, &stop, grid, |_, _| {})?;
        let vals = out.checkpoints.iter().map(|s| value(kind, &p, s)).collect();
        Ok((vals, out.reason == crate::loewner::StopReason::Swallowed))
    })?;
    Ok((initial, rows))
}

/// Empirical means of the martingale stopped at absorption, at each time of
/// `t_grid` (sorted, starting at or after 0).
pub fn martingale_diagnostic<T: Real>(
    kind: MartingaleKind,
    z: Complex<T>,
    params: &SleParams<T>,
    t_grid: &[T],
    n: u64,
    opts: &McOptions<T>,
) -> Result<MartingaleReport<T>> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid[0] < T::zero() {
        return Err(Error::InvalidArgument("time grid must be nonempty, sorted and nonnegative".into()));
    }
    if n == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let (initial, rows) = match kind {
        MartingaleKind::ChordalM => paths(&ChordalFlow::new(*params, opts.step), kind, z, t_grid, n, opts)?,
        MartingaleKind::RadialN => paths(&RadialFlow::new(*params, opts.step), kind, z, t_grid, n, opts)?,
    };
    let limit = initial * T::lit(BLOWUP_FACTOR);
    let mut acc = vec![Moments::default(); t_grid.len()];
    let mut blowups = 0;
    let mut swallowed = 0;
    for (vals, sw) in &rows {
        swallowed += *sw as u64;
        for (m, &v) in acc.iter_mut().zip(vals) {
            m.push(v);
            blowups += (v > limit) as u64;
        }
    }
    let rows = t_grid.iter().zip(&acc).map(|(&t, m)| (t, m.estimate())).collect();
    Ok(MartingaleReport { initial, rows, blowups, swallowed })
}

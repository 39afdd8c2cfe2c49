//! Numerical Loewner flows.
//!
//! The radial flow lives on the cylinder, `dZ = a cot(Z) dt + dB`, and the
//! chordal flow on the half-plane, `dZ = a/Z dt + dB`. Both are advanced with
//! the additive-noise Heun scheme and an adaptive step that shrinks near the
//! singularity at `Z = 0`. The spatial derivative is carried through the
//! integral `int csc^2(Z) ds` (radial) or `int Z^{-2} ds` (chordal), accumulated
//! with the trapezoidal rule.

mod chordal;
pub mod dump;
mod radial;
mod run;

pub use chordal::{solve_chordal_rk4, solve_chordal_zero_driving, step_chordal, ChordalFlow};
pub use radial::{radial_derivative_closed_form, solve_radial_deterministic, solve_radial_rk4, step_radial, RadialFlow};
pub use run::{run_flow, simulate_paths, RunOutcome, StopReason, StopRule, Trajectory};

use num_complex::Complex;

use crate::error::Result;
use crate::params::SleParams;
use crate::real::Real;

/// State of one marked point under a Loewner flow.
///
/// `lambda` holds the boundary invariant of the flow: `Lambda_t` for the
/// radial flow and `S_t = sin(arg Z_t)` for the chordal one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<T> {
    /// `Z_t = X_t + i Y_t`
    pub z: Complex<T>,
    /// `int_0^t csc^2(Z_s) ds` (radial) or `int_0^t Z_s^{-2} ds` (chordal).
    pub deriv_integral: Complex<T>,
    pub t: T,
    pub upsilon: T,
    pub lambda: T,
}

impl<T: Real> FlowState<T> {
    /// `log |h'_t(z)| = -a Re(deriv_integral)`
    #[inline]
    pub fn log_abs_deriv(&self, params: &SleParams<T>) -> T {
        -params.a * self.deriv_integral.re
    }
}

/// Step-size control shared by the flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig<T> {
    /// Base time step, used as-is away from the singularity.
    pub dt_base: T,
    /// Multiplier on the squared distance to the singularity in the adaptive step.
    pub c_adapt: T,
    /// Below this `|sin Z|^2` (radial) or `|Z|^2` (chordal) the point counts as absorbed.
    pub swallow_floor: T,
    /// Within this distance of the driving point the path is finished with
    /// the angle diffusion instead of the flow; 0 disables the hand-over.
    pub terminal_radius: T,
    pub max_steps: u64,
}

impl<T: Real> Default for StepConfig<T> {
    fn default() -> Self {
        StepConfig { dt_base: T::lit(1e-3), c_adapt: T::one(), swallow_floor: T::lit(1e-12), terminal_radius: T::lit(1e-3), max_steps: 50_000_000 }
    }
}

/// A Loewner flow that can be advanced one step at a time.
pub trait LoewnerFlow<T: Real> {
    fn params(&self) -> &SleParams<T>;

    fn config(&self) -> &StepConfig<T>;

    /// Initial state for a marked point given in the flow's native coordinates.
    fn start(&self, z: Complex<T>) -> Result<FlowState<T>>;

    /// One step with driving increment `db` over `dt`. Errors with
    /// [`crate::Error::Swallowed`] when the point is absorbed.
    fn step(&self, state: &FlowState<T>, db: T, dt: T) -> Result<FlowState<T>>;

    /// Step length to use from `state`.
    fn adaptive_dt(&self, state: &FlowState<T>) -> T;

    /// Squared distance to the driving point: `|sin Z|^2` (radial) or `|Z|^2` (chordal).
    fn singular_distance_sq(&self, state: &FlowState<T>) -> T;

    /// `c* lambda^{4a-1}`: the scale of the probability that the conformal
    /// radius still shrinks substantially from this state.
    fn residual_weight(&self, state: &FlowState<T>) -> T {
        let p = self.params();
        p.c_star * state.lambda.powf(p.boundary_exponent())
    }
}

use num_complex::Complex;

use super::radial::rk4;
use super::{FlowState, LoewnerFlow, StepConfig};
use crate::error::{Error, Result};
use crate::params::SleParams;
use crate::real::Real;

/// Chordal SLE in the upper half-plane, `Z_t = g_t(z) - B_t`: `dZ = a/Z dt + dB`.
///
/// The adaptive step is `dt_base * c_adapt * |Z|^2`, which respects the
/// scale invariance of the chordal flow.
#[derive(Debug, Clone, Copy)]
pub struct ChordalFlow<T> {
    pub params: SleParams<T>,
    pub config: StepConfig<T>,
}

impl<T: Real> ChordalFlow<T> {
    pub fn new(params: SleParams<T>, config: StepConfig<T>) -> Self {
        ChordalFlow { params, config }
    }
}

fn chordal_state<T: Real>(z: Complex<T>, deriv_integral: Complex<T>, t: T, a: T) -> FlowState<T> {
    FlowState { z, deriv_integral, t, upsilon: z.im * (a * deriv_integral.re).exp(), lambda: z.im / z.norm() }
}

pub fn step_chordal<T: Real>(
    state: &FlowState<T>,
    db: T,
    dt: T,
    params: &SleParams<T>,
    swallow_floor: T,
) -> Result<FlowState<T>> {
    let a = params.a;
    let swallowed = || Error::Swallowed { t: state.t.to_f64_lossy() };
    let inv0 = state.z.inv();
    let noise = Complex::new(db, T::zero());
    let pred = state.z + inv0 * (a * dt) + noise;
    if !(pred.im > T::zero()) {
        return Err(swallowed());
    }
    let next = state.z + (inv0 + pred.inv()) * (a * dt / T::lit(2.0)) + noise;
    if !(next.im > T::zero()) || next.norm_sqr() < swallow_floor {
        return Err(swallowed());
    }
    let inv1 = next.inv();
    let integral = state.deriv_integral + (inv0 * inv0 + inv1 * inv1) * (dt / T::lit(2.0));
    Ok(chordal_state(next, integral, state.t + dt, a))
}

impl<T: Real> LoewnerFlow<T> for ChordalFlow<T> {
    fn params(&self) -> &SleParams<T> {
        &self.params
    }

    fn config(&self) -> &StepConfig<T> {
        &self.config
    }

    fn start(&self, z: Complex<T>) -> Result<FlowState<T>> {
        if !(z.im > T::zero()) {
            return Err(Error::OutsideDomain(format!("{z}"), "half-plane needs Im z > 0"));
        }
        Ok(chordal_state(z, Complex::new(T::zero(), T::zero()), T::zero(), self.params.a))
    }

    fn step(&self, state: &FlowState<T>, db: T, dt: T) -> Result<FlowState<T>> {
        step_chordal(state, db, dt, &self.params, self.config.swallow_floor)
    }

    #[inline]
    fn adaptive_dt(&self, state: &FlowState<T>) -> T {
        self.config.dt_base * self.config.c_adapt * state.z.norm_sqr()
    }

    #[inline]
    fn singular_distance_sq(&self, state: &FlowState<T>) -> T {
        state.z.norm_sqr()
    }
}

/// `g_t(z) = sqrt(z^2 + 2at)` for zero driving, on the branch with positive imaginary part.
/// Errors when the point has been reached by the (vertical) hull.
pub fn solve_chordal_zero_driving<T: Real>(z: Complex<T>, t: T, params: &SleParams<T>) -> Result<Complex<T>> {
    if !(z.im > T::zero()) {
        return Err(Error::OutsideDomain(format!("{z}"), "half-plane needs Im z > 0"));
    }
    let w = (z * z + Complex::new(T::lit(2.0) * params.a * t, T::zero())).sqrt();
    let w = if w.im < T::zero() { -w } else { w };
    if w.im <= T::lit(T::TINY) * (T::one() + z.norm()) {
        return Err(Error::Swallowed { t: t.to_f64_lossy() });
    }
    Ok(w)
}

/// RK4 integration of `dg/dt = a/g` with zero driving.
pub fn solve_chordal_rk4<T: Real>(z: Complex<T>, t: T, dt: T, params: &SleParams<T>) -> Complex<T> {
    rk4(z, t, dt, |w| w.inv() * params.a)
}

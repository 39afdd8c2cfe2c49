use num_complex::Complex;

use super::{FlowState, LoewnerFlow, StepConfig};
use crate::error::{Error, Result};
use crate::formulas::CylinderFields;
use crate::geometry::wrap_x;
use crate::params::SleParams;
use crate::real::Real;

/// Radial SLE on the cylinder: `dZ = a cot(Z) dt + dB`.
#[derive(Debug, Clone, Copy)]
pub struct RadialFlow<T> {
    pub params: SleParams<T>,
    pub config: StepConfig<T>,
}

impl<T: Real> RadialFlow<T> {
    pub fn new(params: SleParams<T>, config: StepConfig<T>) -> Self {
        RadialFlow { params, config }
    }
}

fn radial_state<T: Real>(z: Complex<T>, deriv_integral: Complex<T>, t: T, f: &CylinderFields<T>, a: T) -> FlowState<T> {
    FlowState {
        z,
        deriv_integral,
        t,
        upsilon: f.sinh_y * f.cosh_y * (a * deriv_integral.re).exp(),
        lambda: f.lambda(),
    }
}

/// Advances the radial flow by one Heun step. `dB = 0` with `dt -> 0` recovers
/// the drift `a (v - i u)`.
pub fn step_radial<T: Real>(
    state: &FlowState<T>,
    db: T,
    dt: T,
    params: &SleParams<T>,
    swallow_floor: T,
) -> Result<FlowState<T>> {
    let a = params.a;
    let swallowed = || Error::Swallowed { t: state.t.to_f64_lossy() };
    let f0 = CylinderFields::at(state.z.re, state.z.im);
    if f0.sin_sq < swallow_floor {
        return Err(swallowed());
    }
    let drift0 = f0.cot() * a;
    let noise = Complex::new(db, T::zero());
    let pred = state.z + drift0 * dt + noise;
    if !(pred.im > T::zero()) {
        return Err(swallowed());
    }
    let fp = CylinderFields::at(pred.re, pred.im);
    let drift1 = fp.cot() * a;
    let next = state.z + (drift0 + drift1) * (dt / T::lit(2.0)) + noise;
    if !(next.im > T::zero()) {
        return Err(swallowed());
    }
    let z = Complex::new(wrap_x(next.re), next.im);
    let f1 = CylinderFields::at(z.re, z.im);
    if f1.sin_sq < swallow_floor || !f1.sin_sq.is_finite() {
        return Err(swallowed());
    }
    let integral = state.deriv_integral + (f0.csc_sq() + f1.csc_sq()) * (dt / T::lit(2.0));
    Ok(radial_state(z, integral, state.t + dt, &f1, a))
}

impl<T: Real> LoewnerFlow<T> for RadialFlow<T> {
    fn params(&self) -> &SleParams<T> {
        &self.params
    }

    fn config(&self) -> &StepConfig<T> {
        &self.config
    }

    fn start(&self, z: Complex<T>) -> Result<FlowState<T>> {
        if !(z.im > T::zero()) {
            return Err(Error::OutsideDomain(format!("{z}"), "cylinder needs y > 0"));
        }
        let z = Complex::new(wrap_x(z.re), z.im);
        let f = CylinderFields::at(z.re, z.im);
        Ok(radial_state(z, Complex::new(T::zero(), T::zero()), T::zero(), &f, self.params.a))
    }

    fn step(&self, state: &FlowState<T>, db: T, dt: T) -> Result<FlowState<T>> {
        step_radial(state, db, dt, &self.params, self.config.swallow_floor)
    }

    #[inline]
    fn adaptive_dt(&self, state: &FlowState<T>) -> T {
        self.config.dt_base * T::one().min(self.config.c_adapt * self.singular_distance_sq(state))
    }

    #[inline]
    fn singular_distance_sq(&self, state: &FlowState<T>) -> T {
        let s = state.z.re.sin();
        let sh = state.z.im.sinh();
        s * s + sh * sh
    }
}

/// Closed-form zero-driving radial flow: the `h_t(z)` with `cos h_t(z) = e^{-at} cos z`
/// that is continuous in `t` from `h_0 = z`.
pub fn solve_radial_deterministic<T: Real>(z: Complex<T>, t: T, params: &SleParams<T>) -> Complex<T> {
    // cos is one-to-one from the strip 0 < Re < pi onto its image, and the flow
    // commutes with z -> z + pi, so reduce to that strip and shift back.
    let k = (z.re / T::PI()).floor();
    let shifted = z - Complex::new(k * T::PI(), T::zero());
    let h = (shifted.cos() * (-params.a * t).exp()).acos();
    h + Complex::new(k * T::PI(), T::zero())
}

/// `h_t'(z) = e^{-at} sin z / sin h_t(z)` for the zero-driving flow.
pub fn radial_derivative_closed_form<T: Real>(z: Complex<T>, t: T, params: &SleParams<T>) -> Complex<T> {
    let h = solve_radial_deterministic(z, t, params);
    z.sin() * (-params.a * t).exp() / h.sin()
}

/// Classical RK4 integration of `dh/dt = a cot h` with `B = 0`.
pub fn solve_radial_rk4<T: Real>(z: Complex<T>, t: T, dt: T, params: &SleParams<T>) -> Complex<T> {
    let f = |w: Complex<T>| (w.cos() / w.sin()) * params.a;
    rk4(z, t, dt, f)
}

pub(super) fn rk4<T: Real>(z: Complex<T>, t: T, dt: T, f: impl Fn(Complex<T>) -> Complex<T>) -> Complex<T> {
    let n = (t / dt).ceil().to_u64().unwrap_or(0).max(1);
    let h = t / T::from_u64(n).unwrap();
    let half = h / T::lit(2.0);
    let mut w = z;
    for _ in 0..n {
        let k1 = f(w);
        let k2 = f(w + k1 * half);
        let k3 = f(w + k2 * half);
        let k4 = f(w + k3 * h);
        w = w + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (h / T::lit(6.0));
    }
    w
}

//! Closed-form scalar fields.
//!
//! Cylinder fields are evaluated from `(x, y)` directly, with
//! `|sin z|^2 = sin^2 x + sinh^2 y`, instead of composing complex maps.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::CylinderPoint;
use crate::params::SleParams;
use crate::real::Real;

/// The trigonometric building blocks at one cylinder point.
#[derive(Debug, Clone, Copy)]
pub struct CylinderFields<T> {
    pub sin_x: T,
    pub cos_x: T,
    pub sinh_y: T,
    pub cosh_y: T,
    /// `|sin z|^2`
    pub sin_sq: T,
}

impl<T: Real> CylinderFields<T> {
    #[inline]
    pub fn at(x: T, y: T) -> Self {
        let (sin_x, cos_x) = x.sin_cos();
        let sinh_y = y.sinh();
        let cosh_y = y.cosh();
        CylinderFields { sin_x, cos_x, sinh_y, cosh_y, sin_sq: sin_x * sin_x + sinh_y * sinh_y }
    }

    /// `sinh y cosh y / |sin z|^2`; `cot z = v - i u`.
    #[inline]
    pub fn u(&self) -> T {
        self.sinh_y * self.cosh_y / self.sin_sq
    }

    /// `sin x cos x / |sin z|^2`
    #[inline]
    pub fn v(&self) -> T {
        self.sin_x * self.cos_x / self.sin_sq
    }

    /// `Re csc^2 z`
    #[inline]
    pub fn rho(&self) -> T {
        let num = self.sin_x * self.sin_x * self.cosh_y * self.cosh_y
            - self.cos_x * self.cos_x * self.sinh_y * self.sinh_y;
        num / (self.sin_sq * self.sin_sq)
    }

    /// `cot z`
    #[inline]
    pub fn cot(&self) -> Complex<T> {
        Complex::new(self.v(), -self.u())
    }

    /// `csc^2 z = rho - 2i u v`
    #[inline]
    pub fn csc_sq(&self) -> Complex<T> {
        let (u, v) = (self.u(), self.v());
        Complex::new(self.rho(), -T::lit(2.0) * u * v)
    }

    /// `sinh y cosh y / |sin z|`
    #[inline]
    pub fn lambda(&self) -> T {
        self.sinh_y * self.cosh_y / self.sin_sq.sqrt()
    }

    /// `|sin z|^p u^zeta`
    #[inline]
    pub fn h(&self, params: &SleParams<T>) -> T {
        let sin_part = if params.p == T::zero() { T::one() } else { self.sin_sq.powf(params.p / T::lit(2.0)) };
        sin_part * self.u().powf(params.zeta)
    }
}

fn require_upper<T: Real>(z: Complex<T>) -> Result<()> {
    if z.im > T::zero() && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDomain(format!("{z}"), "need Im z > 0"))
    }
}

/// Chordal Green's function in the upper half-plane from 0 to infinity:
/// `Im(z)^{d-2} sin^{4a-1}(arg z)`.
pub fn chordal_green<T: Real>(z: Complex<T>, params: &SleParams<T>) -> Result<T> {
    require_upper(z)?;
    let s = z.im / z.norm();
    Ok(z.im.powf(params.d - T::lit(2.0)) * s.powf(params.boundary_exponent()))
}

/// `sin(arg z) = Im z / |z|`
pub fn s_invariant<T: Real>(z: Complex<T>) -> Result<T> {
    require_upper(z)?;
    Ok(z.im / z.norm())
}

/// The drift fields of the cylinder flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift<T> {
    pub u: T,
    pub v: T,
    pub rho: T,
}

pub fn u_v_rho<T: Real>(z: &CylinderPoint<T>) -> Drift<T> {
    let f = CylinderFields::at(z.x(), z.y());
    Drift { u: f.u(), v: f.v(), rho: f.rho() }
}

/// `Lambda(z) = sinh y cosh y / |sin z|`
pub fn lambda_field<T: Real>(z: &CylinderPoint<T>) -> T {
    CylinderFields::at(z.x(), z.y()).lambda()
}

/// `H(z) = |sin z|^p u(z)^zeta`, equal to the cylinder Green's function when kappa = 4.
pub fn h_field<T: Real>(z: &CylinderPoint<T>, params: &SleParams<T>) -> T {
    CylinderFields::at(z.x(), z.y()).h(params)
}

/// Radial SLE_4 Green's function in the disk from 1 to 0, up to a global constant:
/// `sqrt((1 - |z|^2) / (|z| |1 - z|^2))`.
pub fn radial_green_disk_k4<T: Real>(z: Complex<T>) -> Result<T> {
    let r = z.norm();
    if r == T::zero() {
        return Err(Error::Singular("disk Green's function diverges at 0"));
    }
    if !(r < T::one()) {
        return Err(Error::OutsideDomain(format!("{z}"), "need |z| < 1"));
    }
    let one_minus = (Complex::new(T::one(), T::zero()) - z).norm_sqr();
    Ok(((T::one() - r * r) / (r * one_minus)).sqrt())
}

/// The kappa = 4 disk formula carried to the cylinder:
/// `2^{2-d} e^{-2(2-d) y} G_D(e^{-2y + 2ix})`.
pub fn hstar_green_from_disk_k4<T: Real>(z: &CylinderPoint<T>) -> Result<T> {
    let two_minus_d = T::lit(0.5);
    let w = Complex::from_polar((-T::lit(2.0) * z.y()).exp(), T::lit(2.0) * z.x());
    let gd = radial_green_disk_k4(w)?;
    Ok(T::lit(2.0).powf(two_minus_d) * (-T::lit(2.0) * two_minus_d * z.y()).exp() * gd)
}

/// Schwarz kernel of the disk at 1: `(1/2pi)(1 + z)/(1 - z)`.
pub fn schwarz_kernel_disk<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !(z.norm_sqr() < T::one()) {
        return Err(Error::OutsideDomain(format!("{z}"), "need |z| < 1"));
    }
    let one = Complex::new(T::one(), T::zero());
    Ok((one + z) / (one - z) / (T::lit(2.0) * T::PI()))
}

/// Coefficients `F = 2r sin(t)/(1 + r^2 - 2r cos t)`, `J = r(1 - r^2)/(1 + r^2 - 2r cos t)`
/// of the disk equation.
pub fn disk_pde_coefficients<T: Real>(r: T, theta: T) -> Result<(T, T)> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::OutsideDomain(format!("r = {r}"), "need 0 < r < 1"));
    }
    let den = T::one() + r * r - T::lit(2.0) * r * theta.cos();
    Ok((T::lit(2.0) * r * theta.sin() / den, r * (T::one() - r * r) / den))
}

/// Analytic `dF/dtheta`.
pub fn disk_pde_f_theta<T: Real>(r: T, theta: T) -> T {
    let (s, c) = theta.sin_cos();
    let den = T::one() + r * r - T::lit(2.0) * r * c;
    let two_r = T::lit(2.0) * r;
    (two_r * c * den - two_r * s * two_r * s) / (den * den)
}

/// Poisson kernel ratio `(1 - r^2)/(1 + r^2 - 2r cos t)`, two pi times `Re` of the Schwarz kernel.
pub fn disk_poisson<T: Real>(r: T, theta: T) -> T {
    (T::one() - r * r) / (T::one() + r * r - T::lit(2.0) * r * theta.cos())
}

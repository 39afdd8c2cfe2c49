//! The half-infinite cylinder, the three fixed conformal maps, and conformal radii.
//!
//! Points of the cylinder are written `z = x + iy` with `y > 0` and `x` taken
//! modulo `pi`. The maps used throughout are
//!
//! * `phi(z) = (z - i)/(z + i)`, upper half-plane onto the unit disk,
//! * `psi(z) = exp(2iz)`, cylinder onto the punctured disk,
//! * `f(z) = arctan(z)`, the half-plane to cylinder map normalized by
//!   `f(0) = 0`, `f'(0) = 1`. It satisfies `psi(f(z)) = -phi(z)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// A point of the cylinder with canonical `x` in `(-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderPoint<T> {
    x: T,
    y: T,
}

impl<T: Real> CylinderPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        wrap_point(x, y)
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        wrap_point(z.re, z.im)
    }

    /// Cylinder point corresponding to `w = r e^{i theta}` in the punctured disk.
    pub fn from_polar(r: T, theta: T) -> Result<Self> {
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::OutsideDomain(format!("r = {r}"), "need 0 < r < 1"));
        }
        wrap_point(theta / T::lit(2.0), -r.ln() / T::lit(2.0))
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }

    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    #[inline]
    pub fn to_complex(&self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }

    /// Euclidean modulus of the canonical representative.
    #[inline]
    pub fn modulus(&self) -> T {
        self.x.hypot(self.y)
    }
}

/// Reduces `x` modulo `pi` into `(-pi/2, pi/2]` without validating `y`.
#[inline]
pub fn wrap_x<T: Real>(x: T) -> T {
    let pi = T::PI();
    let k = ((x - T::FRAC_PI_2()) / pi).ceil();
    let w = x - k * pi;
    // Rounding can leave w a hair outside the interval.
    if w <= -T::FRAC_PI_2() {
        w + pi
    } else if w > T::FRAC_PI_2() {
        w - pi
    } else {
        w
    }
}

/// Canonical cylinder point for a raw `x` and height `y > 0`.
pub fn wrap_point<T: Real>(x_raw: T, y: T) -> Result<CylinderPoint<T>> {
    if !(y > T::zero()) || !y.is_finite() {
        return Err(Error::OutsideDomain(format!("y = {y}"), "cylinder needs y > 0"));
    }
    if !x_raw.is_finite() {
        return Err(Error::OutsideDomain(format!("x = {x_raw}"), "x must be finite"));
    }
    Ok(CylinderPoint { x: wrap_x(x_raw), y })
}

/// Which of the three fixed maps to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Map {
    /// `phi(z) = (z - i)/(z + i)`
    HalfToDisk,
    /// `psi(z) = exp(2iz)`
    HstarToDisk,
    /// `f(z) = arctan(z)`, a branch of `psi^{-1}(-phi(z))` with `f(0) = 0`.
    HalfToHstar,
}

pub fn transform<T: Real>(z: Complex<T>, which: Map) -> Result<Complex<T>> {
    let i = Complex::<T>::i();
    match which {
        Map::HalfToDisk => {
            let den = z + i;
            if den.norm() <= T::lit(T::TINY) {
                return Err(Error::Singular("phi has a pole at -i"));
            }
            if z.im < T::zero() {
                return Err(Error::OutsideDomain(format!("{z}"), "phi needs Im z >= 0"));
            }
            Ok((z - i) / den)
        }
        Map::HstarToDisk => {
            if !(z.im > T::zero()) {
                return Err(Error::OutsideDomain(format!("{z}"), "psi needs y > 0"));
            }
            Ok((i * z * T::lit(2.0)).exp())
        }
        Map::HalfToHstar => {
            if z.im < T::zero() {
                return Err(Error::OutsideDomain(format!("{z}"), "f needs Im z >= 0"));
            }
            if (z - i).norm() <= T::lit(T::TINY) {
                return Err(Error::Singular("f has a logarithmic singularity at i"));
            }
            // (1/2i) Log((i - z)/(i + z)); the principal branch is continuous on the
            // unit half-disk and vanishes at 0.
            let w = (i - z) / (i + z);
            Ok(w.ln() / (i * T::lit(2.0)))
        }
    }
}

/// Domains with a closed-form conformal radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Disk,
    Hstar,
}

/// One half of the conformal radius: `(1 - |z|^2)/2` on the disk, `sinh y cosh y` on the cylinder.
pub fn conformal_radius<T: Real>(z: Complex<T>, domain: Domain) -> Result<T> {
    match domain {
        Domain::Disk => {
            let r2 = z.norm_sqr();
            if !(r2 < T::one()) {
                return Err(Error::OutsideDomain(format!("{z}"), "need |z| < 1"));
            }
            Ok((T::one() - r2) / T::lit(2.0))
        }
        Domain::Hstar => {
            if !(z.im > T::zero()) {
                return Err(Error::OutsideDomain(format!("{z}"), "need y > 0"));
            }
            Ok(z.im.sinh() * z.im.cosh())
        }
    }
}

/// Euclidean distance to the boundary: `1 - |z|` for the disk, `y` for the cylinder.
pub fn boundary_distance<T: Real>(z: Complex<T>, domain: Domain) -> T {
    match domain {
        Domain::Disk => T::one() - z.norm(),
        Domain::Hstar => z.im,
    }
}

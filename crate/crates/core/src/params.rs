//! Exponents and constants determined by kappa.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::real::Real;

/// Every scalar derived from kappa.
///
/// `p` is the exponent of `|sin z|` and `zeta` the exponent of `u` in
/// `H(z) = |sin z|^p u(z)^zeta`; with that naming `beta = a p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleParams<T> {
    pub kappa: T,
    /// `2 / kappa`
    pub a: T,
    /// Fractal dimension `1 + kappa / 8`.
    pub d: T,
    /// `(4a - 1) - 2(2 - d)`
    pub p: T,
    /// `(4a - 1) - (2 - d)`
    pub zeta: T,
    /// `(4 - kappa)(kappa - 8) / (8 kappa)`
    pub q: T,
    /// `a p = -2 a q`
    pub beta: T,
    /// `2 / int_0^pi sin^{8/kappa}(x) dx`
    pub c_star: T,
}

impl<T: Real> SleParams<T> {
    pub fn new(kappa: T) -> Result<Self> {
        derive_params(kappa)
    }

    /// `4a - 1 = 8/kappa - 1`, the exponent carried by `S`, `Lambda` and the chordal Green's function.
    #[inline]
    pub fn boundary_exponent(&self) -> T {
        T::lit(4.0) * self.a - T::one()
    }

    /// `2 - d`, the exponent of the hitting-probability scaling law.
    #[inline]
    pub fn scaling_exponent(&self) -> T {
        T::lit(2.0) - self.d
    }

    /// True when kappa is 4 to working precision, where `beta = 0` and `Phi = 1`.
    pub fn is_kappa_four(&self) -> bool {
        (self.kappa - T::lit(4.0)).abs() <= T::lit(T::TINY) * T::lit(4.0)
    }

    /// Normalized stationary density of the tilted angle process, `(c*/2) sin^{4a}(theta)`.
    pub fn angle_density(&self, theta: T) -> T {
        self.c_star / T::lit(2.0) * theta.sin().abs().powf(T::lit(4.0) * self.a)
    }
}

/// Computes all kappa-dependent scalars. Rejects kappa outside `(0, 8)`.
pub fn derive_params<T: Real>(kappa: T) -> Result<SleParams<T>> {
    if !(kappa > T::zero() && kappa < T::lit(8.0)) {
        return Err(Error::InvalidKappa(kappa.to_f64_lossy()));
    }
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let eight = T::lit(8.0);
    let a = two / kappa;
    let d = T::one() + kappa / eight;
    let p = (four * a - T::one()) - two * (two - d);
    let zeta = (four * a - T::one()) - (two - d);
    let q = (four - kappa) * (kappa - eight) / (eight * kappa);
    let beta = a * p;
    let exponent = eight / kappa;
    let rel_tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    let integral = quadrature::integrate(|x: T| x.sin().powf(exponent), T::zero(), T::PI(), rel_tol)?;
    Ok(SleParams { kappa, a, d, p, zeta, q, beta, c_star: two / integral })
}

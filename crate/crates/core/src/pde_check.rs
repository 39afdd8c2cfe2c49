//! Finite-difference residuals of the Green's-function equations.
//!
//! Each residual is the left side of the equation evaluated with central
//! second-order differences of spacing `h`, divided by the field itself. For
//! an exact solution it is pure truncation error, so halving `h` divides it by
//! four; for a wrong ansatz it stays of order one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulas::{disk_pde_coefficients, disk_pde_f_theta, disk_poisson, CylinderFields};
use crate::params::SleParams;
use crate::real::Real;

/// Coordinates of a residual grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    /// `(r, theta)` in the unit disk.
    DiskPolar,
    /// `(x, y)` on the cylinder.
    Hstar,
}

/// Rectangle of evaluation points and the stencil spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub domain: GridDomain,
    /// `r` or `x` range.
    pub first: (T, T),
    /// `theta` or `y` range.
    pub second: (T, T),
    /// Evaluation points per axis.
    pub nodes: usize,
    pub h: T,
    /// Multiple of `h` kept clear of the singular boundaries.
    pub guard: T,
}

impl<T: Real> GridSpec<T> {
    pub fn hstar(x: (T, T), y: (T, T), nodes: usize, h: T) -> Self {
        GridSpec { domain: GridDomain::Hstar, first: x, second: y, nodes, h, guard: T::lit(10.0) }
    }

    pub fn disk(r: (T, T), theta: (T, T), nodes: usize, h: T) -> Self {
        GridSpec { domain: GridDomain::DiskPolar, first: r, second: theta, nodes, h, guard: T::lit(10.0) }
    }

    /// Same points, stencil spacing halved.
    pub fn refined(&self) -> Self {
        GridSpec { h: self.h / T::lit(2.0), ..*self }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 2 || !(self.h > T::zero()) {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes per axis and h > 0".into()));
        }
        let band = self.guard * self.h;
        match self.domain {
            GridDomain::Hstar => {
                if self.second.0 - band <= T::zero() {
                    return Err(Error::OutsideDomain(format!("y = {}", self.second.0), "grid too close to y = 0"));
                }
            }
            GridDomain::DiskPolar => {
                if self.first.0 - band <= T::zero() || self.first.1 + band >= T::one() {
                    return Err(Error::OutsideDomain(format!("r in [{}, {}]", self.first.0, self.first.1), "grid too close to r = 0 or r = 1"));
                }
            }
        }
        Ok(())
    }

    fn points(&self) -> Vec<(T, T)> {
        let m = self.nodes - 1;
        let at = |(lo, hi): (T, T), k: usize| lo + (hi - lo) * T::lit(k as f64) / T::lit(m as f64);
        (0..=m).flat_map(|i| (0..=m).map(move |j| (at(self.first, i), at(self.second, j)))).collect()
    }
}

/// Summary of a residual field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats<T> {
    pub h: T,
    pub max_abs: T,
    pub mean_abs: T,
    pub points: usize,
}

/// Below this the residual is indistinguishable from rounding.
pub const MACHINE_ZERO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order<T> {
    Observed(T),
    /// Both residuals are at rounding level; no order can be read off.
    MachineZero,
}

impl<T: Real> Order<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Order::Observed(p) => Some(*p),
            Order::MachineZero => None,
        }
    }
}

/// `log2(max_res(h) / max_res(h/2))`
pub fn convergence_order<T: Real>(coarse: &ResidualStats<T>, fine: &ResidualStats<T>) -> Order<T> {
    let tiny = T::lit(MACHINE_ZERO);
    if coarse.max_abs < tiny || fine.max_abs < tiny {
        return Order::MachineZero;
    }
    Order::Observed((coarse.max_abs / fine.max_abs).log2())
}

fn stats<T: Real>(grid: &GridSpec<T>, res: impl Fn(T, T) -> T + Sync) -> Result<ResidualStats<T>> {
    grid.validate()?;
    let pts = grid.points();
    let vals: Vec<T> = pts.par_iter().map(|&(a, b)| res(a, b).abs()).collect();
    let max_abs = vals.iter().fold(T::zero(), |m, &v| m.max(v));
    let mean_abs = vals.iter().fold(T::zero(), |s, &v| s + v) / T::lit(vals.len() as f64);
    Ok(ResidualStats { h: grid.h, max_abs, mean_abs, points: vals.len() })
}

/// Central differences `(f_x, f_y, f_xx)` of a function of two variables.
fn diffs<T: Real>(f: &impl Fn(T, T) -> T, x: T, y: T, h: T) -> (T, T, T, T) {
    let f0 = f(x, y);
    let (fxp, fxm) = (f(x + h, y), f(x - h, y));
    let (fyp, fym) = (f(x, y + h), f(x, y - h));
    let two = T::lit(2.0);
    ((fxp - fxm) / (two * h), (fyp - fym) / (two * h), (fxp - two * f0 + fxm) / (h * h), f0)
}

/// Pointwise residual of `H_tt + a F H_t + a J H_r + (a - 1/4) F_t H = 0`
/// in polar coordinates `(r, t)`, relative to `H`.
pub fn disk_residual_at<T: Real>(a: T, field: &impl Fn(T, T) -> T, r: T, theta: T, h: T) -> T {
    // diffs differentiates twice in its first argument, so swap to put theta first.
    let g = |t: T, r: T| field(r, t);
    let (h_t, h_r, h_tt, h0) = diffs(&g, theta, r, h);
    let (f, j) = disk_pde_coefficients(r, theta).expect("validated grid");
    let f_t = disk_pde_f_theta(r, theta);
    (h_tt + a * f * h_t + a * j * h_r + (a - T::lit(0.25)) * f_t * h0) / h0
}

/// Residual of the disk equation for the ansatz `H = u_D^p`, with `u_D`
/// the Poisson kernel ratio. Vanishes identically only for `p = a = 1/2`.
pub fn residual_disk<T: Real>(a: T, p: T, grid: &GridSpec<T>) -> Result<ResidualStats<T>> {
    if grid.domain != GridDomain::DiskPolar {
        return Err(Error::InvalidArgument("disk residual needs a polar grid".into()));
    }
    let field = move |r: T, t: T| disk_poisson(r, t).powf(p);
    stats(grid, |r, t| disk_residual_at(a, &field, r, t, grid.h))
}

/// Pointwise residual of `(1/2) H_xx + a v H_x - a u H_y + (1/4 - a) rho H + c H = 0`,
/// relative to `H`.
pub fn hstar_residual_at<T: Real>(a: T, c: T, field: &impl Fn(T, T) -> T, x: T, y: T, h: T) -> T {
    let (h_x, h_y, h_xx, h0) = diffs(field, x, y, h);
    let f = CylinderFields::at(x, y);
    (h_xx / T::lit(2.0) + a * f.v() * h_x - a * f.u() * h_y + (T::lit(0.25) - a) * f.rho() * h0 + c * h0) / h0
}

fn hstar_grid<T: Real>(grid: &GridSpec<T>) -> Result<()> {
    if grid.domain != GridDomain::Hstar {
        return Err(Error::InvalidArgument("cylinder residual needs an (x, y) grid".into()));
    }
    Ok(())
}

/// Residual of the equation for `|sin z|^p u^zeta` with the exponents given.
pub fn residual_hstar_exponents<T: Real>(params: &SleParams<T>, p: T, zeta: T, grid: &GridSpec<T>) -> Result<ResidualStats<T>> {
    hstar_grid(grid)?;
    let field = move |x: T, y: T| {
        let f = CylinderFields::at(x, y);
        f.sin_sq.powf(p / T::lit(2.0)) * f.u().powf(zeta)
    };
    let (a, c) = (params.a, params.a * params.p);
    stats(grid, |x, y| hstar_residual_at(a, c, &field, x, y, grid.h))
}

/// Residual of the equation satisfied by `H = |sin z|^p u^zeta`, with the exponents of `params`.
pub fn residual_hstar_h<T: Real>(params: &SleParams<T>, grid: &GridSpec<T>) -> Result<ResidualStats<T>> {
    residual_hstar_exponents(params, params.p, params.zeta, grid)
}

/// Residual of the Green's-function equation (no `a p H` term) at kappa = 4 for `G = u^{1/2}`.
pub fn residual_hstar_g_k4<T: Real>(grid: &GridSpec<T>) -> Result<ResidualStats<T>> {
    hstar_grid(grid)?;
    let field = |x: T, y: T| CylinderFields::at(x, y).u().sqrt();
    let a = T::lit(0.5);
    stats(grid, |x, y| hstar_residual_at(a, T::zero(), &field, x, y, grid.h))
}

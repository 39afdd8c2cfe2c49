//! Radial and chordal Schramm–Loewner evolution: Loewner flows, the
//! two-sided radial diffusion, Monte Carlo Green's function estimators and
//! finite-difference residual checks for the Green's function equations.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the estimators are calibrated for.

pub mod error;
pub mod estimators;
pub mod formulas;
pub mod geometry;
pub mod loewner;
pub mod parallel;
pub mod params;
pub mod pde_check;
pub mod quadrature;
pub mod real;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use estimators::{Estimate, EpsilonLadder, McOptions};
pub use geometry::{conformal_radius, transform, wrap_point, CylinderPoint, Domain, Map};
pub use loewner::{FlowState, StepConfig};
pub use params::{derive_params, SleParams};
pub use real::Real;
pub use rng::{DrivingPath, ZeroDriver};
pub use sampler::TiltedConfig;

/// Kappa-dependent scalars in double precision.
pub type Params = SleParams<f64>;
/// Cylinder point in double precision.
pub type Point = CylinderPoint<f64>;
/// Loewner flow state in double precision.
pub type State = FlowState<f64>;
/// Monte Carlo estimate in double precision.
pub type Est = Estimate<f64>;
/// Complex number in double precision.
pub type C64 = num_complex::Complex<f64>;

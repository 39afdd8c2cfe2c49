//! The two-sided radial diffusion obtained by tilting radial SLE with the
//! local martingale `N_t`, its hitting-time functional `Phi`, and the angle
//! process with its invariant density.

pub mod theta;
mod tilted;

pub use theta::{sample_stationary, simulate_theta, simulate_theta_with, stationary_density_test, KsOutcome, StationarySampling, ThetaConfig, ThetaMeasure, ThetaPath};
pub use tilted::{
    effective_sample_size, envelope_excess, estimate_phi, girsanov_split, phi_weights, simulate_to_hit, step_tilted, tilted_drift, tilted_dt, HitSample,
    TiltedConfig, TiltedState,
};

#[cfg(test)]
mod tests;

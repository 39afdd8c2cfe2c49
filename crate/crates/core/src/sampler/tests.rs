use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::*;
use crate::formulas::CylinderFields;
use crate::geometry::CylinderPoint;
use crate::params::derive_params;
use crate::rng::replica_stream;

fn pt(x: f64, y: f64) -> CylinderPoint<f64> {
    CylinderPoint::new(x, y).unwrap()
}

#[test]
fn axis_is_invariant_without_noise() {
    let p = derive_params::<f64>(2.0).unwrap();
    let s = TiltedState::new(&pt(0.0, 0.7));
    let n = step_tilted(&s, 0.0, 1e-3, &p).unwrap();
    assert_eq!(n.x, 0.0);
    assert!(n.y < s.y);
}

#[test]
fn drift_attracts_toward_target_at_kappa_four() {
    let p = derive_params::<f64>(4.0).unwrap();
    assert_eq!(1.0 - 3.0 * p.a, -0.5);
    let (dx, _) = tilted_drift(0.3, 0.4, p.a);
    assert!(dx < 0.0);
    let (dx, _) = tilted_drift(-0.3, 0.4, p.a);
    assert!(dx > 0.0);
}

#[test]
fn small_z_drift_is_bessel_like() {
    for kappa in [2.0, 8.0 / 3.0, 4.0, 16.0 / 3.0] {
        let p = derive_params::<f64>(kappa).unwrap();
        let (x, y) = (0.006, 0.008);
        let (dx, dy) = tilted_drift(x, y, p.a);
        let r2 = x * x + y * y;
        let bessel = (1.0 - 3.0 * p.a) * x / r2;
        assert!((dx / bessel - 1.0).abs() < 0.01);
        assert!((dy / (-p.a * y / r2) - 1.0).abs() < 0.01);
    }
}

#[test]
fn girsanov_bookkeeping() {
    for kappa in [1.0, 8.0 / 3.0, 4.0, 6.0] {
        let p = derive_params::<f64>(kappa).unwrap();
        for (x, y) in [(0.3, 0.2), (-1.1, 0.9), (1.5, 0.05)] {
            let f = CylinderFields::at(x, y);
            let (plain, tilt) = girsanov_split(&f, p.a);
            let (tilted, _) = tilted_drift(x, y, p.a);
            assert!((plain + tilt - tilted).abs() <= 1e-14 * tilted.abs().max(1.0));
        }
    }
}

#[test]
fn start_inside_stop_radius_is_immediate() {
    let p = derive_params::<f64>(2.0).unwrap();
    let cfg = TiltedConfig::<f64>::default();
    let z = pt(0.0006, 0.0008);
    let hit = simulate_to_hit(&z, &p, &cfg, &mut replica_stream(1, 0)).unwrap();
    assert_eq!(hit.steps, 0);
    assert!(hit.t_hat <= 1e-6 / p.a + 1e-15);
    assert!(!hit.truncated);
}

#[test]
fn hitting_time_exceeds_envelope_minimum() {
    // dY/dt >= -a coth Y, so Y cannot fall from y0 to delta before
    // t_min = log(cosh y0 / cosh delta) / a.
    let p = derive_params::<f64>(2.0).unwrap();
    let cfg = TiltedConfig::<f64>::default();
    let (x0, y0): (f64, f64) = (FRAC_PI_4, 0.3);
    let t_min = (y0.cosh() / cfg.delta_stop.cosh()).ln() / p.a;
    for rep in 0..200 {
        let hit = simulate_to_hit(&pt(x0, y0), &p, &cfg, &mut replica_stream(3, rep)).unwrap();
        assert!(hit.t_hat >= t_min, "{} < {t_min}", hit.t_hat);
        assert!(hit.stopped_at <= cfg.delta_stop);
    }
}

#[test]
fn phi_is_one_at_kappa_four_without_simulation() {
    let p = derive_params::<f64>(4.0).unwrap();
    let cfg = TiltedConfig { max_steps: 0, ..TiltedConfig::default() };
    let est = estimate_phi(&pt(0.2, 0.9), &p, 10, &cfg, 0).unwrap();
    assert_eq!(est.mean, 1.0);
    assert_eq!(est.stderr, 0.0);
}

#[test]
fn phi_samples_in_unit_interval_below_kappa_four() {
    let p = derive_params::<f64>(2.0).unwrap();
    let cfg = TiltedConfig { dt_base: 4e-3, ..TiltedConfig::default() };
    let w = phi_weights(&pt(FRAC_PI_4, 0.3), &p, 200, &cfg, 5).unwrap();
    assert!(w.iter().all(|(x, _)| *x > 0.0 && *x <= 1.0));
    let est = estimate_phi(&pt(FRAC_PI_4, 0.3), &p, 200, &cfg, 5).unwrap();
    assert!(est.mean > 0.0 && est.mean < 1.0);
    assert!(matches!(estimate_phi(&pt(FRAC_PI_4, 0.3), &p, 50, &cfg, 5), Err(crate::Error::TooFewSamples { .. })));
}

#[test]
fn ess_guard_trips_on_degenerate_weights() {
    let mut w = vec![1e-30; 1000];
    w[17] = 1.0;
    assert!(effective_sample_size(&w) < 1.01);
    assert_eq!(effective_sample_size(&[2.0; 100]), 100.0);
}

#[test]
fn phi_estimates_are_seed_deterministic() {
    let p = derive_params::<f64>(2.0).unwrap();
    let cfg = TiltedConfig { dt_base: 4e-3, ..TiltedConfig::default() };
    let a = estimate_phi(&pt(0.2, 0.6), &p, 150, &cfg, 9).unwrap();
    let b = estimate_phi(&pt(0.2, 0.6), &p, 150, &cfg, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn theta_drift_vanishes_on_the_midline() {
    let p = derive_params::<f64>(8.0 / 3.0).unwrap();
    for m in [ThetaMeasure::Plain, ThetaMeasure::Tilted] {
        let c = m.drift_coefficient(&p);
        assert!((c / FRAC_PI_2.tan()).abs() < 1e-15);
    }
}

#[test]
fn plain_theta_is_absorbed_at_kappa_six() {
    let p = derive_params::<f64>(6.0).unwrap();
    let cfg = ThetaConfig::default();
    for rep in 0..100 {
        let path = simulate_theta(FRAC_PI_2, &p, ThetaMeasure::Plain, 200.0, &cfg, None, &mut replica_stream(2, rep)).unwrap();
        assert!(path.absorbed_at.is_some());
        assert!(path.theta == 0.0 || path.theta == PI);
    }
}

#[test]
fn tilted_theta_survives_at_kappa_six() {
    let p = derive_params::<f64>(6.0).unwrap();
    let cfg = ThetaConfig { dt_base: 1e-3, ..ThetaConfig::default() };
    for rep in 0..50 {
        let path = simulate_theta(FRAC_PI_2, &p, ThetaMeasure::Tilted, 20.0, &cfg, None, &mut replica_stream(4, rep)).unwrap();
        assert!(path.absorbed_at.is_none());
        assert!(path.theta > 0.0 && path.theta < PI);
    }
}

#[test]
fn recording_lands_on_schedule() {
    let p = derive_params::<f64>(4.0).unwrap();
    let cfg = ThetaConfig::default();
    let rec = theta::Recording { from: 1.0, every: 0.25 };
    let path = simulate_theta(1.0, &p, ThetaMeasure::Tilted, 2.0, &cfg, Some(rec), &mut replica_stream(1, 1)).unwrap();
    assert_eq!(path.recorded.len(), 5);
}

/// Inverse-CDF draws from `(c*/2) sin^{4a}` by bisection on the quadrature CDF.
fn exact_draws(p: &crate::params::SleParams<f64>, n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = replica_stream(seed, 0);
    let cdf = |x: f64| crate::quadrature::integrate(|t| p.angle_density(t), 0.0, x, 1e-10).unwrap();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let (mut lo, mut hi) = (0.0, PI);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn ks_self_test_on_exact_draws() {
    let p = derive_params::<f64>(8.0 / 3.0).unwrap();
    let draws = exact_draws(&p, 2000, 8);
    let ks = stationary_density_test(&draws, &p, 0.05).unwrap();
    assert!(ks.pass, "{}", ks.statistic);
    assert!(ks.statistic < 3.0 / (2000f64).sqrt());
    let wrong = derive_params::<f64>(2.0).unwrap();
    assert!(stationary_density_test(&draws, &wrong, 0.02).unwrap().statistic > 0.03);
    assert!(matches!(stationary_density_test(&draws[..999], &p, 0.05), Err(crate::Error::TooFewSamples { .. })));
}

#[test]
fn kappa_four_density_is_symmetric() {
    let p = derive_params::<f64>(4.0).unwrap();
    let mean = crate::quadrature::integrate(|t| t * p.angle_density(t), 0.0, PI, 1e-12).unwrap();
    assert!((mean - FRAC_PI_2).abs() < 1e-10);
    assert!((p.angle_density(1.0) - 2.0 / PI * 1f64.sin().powi(2)).abs() < 1e-12);
}

#[test]
fn short_stationary_run() {
    let p = derive_params::<f64>(4.0).unwrap();
    let plan = StationarySampling { replicas: 2000, burn_in: 5.0, ..StationarySampling::default() };
    let cfg = ThetaConfig { dt_base: 2e-3, ..ThetaConfig::default() };
    let samples = sample_stationary(&p, &plan, &cfg, 12).unwrap();
    assert_eq!(samples.len(), 2000);
    let ks = stationary_density_test(&samples, &p, 0.05).unwrap();
    assert!(ks.pass, "{}", ks.statistic);
}

#[test]
fn envelope_holds_up_to_step_error() {
    let p = derive_params::<f64>(8.0 / 3.0).unwrap();
    let cfg = TiltedConfig { dt_base: 1e-3, ..TiltedConfig::default() };
    for rep in 0..50 {
        let e = envelope_excess(&pt(0.9, 0.7), &p, &cfg, &mut replica_stream(6, rep)).unwrap();
        assert!(e < cfg.dt_base.sqrt(), "{e}");
    }
}

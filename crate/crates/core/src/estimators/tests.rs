use std::f64::consts::FRAC_PI_4;

use super::*;
use crate::formulas::lambda_field;
use crate::params::derive_params;

fn quick() -> McOptions<f64> {
    McOptions { step: StepConfig { dt_base: 1e-2, ..StepConfig::default() }, negligible_tol: 1e-2, horizon: 200.0, seed: 3 }
}

#[test]
fn ladder_shape() {
    let l = EpsilonLadder::new(0.16, 4).unwrap();
    assert_eq!(l.values(), &[0.16, 0.08, 0.04, 0.02, 0.01]);
    assert_eq!(l.smallest(), 0.01);
    assert!(EpsilonLadder::new(0.1, 2).is_err());
    assert!(EpsilonLadder::new(0.0, 4).is_err());
    assert!(EpsilonLadder::new(1.5, 4).is_err());
}

#[test]
fn eps_one_is_certain() {
    let p = derive_params(4.0).unwrap();
    let z = CylinderPoint::new(FRAC_PI_4, 0.5).unwrap();
    let e = estimate_hit_prob(&z, &p, 1.0, 1000, &quick()).unwrap();
    assert_eq!(e.mean, 1.0);
    assert!(estimate_hit_prob(&z, &p, 0.5, 10, &quick()).is_err());
}

#[test]
fn ladder_is_nested_and_deterministic() {
    let p = derive_params(4.0).unwrap();
    let z = C64::new(FRAC_PI_4, 0.5);
    let l = EpsilonLadder::new(0.4, 3).unwrap();
    let a = estimate_ladder(FlowKind::Radial, z, &p, &l, 300, &quick()).unwrap();
    let b = estimate_ladder(FlowKind::Radial, z, &p, &l, 300, &quick()).unwrap();
    assert_eq!(a, b);
    for w in a.rungs.windows(2) {
        assert!(w[0].successes >= w[1].successes);
    }
    assert!(a.rungs[0].successes > 0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| estimate_ladder(FlowKind::Radial, z, &p, &l, 300, &quick()).unwrap());
    assert_eq!(a, c);
}

type C64 = num_complex::Complex<f64>;

#[test]
fn green_normalization_uses_initial_radius() {
    let p = derive_params(4.0).unwrap();
    let z = C64::new(FRAC_PI_4, 0.5);
    let l = EpsilonLadder::new(0.4, 3).unwrap();
    let est = estimate_ladder(FlowKind::Radial, z, &p, &l, 100, &quick()).unwrap();
    let ups0 = 0.5f64.sinh() * 0.5f64.cosh();
    for r in &est.rungs {
        let want = (r.eps * ups0).powf(p.d - 2.0) * r.prob.mean / p.c_star;
        assert!((r.green.mean - want).abs() < 1e-14);
    }
}

#[test]
fn trend_flags_reversals() {
    let mk = |g: f64| Rung { eps: 0.1, successes: 10, prob: Estimate::new(0.1, 0.01, 100), green: Estimate::new(g, 0.01, 100) };
    let smooth: Vec<_> = [1.0, 1.01, 1.02, 1.025].into_iter().map(mk).collect();
    assert!(!trend(&smooth).flagged);
    let rough: Vec<_> = [1.0, 1.2, 1.1, 1.3].into_iter().map(mk).collect();
    assert!(trend(&rough).flagged);
}

#[test]
fn green_via_phi_is_h_at_kappa_four() {
    let p = derive_params(4.0).unwrap();
    let z = CylinderPoint::new(FRAC_PI_4, 0.5).unwrap();
    let g = green_via_phi(&z, &p, 1000, &TiltedConfig::default(), 0).unwrap();
    assert_eq!(g.mean, h_field(&z, &p));
    assert_eq!(g.stderr, 0.0);
}

#[test]
fn martingale_starts_at_initial_value() {
    let p = derive_params(4.0).unwrap();
    let z = C64::new(FRAC_PI_4, 0.8);
    let rep = martingale_diagnostic(MartingaleKind::RadialN, z, &p, &[0.0, 0.05], 50, &quick()).unwrap();
    let ups0 = 0.8f64.sinh() * 0.8f64.cosh();
    let lam = lambda_field(&CylinderPoint::new(FRAC_PI_4, 0.8).unwrap());
    let n0 = ups0.powf(p.d - 2.0) * lam.powf(p.boundary_exponent());
    assert!((rep.initial - n0).abs() < 1e-14);
    assert_eq!(rep.rows[0].1.mean, rep.initial);
    assert_eq!(rep.rows[0].1.stderr, 0.0);
    assert!(martingale_diagnostic(MartingaleKind::RadialN, z, &p, &[0.1, 0.05], 5, &quick()).is_err());
}

#[test]
fn chordal_martingale_at_i() {
    let p = derive_params(8.0 / 3.0).unwrap();
    let rep = martingale_diagnostic(MartingaleKind::ChordalM, C64::new(0.0, 1.0), &p, &[0.0, 0.1], 20, &quick()).unwrap();
    assert_eq!(rep.initial, 1.0);
}

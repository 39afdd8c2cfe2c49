use rsle_core::estimators::estimate_hit_prob;
use rsle_core::sampler::estimate_phi;
use rsle_core::{derive_params, McOptions, Point, StepConfig, TiltedConfig};

fn opts(dt: f64, terminal_radius: f64, seed: u64) -> McOptions<f64> {
    McOptions { step: StepConfig { dt_base: dt, terminal_radius, ..StepConfig::default() }, seed, ..McOptions::default() }
}

#[test]
fn terminal_radius_does_not_move_the_crossing_probability() {
    let params = derive_params(6.0).unwrap();
    let z = Point::new(0.785, 0.5).unwrap();
    let wide = estimate_hit_prob(&z, &params, 0.04, 4000, &opts(5e-3, 1e-2, 11)).unwrap();
    let narrow = estimate_hit_prob(&z, &params, 0.04, 4000, &opts(5e-3, 1e-4, 12)).unwrap();
    let z_score = wide.z_score(&narrow).abs();
    assert!(z_score < 4.0, "{wide:?} vs {narrow:?}");
}

#[test]
fn same_answer_on_one_and_three_threads() {
    let params = derive_params(8.0 / 3.0).unwrap();
    let z = Point::new(0.4, 0.4).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_hit_prob(&z, &params, 0.08, 1500, &opts(1e-2, 1e-3, 5)).unwrap())
    };
    assert_eq!(run(1), run(3));
}

// Closer to the target the tilted path has less far to go, so Phi grows.
#[test]
fn phi_grows_toward_the_target() {
    let params = derive_params(2.0).unwrap();
    let cfg = TiltedConfig { dt_base: 5e-3, ..TiltedConfig::default() };
    let far = estimate_phi(&Point::new(0.0, 0.3).unwrap(), &params, 2000, &cfg, 3).unwrap();
    let near = estimate_phi(&Point::new(0.0, 0.05).unwrap(), &params, 2000, &cfg, 4).unwrap();
    assert!(near.mean > far.mean + 3.0 * (near.stderr + far.stderr), "{far:?} {near:?}");
    assert!(near.mean < 1.0);
}

#[test]
fn kappa_four_phi_is_exact() {
    let params = derive_params(4.0).unwrap();
    let phi = estimate_phi(&Point::new(1.0, 2.0).unwrap(), &params, 10, &TiltedConfig::default(), 0).unwrap();
    assert_eq!((phi.mean, phi.stderr), (1.0, 0.0));
}

//! One function per command. Each returns its results tables plus any
//! numerical guards that tripped; nothing here touches the filesystem.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex;
use rsle_core::estimators::{
    estimate_ladder, exponent_fit, green_direct, martingale_diagnostic, FlowKind, LadderEstimate, MartingaleKind, Rung,
};
use rsle_core::formulas::{chordal_green, h_field, lambda_field, radial_green_disk_k4, s_invariant};
use rsle_core::geometry::{conformal_radius, Domain};
use rsle_core::loewner::dump::write_trajectory_csv;
use rsle_core::loewner::{run_flow, ChordalFlow, LoewnerFlow, RadialFlow, StopReason, StopRule};
use rsle_core::parallel::try_replica_map;
use rsle_core::pde_check::{
    convergence_order, residual_disk, residual_hstar_exponents, residual_hstar_g_k4, residual_hstar_h, GridSpec, ResidualStats,
};
use rsle_core::sampler::{estimate_phi, sample_stationary, stationary_density_test, StationarySampling, ThetaConfig};
use rsle_core::{derive_params, DrivingPath, EpsilonLadder, Est, McOptions, Params, Point, StepConfig, TiltedConfig, C64};

use crate::config::{Command, Flow, PointSpec, RunConfig};
use crate::error::CliError;
use crate::output::{num, opt, Table};

/// What a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Extra files, relative to the output directory.
    pub dumps: Vec<(String, String)>,
    pub guards: Vec<String>,
    pub diagnostics: BTreeMap<String, String>,
}

impl Report {
    fn single(table: Table) -> Self {
        Report { tables: vec![table], ..Report::default() }
    }

    fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.diagnostics.insert(key.into(), value.to_string());
    }
}

pub const ESTIMATE_HEADER: &[&str] = &["kappa", "x", "y", "quantity", "eps", "n", "mean", "stderr", "ci_lo", "ci_hi", "seed", "reference", "flags"];

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Params => params(cfg),
        Command::Eval => eval(cfg),
        Command::Simulate => simulate(cfg),
        Command::EstimateGreen => estimate_green(cfg),
        Command::EstimatePhi => estimate_phi_cmd(cfg),
        Command::MartingaleCheck => martingale_check(cfg),
        Command::StationaryTest => stationary_test(cfg),
        Command::PdeCheck => pde_check(cfg),
        Command::ScalingFit => scaling_fit(cfg),
    }
}

fn kappa_params(cfg: &RunConfig) -> Result<Params, CliError> {
    let k = cfg.kappa.ok_or_else(|| CliError::Usage("kappa is required".into()))?;
    Ok(derive_params(k)?)
}

pub fn mc_options(cfg: &RunConfig) -> McOptions<f64> {
    McOptions {
        step: StepConfig { dt_base: cfg.dt_base, c_adapt: cfg.c_adapt, ..StepConfig::default() },
        negligible_tol: cfg.negligible_tol,
        horizon: cfg.horizon,
        seed: cfg.seed,
    }
}

pub fn tilted_config(cfg: &RunConfig) -> TiltedConfig<f64> {
    TiltedConfig { dt_base: cfg.dt_base, delta_stop: cfg.delta_stop, ..TiltedConfig::default() }
}

/// Native flow coordinates of a point: the cylinder for radial runs, the
/// upper half-plane for chordal runs. Polar input is a disk point and is
/// carried to the cylinder.
fn flow_point(p: &PointSpec, flow: Flow) -> Result<C64, CliError> {
    match (*p, flow) {
        (PointSpec::Cartesian { x, y }, Flow::Radial) => Ok(Point::new(x, y)?.to_complex()),
        (PointSpec::Cartesian { x, y }, Flow::Chordal) => Ok(C64::new(x, y)),
        (PointSpec::Polar { r, theta }, Flow::Radial) => Ok(Point::from_polar(r, theta)?.to_complex()),
        (PointSpec::Polar { .. }, Flow::Chordal) => Err(CliError::Usage("polar points are disk points; use the radial flow".into())),
    }
}

fn cylinder_point(p: &PointSpec) -> Result<Point, CliError> {
    Ok(Point::from_complex(flow_point(p, Flow::Radial)?)?)
}

fn flow_kind(flow: Flow) -> FlowKind {
    match flow {
        Flow::Radial => FlowKind::Radial,
        Flow::Chordal => FlowKind::Chordal,
    }
}

/// Closed-form Green's function where one is known: chordal for every kappa,
/// radial on the cylinder at kappa = 4.
fn reference_green(z: C64, flow: Flow, p: &Params) -> Option<f64> {
    match flow {
        Flow::Chordal => chordal_green(z, p).ok(),
        Flow::Radial if p.is_kappa_four() => Point::from_complex(z).ok().map(|c| h_field(&c, p)),
        Flow::Radial => None,
    }
}

fn estimate_row(p: &Params, z: C64, quantity: &str, eps: Option<f64>, e: &Est, seed: u64, reference: Option<f64>, flags: &str) -> Vec<String> {
    vec![
        num(p.kappa),
        num(z.re),
        num(z.im),
        quantity.to_string(),
        opt(eps),
        e.n.to_string(),
        num(e.mean),
        num(e.stderr),
        num(e.ci95.0),
        num(e.ci95.1),
        seed.to_string(),
        opt(reference),
        flags.to_string(),
    ]
}

fn params(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let mut t = Table::new("params", &["kappa", "a", "d", "p", "zeta", "q", "beta", "c_star"]);
    t.push([p.kappa, p.a, p.d, p.p, p.zeta, p.q, p.beta, p.c_star].map(num).to_vec());
    Ok(Report::single(t))
}

fn eval(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let mut t = Table::new("eval", &["kappa", "coords", "x", "y", "upsilon", "lambda", "h", "green"]);
    for spec in &cfg.points {
        let (coords, a, b) = spec.coords();
        let row = match (*spec, cfg.flow) {
            (PointSpec::Polar { r, theta }, _) => {
                let w = Complex::from_polar(r, theta);
                let green = if p.is_kappa_four() { Some(radial_green_disk_k4(w)?) } else { None };
                [Some(conformal_radius(w, Domain::Disk)?), None, None, green]
            }
            (PointSpec::Cartesian { x, y }, Flow::Radial) => {
                let z = Point::new(x, y)?;
                let h = h_field(&z, &p);
                [Some(conformal_radius(z.to_complex(), Domain::Hstar)?), Some(lambda_field(&z)), Some(h), p.is_kappa_four().then_some(h)]
            }
            (PointSpec::Cartesian { x, y }, Flow::Chordal) => {
                let z = C64::new(x, y);
                [Some(y), Some(s_invariant(z)?), None, Some(chordal_green(z, &p)?)]
            }
        };
        let mut cells = vec![num(p.kappa), coords.to_string(), num(a), num(b)];
        cells.extend(row.map(opt));
        t.push(cells);
    }
    Ok(Report::single(t))
}

fn stop_name(r: StopReason) -> &'static str {
    match r {
        StopReason::Threshold => "threshold",
        StopReason::Horizon => "horizon",
        StopReason::Swallowed => "swallowed",
        StopReason::Settled => "settled",
        StopReason::Negligible => "negligible",
    }
}

fn simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let opts = mc_options(cfg);
    let mut t = Table::new("paths", &["kappa", "x", "y", "replica", "reason", "t_end", "upsilon_ratio", "lambda", "steps"]);
    let mut report = Report::default();
    for (ip, spec) in cfg.points.iter().enumerate() {
        let z = flow_point(spec, cfg.flow)?;
        let rows = match cfg.flow {
            Flow::Radial => trace_paths(&RadialFlow::new(p, opts.step), &p, z, cfg)?,
            Flow::Chordal => trace_paths(&ChordalFlow::new(p, opts.step), &p, z, cfg)?,
        };
        for (rep, (cells, dump)) in rows.into_iter().enumerate() {
            t.push(cells);
            if let Some(csv) = dump {
                report.dumps.push((format!("paths/point{ip}_replica{rep}.csv"), csv));
            }
        }
    }
    report.tables.push(t);
    Ok(report)
}

type PathRow = (Vec<String>, Option<String>);

fn trace_paths<F: LoewnerFlow<f64> + Sync>(flow: &F, p: &Params, z: C64, cfg: &RunConfig) -> Result<Vec<PathRow>, CliError> {
    let eps_min = EpsilonLadder::new(cfg.ladder.eps0, cfg.ladder.octaves)?.smallest();
    let stop = StopRule::horizon(cfg.horizon).with_threshold(eps_min).with_negligible(cfg.negligible_tol);
    let rows = try_replica_map(cfg.n, |rep| {
        let mut drv = DrivingPath::new(cfg.seed, rep);
        let keep = (rep as usize) < cfg.dump;
        let mut states = Vec::new();
        let out = run_flow(flow, z, &mut drv, &stop, &[], |prev, next| {
            if keep {
                if states.is_empty() {
                    states.push(*prev);
                }
                states.push(*next);
            }
        })?;
        let dump = keep.then(|| {
            let mut buf = Vec::new();
            let all = if states.is_empty() { vec![out.start] } else { states };
            write_trajectory_csv(&mut buf, p, &all).expect("writing to memory");
            String::from_utf8(buf).expect("ascii csv")
        });
        let cells = vec![
            num(p.kappa),
            num(z.re),
            num(z.im),
            rep.to_string(),
            stop_name(out.reason).to_string(),
            num(out.state.t),
            num(out.state.upsilon / out.start.upsilon),
            num(out.state.lambda),
            out.steps.to_string(),
        ];
        Ok((cells, dump))
    })?;
    Ok(rows)
}

fn ladder_rows(t: &mut Table, p: &Params, z: C64, lad: &LadderEstimate<f64>, seed: u64) {
    for Rung { eps, prob, green, .. } in &lad.rungs {
        t.push(estimate_row(p, z, "prob", Some(*eps), prob, seed, None, ""));
        t.push(estimate_row(p, z, "green_eps", Some(*eps), green, seed, None, ""));
    }
}

fn ladder_diagnostics(report: &mut Report, tag: &str, lad: &LadderEstimate<f64>) {
    report.note(format!("{tag}.horizon_stops"), lad.horizon_stops);
    report.note(format!("{tag}.late_crossings"), lad.late_crossings);
    report.note(format!("{tag}.steps"), lad.steps);
    if lad.horizon_truncated() {
        report.guards.push(format!("{tag}: horizon truncation ({} late crossings)", lad.late_crossings));
    }
}

fn estimate_green(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let opts = mc_options(cfg);
    let ladder = EpsilonLadder::new(cfg.ladder.eps0, cfg.ladder.octaves)?;
    let mut t = Table::new("green", ESTIMATE_HEADER);
    let mut report = Report::default();
    for (i, spec) in cfg.points.iter().enumerate() {
        let z = flow_point(spec, cfg.flow)?;
        let reference = reference_green(z, cfg.flow, &p);
        let tag = format!("point{i}");
        match cfg.flow {
            Flow::Radial => {
                let g = green_direct(&Point::from_complex(z)?, &p, &ladder, cfg.n, &opts)?;
                ladder_rows(&mut t, &p, z, &g.ladder, cfg.seed);
                let flags = if g.trend.flagged { "trend" } else { "" };
                t.push(estimate_row(&p, z, "green", Some(ladder.smallest()), &g.estimate, cfg.seed, reference, flags));
                report.note(format!("{tag}.worst_reversal_sigmas"), g.trend.worst_reversal);
                ladder_diagnostics(&mut report, &tag, &g.ladder);
            }
            Flow::Chordal => {
                let lad = estimate_ladder(FlowKind::Chordal, z, &p, &ladder, cfg.n, &opts)?;
                ladder_rows(&mut t, &p, z, &lad, cfg.seed);
                let last = lad.rungs.last().unwrap();
                t.push(estimate_row(&p, z, "green", Some(last.eps), &last.green, cfg.seed, reference, ""));
                ladder_diagnostics(&mut report, &tag, &lad);
            }
        }
    }
    report.tables.push(t);
    Ok(report)
}

fn estimate_phi_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    if cfg.flow == Flow::Chordal {
        return Err(CliError::Usage("estimate-phi is defined for the radial flow only".into()));
    }
    let tilted = tilted_config(cfg);
    let mut t = Table::new("phi", ESTIMATE_HEADER);
    let mut report = Report::default();
    for spec in &cfg.points {
        let z = cylinder_point(spec)?;
        let zc = z.to_complex();
        let h = h_field(&z, &p);
        let unit = p.is_kappa_four().then_some(1.0);
        match estimate_phi(&z, &p, cfg.n, &tilted, cfg.seed) {
            Ok(phi) => {
                t.push(estimate_row(&p, zc, "phi", None, &phi, cfg.seed, unit, ""));
                t.push(estimate_row(&p, zc, "green_via_phi", None, &phi.scale(h), cfg.seed, unit.map(|_| h), ""));
            }
            Err(rsle_core::Error::LowEffectiveSampleSize { ess, min, n }) => {
                let blank = Est::new(f64::NAN, f64::NAN, n as u64);
                t.push(estimate_row(&p, zc, "phi", None, &blank, cfg.seed, unit, "low-ess"));
                report.guards.push(format!("({}, {}): effective sample size {ess:.1} below {min:.1}", zc.re, zc.im));
            }
            Err(e) => return Err(e.into()),
        }
    }
    report.tables.push(t);
    Ok(report)
}

fn martingale_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let opts = mc_options(cfg);
    let (kind, label) = match cfg.flow {
        Flow::Radial => (MartingaleKind::RadialN, "N"),
        Flow::Chordal => (MartingaleKind::ChordalM, "M"),
    };
    let mut t = Table::new("martingale", &["kappa", "x", "y", "quantity", "t", "n", "mean", "stderr", "ci_lo", "ci_hi", "seed", "initial", "z_score"]);
    let mut report = Report::default();
    for (i, spec) in cfg.points.iter().enumerate() {
        let z = flow_point(spec, cfg.flow)?;
        let rep = martingale_diagnostic(kind, z, &p, &cfg.t_grid, cfg.n, &opts)?;
        for (time, e) in &rep.rows {
            let zs = if e.stderr > 0.0 { e.z_score_to(rep.initial) } else { 0.0 };
            t.push(vec![
                num(p.kappa),
                num(z.re),
                num(z.im),
                label.to_string(),
                num(*time),
                e.n.to_string(),
                num(e.mean),
                num(e.stderr),
                num(e.ci95.0),
                num(e.ci95.1),
                cfg.seed.to_string(),
                num(rep.initial),
                num(zs),
            ]);
        }
        report.note(format!("point{i}.blowups"), rep.blowups);
        report.note(format!("point{i}.swallowed"), rep.swallowed);
    }
    report.tables.push(t);
    Ok(report)
}

fn stationary_test(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let plan = StationarySampling { burn_in: cfg.stationary.burn_in, replicas: cfg.stationary.replicas, ..StationarySampling::default() };
    let theta = ThetaConfig { dt_base: cfg.dt_base, ..ThetaConfig::default() };
    let samples = sample_stationary(&p, &plan, &theta, cfg.seed)?;
    let ks = stationary_density_test(&samples, &p, cfg.stationary.threshold)?;
    let mut t = Table::new("stationary", &["kappa", "samples", "burn_in", "statistic", "threshold", "pass", "seed"]);
    t.push(vec![
        num(p.kappa),
        samples.len().to_string(),
        num(plan.burn_in),
        num(ks.statistic),
        num(cfg.stationary.threshold),
        ks.pass.to_string(),
        cfg.seed.to_string(),
    ]);
    let mut report = Report::single(t);
    if cfg.dump > 0 {
        let mut s = String::from("theta\n");
        for x in &samples {
            s.push_str(&num(*x));
            s.push('\n');
        }
        report.dumps.push(("theta_samples.csv".into(), s));
    }
    Ok(report)
}

/// Residual checks at spacing `h` and `h/2`, one row each.
fn residual_pair(
    t: &mut Table,
    check: &str,
    kappa: f64,
    grid: &GridSpec<f64>,
    f: impl Fn(&GridSpec<f64>) -> rsle_core::Result<ResidualStats<f64>>,
) -> Result<(), CliError> {
    let coarse = f(grid)?;
    let fine = f(&grid.refined())?;
    let order = convergence_order(&coarse, &fine).value();
    for (s, o) in [(coarse, None), (fine, order)] {
        t.push(vec![check.to_string(), num(kappa), num(s.h), num(s.max_abs), num(s.mean_abs), s.points.to_string(), opt(o)]);
    }
    Ok(())
}

pub const PDE_KAPPAS: [f64; 5] = [1.0, 2.0, 8.0 / 3.0, 4.0, 6.0];

fn pde_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let (h, nodes) = (cfg.pde.h, cfg.pde.nodes);
    let disk = GridSpec::disk((0.2, 0.8), (0.3, 2.0 * PI - 0.3), nodes, h);
    let hstar = GridSpec::hstar((-1.2, 1.2), (0.2, 2.0), nodes, h);
    let mut t = Table::new("pde", &["check", "kappa", "h", "max_abs", "mean_abs", "points", "order"]);
    residual_pair(&mut t, "disk", 4.0, &disk, |g| residual_disk(0.5, 0.5, g))?;
    residual_pair(&mut t, "disk-control", 4.0, &disk, |g| residual_disk(0.5, 1.0, g))?;
    let kappas = cfg.kappa.map(|k| vec![k]).unwrap_or_else(|| PDE_KAPPAS.to_vec());
    for k in kappas {
        let p = derive_params(k)?;
        residual_pair(&mut t, "hstar-h", k, &hstar, |g| residual_hstar_h(&p, g))?;
        residual_pair(&mut t, "hstar-control", k, &hstar, |g| residual_hstar_exponents(&p, p.p, p.zeta + 0.1, g))?;
    }
    residual_pair(&mut t, "green-k4", 4.0, &hstar, residual_hstar_g_k4)?;
    Ok(Report::single(t))
}

fn scaling_fit(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = kappa_params(cfg)?;
    let opts = mc_options(cfg);
    let ladder = EpsilonLadder::new(cfg.ladder.eps0, cfg.ladder.octaves)?;
    let mut t = Table::new("scaling", &["kappa", "x", "y", "slope", "slope_stderr", "expected", "rungs_used", "n", "seed"]);
    let mut report = Report::default();
    for (i, spec) in cfg.points.iter().enumerate() {
        let z = flow_point(spec, cfg.flow)?;
        let lad = estimate_ladder(flow_kind(cfg.flow), z, &p, &ladder, cfg.n, &opts)?;
        let eps: Vec<f64> = lad.rungs.iter().map(|r| r.eps).collect();
        let probs: Vec<Est> = lad.rungs.iter().map(|r| r.prob).collect();
        let fit = exponent_fit(&eps, &probs)?;
        t.push(vec![
            num(p.kappa),
            num(z.re),
            num(z.im),
            num(fit.slope),
            num(fit.slope_stderr),
            num(p.scaling_exponent()),
            fit.used.to_string(),
            cfg.n.to_string(),
            cfg.seed.to_string(),
        ]);
        ladder_diagnostics(&mut report, &format!("point{i}"), &lad);
    }
    report.tables.push(t);
    Ok(report)
}

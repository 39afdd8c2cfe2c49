//! Run configuration: built-in defaults, overridden by a TOML file, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Params,
    Eval,
    Simulate,
    EstimateGreen,
    EstimatePhi,
    MartingaleCheck,
    StationaryTest,
    PdeCheck,
    ScalingFit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Eval => "eval",
            Command::Simulate => "simulate",
            Command::EstimateGreen => "estimate-green",
            Command::EstimatePhi => "estimate-phi",
            Command::MartingaleCheck => "martingale-check",
            Command::StationaryTest => "stationary-test",
            Command::PdeCheck => "pde-check",
            Command::ScalingFit => "scaling-fit",
        }
    }

    fn needs_points(self) -> bool {
        matches!(
            self,
            Command::Eval | Command::Simulate | Command::EstimateGreen | Command::EstimatePhi | Command::MartingaleCheck | Command::ScalingFit
        )
    }

    fn needs_samples(self) -> bool {
        matches!(
            self,
            Command::Simulate | Command::EstimateGreen | Command::EstimatePhi | Command::MartingaleCheck | Command::StationaryTest | Command::ScalingFit
        )
    }
}

/// Which Loewner flow the point-based commands use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Flow {
    /// Radial SLE on the half-infinite cylinder; points are `x + iy`.
    #[default]
    Radial,
    /// Chordal SLE in the upper half-plane.
    Chordal,
}

/// A marked point, either `x + iy` or the disk point `r e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Cartesian { x: f64, y: f64 },
    Polar { r: f64, theta: f64 },
}

impl PointSpec {
    /// Parses `"x,y"`.
    pub fn parse_cartesian(s: &str) -> Result<Self, String> {
        let (x, y) = parse_pair(s)?;
        Ok(PointSpec::Cartesian { x, y })
    }

    /// Parses `"r,theta"`.
    pub fn parse_polar(s: &str) -> Result<Self, String> {
        let (r, theta) = parse_pair(s)?;
        Ok(PointSpec::Polar { r, theta })
    }

    /// The two coordinates as written, and the coordinate system's name.
    pub fn coords(&self) -> (&'static str, f64, f64) {
        match *self {
            PointSpec::Cartesian { x, y } => ("xy", x, y),
            PointSpec::Polar { r, theta } => ("polar", r, theta),
        }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let mut it = s.split(',').map(|t| t.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderSpec {
    pub eps0: f64,
    pub octaves: usize,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec { eps0: 0.16, octaves: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationarySpec {
    pub burn_in: f64,
    pub replicas: u64,
    /// KS distance below which the test passes.
    pub threshold: f64,
}

impl Default for StationarySpec {
    fn default() -> Self {
        StationarySpec { burn_in: 10.0, replicas: 10_000, threshold: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeSpec {
    pub h: f64,
    pub nodes: usize,
}

impl Default for PdeSpec {
    fn default() -> Self {
        PdeSpec { h: 1e-3, nodes: 25 }
    }
}

/// Everything a run depends on. Thread count is deliberately absent from
/// the outputs; it only changes wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub kappa: Option<f64>,
    pub flow: Flow,
    pub points: Vec<PointSpec>,
    pub ladder: LadderSpec,
    pub n: u64,
    pub dt_base: f64,
    /// Multiplier on the squared distance to the singularity in the adaptive step.
    pub c_adapt: f64,
    /// Stop radius of the tilted sampler.
    pub delta_stop: f64,
    pub negligible_tol: f64,
    pub seed: u64,
    pub horizon: f64,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    /// Times at which the martingale check records means.
    pub t_grid: Vec<f64>,
    /// Number of per-path dumps to write (simulate) or whether to dump samples (stationary-test).
    pub dump: usize,
    pub stationary: StationarySpec,
    pub pde: PdeSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            kappa: None,
            flow: Flow::Radial,
            points: Vec::new(),
            ladder: LadderSpec::default(),
            n: 10_000,
            dt_base: 2e-3,
            c_adapt: 1.0,
            delta_stop: 1e-3,
            negligible_tol: 1e-5,
            seed: 1,
            horizon: 1e3,
            output_dir: PathBuf::from("rsle-out"),
            threads: None,
            t_grid: vec![0.0, 0.05, 0.1, 0.2],
            dump: 0,
            stationary: StationarySpec::default(),
            pde: PdeSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command.ok_or_else(|| CliError::Usage("no command given".into()))
    }

    /// Rejects configs that cannot start, before any work is done.
    pub fn validate(&self) -> Result<Command, CliError> {
        let cmd = self.command()?;
        let usage = |m: String| Err(CliError::Usage(m));
        match self.kappa {
            Some(k) if !(k > 0.0 && k < 8.0) => return usage(format!("kappa must lie in (0, 8), got {k}")),
            None if cmd != Command::PdeCheck => return usage("kappa is required".into()),
            _ => {}
        }
        if cmd.needs_points() && self.points.is_empty() {
            return usage(format!("{} needs at least one --point", cmd.name()));
        }
        if cmd.needs_samples() && self.n == 0 {
            return usage("n must be positive".into());
        }
        if !(self.dt_base > 0.0) || !(self.c_adapt > 0.0) || !(self.delta_stop > 0.0) || !(self.horizon > 0.0) {
            return usage("dt, c_adapt, delta_stop and horizon must be positive".into());
        }
        if !(self.negligible_tol >= 0.0) {
            return usage("negligible_tol must be nonnegative".into());
        }
        if !(self.ladder.eps0 > 0.0 && self.ladder.eps0 <= 1.0) || self.ladder.octaves < 3 {
            return usage("ladder needs eps0 in (0, 1] and at least 3 octaves".into());
        }
        if self.threads == Some(0) {
            return usage("threads must be positive".into());
        }
        if cmd == Command::StationaryTest && self.stationary.replicas < 1000 {
            return usage("stationary-test needs at least 1000 replicas".into());
        }
        Ok(cmd)
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rsle_cli::{exit, CliError, Command, Flow, PointSpec, RunConfig};

/// Numerical experiments for radial and chordal SLE.
#[derive(Debug, Parser)]
#[command(name = "rsle", version)]
struct Args {
    /// Command to run; may instead be given in the config file.
    #[arg(value_enum)]
    command: Option<Command>,

    /// TOML run configuration. Flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    kappa: Option<f64>,

    #[arg(long, value_enum)]
    flow: Option<Flow>,

    /// Marked point `x,y`; repeatable. Replaces the points of the config file.
    #[arg(long = "point", value_parser = PointSpec::parse_cartesian)]
    points: Vec<PointSpec>,

    /// Disk point `r,theta`; repeatable.
    #[arg(long = "polar", value_parser = PointSpec::parse_polar)]
    polar: Vec<PointSpec>,

    #[arg(long)]
    eps0: Option<f64>,

    #[arg(long)]
    octaves: Option<usize>,

    /// Number of Monte Carlo paths.
    #[arg(long)]
    n: Option<u64>,

    /// Base time step.
    #[arg(long)]
    dt: Option<f64>,

    #[arg(long)]
    delta_stop: Option<f64>,

    #[arg(long)]
    horizon: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; falls back to RSLE_THREADS, then to all processors.
    #[arg(long)]
    threads: Option<usize>,

    /// Per-path dumps to write.
    #[arg(long)]
    dump: Option<usize>,
}

impl Args {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$($field).+ = v.into(); })*
            };
        }
        set!(
            command => command,
            kappa => kappa,
            flow => flow,
            eps0 => ladder.eps0,
            octaves => ladder.octaves,
            n => n,
            dt => dt_base,
            delta_stop => delta_stop,
            horizon => horizon,
            seed => seed,
            out => output_dir,
            threads => threads,
            dump => dump,
        );
        if !self.points.is_empty() || !self.polar.is_empty() {
            cfg.points = self.points.into_iter().chain(self.polar).collect();
        }
        Ok(cfg)
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("rsle: error[{}]: {e}", e.category());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cfg = match Args::parse().into_config() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match rsle_cli::run(&cfg) {
        Ok(out) => {
            for p in &out.csv {
                println!("{}", p.display());
            }
            for g in &out.guards {
                eprintln!("rsle: guard: {g}");
            }
            if out.exit_code() != exit::OK {
                eprintln!("rsle: error[guard]: results written with {} guard(s) tripped", out.guards.len());
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => fail(&e),
    }
}

//! Experiment driver for `rsle-core`: reads a run configuration, runs one
//! command, and writes a results CSV plus a manifest into the output directory.
//!
//! Configuration precedence, lowest first: built-in defaults, the TOML file
//! given with `--config`, command-line flags. The thread count comes from
//! `--threads`, then the file, then `RSLE_THREADS`, then the number of
//! available processors. Results do not depend on it.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use commands::Report;
pub use config::{Command, Flow, PointSpec, RunConfig};
pub use error::{exit, CliError};

use output::{write_file, Manifest};

/// Files written by a finished run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub guards: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.guards.is_empty() {
            exit::OK
        } else {
            exit::GUARD
        }
    }
}

/// Thread count from the config, else `RSLE_THREADS`, else all processors.
pub fn resolve_threads(cfg: &RunConfig) -> Result<usize, CliError> {
    if let Some(t) = cfg.threads {
        return Ok(t);
    }
    match std::env::var("RSLE_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(CliError::Usage(format!("RSLE_THREADS must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Validates the config, runs the command on its own thread pool and writes
/// `<command>.csv` (one per table) and `<command>.manifest.toml`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = cfg.validate()?;
    let threads = resolve_threads(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Usage(format!("output directory {} is not writable: {e}", cfg.output_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;

    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let report = pool.install(|| commands::dispatch(cmd, cfg))?;
    let wall = clock.elapsed().as_secs_f64();

    let mut csv = Vec::new();
    let single = report.tables.len() == 1;
    for t in &report.tables {
        let file = if single { format!("{}.csv", cmd.name()) } else { format!("{}-{}.csv", cmd.name(), t.name) };
        csv.push(write_file(&cfg.output_dir.join(file), &t.to_csv(cmd.name()))?);
    }
    let mut outputs: Vec<String> = csv.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    for (rel, body) in &report.dumps {
        write_file(&cfg.output_dir.join(rel), body)?;
        outputs.push(rel.clone());
    }
    let manifest = Manifest {
        schema: output::SCHEMA,
        command: cmd.name(),
        version: env!("CARGO_PKG_VERSION"),
        started_unix,
        wall_time_s: wall,
        threads,
        outputs,
        guards: report.guards.clone(),
        diagnostics: report.diagnostics.clone(),
        config: cfg,
    };
    let text = toml::to_string(&manifest).expect("manifests serialize");
    let manifest = write_file(&cfg.output_dir.join(format!("{}.manifest.toml", cmd.name())), &text)?;
    Ok(Outcome { csv, manifest, guards: report.guards })
}

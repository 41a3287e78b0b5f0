//! Batch front-end for `mri-core`.
//!
//! A run reads one JSON config, executes one task and writes `report.json`
//! plus the task's CSV tables into the output directory. The report layout
//! is described in `docs/report-schema.md`.

pub mod config;
pub mod output;
pub mod sweep;
pub mod tasks;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};

use config::{RunConfig, TaskConfig};
use output::write_json;

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";

/// How a run ended; maps one-to-one onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Input outside a method's regime, or invalid input.
    WrongRegime,
    /// Solver or I/O failure.
    NumericFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::WrongRegime => 2,
            Status::NumericFailure => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::WrongRegime => "wrong_regime",
            Status::NumericFailure => "numeric_failure",
        }
    }
}

/// Config errors: schema violations and failed validation.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Exit status for an error raised anywhere in a run.
pub fn classify_error(e: &anyhow::Error) -> Status {
    if e.downcast_ref::<ConfigError>().is_some() {
        return Status::WrongRegime;
    }
    match e.downcast_ref::<mri_core::Error>() {
        Some(c) if c.is_regime() => Status::WrongRegime,
        Some(mri_core::Error::InvalidProfile(_) | mri_core::Error::InvalidGrid(_) | mri_core::Error::ZeroEps(_) | mri_core::Error::Domain(_) | mri_core::Error::Degenerate(_)) => Status::WrongRegime,
        _ => Status::NumericFailure,
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub status: Status,
    pub out_dir: PathBuf,
    pub error: Option<String>,
}

fn execute(cfg: &RunConfig, dir: &Path, pool: &rayon::ThreadPool) -> Result<(Value, Vec<String>)> {
    let p = cfg.profile.build()?;
    let g = || cfg.grid.build(&p, cfg.grid.n);
    let out = match &cfg.task {
        TaskConfig::Stability { k_max_hint } => tasks::stability(&p, &g()?, *k_max_hint)?,
        TaskConfig::Thresholds {} => tasks::thresholds(&p, &g()?)?,
        TaskConfig::Modes { k, profiles } => {
            let g = g()?;
            pool.install(|| tasks::modes(&p, &g, k, *profiles))?
        }
        TaskConfig::Dispersion { r0, k, kr, global_k } => tasks::dispersion(&p, &g()?, r0, k, kr, *global_k)?,
        TaskConfig::Simulate { k, system, t_end, dt, init, seed, stride } => tasks::simulate(&p, &g()?, *k, *system, *t_end, *dt, *init, *seed, *stride)?,
        TaskConfig::Euler { k, eps_list, compare_k } => tasks::euler(&p, &g()?, k, eps_list, *compare_k)?,
        TaskConfig::Sweep { axes, growth_rate, .. } => {
            let pts = sweep::points(axes, p.eps, cfg.grid.n)?;
            let s = sweep::run_sweep(&p, &cfg.grid, &pts, *growth_rate, dir, pool)?;
            eprintln!("sweep: {} points computed, {} reused", s.computed, s.reused);
            return Ok((s.result, vec![sweep::SWEEP_FILE.to_string()]));
        }
    };
    let mut files = Vec::new();
    if cfg.output.csv() {
        for t in &out.tables {
            t.write(dir)?;
            files.push(t.name.clone());
        }
    }
    Ok((out.result, files))
}

/// Runs one config. `out` overrides `output.directory`; `jobs` sizes the worker pool (0 = all cores).
pub fn run(cfg: &RunConfig, out: Option<&Path>, jobs: usize) -> Result<RunOutcome> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.directory.clone());
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let (status, error, result, files) = match execute(cfg, &dir, &pool) {
        Ok((r, f)) => (Status::Ok, None, r, f),
        Err(e) => (classify_error(&e), Some(format!("{e:#}")), Value::Null, Vec::new()),
    };
    if cfg.output.json() {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "tool": concat!("mri-cli ", env!("CARGO_PKG_VERSION")),
            "task": cfg.task_name(),
            "status": status.as_str(),
            "exit_code": status.exit_code(),
            "error": error,
            "config": { "profile": cfg.profile, "grid": cfg.grid, "task": cfg.task },
            "result": result,
            "files": files,
        });
        write_json(&dir.join(REPORT_FILE), &report)?;
    }
    Ok(RunOutcome { status, out_dir: dir, error })
}

/// Parses `path`, wrapping failures as [`ConfigError`].
pub fn load_config(path: &Path) -> Result<RunConfig> {
    config::parse_config(path).map_err(|e| anyhow::Error::new(ConfigError(format!("{e:#}"))))
}

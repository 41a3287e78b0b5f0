use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mri_cli::config::RunConfig;
use mri_cli::{classify_error, load_config, run};

#[derive(Parser)]
#[command(name = "mri", version, about = "Linear MRI stability toolkit: batch runs from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Sharp stability verdict and unstable mode count.
    Stability(Common),
    /// Field-strength thresholds.
    Thresholds(Common),
    /// Growth rates and mode profiles.
    Modes(Common),
    /// Local dispersion relation.
    Dispersion(Common),
    /// Time integration of the linearized system.
    Simulate(Common),
    /// Zero-field growth rates and the MHD comparison.
    Euler(Common),
    /// Cartesian sweep over eps, k and n.
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Stability(a) => ("stability", a),
        Command::Thresholds(a) => ("thresholds", a),
        Command::Modes(a) => ("modes", a),
        Command::Dispersion(a) => ("dispersion", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Euler(a) => ("euler", a),
        Command::Sweep(a) => ("sweep", a),
    };
    let cfg: RunConfig = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(classify_error(&e).exit_code() as u8);
        }
    };
    if cfg.task_name() != name {
        eprintln!("error: subcommand `{name}` does not match task.kind `{}` in {}", cfg.task_name(), args.config.display());
        return ExitCode::from(2);
    }
    match run(&cfg, args.out.as_deref(), args.jobs) {
        Ok(o) => {
            if let Some(e) = &o.error {
                eprintln!("error: {e}");
            }
            eprintln!("{}: {} (report in {})", name, o.status.as_str(), o.out_dir.display());
            ExitCode::from(o.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

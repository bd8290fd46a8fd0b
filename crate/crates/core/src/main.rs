use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use uplink_adapt::harness::{
    cmd_adapt, cmd_analyze, cmd_extrapolate, cmd_learn, cmd_simulate, ExperimentConfig, ResultBundle,
};
use uplink_adapt::{Error, Result};

#[derive(Parser)]
#[command(name = "uplink-adapt", version, about = "Cooperative massive MIMO uplink: simulation, analysis and rate adaptation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    variance: Option<VarianceArg>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Check the rate plan's outage on fresh drops (adapt only).
    #[arg(long, global = true)]
    validate: bool,
    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo SINR of the detector and empirical CDFs.
    Simulate,
    /// Analytic SINR CDFs.
    Analyze,
    /// Online learning of interference statistics.
    Learn,
    /// Outage-constrained rate plan.
    Adapt,
    /// Extends a user triple's statistics to other users.
    Extrapolate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Proposed,
    Baseline,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VarianceArg {
    Campbell,
    Paper,
    Both,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{kv}' is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(m) = cli.mode {
        cfg.set("mode", match m {
            ModeArg::Proposed => "proposed",
            ModeArg::Baseline => "baseline",
            ModeArg::Both => "both",
        })?;
    }
    if let Some(v) = cli.variance {
        cfg.set("variance", match v {
            VarianceArg::Campbell => "campbell",
            VarianceArg::Paper => "paper",
            VarianceArg::Both => "both",
        })?;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(ResultBundle, PathBuf)> {
    let cfg = load(cli)?;
    let bundle = match cli.command {
        Command::Simulate => cmd_simulate(&cfg)?,
        Command::Analyze => cmd_analyze(&cfg)?,
        Command::Learn => cmd_learn(&cfg)?,
        Command::Adapt => cmd_adapt(&cfg, cli.validate)?,
        Command::Extrapolate => cmd_extrapolate(&cfg)?,
    };
    bundle.write(&cfg.out)?;
    Ok((bundle, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok((bundle, out)) => {
            let m = &bundle.manifest;
            let elapsed = start.elapsed().as_secs_f64();
            eprintln!(
                "{}: wrote {} files to {} in {elapsed:.2} s (config {})",
                m.command,
                m.files.len() + 1,
                out.display(),
                m.config_hash
            );
            if m.drops > 0 {
                eprintln!(
                    "  {} drops, {} redrawn, {:.2} ms per drop",
                    m.drops,
                    m.resamples,
                    1e3 * elapsed / m.drops as f64
                );
            }
            for w in &m.warnings {
                eprintln!("  warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

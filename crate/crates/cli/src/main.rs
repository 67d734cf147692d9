//! `vc`: experiment runner for the variational Carleson toolkit.
//!
//! Exit codes: 0 when every check passes, 1 on a tolerance failure, 2 on a
//! configuration or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vc_core::experiments::{self, converge, domination, holder, packets, sweep, verify, ExperimentConfig, Preset, Report};

#[derive(Parser, Debug)]
#[command(name = "vc", version, about = "Variational Carleson verification and sweep runner")]
struct Cli {
    /// JSON configuration file; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (JSON report, or CSV for sweep/converge/packets).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Resolution preset.
    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Empirical L^p ratios over exponent cells, with admissibility flags.
    Sweep,
    /// Run one verification experiment and emit a JSON report.
    Verify {
        #[arg(value_enum)]
        which: Which,
    },
    /// Fourier inversion error against the V^r tail.
    Converge,
    /// Wave packet utilities.
    Packets {
        #[command(subcommand)]
        action: PacketAction,
    },
}

#[derive(Subcommand, Debug)]
enum PacketAction {
    /// Space and frequency samples of the configured packet.
    Dump,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Which {
    Reconstruction,
    Dual,
    Holder,
    Domination,
    Ptnm,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PresetArg {
    Tiny,
    Ref,
    Fine,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Tiny => Preset::Tiny,
            PresetArg::Ref => Preset::Ref,
            PresetArg::Fine => Preset::Fine,
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(p) = cli.preset {
        cfg.preset = p.into();
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

/// Writes a JSON report to `out` (or stdout) and returns whether it passed.
fn emit_report<T: Serialize>(report: &Report<T>, out: Option<&Path>) -> Result<bool> {
    let json = report.to_json();
    match out {
        Some(path) => experiments::write_text(path, &json)?,
        None => println!("{json}"),
    }
    Ok(report.pass)
}

/// Writes CSV to `out` (or stdout); the JSON report then goes to stderr when the CSV
/// occupies stdout.
fn emit_csv<T: Serialize>(report: &Report<T>, csv: &str, out: Option<&Path>, extra: &[(PathBuf, String)]) -> Result<bool> {
    match out {
        Some(path) => {
            experiments::write_text(path, csv)?;
            for (p, text) in extra {
                experiments::write_text(p, text)?;
            }
            println!("{}", report.to_json());
        }
        None => {
            print!("{csv}");
            eprintln!("{}", report.to_json());
        }
    }
    Ok(report.pass)
}

/// `a/b.csv` → `a/b.summary.csv`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}{ext}"))
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    log::info!("running {:?} at preset {} with seed {}", cli.command, cfg.preset, cfg.seed);
    let out = cfg.out.as_deref();
    match &cli.command {
        Command::Verify { which } => match which {
            Which::Reconstruction => emit_report(&verify::run_reconstruction(&cfg)?, out),
            Which::Dual => emit_report(&verify::run_dual(&cfg)?, out),
            Which::Holder => emit_report(&holder::run_holder(&cfg)?, out),
            Which::Domination => emit_report(&domination::run_domination(&cfg)?, out),
            Which::Ptnm => emit_report(&verify::run_ptnm(&cfg)?, out),
        },
        Command::Sweep => {
            let rep = sweep::run_sweep(&cfg)?;
            let rows = experiments::to_csv(&rep.result.rows)?;
            let cells = experiments::to_csv(&rep.result.cells)?;
            let extra: Vec<(PathBuf, String)> = out.map(|p| vec![(sibling(p, "summary"), cells)]).unwrap_or_default();
            emit_csv(&rep, &rows, out, &extra)
        }
        Command::Converge => {
            let rep = converge::run_converge(&cfg)?;
            let rows = experiments::to_csv(&rep.result.rows)?;
            emit_csv(&rep, &rows, out, &[])
        }
        Command::Packets { action: PacketAction::Dump } => {
            let rep = packets::dump(&cfg)?;
            let rows = experiments::to_csv(&rep.result.rows)?;
            emit_csv(&rep, &rows, out, &[])
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("vc: tolerance check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("vc: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::{error, info};

use wavegauge::entropy_metrics::write_entropy_csv;
use wavegauge::experiment_harness::{
    report, run_lower_bound_experiment, run_roundtrip_experiment, run_upper_bound_experiment, sample_superposition,
    ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "wavegauge", version, about = "Simple-wave families and their epsilon-entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Compute the model constants and write constants.json.
    Constants,
    /// Draw a sawtooth superposition and write phi.csv.
    Generate,
    /// Evolve a sawtooth superposition to T and write evolved.csv and diagnostics.csv.
    Evolve,
    /// Packing of the sawtooth family against the lower bound.
    Lower,
    /// Backward generation followed by forward re-evolution.
    Roundtrip,
    /// Greedy covering of evolved random data against the upper bound.
    Upper,
    /// Lower-bound run plus constants, diagnostics and slopes.
    Report,
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs the command; `Ok(false)` means an assertion failed.
fn run(cli: &Cli) -> Result<bool> {
    let path = cli.config.as_ref().context("--config <path> is required")?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cfg.out.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    match cli.command {
        Command::Constants => {
            let s = cfg.setup()?;
            let json = s.constants.to_json();
            write(&out.join("constants.json"), &json)?;
            println!("{json}");
            Ok(true)
        }
        Command::Generate => {
            let s = cfg.setup()?;
            let sup = sample_superposition(&cfg, &s, 8, cfg.seed)?;
            sup.phi.write_csv(out.join("phi.csv"))?;
            println!("code {} h {} b {}", sup.code.to_bitstring(), sup.h, sup.b);
            Ok(true)
        }
        Command::Evolve => {
            let s = cfg.setup()?;
            let sup = sample_superposition(&cfg, &s, 8, cfg.seed)?;
            let (u, diag) = s.lab.evolve_superposition(&sup.phi, &sup.layout)?;
            u.write_csv(out.join("evolved.csv"))?;
            diag.write_csv(out.join("diagnostics.csv"))?;
            let ok = diag.max_q() <= 2.0 * diag.q0() * (1.0 + 1e-9);
            println!("Q(0) {} max Q {} drift {}", diag.q0(), diag.max_q(), diag.integral_drift());
            Ok(ok)
        }
        Command::Lower => {
            let rows = run_lower_bound_experiment(&cfg)?;
            write_entropy_csv(&out.join("entropy.csv"), &rows)?;
            for r in &rows {
                println!("eps {:.3e} packing {:.2} lower {:.2}", r.epsilon, r.packing.unwrap_or(0.0), r.lower_bits.unwrap_or(0.0));
            }
            Ok(rows.iter().all(|r| r.consistent()))
        }
        Command::Roundtrip => {
            let rep = run_roundtrip_experiment(&cfg)?;
            write(&out.join("roundtrip.json"), &serde_json::to_string_pretty(&rep)?)?;
            println!("worst error/budget {:.3}", rep.worst_ratio);
            Ok(rep.all_passed)
        }
        Command::Upper => {
            let rows = run_upper_bound_experiment(&cfg)?;
            write_entropy_csv(&out.join("entropy.csv"), &rows)?;
            for r in &rows {
                println!("eps {:.3e} covering {:.2} upper {:.2}", r.epsilon, r.covering.unwrap_or(0.0), r.upper_bits.unwrap_or(0.0));
            }
            Ok(rows.iter().all(|r| r.consistent()))
        }
        Command::Report => {
            let rows = run_lower_bound_experiment(&cfg)?;
            let s = cfg.setup()?;
            let diag = sample_superposition(&cfg, &s, 8, cfg.seed)
                .and_then(|sup| s.lab.evolve_superposition(&sup.phi, &sup.layout))
                .map(|(_, d)| d);
            if let Err(e) = &diag {
                info!("no diagnostics: {e}");
            }
            report(&out, &rows, &s.constants, diag.as_ref().ok())?;
            Ok(rows.iter().all(|r| r.consistent()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            error!("assertion failed");
            ExitCode::from(1)
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(2)
        }
    }
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! `ddgrape`: build protected gates, run Grover trajectories, sweep pulse
//! errors and compute discord from the command line.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 when a computation
//! or validation step fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ddgrape::dd::SchemeSpec;
use ddgrape::discord::{quantum_discord, read_state};
use ddgrape::grape::log_csv;
use ddgrape::harness::{
    analyze, build_protected_gates, configure_threads, gates_csv, load_protected_gate, manifest,
    rms_csv, robustness_sweep, run_trajectory, sweep_csv, trajectory_csv, write_output,
    ExperimentConfig, NoiseModel, ProtectedGate,
};
use ddgrape::Result;

#[derive(Debug, Parser)]
#[command(
    name = "ddgrape",
    version,
    about = "DD-protected GRAPE gates for two-qubit Grover search"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ConfigArgs {
    /// Experiment configuration (JSON); defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `output_dir` from the configuration.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::read(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize the oracle and diffusion pulses for every configured scheme.
    Optimize {
        #[command(flatten)]
        config: ConfigArgs,
        /// Restrict to these schemes (repeatable).
        #[arg(long)]
        scheme: Vec<SchemeSpec>,
        /// Re-optimize even when a matching cached pulse exists.
        #[arg(long)]
        force: bool,
    },
    /// Run the Grover trajectory with cached pulses for one scheme.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        scheme: SchemeSpec,
        /// none, rfi, incoherence or rfi+incoherence
        #[arg(long, default_value = "none")]
        noise: NoiseModel,
    },
    /// Quantum discord of a two-qubit state file.
    Discord {
        #[arg(long)]
        state: PathBuf,
        /// Purity of a pseudopure state; adds the scaled discord.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Flip-angle and phase-error robustness of the cached gates.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// RMS deviation of every scheme's trajectory from the ideal run.
    Analyze {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{}", e.render());
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    configure_threads()?;
    match command {
        Command::Optimize {
            config,
            scheme,
            force,
        } => {
            let mut cfg = config.load()?;
            if !scheme.is_empty() {
                cfg.schemes = scheme;
            }
            let gates = build_protected_gates(&cfg, force)?;
            for g in &gates {
                for b in g.gates() {
                    println!(
                        "{} {}: rfi mean fidelity {:.6} (min {:.6}){}",
                        g.scheme,
                        b.kind.label(),
                        b.report.fidelity,
                        b.report.min(),
                        if b.from_cache { ", cached" } else { "" }
                    );
                    if !b.reached_goal {
                        eprintln!(
                            "warning: {} {} stopped below the fidelity goal {}",
                            g.scheme,
                            b.kind.label(),
                            cfg.optimizer.fidelity_goal
                        );
                    }
                    if !b.from_cache {
                        let name = format!(
                            "logs/{}_{}_seed{}.csv",
                            g.scheme.slug(),
                            b.kind.label(),
                            cfg.seed
                        );
                        write_output(&cfg, name, &log_csv(&b.log))?;
                    }
                }
            }
            report(&cfg, "gates.csv", &gates_csv(&gates))?;
            finish(&cfg, "optimize")
        }
        Command::Simulate {
            config,
            scheme,
            noise,
        } => {
            let cfg = config.load()?;
            let records = run_trajectory(&cfg, &scheme, &noise.ensemble(&cfg)?)?;
            let name = format!("trajectory_{}_{}.csv", scheme.slug(), noise);
            report(&cfg, &name, &trajectory_csv(&records))?;
            finish(&cfg, "simulate")
        }
        Command::Discord { state, epsilon } => discord(&state, epsilon),
        Command::Sweep { config } => {
            let cfg = config.load()?;
            let rows = robustness_sweep(&cfg, &cached_gates(&cfg)?)?;
            report(&cfg, "sweep.csv", &sweep_csv(&rows))?;
            finish(&cfg, "sweep")
        }
        Command::Analyze { config } => {
            let cfg = config.load()?;
            let reports = analyze(&cfg, &cached_gates(&cfg)?)?;
            report(&cfg, "rms.csv", &rms_csv(&reports))?;
            finish(&cfg, "analyze")
        }
    }
}

fn cached_gates(cfg: &ExperimentConfig) -> Result<Vec<ProtectedGate>> {
    cfg.schemes
        .iter()
        .map(|s| load_protected_gate(cfg, s))
        .collect()
}

/// Prints a table and writes it under the output directory.
fn report(cfg: &ExperimentConfig, name: &str, csv: &str) -> Result<()> {
    print!("{csv}");
    let path = write_output(cfg, name, csv)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn finish(cfg: &ExperimentConfig, command: &str) -> Result<()> {
    write_output(cfg, "manifest.json", &manifest(cfg, command))?;
    Ok(())
}

fn discord(state: &Path, epsilon: Option<f64>) -> Result<()> {
    let rho = read_state(state)?;
    let d = quantum_discord(&rho, epsilon)?;
    println!("discord={:.6}", d.discord);
    println!("mutual_information={:.6}", d.mutual_information);
    println!("classical_correlation={:.6}", d.classical_correlation);
    println!("theta={:.6}", d.argmin_basis.theta);
    println!("phi={:.6}", d.argmin_basis.phi);
    if let Some(s) = d.scaled_discord {
        println!("scaled_discord={s:.6}");
    }
    Ok(())
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment driver behind the `ddgrape` command line tool.

mod config;
mod experiment;
mod output;

pub use config::{EnsembleSpec, ErrorGrids, ExperimentConfig, OptimizerSettings};
pub use experiment::{
    analyze, build_protected_gates, config_digest, ideal_records, initial_seed, iterate_fidelity,
    iterate_report, load_protected_gate, optimize_gate, pulse_path, rms_deviation,
    robustness_sweep, run_trajectory, trajectory, BuiltGate, ErrorKind, GateKind, NoiseModel,
    ProtectedGate, RmsDeviation, RmsReport, SweepRow, TrajectoryRecord,
};
pub use output::{gates_csv, manifest, rms_csv, sweep_csv, trajectory_csv, write_output};

use crate::error::{Error, Result};

/// Sizes the global rayon pool from `DDGRAPE_THREADS` (unset or `0` means
/// one thread per core). Returns the pool size in effect.
pub fn configure_threads() -> Result<usize> {
    let requested = match std::env::var("DDGRAPE_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::Config(format!(
                "DDGRAPE_THREADS must be a non-negative integer, got `{v}`"
            ))
        })?,
        Err(_) => 0,
    };
    // A pool that already exists (tests, repeated calls) is left alone.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(requested)
        .build_global();
    Ok(rayon::current_num_threads())
}

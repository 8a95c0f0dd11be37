// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::ExperimentConfig;
use super::experiment::{ProtectedGate, RmsReport, SweepRow, TrajectoryRecord};
use crate::error::Result;

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from("stage,marked_prob,discord_bits,scaled_discord\n");
    for r in records {
        writeln!(
            out,
            "{},{:.10},{:.10e},{:.8}",
            r.stage, r.marked_prob, r.discord, r.scaled_discord
        )
        .unwrap();
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("scheme,error_kind,mean_fidelity,mean_fidelity_incoherent\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{:.10},{:.10}",
            r.scheme, r.error_kind, r.mean_fidelity, r.mean_fidelity_incoherent
        )
        .unwrap();
    }
    out
}

pub fn rms_csv(reports: &[RmsReport]) -> String {
    let mut out = String::from("scheme,rms_discord,rms_prob,incoherence\n");
    for r in reports {
        writeln!(
            out,
            "{},{:.10},{:.10},{}",
            r.scheme,
            r.deviation.rms_discord,
            r.deviation.rms_prob,
            u8::from(r.incoherence)
        )
        .unwrap();
    }
    out
}

/// One row per optimized gate.
pub fn gates_csv(gates: &[ProtectedGate]) -> String {
    let mut out = String::from(
        "scheme,gate,rfi_mean_fidelity,rfi_min_fidelity,frozen_segments,reached_goal,from_cache\n",
    );
    for g in gates {
        for b in g.gates() {
            writeln!(
                out,
                "{},{},{:.10},{:.10},{},{},{}",
                g.scheme,
                b.kind.label(),
                b.report.fidelity,
                b.report.min(),
                b.pulse.frozen_count(),
                b.reached_goal,
                b.from_cache
            )
            .unwrap();
        }
    }
    out
}

/// `manifest.json`: the configuration echo plus version information.
/// Contains no timestamps so that repeated runs produce identical bytes.
pub fn manifest(config: &ExperimentConfig, command: &str) -> String {
    let value = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": config.seed,
        "config": config,
    });
    serde_json::to_string_pretty(&value).expect("manifest serializes") + "\n"
}

/// Writes `contents` to `output_dir/name`, creating the directory.
pub fn write_output(
    config: &ExperimentConfig,
    name: impl AsRef<Path>,
    contents: &str,
) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, contents)?;
    Ok(path)
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration, read from JSON.
//!
//! Every key has a default; the defaults describe the desk-scale run
//! (J = 70 Hz, 1470 segments of 5.1 µs, DD spacings of 100 and 200
//! segments). [`ExperimentConfig::full_scale`] restores J = 7 Hz, ~75 ms
//! gates and spacings of 1000 and 2000 segments.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dd::SchemeSpec;
use crate::error::{Error, Result};
use crate::grape::{OptimizationConfig, SearchDirection};
use crate::grover::GroverSpec;
use crate::nmr::{NoiseEnsemble, NoiseRealization, SystemParams};

/// Declarative description of a [`NoiseEnsemble`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Identity,
    /// Equally weighted RF amplitude scales.
    RfInhomogeneity {
        scales: Vec<f64>,
    },
    /// Equally weighted common-mode offsets on a uniform grid.
    OffsetGrid {
        min_hz: f64,
        max_hz: f64,
        points: usize,
    },
    Explicit {
        realizations: Vec<NoiseRealization>,
    },
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<NoiseEnsemble> {
        match self {
            EnsembleSpec::Identity => Ok(NoiseEnsemble::identity()),
            EnsembleSpec::RfInhomogeneity { scales } => NoiseEnsemble::rf_inhomogeneity(scales),
            EnsembleSpec::OffsetGrid {
                min_hz,
                max_hz,
                points,
            } => NoiseEnsemble::offset_grid(*min_hz, *max_hz, *points),
            EnsembleSpec::Explicit { realizations } => NoiseEnsemble::new(realizations.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErrorGrids {
    pub flip_scale: Vec<f64>,
    /// rad
    pub phase_offset: Vec<f64>,
}

impl Default for ErrorGrids {
    fn default() -> Self {
        ErrorGrids {
            flip_scale: vec![0.95, 1.00, 1.05],
            phase_offset: vec![-0.17, 0.0, 0.17],
        }
    }
}

/// Optimizer knobs that are not part of the physical setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub max_iterations: usize,
    pub fidelity_goal: f64,
    pub initial_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    /// Initial random amplitudes as a fraction of `omega_max`.
    pub amplitude_fraction: f64,
    /// Defaults to `π/dt`, the amplitude of a one-segment π pulse.
    pub omega_max: Option<f64>,
    pub direction: SearchDirection,
    /// Extra random starts. The landscape has local optima that are hard to
    /// leave, so every start is first run for `screen_iterations` trials and
    /// only the most promising `continuations` get the rest of the budget.
    pub restarts: usize,
    pub screen_iterations: usize,
    pub continuations: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            max_iterations: 3000,
            fidelity_goal: 0.99,
            initial_step: 1e8,
            step_grow: 2.0,
            step_shrink: 0.5,
            amplitude_fraction: 0.02,
            omega_max: None,
            direction: SearchDirection::ConjugateGradient,
            restarts: 15,
            screen_iterations: 100,
            continuations: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemParams,
    /// Segment duration in seconds.
    pub dt: f64,
    pub n_segments_per_gate: usize,
    pub schemes: Vec<SchemeSpec>,
    /// Purity of the pseudopure initial state.
    pub epsilon: f64,
    pub iterations: usize,
    pub marked: usize,
    pub rfi_ensemble: EnsembleSpec,
    pub incoherence_ensemble: EnsembleSpec,
    pub error_grids: ErrorGrids,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub optimizer: OptimizerSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            system: SystemParams {
                offset1: 436.0,
                offset2: -436.0,
                coupling: 70.0,
            },
            dt: 5.1e-6,
            n_segments_per_gate: 1470,
            schemes: ["none", "xy:90:100", "xy:180:100", "xx:180:100", "xy:90:200"]
                .iter()
                .map(|s| s.parse().expect("valid scheme"))
                .collect(),
            epsilon: 1e-5,
            iterations: 6,
            marked: 1,
            rfi_ensemble: EnsembleSpec::RfInhomogeneity {
                scales: vec![0.90, 0.95, 1.00, 1.05, 1.10],
            },
            incoherence_ensemble: EnsembleSpec::OffsetGrid {
                min_hz: -10.0,
                max_hz: 10.0,
                points: 21,
            },
            error_grids: ErrorGrids::default(),
            seed: 1,
            output_dir: PathBuf::from("ddgrape-out"),
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// J = 7 Hz, 14706 segments (~75 ms) and spacings of 1000 and 2000.
    pub fn full_scale() -> Self {
        ExperimentConfig {
            system: SystemParams::cytosine(),
            n_segments_per_gate: 14706,
            schemes: [
                "none",
                "xy:90:1000",
                "xy:180:1000",
                "xx:180:1000",
                "xy:90:2000",
            ]
            .iter()
            .map(|s| s.parse().expect("valid scheme"))
            .collect(),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) || self.epsilon == 0.0 {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        GroverSpec::new(self.marked, self.iterations)?;
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes configured".into()));
        }
        let max_spacing = self
            .schemes
            .iter()
            .filter_map(|s| s.scheme().map(|d| d.spacing))
            .max()
            .unwrap_or(1);
        if self.n_segments_per_gate < max_spacing.max(1) {
            return Err(Error::Config(format!(
                "n_segments_per_gate = {} is below the largest DD spacing {max_spacing}",
                self.n_segments_per_gate
            )));
        }
        self.rfi_ensemble.build()?;
        self.incoherence_ensemble.build()?;
        if self.error_grids.flip_scale.is_empty() || self.error_grids.phase_offset.is_empty() {
            return Err(Error::Config("error grids must not be empty".into()));
        }
        let o = &self.optimizer;
        if o.restarts > 0 && (o.screen_iterations == 0 || o.screen_iterations >= o.max_iterations) {
            return Err(Error::Config(format!(
                "optimizer.screen_iterations = {} must lie in [1, max_iterations) when restarts > 0",
                o.screen_iterations
            )));
        }
        if o.restarts > 0 && o.continuations == 0 {
            return Err(Error::Config(
                "optimizer.continuations must be at least 1".into(),
            ));
        }
        self.optimization_config()?.validate()
    }

    pub fn omega_max(&self) -> f64 {
        self.optimizer.omega_max.unwrap_or(PI / self.dt)
    }

    pub fn grover(&self) -> GroverSpec {
        GroverSpec {
            marked: self.marked,
            iterations: self.iterations,
        }
    }

    pub fn optimization_config(&self) -> Result<OptimizationConfig> {
        let o = &self.optimizer;
        Ok(OptimizationConfig {
            max_iterations: o.max_iterations,
            fidelity_goal: o.fidelity_goal,
            initial_step: o.initial_step,
            step_grow: o.step_grow,
            step_shrink: o.step_shrink,
            rfi_ensemble: self.rfi_ensemble.build()?,
            seed: self.seed,
            omega_max: self.omega_max(),
            direction: o.direction,
        })
    }

    pub fn pulse_dir(&self) -> PathBuf {
        self.output_dir.join("pulses")
    }
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate construction, Grover trajectories, robustness sweeps and RMS
//! comparison against the ideal run.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::dd::{freeze_into, place_dd, DDPlacement, SchemeSpec};
use crate::discord::quantum_discord;
use crate::error::{Error, Result};
use crate::grape::{
    gate_fidelity, optimize, random_initial_pulse, robust_fidelity, FidelityReport,
    IterationRecord, OptimizationResult, TargetGate,
};
use crate::grover::{
    diffusion_unitary, grover_iterate, hadamard_pair, ideal_trajectory, marked_probability,
    oracle_unitary, Stage,
};
use crate::linalg::{TwoQubitState, Unitary};
use crate::nmr::{
    evolve_ensemble, pseudopure_state, sequence_propagator, NoiseEnsemble, NoiseRealization,
    PulseSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateKind {
    Oracle,
    Diffusion,
}

impl GateKind {
    pub const ALL: [GateKind; 2] = [GateKind::Oracle, GateKind::Diffusion];

    pub fn label(self) -> &'static str {
        match self {
            GateKind::Oracle => "W",
            GateKind::Diffusion => "D",
        }
    }

    pub fn target(self, config: &ExperimentConfig) -> Result<TargetGate> {
        Ok(match self {
            GateKind::Oracle => TargetGate::new(oracle_unitary(config.marked)?, "W"),
            GateKind::Diffusion => TargetGate::new(diffusion_unitary(), "D"),
        })
    }

    fn seed_offset(self) -> u64 {
        match self {
            GateKind::Oracle => 0,
            GateKind::Diffusion => 1,
        }
    }
}

/// One optimized gate, either freshly built or read back from the cache.
#[derive(Debug, Clone)]
pub struct BuiltGate {
    pub kind: GateKind,
    pub pulse: PulseSequence,
    /// Fidelity over the RFI ensemble.
    pub report: FidelityReport,
    pub reached_goal: bool,
    /// Empty when the pulse came from the cache.
    pub log: Vec<IterationRecord>,
    pub from_cache: bool,
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ProtectedGate {
    pub scheme: SchemeSpec,
    pub oracle: BuiltGate,
    pub diffusion: BuiltGate,
}

impl ProtectedGate {
    pub fn gates(&self) -> [&BuiltGate; 2] {
        [&self.oracle, &self.diffusion]
    }
}

pub fn pulse_path(config: &ExperimentConfig, scheme: &SchemeSpec, kind: GateKind) -> PathBuf {
    config.pulse_dir().join(format!(
        "{}_{}_seed{}.pulse",
        scheme.slug(),
        kind.label(),
        config.seed
    ))
}

/// FNV-1a over everything that shapes an optimized pulse, so that a cached
/// file is reused only for the configuration that produced it.
pub fn config_digest(config: &ExperimentConfig, scheme: &SchemeSpec, kind: GateKind) -> String {
    let key = serde_json::json!({
        "system": config.system,
        "dt": config.dt,
        "n_segments_per_gate": config.n_segments_per_gate,
        "scheme": scheme,
        "gate": kind.label(),
        "marked": config.marked,
        "rfi_ensemble": config.rfi_ensemble,
        "seed": config.seed,
        "optimizer": config.optimizer,
    })
    .to_string();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn cached_digest(text: &str) -> Option<&str> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("config_digest="))
        .map(str::trim)
        .next()
}

/// Seed of the random start for one attempt at one gate. Run seed, gate and
/// attempt are hashed together so neighbouring attempts share no structure.
pub fn initial_seed(config: &ExperimentConfig, kind: GateKind, attempt: usize) -> u64 {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&config.seed.to_le_bytes());
    key[8..16].copy_from_slice(&kind.seed_offset().to_le_bytes());
    key[16..24].copy_from_slice(&(attempt as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key).next_u64()
}

fn start(
    config: &ExperimentConfig,
    placement: Option<&DDPlacement>,
    kind: GateKind,
    attempt: usize,
) -> Result<PulseSequence> {
    let initial = random_initial_pulse(
        config.n_segments_per_gate,
        config.dt,
        config.omega_max(),
        config.optimizer.amplitude_fraction,
        initial_seed(config, kind, attempt),
    )?;
    match placement {
        Some(p) => freeze_into(&initial, p),
        None => Ok(initial),
    }
}

/// Random start, DD pulses frozen in place, then optimization against the
/// target over the RFI ensemble.
///
/// With `optimizer.restarts > 0`, every start first runs `screen_iterations`
/// trials. Unless one of them already reached the goal, the screened runs
/// are ranked by fidelity (lowest attempt on ties) and continued in that
/// order with the remaining budget until one converges, at most
/// `continuations` of them. Returns the first converged run, or else the
/// best one, with the attempt it came from.
pub fn optimize_gate(
    config: &ExperimentConfig,
    scheme: &SchemeSpec,
    kind: GateKind,
) -> Result<(OptimizationResult, usize)> {
    let target = kind.target(config)?;
    let mut opt = config.optimization_config()?;
    let placement = match scheme.scheme() {
        Some(dd) => Some(place_dd(config.n_segments_per_gate, dd)?),
        None => None,
    };
    let settings = &config.optimizer;
    if settings.restarts == 0 {
        let initial = start(config, placement.as_ref(), kind, 0)?;
        return Ok((optimize(&initial, &target, &config.system, &opt)?, 0));
    }

    opt.max_iterations = settings.screen_iterations;
    let mut screened = Vec::with_capacity(settings.restarts + 1);
    for attempt in 0..=settings.restarts {
        let initial = start(config, placement.as_ref(), kind, attempt)?;
        let result = optimize(&initial, &target, &config.system, &opt)?;
        if result.converged {
            return Ok((result, attempt));
        }
        screened.push((result, attempt));
    }
    // Stable sort keeps the lower attempt first on ties.
    screened.sort_by(|a, b| b.0.report.fidelity.total_cmp(&a.0.report.fidelity));

    opt.max_iterations = settings.max_iterations - settings.screen_iterations;
    let mut best: Option<(OptimizationResult, usize)> = None;
    for (head, attempt) in screened.into_iter().take(settings.continuations) {
        let rest = optimize(&head.pulse, &target, &config.system, &opt)?;
        let offset = head.iterations;
        let mut log = head.log;
        log.extend(rest.log.into_iter().skip(1).map(|r| IterationRecord {
            iteration: r.iteration + offset,
            ..r
        }));
        let result = OptimizationResult {
            pulse: rest.pulse,
            report: rest.report,
            log,
            iterations: offset + rest.iterations,
            converged: rest.converged,
        };
        if result.converged {
            return Ok((result, attempt));
        }
        if best
            .as_ref()
            .is_none_or(|(b, _)| result.report.fidelity > b.report.fidelity)
        {
            best = Some((result, attempt));
        }
    }
    Ok(best.expect("at least one continuation"))
}

fn load_cached(
    config: &ExperimentConfig,
    scheme: &SchemeSpec,
    kind: GateKind,
) -> Result<Option<BuiltGate>> {
    let path = pulse_path(config, scheme, kind);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    if cached_digest(&text) != Some(config_digest(config, scheme, kind).as_str()) {
        return Ok(None);
    }
    let pulse = PulseSequence::from_text(&text)?;
    if pulse.len() != config.n_segments_per_gate {
        return Err(Error::LengthMismatch {
            left: pulse.len(),
            right: config.n_segments_per_gate,
        });
    }
    let report = robust_fidelity(
        &pulse,
        &kind.target(config)?,
        &config.system,
        &config.rfi_ensemble.build()?,
    );
    Ok(Some(BuiltGate {
        kind,
        reached_goal: report.fidelity >= config.optimizer.fidelity_goal,
        pulse,
        report,
        log: Vec::new(),
        from_cache: true,
        path,
    }))
}

fn build_gate(
    config: &ExperimentConfig,
    scheme: &SchemeSpec,
    kind: GateKind,
    force: bool,
) -> Result<BuiltGate> {
    if !force {
        if let Some(gate) = load_cached(config, scheme, kind)? {
            return Ok(gate);
        }
    }
    let (result, attempt) = optimize_gate(config, scheme, kind)?;
    let path = pulse_path(config, scheme, kind);
    fs::create_dir_all(config.pulse_dir())?;
    let comments = [
        format!("scheme={scheme}"),
        format!("gate={}", kind.label()),
        format!("seed={}", config.seed),
        format!("attempt={attempt}"),
        format!("config_digest={}", config_digest(config, scheme, kind)),
        format!("rfi_mean_fidelity={:.10}", result.report.fidelity),
    ];
    fs::write(&path, result.pulse.to_text_with_comments(&comments))?;
    Ok(BuiltGate {
        kind,
        pulse: result.pulse,
        report: result.report,
        reached_goal: result.converged,
        log: result.log,
        from_cache: false,
        path,
    })
}

/// Builds (or reuses from `output_dir/pulses`) the oracle and diffusion
/// gates for every configured scheme. A gate that misses the fidelity goal
/// is still returned, with `reached_goal == false`.
pub fn build_protected_gates(config: &ExperimentConfig, force: bool) -> Result<Vec<ProtectedGate>> {
    config.validate()?;
    config
        .schemes
        .iter()
        .map(|scheme| {
            Ok(ProtectedGate {
                scheme: scheme.clone(),
                oracle: build_gate(config, scheme, GateKind::Oracle, force)?,
                diffusion: build_gate(config, scheme, GateKind::Diffusion, force)?,
            })
        })
        .collect()
}

/// Reads both cached gates for `scheme`; fails with [`Error::MissingPulse`]
/// when either is absent or was built from a different configuration.
pub fn load_protected_gate(
    config: &ExperimentConfig,
    scheme: &SchemeSpec,
) -> Result<ProtectedGate> {
    let load = |kind| {
        load_cached(config, scheme, kind)?.ok_or_else(|| Error::MissingPulse {
            path: pulse_path(config, scheme, kind),
        })
    };
    Ok(ProtectedGate {
        scheme: scheme.clone(),
        oracle: load(GateKind::Oracle)?,
        diffusion: load(GateKind::Diffusion)?,
    })
}

/// Which noise the trajectory simulation averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    None,
    Rfi,
    Incoherence,
    RfiIncoherence,
}

impl NoiseModel {
    pub fn ensemble(self, config: &ExperimentConfig) -> Result<NoiseEnsemble> {
        Ok(match self {
            NoiseModel::None => NoiseEnsemble::identity(),
            NoiseModel::Rfi => config.rfi_ensemble.build()?,
            NoiseModel::Incoherence => config.incoherence_ensemble.build()?,
            NoiseModel::RfiIncoherence => config
                .rfi_ensemble
                .build()?
                .product(&config.incoherence_ensemble.build()?),
        })
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModel::None => "none",
            NoiseModel::Rfi => "rfi",
            NoiseModel::Incoherence => "incoherence",
            NoiseModel::RfiIncoherence => "rfi+incoherence",
        })
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NoiseModel::None),
            "rfi" => Ok(NoiseModel::Rfi),
            "incoherence" => Ok(NoiseModel::Incoherence),
            "rfi+incoherence" => Ok(NoiseModel::RfiIncoherence),
            _ => Err(Error::Config(format!(
                "unknown noise model `{s}` (expected none, rfi, incoherence or rfi+incoherence)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub stage: Stage,
    pub marked_prob: f64,
    /// bits
    pub discord: f64,
    /// `D ln2 / ε²`
    pub scaled_discord: f64,
}

fn record(
    stage: Stage,
    rho: &TwoQubitState,
    config: &ExperimentConfig,
) -> Result<TrajectoryRecord> {
    let d = quantum_discord(rho, Some(config.epsilon))?;
    Ok(TrajectoryRecord {
        stage,
        marked_prob: marked_probability(rho, config.marked),
        discord: d.discord,
        scaled_discord: d.scaled_discord.unwrap_or(f64::NAN),
    })
}

fn records(
    config: &ExperimentConfig,
    states: &[(Stage, TwoQubitState)],
) -> Result<Vec<TrajectoryRecord>> {
    states
        .par_iter()
        .map(|(stage, rho)| record(*stage, rho, config))
        .collect()
}

/// The noiseless run with exact gates, starting from the pseudopure state.
pub fn ideal_records(config: &ExperimentConfig) -> Result<Vec<TrajectoryRecord>> {
    records(
        config,
        &ideal_trajectory(&config.grover(), Some(config.epsilon))?,
    )
}

/// Pseudopure start, exact `H⊗H`, then `iterations` rounds of the pulsed
/// oracle and diffusion gates, averaged over `noise`.
pub fn trajectory(
    config: &ExperimentConfig,
    gate: &ProtectedGate,
    noise: &NoiseEnsemble,
) -> Result<Vec<TrajectoryRecord>> {
    let spec = config.grover();
    let rho0 = pseudopure_state(config.epsilon)?;
    let rho_h = hadamard_pair().conjugate(&rho0);
    let pulses: Vec<&PulseSequence> = (0..spec.iterations)
        .flat_map(|_| [&gate.oracle.pulse, &gate.diffusion.pulse])
        .collect();
    let evolved = evolve_ensemble(&rho_h, &pulses, &config.system, noise, true);
    let states: Vec<(Stage, TwoQubitState)> = spec
        .stages()
        .into_iter()
        .zip([rho0, rho_h].into_iter().chain(evolved))
        .collect();
    records(config, &states)
}

/// [`trajectory`] for a scheme whose gates are already in the pulse cache.
pub fn run_trajectory(
    config: &ExperimentConfig,
    scheme: &SchemeSpec,
    noise: &NoiseEnsemble,
) -> Result<Vec<TrajectoryRecord>> {
    trajectory(config, &load_protected_gate(config, scheme)?, noise)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsDeviation {
    pub rms_discord: f64,
    pub rms_prob: f64,
}

/// Root-mean-square deviation from the ideal run over all stages.
///
/// With `normalize`, each observable is first mapped onto `[0, 1]` by the
/// ideal series' minimum and maximum. For discord the minimum is zero, so
/// this divides by the ideal maximum. For a pseudopure start the marked
/// probability only moves within `0.75 ε` of `1/4`, and the same mapping
/// turns it back into the pure-state scale.
pub fn rms_deviation(
    records: &[TrajectoryRecord],
    ideal: &[TrajectoryRecord],
    normalize: bool,
) -> Result<RmsDeviation> {
    if records.len() != ideal.len() || records.is_empty() {
        return Err(Error::LengthMismatch {
            left: records.len(),
            right: ideal.len(),
        });
    }
    let range = |f: fn(&TrajectoryRecord) -> f64| {
        let lo = ideal.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = ideal.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if normalize && hi > lo {
            hi - lo
        } else {
            1.0
        }
    };
    let rms = |f: fn(&TrajectoryRecord) -> f64| {
        let scale = range(f);
        let n = records.len() as f64;
        (records
            .iter()
            .zip(ideal)
            .map(|(a, b)| ((f(a) - f(b)) / scale).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    Ok(RmsDeviation {
        rms_discord: rms(|r| r.discord),
        rms_prob: rms(|r| r.marked_prob),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmsReport {
    pub scheme: SchemeSpec,
    /// Whether the incoherence ensemble was folded in on top of RFI.
    pub incoherence: bool,
    pub deviation: RmsDeviation,
}

/// RMS deviation of every scheme's trajectory under RFI alone and under
/// RFI combined with the incoherence ensemble.
pub fn analyze(config: &ExperimentConfig, gates: &[ProtectedGate]) -> Result<Vec<RmsReport>> {
    let ideal = ideal_records(config)?;
    let mut out = Vec::new();
    for gate in gates {
        for (incoherence, model) in [(false, NoiseModel::Rfi), (true, NoiseModel::RfiIncoherence)] {
            let recs = trajectory(config, gate, &model.ensemble(config)?)?;
            out.push(RmsReport {
                scheme: gate.scheme.clone(),
                incoherence,
                deviation: rms_deviation(&recs, &ideal, true)?,
            });
        }
    }
    Ok(out)
}

/// Systematic pulse imperfection varied in the robustness sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    FlipAngle,
    Phase,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::FlipAngle => "flip_angle",
            ErrorKind::Phase => "phase",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeSpec,
    pub error_kind: ErrorKind,
    /// Iterate fidelity averaged over the error grid.
    pub mean_fidelity: f64,
    /// The same, additionally averaged over the incoherence ensemble.
    pub mean_fidelity_incoherent: f64,
}

/// Mean of `F((U_D U_W)^j, U_G^j)` over `j = 1..=iterations` for one noise
/// realization.
pub fn iterate_fidelity(
    config: &ExperimentConfig,
    gate: &ProtectedGate,
    noise: &NoiseRealization,
) -> Result<f64> {
    let ideal = grover_iterate(config.marked)?;
    let w = sequence_propagator(&gate.oracle.pulse, &config.system, noise);
    let d = sequence_propagator(&gate.diffusion.pulse, &config.system, noise);
    let pulsed = d * w;
    let mut actual = Unitary::identity();
    let mut target = Unitary::identity();
    let mut sum = 0.0;
    for _ in 0..config.iterations {
        actual = pulsed * actual;
        target = ideal * target;
        sum += gate_fidelity(&actual, &target);
    }
    Ok(sum / config.iterations as f64)
}

/// [`iterate_fidelity`] averaged over `noise`; `per_realization` holds the
/// individual values and `mean_over_iterates` the weighted mean.
pub fn iterate_report(
    config: &ExperimentConfig,
    gate: &ProtectedGate,
    noise: &NoiseEnsemble,
) -> Result<FidelityReport> {
    let per: Vec<f64> = noise
        .realizations()
        .par_iter()
        .map(|r| iterate_fidelity(config, gate, r))
        .collect::<Result<_>>()?;
    let mean: f64 = noise
        .realizations()
        .iter()
        .zip(&per)
        .map(|(r, f)| r.weight * f)
        .sum();
    Ok(FidelityReport {
        fidelity: mean,
        per_realization: noise.realizations().iter().copied().zip(per).collect(),
        mean_over_iterates: Some(mean),
    })
}

/// Flip-angle and phase-error sweeps for every scheme, each with and without
/// the incoherence ensemble on top.
pub fn robustness_sweep(
    config: &ExperimentConfig,
    gates: &[ProtectedGate],
) -> Result<Vec<SweepRow>> {
    let incoherence = config.incoherence_ensemble.build()?;
    let grids = [
        (ErrorKind::FlipAngle, &config.error_grids.flip_scale),
        (ErrorKind::Phase, &config.error_grids.phase_offset),
    ];
    let mut rows = Vec::new();
    for gate in gates {
        for (kind, grid) in grids {
            let mut plain = 0.0;
            let mut incoherent = 0.0;
            for &v in grid.iter() {
                let base = match kind {
                    ErrorKind::FlipAngle => NoiseRealization {
                        flip_scale: v,
                        ..NoiseRealization::IDENTITY
                    },
                    ErrorKind::Phase => NoiseRealization {
                        phase_offset: v,
                        ..NoiseRealization::IDENTITY
                    },
                };
                plain += iterate_fidelity(config, gate, &base)?;
                let shifted = NoiseEnsemble::new(
                    incoherence
                        .realizations()
                        .iter()
                        .map(|m| base.compose(m))
                        .collect(),
                )?;
                incoherent += iterate_report(config, gate, &shifted)?.fidelity;
            }
            let n = grid.len() as f64;
            rows.push(SweepRow {
                scheme: gate.scheme.clone(),
                error_kind: kind,
                mean_fidelity: plain / n,
                mean_fidelity_incoherent: incoherent / n,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(prob: &[f64], discord: &[f64]) -> Vec<TrajectoryRecord> {
        prob.iter()
            .zip(discord)
            .map(|(&p, &d)| TrajectoryRecord {
                stage: Stage::Pps,
                marked_prob: p,
                discord: d,
                scaled_discord: 0.0,
            })
            .collect()
    }

    #[test]
    fn rms_of_simple_series() {
        let ideal = series(&[0.25, 1.0, 0.25], &[0.0, 1.0, 0.0]);
        let same = rms_deviation(&ideal, &ideal, true).unwrap();
        assert_eq!((same.rms_discord, same.rms_prob), (0.0, 0.0));

        let shifted = series(&[0.35, 1.1, 0.35], &[0.0, 1.0, 0.0]);
        let r = rms_deviation(&shifted, &ideal, false).unwrap();
        assert!((r.rms_prob - 0.1).abs() < 1e-12);
        assert_eq!(r.rms_discord, 0.0);

        let zeros = series(&[0.0; 3], &[0.0; 3]);
        let r = rms_deviation(&ideal, &zeros, false).unwrap();
        assert!((r.rms_discord - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normalization_uses_the_ideal_range() {
        // Discord in ε² units against an ideal peaking at 2e-10.
        let ideal = series(&[0.25, 0.25 + 1e-5], &[0.0, 2e-10]);
        let measured = series(&[0.25, 0.25], &[0.0, 1e-10]);
        let r = rms_deviation(&measured, &ideal, true).unwrap();
        assert!((r.rms_discord - (0.125f64).sqrt()).abs() < 1e-9);
        assert!((r.rms_prob - (0.5f64).sqrt()).abs() < 1e-9);
        let raw = rms_deviation(&measured, &ideal, false).unwrap();
        assert!(raw.rms_discord < 1e-9);
    }

    #[test]
    fn rms_rejects_mismatched_lengths() {
        let a = series(&[0.0; 3], &[0.0; 3]);
        assert!(matches!(
            rms_deviation(&a[..2], &a, true),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn ideal_records_cover_every_stage() {
        let config = ExperimentConfig {
            epsilon: 1.0,
            ..ExperimentConfig::default()
        };
        let recs = ideal_records(&config).unwrap();
        assert_eq!(recs.len(), 14);
        let after_diffusion: Vec<f64> = recs
            .iter()
            .filter(|r| matches!(r.stage, Stage::Diffusion(_)))
            .map(|r| r.marked_prob)
            .collect();
        for (p, want) in after_diffusion
            .iter()
            .zip([1.0, 0.25, 0.25, 1.0, 0.25, 0.25])
        {
            assert!((p - want).abs() < 1e-12, "{after_diffusion:?}");
        }
        for r in &recs {
            assert!(r.discord >= 0.0);
        }
    }

    #[test]
    fn noise_model_names_round_trip() {
        for m in [
            NoiseModel::None,
            NoiseModel::Rfi,
            NoiseModel::Incoherence,
            NoiseModel::RfiIncoherence,
        ] {
            assert_eq!(m.to_string().parse::<NoiseModel>().unwrap(), m);
        }
        assert!("thermal".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn restart_seeds_are_distinct() {
        let config = ExperimentConfig::default();
        let mut seeds: Vec<u64> = (0..=config.optimizer.restarts)
            .flat_map(|a| GateKind::ALL.map(|k| initial_seed(&config, k, a)))
            .collect();
        let n = seeds.len();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), n);
    }
}

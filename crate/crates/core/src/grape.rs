// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Gradient ascent pulse engineering with frozen segments.
//!
//! The figure of merit is `F = |Tr(U_T^† U_P)| / N`, averaged over an
//! RF-inhomogeneity ensemble. Gradients are exact: every segment propagator
//! comes from an eigendecomposition of its generator, and the same
//! eigenbasis gives the derivative of the exponential through the divided
//! differences of `exp(-i λ Δt)`. Frozen segments (the DD pulses) keep their
//! amplitudes; they still evolve under the full Hamiltonian, so errors in
//! them are compensated by the free segments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{trace, Mat4, Spectral, Unitary, C64, ZERO};
use crate::nmr::{
    segment_generator, ControlOperators, ControlSegment, NoiseEnsemble, NoiseRealization,
    PulseSequence, SystemParams,
};

const DIM: f64 = 4.0;

/// The step is abandoned once it falls below this fraction of the initial step.
pub const MIN_STEP_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetGate {
    pub unitary: Unitary,
    pub label: String,
}

impl TargetGate {
    pub fn new(unitary: Unitary, label: impl Into<String>) -> Self {
        TargetGate {
            unitary,
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    /// Trial steps allowed, accepted or not.
    pub max_iterations: usize,
    pub fidelity_goal: f64,
    /// rad/s per unit gradient.
    pub initial_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    pub rfi_ensemble: NoiseEnsemble,
    /// Seed of the random initial pulse; recorded with the result.
    pub seed: u64,
    /// Amplitude bound applied to free segments after every update.
    pub omega_max: f64,
    pub direction: SearchDirection,
}

/// How the update direction is formed from successive gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchDirection {
    /// The gradient itself.
    SteepestAscent,
    /// Polak-Ribière (clamped at zero) conjugate gradient; falls back to the
    /// gradient whenever the combination is not an ascent direction.
    #[default]
    ConjugateGradient,
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fidelity_goal > 0.0 && self.fidelity_goal <= 1.0) {
            return Err(Error::Config(format!(
                "fidelity_goal must lie in (0, 1], got {}",
                self.fidelity_goal
            )));
        }
        if !(self.step_grow > 0.0 && self.step_shrink > 0.0 && self.initial_step > 0.0) {
            return Err(Error::Config(
                "step size and step factors must be > 0".into(),
            ));
        }
        if !(self.step_shrink < 1.0) {
            return Err(Error::Config("step_shrink must be < 1".into()));
        }
        if !(self.omega_max > 0.0) {
            return Err(Error::Config("omega_max must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    /// Weighted ensemble mean.
    pub fidelity: f64,
    pub per_realization: Vec<(NoiseRealization, f64)>,
    /// Mean over repeated Grover iterates, when computed.
    pub mean_over_iterates: Option<f64>,
}

impl FidelityReport {
    pub fn min(&self) -> f64 {
        self.per_realization
            .iter()
            .map(|(_, f)| *f)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.per_realization
            .iter()
            .map(|(_, f)| *f)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `|Tr(U_T^† U_P)| / N`.
pub fn gate_fidelity(actual: &Unitary, target: &Unitary) -> f64 {
    trace(&(target.matrix().adjoint() * actual.matrix())).norm() / DIM
}

/// Fidelity of `pulse` averaged over `ensemble`.
pub fn robust_fidelity(
    pulse: &PulseSequence,
    target: &TargetGate,
    params: &SystemParams,
    ensemble: &NoiseEnsemble,
) -> FidelityReport {
    let per: Vec<f64> = ensemble
        .realizations()
        .par_iter()
        .map(|noise| {
            let u = crate::nmr::sequence_propagator(pulse, params, noise);
            gate_fidelity(&u, &target.unitary)
        })
        .collect();
    let fidelity = weighted_mean(ensemble, &per);
    FidelityReport {
        fidelity,
        per_realization: ensemble.realizations().iter().copied().zip(per).collect(),
        mean_over_iterates: None,
    }
}

fn weighted_mean(ensemble: &NoiseEnsemble, values: &[f64]) -> f64 {
    ensemble
        .realizations()
        .iter()
        .zip(values)
        .map(|(r, v)| r.weight * v)
        .sum()
}

/// `dF/dΩ_x` and `dF/dΩ_y` for every segment; zero for frozen segments.
pub fn fidelity_gradient(
    pulse: &PulseSequence,
    target: &TargetGate,
    params: &SystemParams,
    realization: &NoiseRealization,
) -> Vec<(f64, f64)> {
    let ops = ControlOperators::new();
    let eval = evaluate(
        pulse,
        &target.unitary.matrix().adjoint(),
        params,
        realization,
        &ops,
    );
    eval.gradient(pulse, realization, &ops)
}

/// Cached forward pass of one realization.
struct Evaluation {
    spectra: Vec<Spectral>,
    props: Vec<Mat4>,
    /// forward[k] = U_k ... U_1 (0-based: product of the first k segments)
    forward: Vec<Mat4>,
    target_adj: Mat4,
    overlap: C64,
}

fn evaluate(
    pulse: &PulseSequence,
    target_adj: &Mat4,
    params: &SystemParams,
    noise: &NoiseRealization,
    ops: &ControlOperators,
) -> Evaluation {
    let spectra: Vec<Spectral> = pulse
        .segments
        .iter()
        .map(|seg| Spectral::new(&segment_generator(ops, params, seg, noise)))
        .collect();
    let props: Vec<Mat4> = spectra.iter().map(|s| s.exp(pulse.dt)).collect();
    let mut forward = Vec::with_capacity(props.len() + 1);
    forward.push(Mat4::identity());
    for u in &props {
        let next = u * forward.last().unwrap();
        forward.push(next);
    }
    let overlap = trace(&(target_adj * forward.last().unwrap()));
    Evaluation {
        spectra,
        props,
        forward,
        target_adj: *target_adj,
        overlap,
    }
}

impl Evaluation {
    fn fidelity(&self) -> f64 {
        self.overlap.norm() / DIM
    }

    fn gradient(
        &self,
        pulse: &PulseSequence,
        noise: &NoiseRealization,
        ops: &ControlOperators,
    ) -> Vec<(f64, f64)> {
        let n = pulse.len();
        let mut grad = vec![(0.0, 0.0); n];
        let g_abs = self.overlap.norm();
        if g_abs < 1e-300 {
            return grad;
        }
        let phase = self.overlap.conj() / (g_abs * DIM);
        let scale = noise.rf_scale * noise.flip_scale;
        let (sin_phi, cos_phi) = noise.phase_offset.sin_cos();
        let dt = pulse.dt;

        // after[k] = U_T^† U_K ... U_{k+1}
        let mut after = self.target_adj;
        for k in (0..n).rev() {
            if !pulse.segments[k].frozen {
                let spec = &self.spectra[k];
                let v = &spec.vectors;
                let v_adj = v.adjoint();
                let w = v_adj * (self.forward[k] * after) * v;
                let xe = v_adj * ops.x * v;
                let ye = v_adj * ops.y * v;
                let lam = &spec.values;
                let mut sx = ZERO;
                let mut sy = ZERO;
                for a in 0..4 {
                    for b in 0..4 {
                        let g = divided_difference(lam[a], lam[b], dt);
                        let wg = w[(b, a)] * g;
                        sx += wg * xe[(a, b)];
                        sy += wg * ye[(a, b)];
                    }
                }
                let dgx = (sx * cos_phi + sy * sin_phi) * scale;
                let dgy = (sy * cos_phi - sx * sin_phi) * scale;
                grad[k] = ((phase * dgx).re, (phase * dgy).re);
            }
            after *= self.props[k];
        }
        grad
    }
}

/// `(e^{-i a t} - e^{-i b t}) / (a - b)`, continuous at `a = b`.
fn divided_difference(a: f64, b: f64, t: f64) -> C64 {
    let mean = 0.5 * (a + b);
    let half = 0.5 * (a - b) * t;
    let sinc = if half.abs() < 1e-8 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    C64::new(0.0, -t * sinc) * C64::from_polar(1.0, -mean * t)
}

/// Ensemble-mean fidelity and gradient.
struct RobustEvaluation {
    fidelity: f64,
    per_realization: Vec<f64>,
    gradient: Vec<(f64, f64)>,
}

fn robust_evaluate(
    pulse: &PulseSequence,
    target: &TargetGate,
    params: &SystemParams,
    ensemble: &NoiseEnsemble,
) -> RobustEvaluation {
    let ops = ControlOperators::new();
    let target_adj = target.unitary.matrix().adjoint();
    let per: Vec<(f64, Vec<(f64, f64)>)> = ensemble
        .realizations()
        .par_iter()
        .map(|noise| {
            let eval = evaluate(pulse, &target_adj, params, noise, &ops);
            (eval.fidelity(), eval.gradient(pulse, noise, &ops))
        })
        .collect();
    let mut gradient = vec![(0.0, 0.0); pulse.len()];
    let mut fidelity = 0.0;
    for ((f, g), noise) in per.iter().zip(ensemble.realizations()) {
        fidelity += noise.weight * f;
        for (acc, (gx, gy)) in gradient.iter_mut().zip(g) {
            acc.0 += noise.weight * gx;
            acc.1 += noise.weight * gy;
        }
    }
    RobustEvaluation {
        fidelity,
        per_realization: per.into_iter().map(|(f, _)| f).collect(),
        gradient,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mean_fidelity: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub pulse: PulseSequence,
    pub report: FidelityReport,
    /// Initial point (iteration 0) followed by every accepted update.
    pub log: Vec<IterationRecord>,
    /// Trial steps taken.
    pub iterations: usize,
    pub converged: bool,
}

impl OptimizationResult {
    pub fn log_csv(&self) -> String {
        log_csv(&self.log)
    }
}

/// `iteration,mean_fidelity,step` CSV of an optimization log.
pub fn log_csv(log: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,mean_fidelity,step\n");
    for r in log {
        out.push_str(&format!(
            "{},{:.12},{:.6e}\n",
            r.iteration, r.mean_fidelity, r.step
        ));
    }
    out
}

fn clip(seg: &mut ControlSegment, omega_max: f64) {
    let amp = seg.amplitude();
    if amp > omega_max {
        let s = omega_max / amp;
        seg.omega_x *= s;
        seg.omega_y *= s;
    }
}

/// Gradient ascent on the RFI-averaged fidelity with an adaptive step.
///
/// A trial step `Ω + step·d` (free segments only, clipped to `omega_max`),
/// where `d` is the gradient or the conjugate direction built from it,
/// is accepted when it raises the mean fidelity, after which the step grows
/// by `step_grow`; otherwise the step shrinks by `step_shrink` and the trial
/// is retried. Stops at `fidelity_goal`, after `max_iterations` trials, or
/// once the step falls below [`MIN_STEP_RATIO`] of the initial step.
pub fn optimize(
    initial: &PulseSequence,
    target: &TargetGate,
    params: &SystemParams,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    initial.validate()?;
    if let Some((k, seg)) = initial
        .segments
        .iter()
        .enumerate()
        .find(|(_, s)| s.frozen && s.amplitude() > config.omega_max * (1.0 + 1e-12))
    {
        return Err(Error::Config(format!(
            "frozen segment {k} has amplitude {:.6e} rad/s above omega_max {:.6e}",
            seg.amplitude(),
            config.omega_max
        )));
    }
    let ensemble = &config.rfi_ensemble;
    let mut pulse = initial.clone();
    let mut current = robust_evaluate(&pulse, target, params, ensemble);
    let mut direction = current.gradient.clone();
    let mut step = config.initial_step;
    let mut log = vec![IterationRecord {
        iteration: 0,
        mean_fidelity: current.fidelity,
        step,
    }];
    let mut iterations = 0;

    while current.fidelity < config.fidelity_goal
        && iterations < config.max_iterations
        && step >= config.initial_step * MIN_STEP_RATIO
    {
        iterations += 1;
        let mut trial = pulse.clone();
        for (seg, (dx, dy)) in trial.segments.iter_mut().zip(&direction) {
            if seg.frozen {
                continue;
            }
            seg.omega_x += step * dx;
            seg.omega_y += step * dy;
            clip(seg, config.omega_max);
        }
        let candidate = robust_evaluate(&trial, target, params, ensemble);
        if candidate.fidelity > current.fidelity {
            direction = match config.direction {
                SearchDirection::SteepestAscent => candidate.gradient.clone(),
                SearchDirection::ConjugateGradient => {
                    conjugate_direction(&candidate.gradient, &current.gradient, &direction)
                }
            };
            pulse = trial;
            current = candidate;
            log.push(IterationRecord {
                iteration: iterations,
                mean_fidelity: current.fidelity,
                step,
            });
            step *= config.step_grow;
        } else {
            step *= config.step_shrink;
        }
    }

    let report = FidelityReport {
        fidelity: current.fidelity,
        per_realization: ensemble
            .realizations()
            .iter()
            .copied()
            .zip(current.per_realization.iter().copied())
            .collect(),
        mean_over_iterates: None,
    };
    Ok(OptimizationResult {
        converged: current.fidelity >= config.fidelity_goal,
        pulse,
        report,
        log,
        iterations,
    })
}

fn dot(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.0 * q.0 + p.1 * q.1).sum()
}

fn conjugate_direction(
    gradient: &[(f64, f64)],
    previous_gradient: &[(f64, f64)],
    previous_direction: &[(f64, f64)],
) -> Vec<(f64, f64)> {
    let denom = dot(previous_gradient, previous_gradient);
    if denom <= 0.0 {
        return gradient.to_vec();
    }
    let beta = ((dot(gradient, gradient) - dot(gradient, previous_gradient)) / denom).max(0.0);
    let d: Vec<(f64, f64)> = gradient
        .iter()
        .zip(previous_direction)
        .map(|(g, p)| (g.0 + beta * p.0, g.1 + beta * p.1))
        .collect();
    if dot(&d, gradient) > 0.0 {
        d
    } else {
        gradient.to_vec()
    }
}

/// Amplitudes drawn uniformly from `[-f Ω_max, f Ω_max]` per component.
pub fn random_initial_pulse(
    n_segments: usize,
    dt: f64,
    omega_max: f64,
    amplitude_fraction: f64,
    seed: u64,
) -> Result<PulseSequence> {
    if !(0.0..=1.0).contains(&amplitude_fraction) {
        return Err(Error::Config(format!(
            "amplitude_fraction must lie in (0, 1], got {amplitude_fraction}"
        )));
    }
    let bound = amplitude_fraction * omega_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        if bound > 0.0 {
            rng.gen_range(-bound..=bound)
        } else {
            0.0
        }
    };
    let segments = (0..n_segments)
        .map(|_| {
            let x = draw();
            let y = draw();
            ControlSegment::free(x, y)
        })
        .collect();
    PulseSequence::new(segments, dt, omega_max)
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Rotating-frame model of a homonuclear spin-1/2 pair.
//!
//! Frequencies in [`SystemParams`] are stored in Hz; the Hamiltonian builders
//! multiply by 2π. Control amplitudes are stored in rad/s. Noise enters
//! through [`NoiseRealization`]: amplitudes are scaled first, then the
//! control phase is rotated, and the common-mode offset shift is added to
//! both resonances before exponentiation.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    collective_operator, spin_operator, Axis, Mat4, Spectral, Spin, TwoQubitState, Unitary, C64,
    ONE,
};

/// Resonance offsets and scalar coupling, all in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub offset1: f64,
    pub offset2: f64,
    pub coupling: f64,
}

impl SystemParams {
    pub fn new(offset1: f64, offset2: f64, coupling: f64) -> Result<Self> {
        let p = SystemParams {
            offset1,
            offset2,
            coupling,
        };
        p.validate()?;
        Ok(p)
    }

    /// Offsets ±436 Hz with J = 7 Hz.
    pub fn cytosine() -> Self {
        SystemParams {
            offset1: 436.0,
            offset2: -436.0,
            coupling: 7.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.offset1, self.offset2, self.coupling]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Config("system parameters must be finite".into()));
        }
        if self.coupling < 0.0 {
            return Err(Error::Config("coupling must be >= 0".into()));
        }
        Ok(())
    }
}

/// One piecewise-constant control interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSegment {
    /// rad/s
    pub omega_x: f64,
    /// rad/s
    pub omega_y: f64,
    /// Frozen segments keep their amplitudes during optimization.
    pub frozen: bool,
}

impl ControlSegment {
    pub const fn free(omega_x: f64, omega_y: f64) -> Self {
        ControlSegment {
            omega_x,
            omega_y,
            frozen: false,
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.omega_x.hypot(self.omega_y)
    }
}

/// A piecewise-constant RF pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub segments: Vec<ControlSegment>,
    /// Segment duration in seconds.
    pub dt: f64,
    /// Amplitude bound in rad/s.
    pub omega_max: f64,
}

impl PulseSequence {
    pub fn new(segments: Vec<ControlSegment>, dt: f64, omega_max: f64) -> Result<Self> {
        let p = PulseSequence {
            segments,
            dt,
            omega_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// All-zero amplitudes, nothing frozen.
    pub fn zeros(n_segments: usize, dt: f64, omega_max: f64) -> Result<Self> {
        Self::new(
            vec![ControlSegment::free(0.0, 0.0); n_segments],
            dt,
            omega_max,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Config("pulse has no segments".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return Err(Error::Config(format!(
                "omega_max must be > 0, got {}",
                self.omega_max
            )));
        }
        if self
            .segments
            .iter()
            .any(|s| !s.omega_x.is_finite() || !s.omega_y.is_finite())
        {
            return Err(Error::Config("non-finite control amplitude".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.segments.len() as f64
    }

    pub fn frozen_count(&self) -> usize {
        self.segments.iter().filter(|s| s.frozen).count()
    }

    /// Serializes to the whitespace-separated pulse file format.
    pub fn to_text(&self) -> String {
        self.to_text_with_comments(&[])
    }

    /// Like [`to_text`](Self::to_text) with extra `# ` comment lines after the
    /// two header lines.
    pub fn to_text_with_comments(&self, comments: &[String]) -> String {
        let mut out = String::new();
        writeln!(out, "# dt_seconds={:.16e}", self.dt).unwrap();
        writeln!(out, "# omega_max_rad_s={:.16e}", self.omega_max).unwrap();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        for (k, s) in self.segments.iter().enumerate() {
            writeln!(
                out,
                "{k} {:.16e} {:.16e} {}",
                s.omega_x,
                s.omega_y,
                u8::from(s.frozen)
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut dt = None;
        let mut omega_max = None;
        let mut segments = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.trim().split_once('=') {
                    let slot = match key.trim() {
                        "dt_seconds" => &mut dt,
                        "omega_max_rad_s" => &mut omega_max,
                        _ => continue,
                    };
                    let v: f64 = value.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad value for {}", key.trim()),
                    })?;
                    *slot = Some(v);
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: line_no,
                msg: format!("bad {what}"),
            };
            let index: usize = fields[0].parse().map_err(|_| bad("segment index"))?;
            if index != segments.len() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("segment index {index} out of order"),
                });
            }
            let omega_x: f64 = fields[1].parse().map_err(|_| bad("omega_x"))?;
            let omega_y: f64 = fields[2].parse().map_err(|_| bad("omega_y"))?;
            let frozen = match fields[3] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("frozen flag")),
            };
            segments.push(ControlSegment {
                omega_x,
                omega_y,
                frozen,
            });
        }
        let missing = |key: &str| Error::Parse {
            line: 0,
            msg: format!("missing header `# {key}=`"),
        };
        let dt = dt.ok_or_else(|| missing("dt_seconds"))?;
        let omega_max = omega_max.ok_or_else(|| missing("omega_max_rad_s"))?;
        Self::new(segments, dt, omega_max)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// One member of a quasi-static coherent-error ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseRealization {
    /// Multiplies both control amplitudes.
    pub rf_scale: f64,
    /// Hz, added to both resonance offsets.
    pub offset_shift: f64,
    /// Extra amplitude scale used for flip-angle error sweeps.
    pub flip_scale: f64,
    /// rad, added to the phase of every segment.
    pub phase_offset: f64,
    pub weight: f64,
}

impl NoiseRealization {
    pub const IDENTITY: NoiseRealization = NoiseRealization {
        rf_scale: 1.0,
        offset_shift: 0.0,
        flip_scale: 1.0,
        phase_offset: 0.0,
        weight: 1.0,
    };

    pub fn is_identity(&self) -> bool {
        self.rf_scale == 1.0
            && self.offset_shift == 0.0
            && self.flip_scale == 1.0
            && self.phase_offset == 0.0
    }

    /// Control amplitudes actually seen by the spins.
    pub fn effective_controls(&self, omega_x: f64, omega_y: f64) -> (f64, f64) {
        let s = self.rf_scale * self.flip_scale;
        let (ax, ay) = (s * omega_x, s * omega_y);
        if self.phase_offset == 0.0 {
            return (ax, ay);
        }
        let (sin, cos) = self.phase_offset.sin_cos();
        (ax * cos - ay * sin, ax * sin + ay * cos)
    }

    /// Combines two realizations: scales multiply, shifts and phases add,
    /// weights multiply.
    pub fn compose(&self, other: &NoiseRealization) -> NoiseRealization {
        NoiseRealization {
            rf_scale: self.rf_scale * other.rf_scale,
            offset_shift: self.offset_shift + other.offset_shift,
            flip_scale: self.flip_scale * other.flip_scale,
            phase_offset: self.phase_offset + other.phase_offset,
            weight: self.weight * other.weight,
        }
    }
}

impl Default for NoiseRealization {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Weighted set of noise realizations; weights sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseEnsemble {
    realizations: Vec<NoiseRealization>,
}

impl NoiseEnsemble {
    pub fn new(realizations: Vec<NoiseRealization>) -> Result<Self> {
        if realizations.is_empty() {
            return Err(Error::Config("noise ensemble is empty".into()));
        }
        for r in &realizations {
            if !(r.rf_scale > 0.0) {
                return Err(Error::Config(format!(
                    "rf_scale must be > 0, got {}",
                    r.rf_scale
                )));
            }
            if !(r.weight >= 0.0) {
                return Err(Error::Config(format!(
                    "weight must be >= 0, got {}",
                    r.weight
                )));
            }
        }
        let total: f64 = realizations.iter().map(|r| r.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "ensemble weights sum to {total}, not 1"
            )));
        }
        Ok(NoiseEnsemble { realizations })
    }

    /// Equal weights over the given realizations (their own weights ignored).
    pub fn uniform(realizations: Vec<NoiseRealization>) -> Result<Self> {
        let w = 1.0 / realizations.len().max(1) as f64;
        Self::new(
            realizations
                .into_iter()
                .map(|r| NoiseRealization { weight: w, ..r })
                .collect(),
        )
    }

    pub fn identity() -> Self {
        NoiseEnsemble {
            realizations: vec![NoiseRealization::IDENTITY],
        }
    }

    /// RF inhomogeneity: one member per amplitude scale, equal weights.
    pub fn rf_inhomogeneity(scales: &[f64]) -> Result<Self> {
        Self::uniform(
            scales
                .iter()
                .map(|&rf_scale| NoiseRealization {
                    rf_scale,
                    ..NoiseRealization::IDENTITY
                })
                .collect(),
        )
    }

    /// Five equally weighted scales spanning ±10 %.
    pub fn default_rfi() -> Self {
        Self::rf_inhomogeneity(&[0.90, 0.95, 1.00, 1.05, 1.10]).expect("valid scales")
    }

    /// Static common-mode offsets on a uniform grid over `[min_hz, max_hz]`.
    pub fn offset_grid(min_hz: f64, max_hz: f64, points: usize) -> Result<Self> {
        if points == 0 || !(max_hz >= min_hz) {
            return Err(Error::Config(
                "offset grid needs points >= 1 and max >= min".into(),
            ));
        }
        let shifts: Vec<f64> = if points == 1 {
            vec![0.5 * (min_hz + max_hz)]
        } else {
            (0..points)
                .map(|i| min_hz + (max_hz - min_hz) * i as f64 / (points - 1) as f64)
                .collect()
        };
        Self::uniform(
            shifts
                .into_iter()
                .map(|offset_shift| NoiseRealization {
                    offset_shift,
                    ..NoiseRealization::IDENTITY
                })
                .collect(),
        )
    }

    /// 21 points on ±10 Hz.
    pub fn default_incoherence() -> Self {
        Self::offset_grid(-10.0, 10.0, 21).expect("valid grid")
    }

    /// Every pairing of members of `self` and `other`, `self` outermost.
    pub fn product(&self, other: &NoiseEnsemble) -> NoiseEnsemble {
        let realizations = self
            .realizations
            .iter()
            .flat_map(|a| other.realizations.iter().map(move |b| a.compose(b)))
            .collect();
        NoiseEnsemble { realizations }
    }

    pub fn realizations(&self) -> &[NoiseRealization] {
        &self.realizations
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }
}

/// Collective control operators `I_1x + I_2x` and `I_1y + I_2y`.
pub(crate) struct ControlOperators {
    pub x: Mat4,
    pub y: Mat4,
}

impl ControlOperators {
    pub fn new() -> Self {
        ControlOperators {
            x: collective_operator(Axis::X),
            y: collective_operator(Axis::Y),
        }
    }
}

/// Diagonal of the system Hamiltonian in rad/s, with both offsets shifted by
/// `shift_hz`.
fn system_diagonal(params: &SystemParams, shift_hz: f64) -> [f64; 4] {
    let nu1 = params.offset1 + shift_hz;
    let nu2 = params.offset2 + shift_hz;
    let mut d = [0.0; 4];
    for (idx, slot) in d.iter_mut().enumerate() {
        let m1 = if idx < 2 { 0.5 } else { -0.5 };
        let m2 = if idx % 2 == 0 { 0.5 } else { -0.5 };
        *slot = TAU * (-nu1 * m1 - nu2 * m2 + params.coupling * m1 * m2);
    }
    d
}

/// `H_S = -2π ν1 I_1z - 2π ν2 I_2z + 2π J I_1z I_2z` in rad/s.
pub fn system_hamiltonian(params: &SystemParams) -> Mat4 {
    let z1 = spin_operator(Spin::One, Axis::Z);
    let z2 = spin_operator(Spin::Two, Axis::Z);
    let w = |hz: f64| C64::new(TAU * hz, 0.0);
    -z1 * w(params.offset1) - z2 * w(params.offset2) + z1 * z2 * w(params.coupling)
}

/// Full segment generator `H_S' + H_C'` (rad/s) under `noise`.
pub(crate) fn segment_generator(
    ops: &ControlOperators,
    params: &SystemParams,
    seg: &ControlSegment,
    noise: &NoiseRealization,
) -> Mat4 {
    let (ex, ey) = noise.effective_controls(seg.omega_x, seg.omega_y);
    let mut h = ops.x * C64::new(ex, 0.0) + ops.y * C64::new(ey, 0.0);
    for (i, d) in system_diagonal(params, noise.offset_shift)
        .into_iter()
        .enumerate()
    {
        h[(i, i)] += d;
    }
    h
}

/// `exp(-i (H_S' + H_C') dt)` for one segment.
pub fn segment_propagator(
    params: &SystemParams,
    seg: &ControlSegment,
    dt: f64,
    noise: &NoiseRealization,
) -> Unitary {
    let ops = ControlOperators::new();
    let h = segment_generator(&ops, params, seg, noise);
    Unitary::from_matrix_unchecked(Spectral::new(&h).exp(dt))
}

/// Ordered product `u_K ... u_2 u_1`; segment 1 acts first.
pub fn sequence_propagator(
    pulse: &PulseSequence,
    params: &SystemParams,
    noise: &NoiseRealization,
) -> Unitary {
    let ops = ControlOperators::new();
    let props: Vec<Mat4> = pulse
        .segments
        .par_iter()
        .map(|seg| Spectral::new(&segment_generator(&ops, params, seg, noise)).exp(pulse.dt))
        .collect();
    let total = props.iter().fold(Mat4::identity(), |acc, u| u * acc);
    Unitary::from_matrix_unchecked(total)
}

/// Evolves `rho0` through `pulses` for every ensemble member and returns the
/// weight-averaged state after each pulse (or only after the last one).
///
/// Each member keeps its realization for the whole run. Pulses that appear
/// more than once in `pulses` (by reference) are exponentiated once per
/// member.
pub fn evolve_ensemble(
    rho0: &TwoQubitState,
    pulses: &[&PulseSequence],
    params: &SystemParams,
    ensemble: &NoiseEnsemble,
    record_after_each: bool,
) -> Vec<TwoQubitState> {
    let mut distinct: Vec<&PulseSequence> = Vec::new();
    let order: Vec<usize> = pulses
        .iter()
        .map(
            |p| match distinct.iter().position(|d| std::ptr::eq(*d, *p)) {
                Some(i) => i,
                None => {
                    distinct.push(p);
                    distinct.len() - 1
                }
            },
        )
        .collect();

    let per_member: Vec<Vec<Mat4>> = ensemble
        .realizations()
        .iter()
        .map(|noise| {
            let props: Vec<Unitary> = distinct
                .iter()
                .map(|p| sequence_propagator(p, params, noise))
                .collect();
            let mut rho = *rho0.matrix();
            let mut states = Vec::new();
            for &i in &order {
                let u = props[i].matrix();
                rho = u * rho * u.adjoint();
                if record_after_each {
                    states.push(rho);
                }
            }
            if !record_after_each {
                states.push(rho);
            }
            states
        })
        .collect();

    let n_out = if record_after_each { pulses.len() } else { 1 };
    (0..n_out)
        .map(|k| {
            let mut acc = Mat4::zeros();
            for (member, noise) in per_member.iter().zip(ensemble.realizations()) {
                acc += member[k] * C64::new(noise.weight, 0.0);
            }
            TwoQubitState::from_matrix_unchecked(acc)
        })
        .collect()
}

/// `(1 - ε) 1/4 + ε |00><00|`.
pub fn pseudopure_state(epsilon: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Config(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let mut m = Mat4::identity() * C64::new((1.0 - epsilon) / 4.0, 0.0);
    m[(0, 0)] += ONE * epsilon;
    Ok(TwoQubitState::from_matrix_unchecked(m))
}

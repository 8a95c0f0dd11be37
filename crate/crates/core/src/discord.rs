// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum discord `D(S|A)` of two-qubit states.
//!
//! The measurement acts on subsystem A (qubit 2) and ranges over rank-1
//! projective bases `{|n+><n+|, |n-><n-|}` parametrised by the Bloch angles
//! of `n`. The minimal conditional entropy is located by a coarse 61×121
//! grid over `(θ, φ)` followed by a compass search around the best point.
//! All entropies are in bits.

use std::f64::consts::{LN_2, PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    entropy_bits, partial_trace, von_neumann_entropy, Mat2, Mat4, QubitState, Subsystem,
    TwoQubitState, C64,
};

pub const GRID_THETA: usize = 61;
pub const GRID_PHI: usize = 121;
/// Outcomes less likely than this carry no conditional entropy.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;
/// Negative discord above this is treated as round-off and clamped to 0.
pub const NEGATIVE_CLAMP: f64 = 1e-8;
const REFINE_MIN_STEP: f64 = 1e-9;

/// Measurement direction on the Bloch sphere of qubit A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    /// Polar angle in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `[0, 2π)`.
    pub phi: f64,
}

impl MeasurementBasis {
    /// Normalises arbitrary angles into the canonical ranges.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        MeasurementBasis {
            theta,
            phi: phi.rem_euclid(TAU),
        }
    }

    /// `|n+>` and `|n->`.
    fn kets(&self) -> [Vector2<C64>; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [
            Vector2::new(C64::new(c, 0.0), e * s),
            Vector2::new(C64::new(s, 0.0), -e * c),
        ]
    }
}

/// Rank-1 projectors onto `±n`.
pub fn projectors(basis: &MeasurementBasis) -> (Mat2, Mat2) {
    let [plus, minus] = basis.kets();
    (plus * plus.adjoint(), minus * minus.adjoint())
}

/// `H(S) + H(A) - H(S,A)`.
pub fn mutual_information(rho: &TwoQubitState) -> Result<f64> {
    let h_s = von_neumann_entropy(&partial_trace(rho, Subsystem::S))?;
    let h_a = von_neumann_entropy(&partial_trace(rho, Subsystem::A))?;
    Ok(h_s + h_a - von_neumann_entropy(rho)?)
}

/// Unnormalised post-measurement state of S for outcome `|v>` on A:
/// `Tr_A[(1⊗Π) ρ (1⊗Π)] = (1⊗<v|) ρ (1⊗|v>)`.
fn conditional_block(m: &Mat4, v: &Vector2<C64>) -> Mat2 {
    Mat2::from_fn(|i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..2 {
            for l in 0..2 {
                acc += v[k].conj() * m[(2 * i + k, 2 * j + l)] * v[l];
            }
        }
        acc
    })
}

/// `Σ_a p_a H(ρ_{S|a})` for a projective measurement of A along `basis`.
pub fn conditional_entropy(rho: &TwoQubitState, basis: &MeasurementBasis) -> Result<f64> {
    let m = rho.matrix();
    let mut total = 0.0;
    for v in basis.kets() {
        let block = conditional_block(m, &v);
        let p = block[(0, 0)].re + block[(1, 1)].re;
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        let cond = QubitState::from_matrix_unchecked(block / C64::new(p, 0.0));
        total += p * entropy_bits(&cond.eigenvalues())?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    /// `D(S|A)` in bits.
    pub discord: f64,
    pub mutual_information: f64,
    /// `max_Π J(S:A) = H(S) - min_Π H_Π(S|A)`.
    pub classical_correlation: f64,
    pub argmin_basis: MeasurementBasis,
    /// `D ln2 / ε²` when the state was declared pseudopure with purity `ε`.
    pub scaled_discord: Option<f64>,
}

fn grid_angles() -> (Vec<f64>, Vec<f64>) {
    let thetas = (0..GRID_THETA)
        .map(|i| PI * i as f64 / (GRID_THETA - 1) as f64)
        .collect();
    let phis = (0..GRID_PHI)
        .map(|j| TAU * j as f64 / GRID_PHI as f64)
        .collect();
    (thetas, phis)
}

/// Lowest conditional entropy on the coarse grid; ties go to the lowest θ,
/// then the lowest φ.
fn grid_minimum(rho: &TwoQubitState) -> Result<(MeasurementBasis, f64)> {
    let (thetas, phis) = grid_angles();
    let rows: Vec<Result<(usize, f64)>> = thetas
        .par_iter()
        .map(|&theta| {
            let mut best = (0, f64::INFINITY);
            for (j, &phi) in phis.iter().enumerate() {
                let h = conditional_entropy(rho, &MeasurementBasis { theta, phi })?;
                if h < best.1 {
                    best = (j, h);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (
        MeasurementBasis {
            theta: 0.0,
            phi: 0.0,
        },
        f64::INFINITY,
    );
    for (i, row) in rows.into_iter().enumerate() {
        let (j, h) = row?;
        if h < best.1 {
            best = (
                MeasurementBasis {
                    theta: thetas[i],
                    phi: phis[j],
                },
                h,
            );
        }
    }
    Ok(best)
}

/// Compass search from `start` with initial steps equal to the grid spacing;
/// steps halve whenever no neighbour improves.
fn refine(
    rho: &TwoQubitState,
    start: MeasurementBasis,
    start_value: f64,
) -> Result<(MeasurementBasis, f64)> {
    let mut best = (start, start_value);
    let mut d_theta = PI / (GRID_THETA - 1) as f64;
    let mut d_phi = TAU / GRID_PHI as f64;
    while d_theta > REFINE_MIN_STEP {
        let round_start = best.1;
        let mut moved = true;
        while moved {
            moved = false;
            let (t, p) = (best.0.theta, best.0.phi);
            for (dt, dp) in [(d_theta, 0.0), (-d_theta, 0.0), (0.0, d_phi), (0.0, -d_phi)] {
                let cand = MeasurementBasis::new(t + dt, p + dp);
                let h = conditional_entropy(rho, &cand)?;
                if h < best.1 {
                    best = (cand, h);
                    moved = true;
                    break;
                }
            }
        }
        d_theta *= 0.5;
        d_phi *= 0.5;
        // a round that improved by less than 1e-8 bits at the finest scale
        // has converged
        if round_start - best.1 < 1e-8 && d_theta < 1e-6 {
            break;
        }
    }
    Ok(best)
}

/// Minimal conditional entropy over measurement bases on A.
pub fn min_conditional_entropy(rho: &TwoQubitState) -> Result<(MeasurementBasis, f64)> {
    let (basis, value) = grid_minimum(rho)?;
    refine(rho, basis, value)
}

/// `D(S|A) = H(A) - H(S,A) + min_Π H_Π(S|A)`.
pub fn quantum_discord(rho: &TwoQubitState, epsilon: Option<f64>) -> Result<DiscordResult> {
    let h_s = von_neumann_entropy(&partial_trace(rho, Subsystem::S))?;
    let h_a = von_neumann_entropy(&partial_trace(rho, Subsystem::A))?;
    let h_sa = von_neumann_entropy(rho)?;
    let (basis, min_cond) = min_conditional_entropy(rho)?;
    let mut discord = h_a - h_sa + min_cond;
    if discord < 0.0 && discord > -NEGATIVE_CLAMP {
        discord = 0.0;
    }
    let scaled_discord = match epsilon {
        Some(e) if e > 0.0 => Some(discord * LN_2 / (e * e)),
        _ => None,
    };
    Ok(DiscordResult {
        discord,
        mutual_information: h_s + h_a - h_sa,
        classical_correlation: h_s - min_cond,
        argmin_basis: basis,
        scaled_discord,
    })
}

fn parse_complex(token: &str) -> Option<C64> {
    let body = token
        .strip_suffix('j')
        .or_else(|| token.strip_suffix('i'))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
    })?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(C64::new(re, im))
}

/// Reads a 4×4 state written row-major as `re+imj` tokens; `#` starts a
/// comment.
pub fn parse_state_text(text: &str) -> Result<TwoQubitState> {
    let mut entries = Vec::with_capacity(16);
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let z = parse_complex(token).ok_or_else(|| Error::Parse {
                line: n + 1,
                msg: format!("bad complex entry `{token}` (expected re+imj)"),
            })?;
            entries.push(z);
        }
    }
    if entries.len() != 16 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected 16 matrix entries, found {}", entries.len()),
        });
    }
    TwoQubitState::new(Mat4::from_row_slice(&entries))
}

pub fn read_state(path: impl AsRef<Path>) -> Result<TwoQubitState> {
    parse_state_text(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_state_text`], one matrix row per line.
pub fn format_state_text(rho: &TwoQubitState) -> String {
    let mut out = String::from("# 4x4 density matrix, row-major, re+imj\n");
    for r in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|c| {
                let z = rho.matrix()[(r, c)];
                format!("{:e}{:+e}j", z.re, z.im)
            })
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

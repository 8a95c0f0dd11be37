// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Helpers shared by the integration tests.

#![allow(dead_code)]

use ddgrape::grape::{fidelity_gradient, gate_fidelity, random_initial_pulse, TargetGate};
use ddgrape::grover::{diffusion_unitary, oracle_unitary};
use ddgrape::linalg::{TwoQubitState, Unitary, C64};
use ddgrape::nmr::{sequence_propagator, NoiseRealization, PulseSequence, SystemParams};
use nalgebra::{DMatrix, SMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-3;

pub fn desk_params() -> SystemParams {
    SystemParams::new(436.0, -436.0, 70.0).unwrap()
}

fn fidelity(
    pulse: &PulseSequence,
    target: &Unitary,
    params: &SystemParams,
    noise: &NoiseRealization,
) -> f64 {
    gate_fidelity(&sequence_propagator(pulse, params, noise), target)
}

/// Central differences of the fidelity in every control component.
pub fn finite_difference(
    pulse: &PulseSequence,
    target: &Unitary,
    params: &SystemParams,
    noise: &NoiseRealization,
) -> Vec<(f64, f64)> {
    (0..pulse.len())
        .map(|k| {
            let component = |dx: f64, dy: f64| {
                let mut p = pulse.clone();
                p.segments[k].omega_x += dx;
                p.segments[k].omega_y += dy;
                fidelity(&p, target, params, noise)
            };
            (
                (component(FD_STEP, 0.0) - component(-FD_STEP, 0.0)) / (2.0 * FD_STEP),
                (component(0.0, FD_STEP) - component(0.0, -FD_STEP)) / (2.0 * FD_STEP),
            )
        })
        .collect()
}

/// Relative 1e-6, or absolute 1e-9 when both values are below 1e-6.
pub fn gradients_agree(analytic: f64, numeric: f64) -> bool {
    if analytic.abs() < 1e-6 && numeric.abs() < 1e-6 {
        (analytic - numeric).abs() <= 1e-9
    } else {
        (analytic - numeric).abs() <= 1e-6 * analytic.abs().max(numeric.abs())
    }
}

/// Spectral gradient against finite differences on `trials` random pulses
/// of 5 to 50 segments under random noise. Returns the number of compared
/// components, or a description of the first disagreement.
pub fn gradient_check(trials: u64, seed: u64) -> Result<usize, String> {
    let params = desk_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = 5.1e-6;
    let omega_max = std::f64::consts::PI / dt;
    let mut compared = 0;
    for trial in 0..trials {
        let n = rng.gen_range(5..=50);
        let pulse = random_initial_pulse(n, dt, omega_max, 0.5, seed + 100 + trial).unwrap();
        let target = if trial % 2 == 0 {
            oracle_unitary(1).unwrap()
        } else {
            diffusion_unitary()
        };
        let noise = NoiseRealization {
            rf_scale: rng.gen_range(0.9..1.1),
            offset_shift: rng.gen_range(-10.0..10.0),
            flip_scale: rng.gen_range(0.95..1.05),
            phase_offset: rng.gen_range(-0.2..0.2),
            weight: 1.0,
        };
        let gate = TargetGate::new(target, "t");
        let analytic = fidelity_gradient(&pulse, &gate, &params, &noise);
        let numeric = finite_difference(&pulse, &target, &params, &noise);
        for (k, (a, f)) in analytic.iter().zip(&numeric).enumerate() {
            if !gradients_agree(a.0, f.0) || !gradients_agree(a.1, f.1) {
                return Err(format!("trial {trial} segment {k}: {a:?} vs {f:?}"));
            }
            compared += 2;
        }
    }
    Ok(compared)
}

/// `M M† / Tr` for a random complex 4×rank matrix `M`; rank 1 gives a pure
/// state.
pub fn random_state(rng: &mut ChaCha8Rng, rank: usize) -> TwoQubitState {
    let m = DMatrix::from_fn(4, rank, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &m * m.adjoint();
    let tr = rho.trace();
    TwoQubitState::new(SMatrix::<C64, 4, 4>::from_fn(|r, k| rho[(r, k)] / tr)).unwrap()
}

// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Invariants checked on random inputs.

use ddgrape::dd::{
    freeze_into, ideal_dd_propagator, place_dd, toggling_check, DDPlacement, DDPulse, DDScheme,
    FlipAngle, Phase, SchemeSpec,
};
use ddgrape::grape::{gate_fidelity, random_initial_pulse};
use ddgrape::linalg::{
    max_abs_diff, partial_trace, unitarity_deviation, unitary_exp, von_neumann_entropy, Mat4,
    Subsystem, TwoQubitState, Unitary, C64,
};
use ddgrape::nmr::{
    evolve_ensemble, segment_propagator, ControlSegment, NoiseEnsemble, NoiseRealization,
    SystemParams,
};
use nalgebra::SMatrix;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn hermitian() -> impl Strategy<Value = Mat4> {
    proptest::collection::vec(complex(), 16).prop_map(|v| {
        let a = Mat4::from_iterator(v);
        (a + a.adjoint()) * C64::new(0.5, 0.0)
    })
}

fn unitary() -> impl Strategy<Value = Unitary> {
    hermitian().prop_map(|h| unitary_exp(&h, 2.0).unwrap())
}

/// Mixed state as the reduced state of a random pure state on 4 x k.
fn mixed_state(k: usize) -> impl Strategy<Value = TwoQubitState> {
    proptest::collection::vec(complex(), 4 * k).prop_map(move |v| {
        let m = nalgebra::DMatrix::from_iterator(4, k, v);
        let rho = &m * m.adjoint();
        let tr = rho.trace();
        let s = SMatrix::<C64, 4, 4>::from_fn(|r, c| rho[(r, c)] / tr);
        TwoQubitState::new(s).unwrap()
    })
}

fn params() -> impl Strategy<Value = SystemParams> {
    (-1000.0..1000.0f64, -1000.0..1000.0f64, 0.0..100.0f64)
        .prop_map(|(a, b, j)| SystemParams::new(a, b, j).unwrap())
}

fn noise() -> impl Strategy<Value = NoiseRealization> {
    (0.8..1.2f64, -20.0..20.0f64, 0.9..1.1f64, -0.3..0.3f64).prop_map(|(rf, shift, flip, phase)| {
        NoiseRealization {
            rf_scale: rf,
            offset_shift: shift,
            flip_scale: flip,
            phase_offset: phase,
            weight: 1.0,
        }
    })
}

fn scheme() -> impl Strategy<Value = DDScheme> {
    (
        prop_oneof![Just(FlipAngle::Deg90), Just(FlipAngle::Deg180)],
        proptest::collection::vec(prop_oneof![Just(Phase::X), Just(Phase::Y)], 1..5),
        1usize..300,
    )
        .prop_map(|(flip, phases, spacing)| DDScheme::new(flip, phases, spacing).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_inverse_and_additivity(h in hermitian(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let fwd = unitary_exp(&h, s).unwrap();
        let back = unitary_exp(&h, -s).unwrap();
        prop_assert!(max_abs_diff((fwd * back).matrix(), &Mat4::identity()) < 1e-10);
        let sum = unitary_exp(&h, s + t).unwrap();
        let prod = unitary_exp(&h, t).unwrap() * fwd;
        prop_assert!(max_abs_diff(sum.matrix(), prod.matrix()) < 1e-10);
        prop_assert!(unitarity_deviation(fwd.matrix()) < 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant(rho in mixed_state(3), u in unitary()) {
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&u.conjugate(&rho)).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&a));
    }

    #[test]
    fn partial_traces_are_states(rho in mixed_state(2)) {
        for keep in [Subsystem::S, Subsystem::A] {
            let r = partial_trace(&rho, keep);
            prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(ddgrape::linalg::QubitState::new(*r.matrix()).is_ok());
        }
    }

    #[test]
    fn segment_propagators_are_unitary(
        p in params(),
        ox in -6e5..6e5f64,
        oy in -6e5..6e5f64,
        n in noise(),
    ) {
        let u = segment_propagator(&p, &ControlSegment::free(ox, oy), 5.1e-6, &n);
        prop_assert!(unitarity_deviation(u.matrix()) < 1e-10);
    }

    #[test]
    fn ensemble_evolution_keeps_valid_states(
        rho in mixed_state(2),
        p in params(),
        members in proptest::collection::vec(noise(), 1..4),
        seed in 0u64..1000,
    ) {
        let pulse = random_initial_pulse(12, 5.1e-6, 6e5, 0.5, seed).unwrap();
        let ensemble = NoiseEnsemble::uniform(members).unwrap();
        let out = evolve_ensemble(&rho, &[&pulse, &pulse], &p, &ensemble, true);
        prop_assert_eq!(out.len(), 2);
        for s in out {
            prop_assert!((s.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(TwoQubitState::new(*s.matrix()).is_ok());
        }
    }

    #[test]
    fn toggling_identity_for_cyclic_sequences(us in proptest::collection::vec(unitary(), 5)) {
        let phases = [Phase::X, Phase::Y, Phase::X, Phase::Y];
        let placement = DDPlacement {
            pulses: phases
                .iter()
                .enumerate()
                .map(|(i, &phase)| DDPulse { index: 10 * i, flip: FlipAngle::Deg180, phase })
                .collect(),
        };
        let report = toggling_check(&us, &placement).unwrap();
        prop_assert!(report.cyclic);
        prop_assert!(report.deviation < 1e-10);
        prop_assert!(report.deviation_without_net_rotation < 1e-10);
    }

    #[test]
    fn toggling_identity_holds_for_arbitrary_pulses(
        k in 0usize..=8,
        us in proptest::collection::vec(unitary(), 9),
        flips in proptest::collection::vec(any::<bool>(), 8),
        phases in proptest::collection::vec(any::<bool>(), 8),
    ) {
        let placement = DDPlacement {
            pulses: (0..k)
                .map(|i| DDPulse {
                    index: i,
                    flip: if flips[i] { FlipAngle::Deg180 } else { FlipAngle::Deg90 },
                    phase: if phases[i] { Phase::X } else { Phase::Y },
                })
                .collect(),
        };
        let report = toggling_check(&us[..=k], &placement).unwrap();
        prop_assert!(report.deviation < 1e-10);
    }

    #[test]
    fn freeze_is_idempotent(s in scheme(), n in 300usize..900, seed in 0u64..100) {
        let pulse = random_initial_pulse(n, 5.1e-6, std::f64::consts::PI / 5.1e-6, 0.1, seed).unwrap();
        let placement = place_dd(n, &s).unwrap();
        let once = freeze_into(&pulse, &placement).unwrap();
        let twice = freeze_into(&once, &placement).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.frozen_count(), placement.len());
        prop_assert_eq!(placement.len(), n / s.spacing);
    }

    #[test]
    fn scheme_text_roundtrip(s in scheme()) {
        let text = s.to_string();
        let back: DDScheme = text.parse().unwrap();
        prop_assert_eq!(&back, &s);
        let spec: SchemeSpec = text.parse().unwrap();
        prop_assert_eq!(spec.to_string(), text);
    }

    #[test]
    fn fidelity_symmetry_and_phase_invariance(a in unitary(), b in unitary(), phase in -3.0..3.0f64) {
        let f = gate_fidelity(&a, &b);
        prop_assert!((f - gate_fidelity(&b, &a)).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        let shifted = Unitary::from_matrix_unchecked(a.matrix() * C64::from_polar(1.0, phase));
        prop_assert!((gate_fidelity(&shifted, &b) - f).abs() < 1e-12);
        prop_assert!((gate_fidelity(&a, &a) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_pi_pulse_needs_the_net_rotation() {
    let h = Mat4::from_fn(|r, c| C64::new((r + 2 * c) as f64 * 0.1, 0.0));
    let h = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let us = vec![unitary_exp(&h, 0.7).unwrap(), unitary_exp(&h, 1.3).unwrap()];
    let placement = DDPlacement {
        pulses: vec![DDPulse {
            index: 0,
            flip: FlipAngle::Deg180,
            phase: Phase::X,
        }],
    };
    let report = toggling_check(&us, &placement).unwrap();
    assert!(!report.cyclic);
    assert!(report.deviation < 1e-12);
    assert!(report.deviation_without_net_rotation > 0.1);
    // Without the pulse the two free periods simply compose.
    let free = us[1] * us[0];
    let p = ideal_dd_propagator(FlipAngle::Deg180, Phase::X);
    assert!(max_abs_diff((us[1] * p * us[0]).matrix(), free.matrix()) > 0.1);
}

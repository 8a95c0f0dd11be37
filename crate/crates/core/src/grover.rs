// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Grover's search on a two-qubit register (N = 4).

use std::fmt;

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::linalg::{kron, Mat2, Mat4, TwoQubitState, Unitary, C64};
use crate::nmr::pseudopure_state;

pub const N_ITEMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverSpec {
    /// Basis index of the marked item, `2*q1 + q2`.
    pub marked: usize,
    pub iterations: usize,
}

impl GroverSpec {
    pub fn new(marked: usize, iterations: usize) -> Result<Self> {
        check_marked(marked)?;
        Ok(GroverSpec { marked, iterations })
    }

    /// Stage labels in execution order.
    pub fn stages(&self) -> Vec<Stage> {
        let mut out = vec![Stage::Pps, Stage::Hadamard];
        for r in 1..=self.iterations {
            out.push(Stage::Oracle(r));
            out.push(Stage::Diffusion(r));
        }
        out
    }
}

fn check_marked(k0: usize) -> Result<()> {
    if k0 >= N_ITEMS {
        return Err(Error::Config(format!("marked index must be < 4, got {k0}")));
    }
    Ok(())
}

/// Position along a Grover run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Pps,
    Hadamard,
    Oracle(usize),
    Diffusion(usize),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Pps => f.write_str("PPS"),
            Stage::Hadamard => f.write_str("H"),
            Stage::Oracle(r) => write!(f, "W{r}"),
            Stage::Diffusion(r) => write!(f, "D{r}"),
        }
    }
}

/// `(|00> + |01> + |10> + |11>) / 2`.
pub fn uniform_superposition() -> Vector4<C64> {
    Vector4::repeat(C64::new(0.5, 0.0))
}

/// `H ⊗ H`.
pub fn hadamard_pair() -> Unitary {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let h = Mat2::new(s, s, s, -s);
    Unitary::from_matrix_unchecked(kron(&h, &h))
}

/// Diagonal sign flip of the marked basis state.
pub fn oracle_unitary(k0: usize) -> Result<Unitary> {
    check_marked(k0)?;
    let mut d = Vector4::repeat(C64::new(1.0, 0.0));
    d[k0] = C64::new(-1.0, 0.0);
    Ok(Unitary::from_matrix_unchecked(Mat4::from_diagonal(&d)))
}

/// Inversion about the mean, `2|ψ0><ψ0| - 1`.
pub fn diffusion_unitary() -> Unitary {
    let psi = uniform_superposition();
    Unitary::from_matrix_unchecked(psi * psi.adjoint() * C64::new(2.0, 0.0) - Mat4::identity())
}

/// One Grover iterate `U_D U_W`.
pub fn grover_iterate(k0: usize) -> Result<Unitary> {
    Ok(diffusion_unitary() * oracle_unitary(k0)?)
}

/// Ideal state after every stage, starting from `|00><00|` or, when
/// `epsilon` is given, from the pseudopure state.
pub fn ideal_trajectory(
    spec: &GroverSpec,
    epsilon: Option<f64>,
) -> Result<Vec<(Stage, TwoQubitState)>> {
    let rho0 = pseudopure_state(epsilon.unwrap_or(1.0))?;
    let oracle = oracle_unitary(spec.marked)?;
    let diffusion = diffusion_unitary();
    let mut rho = rho0;
    let mut out = Vec::with_capacity(2 + 2 * spec.iterations);
    for stage in spec.stages() {
        rho = match stage {
            Stage::Pps => rho,
            Stage::Hadamard => hadamard_pair().conjugate(&rho),
            Stage::Oracle(_) => oracle.conjugate(&rho),
            Stage::Diffusion(_) => diffusion.conjugate(&rho),
        };
        out.push((stage, rho));
    }
    Ok(out)
}

/// `<k0|ρ|k0>`.
pub fn marked_probability(rho: &TwoQubitState, k0: usize) -> f64 {
    rho.matrix()[(k0, k0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_deviation, DensityMatrix};
    use std::f64::consts::PI;

    #[test]
    fn superposition_is_hadamard_of_ground() {
        let psi = uniform_superposition();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let mut ground = Vector4::zeros();
        ground[0] = C64::new(1.0, 0.0);
        let h = hadamard_pair().matrix() * ground;
        assert!((h - psi).norm() < 1e-15);
        let rho = DensityMatrix::from_pure(&psi);
        for k in 0..4 {
            assert!((marked_probability(&rho, k) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_properties() {
        let w = oracle_unitary(1).unwrap();
        let d = w.matrix().diagonal().map(|z| z.re);
        assert_eq!(d.as_slice(), &[1.0, -1.0, 1.0, 1.0]);
        assert!(max_abs_diff((w * w).matrix(), &Mat4::identity()) < 1e-15);
        assert!((w.matrix().determinant() + C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(oracle_unitary(4).is_err());
    }

    #[test]
    fn diffusion_properties() {
        let d = diffusion_unitary();
        let psi = uniform_superposition();
        assert!((d.matrix() * psi - psi).norm() < 1e-15);
        assert!(max_abs_diff((d * d).matrix(), &Mat4::identity()) < 1e-15);
        for r in 0..4 {
            let sum: C64 = (0..4).map(|c| d.matrix()[(r, c)]).sum();
            assert!((sum.re - 1.0).abs() < 1e-15 && sum.im == 0.0);
            for c in 0..4 {
                let want = 0.5 - if r == c { 1.0 } else { 0.0 };
                assert!((d.matrix()[(r, c)].re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn marked_probability_follows_rotation_angle() {
        let spec = GroverSpec::new(1, 6).unwrap();
        let traj = ideal_trajectory(&spec, None).unwrap();
        let after_diffusion: Vec<f64> = traj
            .iter()
            .filter(|(s, _)| matches!(s, Stage::Diffusion(_)))
            .map(|(_, rho)| marked_probability(rho, 1))
            .collect();
        for (r, p) in after_diffusion.iter().enumerate() {
            let analytic = (((2 * (r + 1) + 1) as f64) * PI / 6.0).sin().powi(2);
            assert!((p - analytic).abs() < 1e-12);
        }
        for (got, want) in after_diffusion
            .iter()
            .zip([1.0, 0.25, 0.25, 1.0, 0.25, 0.25])
        {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_iterations_has_two_stages() {
        let traj = ideal_trajectory(&GroverSpec::new(2, 0).unwrap(), Some(0.5)).unwrap();
        assert_eq!(
            traj.iter().map(|(s, _)| *s).collect::<Vec<_>>(),
            vec![Stage::Pps, Stage::Hadamard]
        );
    }

    #[test]
    fn one_iterate_finds_marked_state() {
        for k0 in 0..4 {
            let g = grover_iterate(k0).unwrap();
            assert!(unitarity_deviation(g.matrix()) < 1e-14);
            let psi = g.matrix() * uniform_superposition();
            assert!((psi[k0].norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn iterate_has_period_three() {
        let g = grover_iterate(1).unwrap();
        let rho = TwoQubitState::from_pure(&uniform_superposition());
        let back = g.pow(3).conjugate(&rho);
        assert!((marked_probability(&back, 1) - marked_probability(&rho, 1)).abs() < 1e-10);
    }

    #[test]
    fn stage_labels() {
        let labels: Vec<String> = GroverSpec::new(1, 2)
            .unwrap()
            .stages()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(labels, ["PPS", "H", "W1", "D1", "W2", "D2"]);
    }
}

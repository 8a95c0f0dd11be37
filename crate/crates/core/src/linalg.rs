// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for one and two spin-1/2 nuclei.
//!
//! Two-qubit operators act on the product basis `|q1 q2>` with index
//! `2*q1 + q2`, so `|01>` is index 1. The single-spin state `|0>` is the
//! `m = +1/2` eigenstate of `I_z`. Subsystem S is qubit 1 and subsystem A is
//! qubit 2 throughout the crate.

use std::f64::consts::LN_2;
use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A 4x4 complex matrix acting on the two-qubit space.
pub type Mat4 = Matrix4<C64>;

/// A 2x2 complex matrix acting on one qubit.
pub type Mat2 = Matrix2<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on `U^dagger U = 1` accepted by [`Unitary::new`].
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on `H = H^dagger` accepted by [`unitary_exp`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as round-off and clamped.
pub const EIGEN_CLAMP: f64 = 1e-10;

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<const R: usize, const C: usize>(
    a: &SMatrix<C64, R, C>,
    b: &SMatrix<C64, R, C>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_deviation<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace<const N: usize>(m: &SMatrix<C64, N, N>) -> C64 {
    (0..N).map(|i| m[(i, i)]).sum()
}

/// Kronecker product of two single-qubit operators, `a` on qubit 1.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Spin label inside the two-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    /// Qubit 1, subsystem S.
    One,
    /// Qubit 2, subsystem A.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Half a Pauli matrix: the spin-1/2 angular momentum component.
pub fn half_pauli(axis: Axis) -> Mat2 {
    let h = C64::new(0.5, 0.0);
    match axis {
        Axis::X => Mat2::new(ZERO, h, h, ZERO),
        Axis::Y => Mat2::new(ZERO, -I * 0.5, I * 0.5, ZERO),
        Axis::Z => Mat2::new(h, ZERO, ZERO, -h),
    }
}

/// Spin angular momentum component `I_{k,axis}` embedded in the two-qubit space.
pub fn spin_operator(spin: Spin, axis: Axis) -> Mat4 {
    let s = half_pauli(axis);
    match spin {
        Spin::One => kron(&s, &Mat2::identity()),
        Spin::Two => kron(&Mat2::identity(), &s),
    }
}

/// Collective operator `I_{1,axis} + I_{2,axis}`.
pub fn collective_operator(axis: Axis) -> Mat4 {
    spin_operator(Spin::One, axis) + spin_operator(Spin::Two, axis)
}

/// Eigendecomposition `H = V diag(lambda) V^dagger` of a Hermitian 4x4 matrix.
///
/// Kept around by the optimizer: the same decomposition yields both the
/// segment propagator and its derivative.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: Vector4<f64>,
    pub vectors: Mat4,
}

impl Spectral {
    /// Decomposes `h`, which is assumed Hermitian. Use [`Spectral::checked`]
    /// for untrusted input.
    pub fn new(h: &Mat4) -> Self {
        let eig = h.symmetric_eigen();
        Spectral {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn checked(h: &Mat4) -> Result<Self> {
        let deviation = hermiticity_deviation(h);
        if !(deviation <= HERMITICITY_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::new(h))
    }

    /// `exp(-i * scale * H)`.
    pub fn exp(&self, scale: f64) -> Mat4 {
        let phases = self.values.map(|l| C64::from_polar(1.0, -l * scale));
        let mut scaled = self.vectors;
        for (c, p) in phases.iter().enumerate() {
            let mut col = scaled.column_mut(c);
            col *= *p;
        }
        scaled * self.vectors.adjoint()
    }
}

/// A 4x4 unitary propagator.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary(Mat4);

impl Unitary {
    pub fn new(m: Mat4) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary(m))
    }

    /// Wraps a matrix the caller knows to be unitary (e.g. a product of
    /// unitaries). Not checked.
    pub fn from_matrix_unchecked(m: Mat4) -> Self {
        Unitary(m)
    }

    pub fn identity() -> Self {
        Unitary(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    /// `self * other`: `other` acts first.
    pub fn then_after(&self, other: &Unitary) -> Self {
        Unitary(self.0 * other.0)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Mat4::identity();
        for _ in 0..n {
            out = self.0 * out;
        }
        Unitary(out)
    }

    /// Entrywise distance to `other` after removing the best global phase.
    pub fn phase_aligned_distance(&self, other: &Unitary) -> f64 {
        let overlap = trace(&(other.0.adjoint() * self.0));
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        max_abs_diff(&self.0, &(other.0 * phase))
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, rho: &DensityMatrix<4>) -> DensityMatrix<4> {
        DensityMatrix(self.0 * rho.0 * self.0.adjoint())
    }
}

impl std::ops::Mul for Unitary {
    type Output = Unitary;
    fn mul(self, rhs: Unitary) -> Unitary {
        Unitary(self.0 * rhs.0)
    }
}

impl fmt::Debug for Unitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary{}", self.0)
    }
}

pub fn unitarity_deviation(m: &Mat4) -> f64 {
    max_abs_diff(&(m.adjoint() * m), &Mat4::identity())
}

/// `exp(-i * scale * generator)` by spectral decomposition of the generator.
///
/// Rejects generators that are not Hermitian within [`HERMITICITY_TOL`].
pub fn unitary_exp(generator: &Mat4, scale: f64) -> Result<Unitary> {
    let spectral = Spectral::checked(generator)?;
    Ok(Unitary(spectral.exp(scale)))
}

/// A density matrix on `N` levels (`N = 2` for one qubit, `N = 4` for two).
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix<const N: usize>(SMatrix<C64, N, N>);

pub type TwoQubitState = DensityMatrix<4>;
pub type QubitState = DensityMatrix<2>;

impl<const N: usize> DensityMatrix<N> {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (eigenvalues >= -1e-10).
    pub fn new(m: SMatrix<C64, N, N>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = hermiticity_deviation(&m);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = trace(&m);
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let rho = DensityMatrix(m);
        if let Some(min) = rho.eigenvalues().into_iter().reduce(f64::min) {
            if min < -EIGEN_CLAMP {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    pub fn from_matrix_unchecked(m: SMatrix<C64, N, N>) -> Self {
        DensityMatrix(m)
    }

    /// Pure state `|psi><psi|` for a normalized `psi`.
    pub fn from_pure(psi: &nalgebra::SVector<C64, N>) -> Self {
        DensityMatrix(psi * psi.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(SMatrix::<C64, N, N>::identity() / C64::new(N as f64, 0.0))
    }

    pub fn matrix(&self) -> &SMatrix<C64, N, N> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        trace(&self.0)
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values = if N == 2 {
            let a = self.0[(0, 0)].re;
            let d = self.0[(N - 1, N - 1)].re;
            let b = self.0[(0, N - 1)].norm();
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mean - half_gap, mean + half_gap]
        } else {
            let m = DMatrix::from_fn(N, N, |r, c| self.0[(r, c)]);
            m.symmetric_eigenvalues().iter().copied().collect()
        };
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }
}

impl<const N: usize> fmt::Debug for DensityMatrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{}", self.0)
    }
}

/// Which qubit survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// Qubit 1.
    S,
    /// Qubit 2.
    A,
}

/// Reduced state of the kept qubit.
pub fn partial_trace(rho: &TwoQubitState, keep: Subsystem) -> QubitState {
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::S => Mat2::from_fn(|i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]),
        Subsystem::A => Mat2::from_fn(|i, j| m[(i, j)] + m[(2 + i, 2 + j)]),
    };
    DensityMatrix(reduced)
}

/// Shannon entropy in bits of a probability list, with `0 log 0 = 0`.
///
/// Entries in `[-EIGEN_CLAMP, 0)` are clamped to zero; anything more
/// negative is an invalid state.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &p in probabilities {
        if p < -EIGEN_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {p:e}")));
        }
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    Ok(h / LN_2)
}

/// Von Neumann entropy `-sum lambda log2 lambda` in bits.
pub fn von_neumann_entropy<const N: usize>(rho: &DensityMatrix<N>) -> Result<f64> {
    entropy_bits(&rho.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag4(d: [f64; 4]) -> Mat4 {
        Mat4::from_diagonal(&Vector4::new(c(d[0]), c(d[1]), c(d[2]), c(d[3])))
    }

    /// Term-by-term Taylor series of exp(-i t H), independent of the
    /// eigensolver.
    fn taylor_exp(h: &Mat4, t: f64) -> Mat4 {
        let a = h * C64::new(0.0, -t);
        // scale and square to keep the series short and accurate
        let squarings = 8;
        let a = a / c(2f64.powi(squarings));
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..40 {
            term = term * a / c(k as f64);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn spin_z_operators_are_diagonal() {
        assert_eq!(
            spin_operator(Spin::One, Axis::Z),
            diag4([0.5, 0.5, -0.5, -0.5])
        );
        assert_eq!(
            spin_operator(Spin::Two, Axis::Z),
            diag4([0.5, -0.5, 0.5, -0.5])
        );
    }

    #[test]
    fn angular_momentum_commutator() {
        for spin in [Spin::One, Spin::Two] {
            let x = spin_operator(spin, Axis::X);
            let y = spin_operator(spin, Axis::Y);
            let z = spin_operator(spin, Axis::Z);
            assert!(max_abs_diff(&(x * y - y * x), &(z * I)) < 1e-15);
        }
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let h = collective_operator(Axis::X) + spin_operator(Spin::One, Axis::Z) * c(3.0);
        let u = unitary_exp(&h, 0.0).unwrap();
        assert!(max_abs_diff(u.matrix(), &Mat4::identity()) < 1e-15);
    }

    #[test]
    fn collective_pi_rotation_about_x() {
        let sx = Mat2::new(ZERO, ONE, ONE, ZERO);
        let expected = -kron(&sx, &sx);
        let u = unitary_exp(&collective_operator(Axis::X), PI).unwrap();
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-12);
        assert!(max_abs_diff(&taylor_exp(&collective_operator(Axis::X), PI), &expected) < 1e-12);
        // |00> -> -|11>
        assert!((u.matrix()[(3, 0)] + ONE).norm() < 1e-12);
    }

    #[test]
    fn diagonal_generator() {
        let theta = 0.731;
        let u = unitary_exp(&spin_operator(Spin::One, Axis::Z), theta).unwrap();
        let m = C64::from_polar(1.0, -theta / 2.0);
        let p = C64::from_polar(1.0, theta / 2.0);
        let expected = Mat4::from_diagonal(&Vector4::new(m, m, p, p));
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-14);
    }

    #[test]
    fn spectral_exp_matches_taylor_for_generic_hamiltonian() {
        let h = diag4([1.3, -2.1, 0.4, 0.4])
            + collective_operator(Axis::X) * c(0.9)
            + collective_operator(Axis::Y) * c(-1.7)
            + spin_operator(Spin::One, Axis::Z) * spin_operator(Spin::Two, Axis::Z) * c(2.2);
        let u = unitary_exp(&h, 1.37).unwrap();
        assert!(max_abs_diff(u.matrix(), &taylor_exp(&h, 1.37)) < 1e-12);
    }

    #[test]
    fn non_hermitian_generator_is_rejected() {
        let mut h = collective_operator(Axis::X);
        h[(0, 1)] += C64::new(0.0, 1e-6);
        assert!(matches!(
            unitary_exp(&h, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn partial_trace_of_basis_and_bell_states() {
        let mut psi = Vector4::zeros();
        psi[0] = ONE;
        let r = partial_trace(&DensityMatrix::from_pure(&psi), Subsystem::S);
        assert!(max_abs_diff(r.matrix(), &Mat2::new(ONE, ZERO, ZERO, ZERO)) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vector4::new(c(s), ZERO, ZERO, c(s));
        let r = partial_trace(&DensityMatrix::from_pure(&bell), Subsystem::A);
        assert!(max_abs_diff(r.matrix(), &(Mat2::identity() * c(0.5))) < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let mut psi = Vector4::zeros();
        psi[0] = ONE;
        assert_eq!(
            von_neumann_entropy(&DensityMatrix::from_pure(&psi)).unwrap(),
            0.0
        );
        let mixed = DensityMatrix::<4>::maximally_mixed();
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-14);
        let half = DensityMatrix::new(diag4([0.5, 0.5, 0.0, 0.0])).unwrap();
        assert!((von_neumann_entropy(&half).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn entropy_clamps_round_off_and_rejects_negative() {
        assert_eq!(entropy_bits(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(matches!(
            entropy_bits(&[1.1, -0.1]),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(diag4([0.5, 0.5, 0.5, 0.0])).is_err());
        assert!(DensityMatrix::new(diag4([1.2, -0.2, 0.0, 0.0])).is_err());
        let mut m = diag4([0.25; 4]);
        m[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn unitary_constructor_checks() {
        assert!(Unitary::new(diag4([1.0, 1.0, 1.0, 1.01])).is_err());
        assert!(Unitary::new(diag4([1.0, -1.0, 1.0, 1.0])).is_ok());
    }

    #[test]
    fn phase_aligned_distance_ignores_global_phase() {
        let u = unitary_exp(&collective_operator(Axis::Y), 0.3).unwrap();
        let v = Unitary::from_matrix_unchecked(u.matrix() * C64::from_polar(1.0, 1.1));
        assert!(u.phase_aligned_distance(&v) < 1e-14);
    }
}

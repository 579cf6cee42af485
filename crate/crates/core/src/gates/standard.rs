// SPDX-License-Identifier: Apache-2.0

//! Fixed gates and single-qubit rotations.

use crate::linalg::{SquareMatrix, C64, ONE, ZERO};

pub fn pauli_x() -> SquareMatrix {
    SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// CNOT with local wire 0 as control.
pub fn cnot() -> SquareMatrix {
    SquareMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// CNOT with local wire 1 as control.
pub fn cnot_reversed() -> SquareMatrix {
    SquareMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ])
}

/// `exp(-i θ Y / 2)`, the OpenQASM `ry`.
pub fn ry(theta: f64) -> SquareMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    SquareMatrix::from_real_rows(&[&[c, -s], &[s, c]])
}

pub fn ry_derivative(theta: f64) -> SquareMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    SquareMatrix::from_real_rows(&[&[-0.5 * s, -0.5 * c], &[0.5 * c, -0.5 * s]])
}

/// `exp(-i φ Z / 2)`.
pub fn rz(phi: f64) -> SquareMatrix {
    let e = C64::from_polar(1.0, -phi / 2.0);
    SquareMatrix::diagonal(&[e, e.conj()])
}

pub fn rz_derivative(phi: f64) -> SquareMatrix {
    let e = C64::from_polar(1.0, -phi / 2.0);
    let half_i = C64::new(0.0, 0.5);
    SquareMatrix::diagonal(&[-half_i * e, half_i * e.conj()])
}

/// Euler rotation `Rz(α) Ry(β) Rz(γ)`.
pub fn zyz(angles: &[f64]) -> SquareMatrix {
    let [a, b, g] = [angles[0], angles[1], angles[2]];
    &(&rz(a) * &ry(b)) * &rz(g)
}

/// Partial derivatives of [`zyz`] with respect to `(α, β, γ)`.
pub fn zyz_derivatives(angles: &[f64]) -> [SquareMatrix; 3] {
    let [a, b, g] = [angles[0], angles[1], angles[2]];
    let (za, yb, zg) = (rz(a), ry(b), rz(g));
    [
        &(&rz_derivative(a) * &yb) * &zg,
        &(&za * &ry_derivative(b)) * &zg,
        &(&za * &yb) * &rz_derivative(g),
    ]
}

/// `|0⟩⟨0|`.
pub fn projector0() -> SquareMatrix {
    SquareMatrix::diagonal(&[ONE, ZERO])
}

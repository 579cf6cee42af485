// SPDX-License-Identifier: Apache-2.0

//! Parameterized unitary blocks and the final measurement rotation.
//!
//! Three block families are supported:
//!
//! * **simple**: one rotation per wire followed by a CNOT. Real blocks use `Ry`, complex
//!   blocks use a ZYZ Euler rotation;
//! * **general**: an arbitrary two-qubit gate, `exp` of a Lie-algebra element (SO(4) or SU(4));
//! * **ancilla**: an arbitrary three-qubit gate whose third wire is a fresh `|0⟩` ancilla
//!   (SO(8) or SU(8)).

mod lie;
pub mod standard;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

pub use lie::generator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Simple,
    General,
    Ancilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    SimpleReal,
    SimpleComplex,
    GeneralReal,
    GeneralComplex,
    AncillaReal,
    AncillaComplex,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::SimpleReal,
        GateKind::SimpleComplex,
        GateKind::GeneralReal,
        GateKind::GeneralComplex,
        GateKind::AncillaReal,
        GateKind::AncillaComplex,
    ];

    pub fn new(family: Family, field: Field) -> Self {
        match (family, field) {
            (Family::Simple, Field::Real) => GateKind::SimpleReal,
            (Family::Simple, Field::Complex) => GateKind::SimpleComplex,
            (Family::General, Field::Real) => GateKind::GeneralReal,
            (Family::General, Field::Complex) => GateKind::GeneralComplex,
            (Family::Ancilla, Field::Real) => GateKind::AncillaReal,
            (Family::Ancilla, Field::Complex) => GateKind::AncillaComplex,
        }
    }

    pub fn family(self) -> Family {
        match self {
            GateKind::SimpleReal | GateKind::SimpleComplex => Family::Simple,
            GateKind::GeneralReal | GateKind::GeneralComplex => Family::General,
            GateKind::AncillaReal | GateKind::AncillaComplex => Family::Ancilla,
        }
    }

    pub fn field(self) -> Field {
        match self {
            GateKind::SimpleReal | GateKind::GeneralReal | GateKind::AncillaReal => Field::Real,
            _ => Field::Complex,
        }
    }

    pub fn is_real(self) -> bool {
        self.field() == Field::Real
    }

    /// Number of wires the block touches (including the ancilla).
    pub fn arity(self) -> usize {
        if self.family() == Family::Ancilla {
            3
        } else {
            2
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::SimpleReal => 2,
            GateKind::SimpleComplex => 6,
            GateKind::GeneralReal => 6,
            GateKind::GeneralComplex => 15,
            GateKind::AncillaReal => 28,
            GateKind::AncillaComplex => 63,
        }
    }

    fn check(self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ParamCountMismatch {
                kind: self,
                expected: self.param_count(),
                found: params.len(),
            });
        }
        Ok(())
    }
}

/// A parameterized block: kind, parameters and wires.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryBlock {
    pub kind: GateKind,
    pub params: Vec<f64>,
    /// Wires in local order; the ancilla (if any) is last.
    pub wires: Vec<usize>,
    /// Simple kinds only: CNOT controlled by the second wire instead of the first.
    pub cnot_reversed: bool,
}

impl UnitaryBlock {
    pub fn unitary(&self) -> Result<SquareMatrix> {
        build_unitary(self.kind, &self.params, self.cnot_reversed)
    }

    pub fn unitary_and_grads(&self) -> Result<(SquareMatrix, Vec<SquareMatrix>)> {
        build_unitary_and_grads(self.kind, &self.params, self.cnot_reversed)
    }
}

/// Unitary of a block (4x4, or 8x8 for ancilla kinds).
pub fn build_unitary(kind: GateKind, params: &[f64], cnot_reversed: bool) -> Result<SquareMatrix> {
    kind.check(params)?;
    Ok(build(kind, params, cnot_reversed, false).0)
}

/// Unitary of a block together with `∂U/∂θ_k` for every parameter.
pub fn build_unitary_and_grads(
    kind: GateKind,
    params: &[f64],
    cnot_reversed: bool,
) -> Result<(SquareMatrix, Vec<SquareMatrix>)> {
    kind.check(params)?;
    Ok(build(kind, params, cnot_reversed, true))
}

fn build(
    kind: GateKind,
    params: &[f64],
    cnot_reversed: bool,
    with_grads: bool,
) -> (SquareMatrix, Vec<SquareMatrix>) {
    match kind.family() {
        Family::Simple => simple_block(kind.field(), params, cnot_reversed, with_grads),
        Family::General => lie::exp_map(4, !kind.is_real(), params, with_grads),
        Family::Ancilla => lie::exp_map(8, !kind.is_real(), params, with_grads),
    }
}

/// One rotation per wire, then CNOT: `U = CX (R_0 ⊗ R_1)`.
fn simple_block(
    field: Field,
    params: &[f64],
    reversed: bool,
    with_grads: bool,
) -> (SquareMatrix, Vec<SquareMatrix>) {
    let cx = if reversed {
        standard::cnot_reversed()
    } else {
        standard::cnot()
    };
    let (r0, r1, d0, d1): (_, _, Vec<_>, Vec<_>) = match field {
        Field::Real => (
            standard::ry(params[0]),
            standard::ry(params[1]),
            vec![standard::ry_derivative(params[0])],
            vec![standard::ry_derivative(params[1])],
        ),
        Field::Complex => (
            standard::zyz(&params[0..3]),
            standard::zyz(&params[3..6]),
            standard::zyz_derivatives(&params[0..3]).into(),
            standard::zyz_derivatives(&params[3..6]).into(),
        ),
    };
    let u = &cx * &r0.kron(&r1);
    if !with_grads {
        return (u, Vec::new());
    }
    let grads = d0
        .iter()
        .map(|d| &cx * &d.kron(&r1))
        .chain(d1.iter().map(|d| &cx * &r0.kron(d)))
        .collect();
    (u, grads)
}

/// Single-qubit rotation applied to the readout wire before the `|0⟩⟨0|` measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRotation {
    pub field: Field,
    /// One `Ry` angle for real models, ZYZ Euler angles for complex ones.
    pub params: Vec<f64>,
    pub qubit: usize,
}

impl MeasurementRotation {
    pub fn param_count(field: Field) -> usize {
        match field {
            Field::Real => 1,
            Field::Complex => 3,
        }
    }

    pub fn matrix(&self) -> Result<SquareMatrix> {
        Ok(measurement_rotation_matrix(self.field, &self.params)?.0)
    }
}

/// Rotation matrix and its per-parameter derivatives.
pub fn measurement_rotation_matrix(
    field: Field,
    params: &[f64],
) -> Result<(SquareMatrix, Vec<SquareMatrix>)> {
    let expected = MeasurementRotation::param_count(field);
    if params.len() != expected || params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "measurement rotation needs {expected} finite angles, got {:?}",
            params
        )));
    }
    Ok(match field {
        Field::Real => (
            standard::ry(params[0]),
            vec![standard::ry_derivative(params[0])],
        ),
        Field::Complex => (
            standard::zyz(params),
            standard::zyz_derivatives(params).into(),
        ),
    })
}

/// Hardware-native gate in the `{ry, cx}` set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NativeGate {
    Ry { angle: f64, wire: usize },
    Cx { control: usize, target: usize },
}

impl NativeGate {
    pub fn matrix(&self) -> SquareMatrix {
        match *self {
            NativeGate::Ry { angle, .. } => standard::ry(angle),
            NativeGate::Cx { .. } => standard::cnot(),
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        match *self {
            NativeGate::Ry { wire, .. } => vec![wire],
            NativeGate::Cx { control, target } => vec![control, target],
        }
    }
}

/// `[ry(a, w0), ry(b, w1), cx]` for a simple real block.
pub fn decompose_simple_to_native(block: &UnitaryBlock) -> Result<Vec<NativeGate>> {
    if block.kind != GateKind::SimpleReal {
        return Err(Error::UnsupportedKind(block.kind));
    }
    block.kind.check(&block.params)?;
    let (w0, w1) = (block.wires[0], block.wires[1]);
    let (control, target) = if block.cnot_reversed {
        (w1, w0)
    } else {
        (w0, w1)
    };
    Ok(vec![
        NativeGate::Ry {
            angle: block.params[0],
            wire: w0,
        },
        NativeGate::Ry {
            angle: block.params[1],
            wire: w1,
        },
        NativeGate::Cx { control, target },
    ])
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::{C64, ONE};
    use crate::sim::Statevector;

    fn random_params(kind: GateKind, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..kind.param_count())
            .map(|_| rng.random_range(-PI..PI))
            .collect()
    }

    fn fd_grads(kind: GateKind, params: &[f64], reversed: bool, h: f64) -> Vec<SquareMatrix> {
        (0..params.len())
            .map(|k| {
                let mut p = params.to_vec();
                let mut m = params.to_vec();
                p[k] += h;
                m[k] -= h;
                let up = build_unitary(kind, &p, reversed).unwrap();
                let um = build_unitary(kind, &m, reversed).unwrap();
                (&up - &um).scale(C64::new(0.5 / h, 0.0))
            })
            .collect()
    }

    /// `exp(A)` by truncated Taylor series, independent of the eigendecomposition route.
    fn taylor_exp(a: &SquareMatrix, terms: usize) -> SquareMatrix {
        let d = a.dim();
        let mut sum = SquareMatrix::identity(d);
        let mut term = SquareMatrix::identity(d);
        for k in 1..terms {
            term = (&term * a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn simple_real_at_zero_is_cnot() {
        assert_eq!(
            build_unitary(GateKind::SimpleReal, &[0.0, 0.0], false).unwrap(),
            standard::cnot()
        );
        assert_eq!(
            build_unitary(GateKind::SimpleReal, &[0.0, 0.0], true).unwrap(),
            standard::cnot_reversed()
        );
    }

    #[test]
    fn general_complex_at_zero_is_identity() {
        let u = build_unitary(GateKind::GeneralComplex, &[0.0; 15], false).unwrap();
        assert!(u.max_abs_diff(&SquareMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn general_real_single_generator_is_givens_rotation() {
        let mut theta = [0.0; 6];
        theta[0] = FRAC_PI_2;
        let u = build_unitary(GateKind::GeneralReal, &theta, false).unwrap();
        // Oracle: series expansion of the real antisymmetric generator.
        let mut a = SquareMatrix::zeros(4);
        a[(0, 1)] = C64::new(FRAC_PI_2, 0.0);
        a[(1, 0)] = C64::new(-FRAC_PI_2, 0.0);
        let oracle = taylor_exp(&a, 30);
        assert!(u.max_abs_diff(&oracle) < 1e-12);
        // cos(π/2) = 0 on the plane, +1 off it
        assert!(u[(0, 0)].norm() < 1e-12);
        assert!((u[(0, 1)] - ONE).norm() < 1e-12);
        assert!((u[(2, 2)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn exp_map_matches_taylor_series_for_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [
            GateKind::GeneralReal,
            GateKind::GeneralComplex,
            GateKind::AncillaReal,
            GateKind::AncillaComplex,
        ] {
            let d = 1 << kind.arity();
            let theta: Vec<f64> = (0..kind.param_count())
                .map(|_| rng.random_range(-0.4..0.4))
                .collect();
            let mut ih = SquareMatrix::zeros(d);
            for (k, &t) in theta.iter().enumerate() {
                let g = generator(d, !kind.is_real(), k).scale(C64::new(0.0, t));
                ih = &ih + &g;
            }
            let oracle = taylor_exp(&ih, 40);
            let u = build_unitary(kind, &theta, false).unwrap();
            assert!(u.max_abs_diff(&oracle) < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn simple_real_derivative_at_zero() {
        let (_, grads) = build_unitary_and_grads(GateKind::SimpleReal, &[0.0, 0.0], false).unwrap();
        let expect =
            &standard::cnot() * &standard::ry_derivative(0.0).kron(&SquareMatrix::identity(2));
        assert!(grads[0].max_abs_diff(&expect) < 1e-15);
        // dRy/dθ at 0 = [[0, -1/2], [1/2, 0]]
        assert!((grads[0][(2, 0)] - C64::new(0.0, 0.0)).norm() < 1e-15);
        assert!((grads[0][(0, 2)] - C64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn general_complex_derivative_at_zero_is_i_times_generator() {
        let (_, grads) =
            build_unitary_and_grads(GateKind::GeneralComplex, &[0.0; 15], false).unwrap();
        for (k, g) in grads.iter().enumerate() {
            let expect = generator(4, true, k).scale(C64::new(0.0, 1.0));
            assert!(g.max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn all_kinds_unitary_real_and_fd_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for kind in GateKind::ALL {
            for draw in 0..100 {
                let params = random_params(kind, &mut rng);
                let reversed = draw % 2 == 1 && kind.family() == Family::Simple;
                let (u, grads) = build_unitary_and_grads(kind, &params, reversed).unwrap();
                assert!(u.unitarity_deviation() < 1e-10, "{kind:?}");
                if kind.is_real() {
                    assert!(u.max_imag() < 1e-12);
                }
                // Fewer FD checks for the 63-parameter kind keeps this quick.
                if kind == GateKind::AncillaComplex && draw % 10 != 0 {
                    continue;
                }
                let fd = fd_grads(kind, &params, reversed, 1e-6);
                for (k, (g, f)) in grads.iter().zip(&fd).enumerate() {
                    let rel = (g - f).frobenius_norm() / g.frobenius_norm().max(1e-12);
                    assert!(rel < 1e-5, "{kind:?} param {k}: rel {rel:e}");
                }
            }
        }
    }

    #[test]
    fn determinants_are_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let gr = build_unitary(
                GateKind::GeneralReal,
                &random_params(GateKind::GeneralReal, &mut rng),
                false,
            )
            .unwrap();
            assert!((gr.determinant() - ONE).norm() < 1e-8);
            let gc = build_unitary(
                GateKind::GeneralComplex,
                &random_params(GateKind::GeneralComplex, &mut rng),
                false,
            )
            .unwrap();
            assert!((gc.determinant() - ONE).norm() < 1e-8);
        }
    }

    #[test]
    fn param_count_mismatch_is_reported() {
        for kind in GateKind::ALL {
            let err = build_unitary(kind, &[0.1; 3], false).unwrap_err();
            if kind.param_count() != 3 {
                assert!(matches!(err, Error::ParamCountMismatch { .. }));
            }
        }
        assert_eq!(
            GateKind::ALL.map(GateKind::param_count),
            [2, 6, 6, 15, 28, 63]
        );
    }

    #[test]
    fn measurement_rotation_identity_and_flip() {
        let (m, _) = measurement_rotation_matrix(Field::Real, &[0.0]).unwrap();
        assert_eq!(m, SquareMatrix::identity(2));
        let (m, _) = measurement_rotation_matrix(Field::Complex, &[0.0; 3]).unwrap();
        assert!(m.max_abs_diff(&SquareMatrix::identity(2)) < 1e-15);
        let (m, _) = measurement_rotation_matrix(Field::Real, &[PI]).unwrap();
        let out = Statevector::zero(1).applied(&m, &[0]).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
        assert!(measurement_rotation_matrix(Field::Real, &[f64::NAN]).is_err());
        assert!(measurement_rotation_matrix(Field::Complex, &[0.0]).is_err());
    }

    #[test]
    fn measurement_rotation_matches_series_oracle() {
        // Rz(a)Ry(b)Rz(c) = exp(-i a Z/2) exp(-i b Y/2) exp(-i c Z/2)
        let z = SquareMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let y = SquareMatrix::from_row_major(
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        );
        let angles = [0.7, -2.1, 1.3];
        let ex = |g: &SquareMatrix, t: f64| taylor_exp(&g.scale(C64::new(0.0, -t / 2.0)), 40);
        let oracle = &(&ex(&z, angles[0]) * &ex(&y, angles[1])) * &ex(&z, angles[2]);
        let (m, grads) = measurement_rotation_matrix(Field::Complex, &angles).unwrap();
        assert!(m.max_abs_diff(&oracle) < 1e-12);
        assert_eq!(grads.len(), 3);
    }

    #[test]
    fn native_decomposition_reproduces_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for reversed in [false, true] {
            let params = random_params(GateKind::SimpleReal, &mut rng);
            let block = UnitaryBlock {
                kind: GateKind::SimpleReal,
                params: params.clone(),
                wires: vec![0, 1],
                cnot_reversed: reversed,
            };
            let gates = decompose_simple_to_native(&block).unwrap();
            let (control, target) = if reversed { (1, 0) } else { (0, 1) };
            assert_eq!(
                gates,
                vec![
                    NativeGate::Ry {
                        angle: params[0],
                        wire: 0
                    },
                    NativeGate::Ry {
                        angle: params[1],
                        wire: 1
                    },
                    NativeGate::Cx { control, target },
                ]
            );
            // Compare columns by applying to every basis state.
            let u = block.unitary().unwrap();
            for b in 0..4 {
                let mut s = Statevector::basis(2, b);
                for g in &gates {
                    s.apply_unitary(&g.matrix(), &g.wires()).unwrap();
                }
                let expect = Statevector::basis(2, b).applied(&u, &[0, 1]).unwrap();
                assert!(s.max_abs_diff(&expect) < 1e-12);
            }
        }
        let general = UnitaryBlock {
            kind: GateKind::GeneralReal,
            params: vec![0.0; 6],
            wires: vec![0, 1],
            cnot_reversed: false,
        };
        assert!(matches!(
            decompose_simple_to_native(&general),
            Err(Error::UnsupportedKind(GateKind::GeneralReal))
        ));
    }
}

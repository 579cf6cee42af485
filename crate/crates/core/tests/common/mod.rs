// SPDX-License-Identifier: Apache-2.0

//! Shared helpers for integration tests: random draws and a dense matrix oracle.

#![allow(dead_code)]

use hqc_core::grad::{cost, cost_and_grad, finite_diff_grad, FD_STEP};
use hqc_core::linalg::{SquareMatrix, C64};
use hqc_core::sim::{DensityMatrix, Statevector};
use hqc_core::topology::{ClassifierModel, ParamVector};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
    let amps = (0..1usize << n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Statevector::from_unnormalized(amps).unwrap()
}

pub fn random_params(model: &ClassifierModel, scale: f64, rng: &mut ChaCha8Rng) -> ParamVector {
    ParamVector::new(
        (0..model.n_params)
            .map(|_| rng.random_range(-scale..scale))
            .collect(),
    )
}

/// Full `2^n x 2^n` matrix of `u` acting on `wires`, built entry by entry.
pub fn embed(u: &SquareMatrix, wires: &[usize], n: usize) -> SquareMatrix {
    let dim = 1usize << n;
    let local = |i: usize| {
        wires
            .iter()
            .fold(0, |acc, &w| (acc << 1) | ((i >> (n - 1 - w)) & 1))
    };
    let mask: usize = wires.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    let mut out = SquareMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & !mask == j & !mask {
                out[(i, j)] = u[(local(i), local(j))];
            }
        }
    }
    out
}

fn mat_vec(m: &SquareMatrix, v: &[C64]) -> Vec<C64> {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// `M_θ(ψ)` by dense matrix-vector products over the full register, ancillas included.
pub fn dense_expectation(
    model: &ClassifierModel,
    params: &ParamVector,
    input: &Statevector,
) -> f64 {
    let n = model.n_qubits;
    let n_anc = n - model.n_data_qubits;
    // ψ ⊗ |0..0⟩ on the ancillas: data index shifted above the ancilla bits
    let mut psi = vec![C64::new(0.0, 0.0); 1 << n];
    for (i, a) in input.amplitudes().iter().enumerate() {
        psi[i << n_anc] = *a;
    }
    for block in model.unitary_blocks(params).unwrap() {
        psi = mat_vec(&embed(&block.unitary().unwrap(), &block.wires, n), &psi);
    }
    let meas = model.measurement_rotation(params).unwrap();
    psi = mat_vec(&embed(&meas.matrix().unwrap(), &[meas.qubit], n), &psi);
    psi.iter()
        .enumerate()
        .filter(|(i, _)| (i >> (n - 1 - model.readout_qubit)) & 1 == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// At the default step, central differences of an O(1) cost carry roundoff near 2e-10, which
/// alone is a 1e-4 relative error on a coordinate of size 2e-6; relative error is therefore
/// measured against a magnitude floor of 1e-5. Smaller coordinates are covered by
/// [`five_point`], whose absolute error is near 1e-13.
pub const REL_FLOOR: f64 = 1e-5;

/// Fourth-order central stencil at step 1e-3.
pub fn five_point(m: &ClassifierModel, p: &ParamVector, batch: &[(Statevector, u8)]) -> Vec<f64> {
    let h = 1e-3;
    let mut q = p.clone();
    (0..p.len())
        .map(|k| {
            let x = p.as_slice()[k];
            let mut at = |t: f64| {
                q.as_mut_slice()[k] = x + t * h;
                let c = cost(m, &q, view(batch)).unwrap();
                q.as_mut_slice()[k] = x;
                c
            };
            (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
        })
        .collect()
}

pub fn batch_of(n: usize, size: usize, r: &mut ChaCha8Rng) -> Vec<(Statevector, u8)> {
    (0..size)
        .map(|_| (random_state(n, r), r.random_range(0..2u8)))
        .collect()
}

pub fn view(b: &[(Statevector, u8)]) -> impl Iterator<Item = (&Statevector, u8)> {
    b.iter().map(|(s, y)| (s, *y))
}

pub fn check_against_fd(
    m: &ClassifierModel,
    p: &ParamVector,
    batch: &[(Statevector, u8)],
) -> (f64, f64) {
    let exact = cost_and_grad(m, p, view(batch)).unwrap();
    let fd = finite_diff_grad(m, p, view(batch), FD_STEP).unwrap();
    assert_eq!(exact.grad.len(), m.n_params);
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for (g, f) in exact.grad.iter().zip(&fd) {
        assert!(g.is_finite());
        let abs = (g - f).abs();
        max_abs = max_abs.max(abs);
        max_rel = max_rel.max(abs / g.abs().max(f.abs()).max(REL_FLOOR));
    }
    for (g, f) in exact.grad.iter().zip(five_point(m, p, batch)) {
        let rel = (g - f).abs() / g.abs().max(f.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    }
    (max_abs, max_rel)
}

/// Bits of `i` on `wires`, first wire most significant.
pub fn bits_of(i: usize, wires: &[usize], n: usize) -> usize {
    wires
        .iter()
        .fold(0, |acc, &w| (acc << 1) | ((i >> (n - 1 - w)) & 1))
}

/// `ρ_A[a, b] = Σ_e ρ[(a, e), (b, e)]` by visiting every pair of full indices.
pub fn brute_partial_trace(rho: &DensityMatrix, keep: &[usize]) -> SquareMatrix {
    let n = rho.n_qubits();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let full = rho.to_matrix();
    let mut out = SquareMatrix::zeros(1 << keep.len());
    for i in 0..1usize << n {
        for j in 0..1usize << n {
            if bits_of(i, &rest, n) == bits_of(j, &rest, n) {
                out[(bits_of(i, keep, n), bits_of(j, keep, n))] += full[(i, j)];
            }
        }
    }
    out
}

/// Von Neumann entropy (bits) of the cut `keep | rest` from the singular values of the
/// reshaped amplitude matrix.
pub fn schmidt_entropy(state: &Statevector, keep: &[usize]) -> f64 {
    let n = state.n_qubits();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let mut m = DMatrix::<C64>::zeros(1 << keep.len(), 1 << rest.len());
    for (i, a) in state.amplitudes().iter().enumerate() {
        m[(bits_of(i, keep, n), bits_of(i, &rest, n))] = *a;
    }
    m.singular_values()
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum()
}

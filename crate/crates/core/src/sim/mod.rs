// SPDX-License-Identifier: Apache-2.0

//! Exact statevector and density-matrix simulation of few-qubit registers.

mod density;
pub(crate) mod kernel;
mod statevector;

pub use density::DensityMatrix;
pub use statevector::{Statevector, UNITARY_TOL};

pub(crate) use density::{
    conjugate, depolarize_in_place, left_multiply, partial_trace_unchecked, prob_zero_dm,
    right_multiply,
};
pub(crate) use statevector::{prob_zero, reduce_pure, sample_binomial};

use crate::error::{Error, Result};

/// Largest register accepted by the public constructors.
pub const MAX_QUBITS: usize = 12;

/// Maximum over bipartitions `A|B` of `S(ρ_A)` in bits, for a pure state.
///
/// Uses `S(ρ_A) = S(ρ_B)`, so only subsets with `|A| <= n/2` are visited, and at `|A| = n/2`
/// only those containing qubit 0.
pub fn max_bipartite_entropy(state: &Statevector) -> Result<f64> {
    let n = state.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            limit: MAX_QUBITS,
        });
    }
    let mut best = 0.0f64;
    let mut keep = Vec::with_capacity(n);
    for mask in 1usize..(1 << n) - 1 {
        let size = mask.count_ones() as usize;
        if 2 * size > n || (2 * size == n && mask & (1 << (n - 1)) == 0) {
            continue;
        }
        keep.clear();
        // bit (n-1-q) of the mask selects qubit q
        keep.extend((0..n).filter(|q| mask & (1 << (n - 1 - q)) != 0));
        let s = reduce_pure(state.amplitudes(), n, &keep).von_neumann_entropy();
        best = best.max(s);
    }
    Ok(best)
}

// SPDX-License-Identifier: Apache-2.0

//! Bit-indexed kernels shared by the statevector and density-matrix backends.
//!
//! Qubit `q` of an `n`-qubit register lives at bit `n - 1 - q` of the basis index, so qubit 0
//! is the most significant bit. A gate acting on `wires = [w0, w1, ..]` sees `w0` as the most
//! significant bit of its local index.

use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, C64, ZERO};

pub(crate) const MAX_GATE_DIM: usize = 8;

/// Precomputed addressing for a gate on a fixed set of wires.
pub(crate) struct WireMap {
    /// Offset of each local basis state relative to a base index.
    offsets: [usize; MAX_GATE_DIM],
    /// Bit positions occupied by the gate, ascending.
    positions: [usize; 3],
    k: usize,
    n: usize,
}

impl WireMap {
    pub(crate) fn new(n: usize, wires: &[usize]) -> Self {
        let k = wires.len();
        debug_assert!((1..=3).contains(&k));
        let mut offsets = [0usize; MAX_GATE_DIM];
        for (l, off) in offsets.iter_mut().enumerate().take(1 << k) {
            for (j, &w) in wires.iter().enumerate() {
                if (l >> (k - 1 - j)) & 1 == 1 {
                    *off |= 1 << (n - 1 - w);
                }
            }
        }
        let mut positions = [usize::MAX; 3];
        for (p, &w) in positions.iter_mut().zip(wires) {
            *p = n - 1 - w;
        }
        positions[..k].sort_unstable();
        Self {
            offsets,
            positions,
            k,
            n,
        }
    }

    #[inline]
    pub(crate) fn dim(&self) -> usize {
        1 << self.k
    }

    #[inline]
    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets[..1 << self.k]
    }

    /// Iterates over basis indices with every gate bit cleared.
    #[inline]
    pub(crate) fn bases(&self) -> impl Iterator<Item = usize> + '_ {
        let positions = &self.positions[..self.k];
        (0..1usize << (self.n - self.k)).map(move |mut i| {
            for &p in positions {
                let low = i & ((1 << p) - 1);
                i = ((i ^ low) << 1) | low;
            }
            i
        })
    }
}

pub(crate) fn check_wires(wires: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= n_qubits {
            return Err(Error::WireOutOfRange { wire: w, n_qubits });
        }
        if wires[..i].contains(&w) {
            return Err(Error::DuplicateWire(w));
        }
    }
    Ok(())
}

/// `amps <- (u on wires) amps`. No validation.
pub(crate) fn apply_matrix(amps: &mut [C64], n: usize, u: &SquareMatrix, wires: &[usize]) {
    let map = WireMap::new(n, wires);
    apply_with_map(amps, u, &map);
}

pub(crate) fn apply_with_map(amps: &mut [C64], u: &SquareMatrix, map: &WireMap) {
    let d = map.dim();
    debug_assert_eq!(u.dim(), d);
    let m = u.as_slice();
    let offs = map.offsets();
    let mut tmp = [ZERO; MAX_GATE_DIM];
    match d {
        2 => {
            let (o0, o1) = (offs[0], offs[1]);
            for base in map.bases() {
                let a0 = amps[base + o0];
                let a1 = amps[base + o1];
                amps[base + o0] = m[0] * a0 + m[1] * a1;
                amps[base + o1] = m[2] * a0 + m[3] * a1;
            }
        }
        _ => {
            for base in map.bases() {
                for (t, &o) in tmp.iter_mut().zip(offs) {
                    *t = amps[base + o];
                }
                for (a, &o) in offs.iter().enumerate() {
                    let row = &m[a * d..(a + 1) * d];
                    let mut acc = ZERO;
                    for (x, y) in row.iter().zip(&tmp[..d]) {
                        acc += x * y;
                    }
                    amps[base + o] = acc;
                }
            }
        }
    }
}

/// `E[a, b] = Σ_rest conj(bra[a, rest]) * ket[b, rest]` over the gate's local index.
///
/// For `f = <bra| U |ket>` with `U` acting on `wires`, `∂f/∂θ = Σ_ab ∂U[a,b]/∂θ · E[a,b]`.
pub(crate) fn environment(bra: &[C64], ket: &[C64], n: usize, wires: &[usize]) -> SquareMatrix {
    let map = WireMap::new(n, wires);
    let d = map.dim();
    let offs = map.offsets();
    let mut e = SquareMatrix::zeros(d);
    let es = e.as_mut_slice();
    let mut bt = [ZERO; MAX_GATE_DIM];
    let mut kt = [ZERO; MAX_GATE_DIM];
    for base in map.bases() {
        for l in 0..d {
            bt[l] = bra[base + offs[l]].conj();
            kt[l] = ket[base + offs[l]];
        }
        for a in 0..d {
            for b in 0..d {
                es[a * d + b] += bt[a] * kt[b];
            }
        }
    }
    e
}

/// Maps a local index over `wires` (w0 most significant) to its bit pattern in an `n`-qubit index.
#[inline]
pub(crate) fn scatter_bits(local: usize, wires: &[usize], n: usize) -> usize {
    let k = wires.len();
    let mut out = 0;
    for (j, &w) in wires.iter().enumerate() {
        if (local >> (k - 1 - j)) & 1 == 1 {
            out |= 1 << (n - 1 - w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_skip_gate_bits() {
        let map = WireMap::new(3, &[1]);
        let bases: Vec<usize> = map.bases().collect();
        // wire 1 is bit 1
        assert_eq!(bases, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn offsets_follow_wire_order() {
        let map = WireMap::new(3, &[2, 0]);
        // local bit 1 (msb) -> wire 2 -> bit 0; local bit 0 -> wire 0 -> bit 2
        assert_eq!(map.offsets(), &[0, 0b100, 0b001, 0b101]);
    }

    #[test]
    fn duplicate_and_range_checks() {
        assert!(matches!(
            check_wires(&[0, 0], 2),
            Err(Error::DuplicateWire(0))
        ));
        assert!(matches!(
            check_wires(&[3], 2),
            Err(Error::WireOutOfRange {
                wire: 3,
                n_qubits: 2
            })
        ));
        assert!(check_wires(&[1, 0], 2).is_ok());
    }
}

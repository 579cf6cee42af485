// SPDX-License-Identifier: Apache-2.0

//! Synthetic entangled-state classes: class `y` stacks `y` random building blocks on `|0..0⟩`.
//!
//! A building block applies `Rz(α) Ry(β) Rz(γ)` with independent uniform angles in `(-π, π]`
//! to every qubit, then `CNOT(i, j)` for every `i < j` in lexicographic order.

use std::f64::consts::PI;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::standard;
use crate::linalg::C64;
use crate::sim::Statevector;

use super::{split_labels, EncodedDataset, SplitScheme};

pub const QUANTUM_MAGIC: [u8; 4] = *b"HQCD";
pub const QUANTUM_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 4 + 8;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumClass {
    pub n_qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub states: Vec<Statevector>,
}

/// One building block with the given `(α, β, γ)` per qubit.
pub fn apply_building_block(state: &mut Statevector, angles: &[[f64; 3]]) -> Result<()> {
    let n = state.n_qubits();
    if angles.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: angles.len(),
        });
    }
    for (q, a) in angles.iter().enumerate() {
        state.apply_unitary(&standard::zyz(a), &[q])?;
    }
    let cx = standard::cnot();
    for i in 0..n {
        for j in i + 1..n {
            state.apply_unitary(&cx, &[i, j])?;
        }
    }
    Ok(())
}

fn uniform_angle(rng: &mut ChaCha8Rng) -> f64 {
    // (-π, π]
    PI - 2.0 * PI * rng.random::<f64>()
}

/// Sample `index` of a class draws from its own ChaCha stream, so samples are independent of
/// how many others are generated.
pub fn gen_quantum_class(
    n_qubits: usize,
    depth: usize,
    count: usize,
    seed: u64,
) -> Result<QuantumClass> {
    if depth == 0 || count == 0 {
        return Err(Error::InvalidConfig(
            "quantum class needs depth >= 1 and count >= 1".into(),
        ));
    }
    let states = (0..count)
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let mut state = Statevector::zero(n_qubits);
            for _ in 0..depth {
                let angles: Vec<[f64; 3]> = (0..n_qubits)
                    .map(|_| std::array::from_fn(|_| uniform_angle(&mut rng)))
                    .collect();
                apply_building_block(&mut state, &angles)?;
            }
            Ok(state)
        })
        .collect::<Result<_>>()?;
    Ok(QuantumClass {
        n_qubits,
        depth,
        seed,
        states,
    })
}

/// Binary dataset from two classes; the shallower class gets label 0. `test` and `val` rows are
/// held out per class.
pub fn quantum_task(
    a: &QuantumClass,
    b: &QuantumClass,
    test: usize,
    val: usize,
    seed: u64,
) -> Result<EncodedDataset> {
    if a.n_qubits != b.n_qubits || a.depth == b.depth {
        return Err(Error::InvalidConfig(
            "quantum task needs two distinct depths on the same register".into(),
        ));
    }
    let (lo, hi) = if a.depth < b.depth { (a, b) } else { (b, a) };
    let labels: Vec<u8> = std::iter::repeat_n(0, lo.states.len())
        .chain(std::iter::repeat_n(1, hi.states.len()))
        .collect();
    let split = split_labels(&labels, None, SplitScheme::PerClass { test, val }, seed)?;
    Ok(EncodedDataset {
        states: lo.states.iter().chain(&hi.states).cloned().collect(),
        labels,
        split,
    })
}

/// Little-endian: magic, version (u32), n_qubits (u32), count (u64), depth (u32), seed (u64),
/// then `count * 2^n` pairs of `f64` (re, im).
pub fn save_quantum_class(class: &QuantumClass, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&QUANTUM_MAGIC)?;
    w.write_all(&QUANTUM_VERSION.to_le_bytes())?;
    w.write_all(&(class.n_qubits as u32).to_le_bytes())?;
    w.write_all(&(class.states.len() as u64).to_le_bytes())?;
    w.write_all(&(class.depth as u32).to_le_bytes())?;
    w.write_all(&class.seed.to_le_bytes())?;
    for s in &class.states {
        for a in s.amplitudes() {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_quantum_class(path: impl AsRef<Path>) -> Result<QuantumClass> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let truncated = || Error::TruncatedFile(path.to_path_buf());
    if bytes.len() < HEADER_LEN {
        return Err(truncated());
    }
    if bytes[..4] != QUANTUM_MAGIC {
        return Err(Error::MagicMismatch {
            path: path.to_path_buf(),
            expected: u32::from_be_bytes(QUANTUM_MAGIC),
            found: u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")),
        });
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != QUANTUM_VERSION {
        return Err(Error::Version {
            found: version,
            expected: QUANTUM_VERSION,
        });
    }
    let n_qubits = u32_at(8) as usize;
    let count = u64_at(12) as usize;
    let depth = u32_at(20) as usize;
    let seed = u64_at(24);
    if n_qubits > crate::sim::MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits,
            limit: crate::sim::MAX_QUBITS,
        });
    }
    let dim = 1usize << n_qubits;
    let body = &bytes[HEADER_LEN..];
    if body.len() < count * dim * 16 {
        return Err(truncated());
    }
    let f64_at = |i: usize| f64::from_le_bytes(body[i..i + 8].try_into().expect("8 bytes"));
    let states = (0..count)
        .map(|s| {
            let amps = (0..dim)
                .map(|k| {
                    let at = (s * dim + k) * 16;
                    C64::new(f64_at(at), f64_at(at + 8))
                })
                .collect();
            Statevector::from_amplitudes(amps)
        })
        .collect::<Result<_>>()?;
    Ok(QuantumClass {
        n_qubits,
        depth,
        seed,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_angles_leave_zero_state() {
        let mut s = Statevector::zero(8);
        apply_building_block(&mut s, &[[0.0; 3]; 8]).unwrap();
        assert!(s.max_abs_diff(&Statevector::zero(8)) < 1e-15);
    }

    #[test]
    fn cnot_cascade_order_matters_and_is_lexicographic() {
        // X on qubit 0 then the cascade: CX(0,1) sets q1, CX(0,2) sets q2, CX(1,2) clears q2.
        let mut s = Statevector::zero(3);
        s.apply_unitary(&standard::pauli_x(), &[0]).unwrap();
        apply_building_block(&mut s, &[[0.0; 3]; 3]).unwrap();
        assert!((s.amplitudes()[0b110].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generation_is_deterministic_and_index_stable() {
        let a = gen_quantum_class(4, 2, 5, 9).unwrap();
        let b = gen_quantum_class(4, 2, 3, 9).unwrap();
        assert_eq!(a.states[..3], b.states[..]);
        assert_ne!(a.states[0], a.states[1]);
        assert!(a.states.iter().all(|s| (s.norm_sqr() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn binary_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.hqcd");
        let c = gen_quantum_class(3, 4, 6, 1).unwrap();
        save_quantum_class(&c, &p).unwrap();
        assert_eq!(load_quantum_class(&p).unwrap(), c);

        let mut bytes = std::fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 1);
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(
            load_quantum_class(&p),
            Err(Error::TruncatedFile(_))
        ));
        bytes[0] = b'X';
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(
            load_quantum_class(&p),
            Err(Error::MagicMismatch { .. })
        ));
    }

    #[test]
    fn task_labels_follow_depth() {
        let a = gen_quantum_class(2, 3, 10, 1).unwrap();
        let b = gen_quantum_class(2, 1, 10, 2).unwrap();
        let t = quantum_task(&a, &b, 4, 0, 0).unwrap();
        assert_eq!(t.labels[..10], [0; 10]);
        assert_eq!(t.states[0], b.states[0]);
        assert_eq!(t.count(super::super::Split::Test), 8);
    }
}

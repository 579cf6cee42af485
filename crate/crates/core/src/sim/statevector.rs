// SPDX-License-Identifier: Apache-2.0

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::kernel::{self, check_wires};
use super::{DensityMatrix, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, SquareMatrix, C64, ONE, ZERO};

/// Tolerance used when validating unitaries and normalization.
pub const UNITARY_TOL: f64 = 1e-10;

/// Dense pure state over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    /// Wraps amplitudes, checking the length is a power of two and the norm is 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                found: len,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let ns = norm_sqr(&amps);
        if (ns - 1.0).abs() > UNITARY_TOL {
            return Err(Error::NotNormalized { norm_sqr: ns });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let ns = norm_sqr(&amps);
        if ns == 0.0 || !ns.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: ns });
        }
        let inv = 1.0 / ns.sqrt();
        amps.iter_mut().for_each(|a| *a *= inv);
        Self::from_amplitudes(amps)
    }

    /// Tensor product of single-qubit states `(a0, a1)`, first entry on qubit 0.
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self> {
        let mut amps = vec![ONE];
        for q in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        Self::from_amplitudes(amps)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Applies a 1-, 2- or 3-qubit unitary to `wires` in wire order.
    pub fn apply_unitary(&mut self, u: &SquareMatrix, wires: &[usize]) -> Result<()> {
        self.check_gate(u, wires)?;
        kernel::apply_matrix(&mut self.amps, self.n_qubits, u, wires);
        Ok(())
    }

    /// Functional form of [`apply_unitary`](Self::apply_unitary).
    pub fn applied(&self, u: &SquareMatrix, wires: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary(u, wires)?;
        Ok(out)
    }

    fn check_gate(&self, u: &SquareMatrix, wires: &[usize]) -> Result<()> {
        if wires.is_empty() || wires.len() > 3 || u.dim() != 1 << wires.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << wires.len(),
                found: u.dim(),
            });
        }
        check_wires(wires, self.n_qubits)?;
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitaryMatrix { deviation });
        }
        Ok(())
    }

    /// Probability of measuring `qubit` in `|0⟩`.
    pub fn expectation_projector0(&self, qubit: usize) -> Result<f64> {
        check_wires(&[qubit], self.n_qubits)?;
        Ok(prob_zero(&self.amps, self.n_qubits, qubit))
    }

    /// Number of `0` outcomes in `shots` computational-basis measurements of `qubit`.
    pub fn sample_shots(&self, qubit: usize, shots: u64, rng_seed: u64) -> Result<u64> {
        let p0 = self.expectation_projector0(qubit)?;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        Ok(sample_binomial(shots, p0, &mut rng))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.amps.len();
        let mut rho = vec![ZERO; d * d];
        for (r, a) in self.amps.iter().enumerate() {
            for (c, b) in self.amps.iter().enumerate() {
                rho[r * d + c] = a * b.conj();
            }
        }
        DensityMatrix::from_raw(self.n_qubits, rho)
    }

    /// Reduced density matrix on `keep` (in the given order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_partition(keep, self.n_qubits)?;
        Ok(reduce_pure(&self.amps, self.n_qubits, keep))
    }

    /// Appends a fresh `|0⟩` qubit as the last (least significant) wire.
    pub fn with_ancilla(&self) -> Self {
        let mut amps = vec![ZERO; self.amps.len() * 2];
        for (i, a) in self.amps.iter().enumerate() {
            amps[2 * i] = *a;
        }
        Self {
            n_qubits: self.n_qubits + 1,
            amps,
        }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn prob_zero(amps: &[C64], n: usize, qubit: usize) -> f64 {
    let bit = 1usize << (n - 1 - qubit);
    amps.iter()
        .enumerate()
        .filter(|(k, _)| k & bit == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Draws `Binomial(shots, p)`, exact at the endpoints.
pub(crate) fn sample_binomial<R: rand::Rng>(shots: u64, p: f64, rng: &mut R) -> u64 {
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return shots;
    }
    Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

pub(crate) fn check_partition(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::InvalidPartition(format!(
            "kept set of size {} is not a nonempty proper subset of {n} qubits",
            keep.len()
        )));
    }
    check_wires(keep, n).map_err(|e| Error::InvalidPartition(e.to_string()))
}

/// `ρ_K[a,b] = Σ_t ψ[a,t] conj(ψ[b,t])`.
pub(crate) fn reduce_pure(amps: &[C64], n: usize, keep: &[usize]) -> DensityMatrix {
    let k = keep.len();
    let dk = 1usize << k;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kept_bits: Vec<usize> = (0..dk).map(|a| kernel::scatter_bits(a, keep, n)).collect();
    let traced_bits: Vec<usize> = (0..1usize << traced.len())
        .map(|t| kernel::scatter_bits(t, &traced, n))
        .collect();
    // Gather ψ as a dk x dt matrix, then ρ = Ψ Ψ†.
    let dt = traced_bits.len();
    let mut psi = vec![ZERO; dk * dt];
    for (a, &ka) in kept_bits.iter().enumerate() {
        for (t, &kt) in traced_bits.iter().enumerate() {
            psi[a * dt + t] = amps[ka | kt];
        }
    }
    let mut rho = vec![ZERO; dk * dk];
    for a in 0..dk {
        let ra = &psi[a * dt..(a + 1) * dt];
        for b in a..dk {
            let rb = &psi[b * dt..(b + 1) * dt];
            let v: C64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            rho[a * dk + b] = v;
            rho[b * dk + a] = v.conj();
        }
    }
    DensityMatrix::from_raw(k, rho)
}

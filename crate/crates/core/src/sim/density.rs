// SPDX-License-Identifier: Apache-2.0

use super::kernel::{self, check_wires};
use super::statevector::{check_partition, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, C64, ZERO};

/// Dense `2^n x 2^n` density matrix, row-major.
///
/// Stored as a `2n`-qubit vector: row bits are qubits `0..n`, column bits are qubits `n..2n`.
/// Conjugation `U ρ U†` is then `U` on the row wires and `conj(U)` on the column wires.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: Vec<C64>,
}

impl DensityMatrix {
    pub(crate) fn from_raw(n_qubits: usize, rho: Vec<C64>) -> Self {
        debug_assert_eq!(rho.len(), 1 << (2 * n_qubits));
        Self { n_qubits, rho }
    }

    /// Validates trace 1 and Hermiticity within 1e-10.
    pub fn from_matrix(m: SquareMatrix) -> Result<Self> {
        let d = m.dim();
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: d.next_power_of_two().max(2),
                found: d,
            });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > UNITARY_TOL || tr.im.abs() > UNITARY_TOL {
            return Err(Error::NotNormalized { norm_sqr: tr.re });
        }
        if m.hermiticity_deviation() > UNITARY_TOL {
            return Err(Error::InvalidConfig(
                "density matrix is not Hermitian".into(),
            ));
        }
        Ok(Self {
            n_qubits: d.trailing_zeros() as usize,
            rho: m.as_slice().to_vec(),
        })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            rho[i * d + i] = C64::new(1.0 / d as f64, 0.0);
        }
        Self { n_qubits, rho }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.rho
    }

    pub fn to_matrix(&self) -> SquareMatrix {
        SquareMatrix::from_row_major(self.dim(), self.rho.clone())
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.rho[i * d + i]).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ Hermitian: tr(ρ²) = Σ |ρ_ij|²
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `ρ <- U ρ U†` on `wires`.
    pub fn apply_unitary(&mut self, u: &SquareMatrix, wires: &[usize]) -> Result<()> {
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
        conjugate(&mut self.rho, self.n_qubits, u, wires);
        Ok(())
    }

    pub fn applied(&self, u: &SquareMatrix, wires: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary(u, wires)?;
        Ok(out)
    }

    /// Depolarizing channel `(1 - λ') ρ + λ' I / 2^n`; `λ' = 0` is noiseless.
    pub fn depolarize(&mut self, noise: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::NoiseOutOfRange(noise));
        }
        depolarize_in_place(&mut self.rho, self.n_qubits, noise);
        Ok(())
    }

    pub fn depolarized(&self, noise: f64) -> Result<Self> {
        let mut out = self.clone();
        out.depolarize(noise)?;
        Ok(out)
    }

    /// Reduced state on `keep`, in the given order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_partition(keep, self.n_qubits)?;
        Ok(partial_trace_unchecked(&self.rho, self.n_qubits, keep))
    }

    /// `tr(|0⟩⟨0|_qubit ρ)`.
    pub fn expectation_projector0(&self, qubit: usize) -> Result<f64> {
        check_wires(&[qubit], self.n_qubits)?;
        Ok(prob_zero_dm(&self.rho, self.n_qubits, qubit))
    }

    /// `ρ ⊗ |0⟩⟨0|` with the new qubit as the last wire.
    pub fn with_ancilla(&self) -> Self {
        let d = self.dim();
        let nd = 2 * d;
        let mut rho = vec![ZERO; nd * nd];
        for r in 0..d {
            for c in 0..d {
                rho[(2 * r) * nd + 2 * c] = self.rho[r * d + c];
            }
        }
        Self {
            n_qubits: self.n_qubits + 1,
            rho,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = self.to_matrix().hermitian_eigen();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// `-Σ p log2 p` over eigenvalues clamped to `[0, 1]`, with `0 log 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_bits(&self.eigenvalues())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `α ρ1 + (1 - α) ρ2`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        Self {
            n_qubits: self.n_qubits,
            rho: self
                .rho
                .iter()
                .zip(&other.rho)
                .map(|(a, b)| a * alpha + b * (1.0 - alpha))
                .collect(),
        }
    }
}

pub(crate) fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// `ρ <- U ρ U†` without validation.
pub(crate) fn conjugate(rho: &mut [C64], n: usize, u: &SquareMatrix, wires: &[usize]) {
    left_multiply(rho, n, u, wires);
    let cols: smallvec_wires::Wires = wires.iter().map(|w| w + n).collect();
    kernel::apply_matrix(rho, 2 * n, &u.conj(), &cols);
}

/// `ρ <- (U ⊗ I) ρ`.
pub(crate) fn left_multiply(rho: &mut [C64], n: usize, u: &SquareMatrix, wires: &[usize]) {
    kernel::apply_matrix(rho, 2 * n, u, wires);
}

/// `ρ <- ρ (U ⊗ I)`.
pub(crate) fn right_multiply(rho: &mut [C64], n: usize, u: &SquareMatrix, wires: &[usize]) {
    // (ρ U)_{rc} = Σ_c' ρ_{rc'} U_{c'c}: U^T acting on the column index.
    let cols: smallvec_wires::Wires = wires.iter().map(|w| w + n).collect();
    kernel::apply_matrix(rho, 2 * n, &u.transpose(), &cols);
}

pub(crate) fn depolarize_in_place(rho: &mut [C64], n: usize, noise: f64) {
    let d = 1usize << n;
    let keep = 1.0 - noise;
    rho.iter_mut().for_each(|z| *z *= keep);
    let add = noise / d as f64;
    for i in 0..d {
        rho[i * d + i] += add;
    }
}

pub(crate) fn prob_zero_dm(rho: &[C64], n: usize, qubit: usize) -> f64 {
    let d = 1usize << n;
    let bit = 1usize << (n - 1 - qubit);
    (0..d)
        .filter(|i| i & bit == 0)
        .map(|i| rho[i * d + i].re)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

pub(crate) fn partial_trace_unchecked(rho: &[C64], n: usize, keep: &[usize]) -> DensityMatrix {
    let d = 1usize << n;
    let k = keep.len();
    let dk = 1usize << k;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kept_bits: Vec<usize> = (0..dk).map(|a| kernel::scatter_bits(a, keep, n)).collect();
    let traced_bits: Vec<usize> = (0..1usize << traced.len())
        .map(|t| kernel::scatter_bits(t, &traced, n))
        .collect();
    let mut out = vec![ZERO; dk * dk];
    for (a, &ka) in kept_bits.iter().enumerate() {
        for (b, &kb) in kept_bits.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_bits {
                acc += rho[(ka | t) * d + (kb | t)];
            }
            out[a * dk + b] = acc;
        }
    }
    DensityMatrix::from_raw(k, out)
}

/// Inline storage for shifted wire lists (at most three wires).
pub(crate) mod smallvec_wires {
    #[derive(Default)]
    pub(crate) struct Wires {
        buf: [usize; 3],
        len: usize,
    }

    impl FromIterator<usize> for Wires {
        fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
            let mut w = Wires::default();
            for x in iter {
                w.buf[w.len] = x;
                w.len += 1;
            }
            w
        }
    }

    impl std::ops::Deref for Wires {
        type Target = [usize];
        fn deref(&self) -> &[usize] {
            &self.buf[..self.len]
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

//! TTN and MERA classifier layouts.
//!
//! Layout table for `N = 2^L` data wires. Every TTN layer pairs neighbouring live wires
//! `(live[2i], live[2i+1])`; block `i` of a layer keeps its upper wire when `i` is even and
//! its lower wire when `i` is odd, so survivors drift toward each other. A block whose survivor
//! is its lower-indexed wire has its CNOT reversed. For `N = 8` this yields
//!
//! | block | wires | survivor | reversed |
//! |-------|-------|----------|----------|
//! | U1    | 0,1   | 1        |          |
//! | U2    | 2,3   | 2        | yes      |
//! | U3    | 4,5   | 5        |          |
//! | U4    | 6,7   | 6        | yes      |
//! | U5    | 1,2   | 2        |          |
//! | U6    | 5,6   | 5        | yes      |
//! | U7    | 2,5   | 5        |          |
//!
//! with readout on wire 5. A MERA adds, before each TTN layer with more than one block, a
//! disentangler on every pair of wires straddling two neighbouring blocks of that layer.
//! Ancilla kinds give block `b` the extra wire `N + b`, retired right after the block.

mod engine;
mod qasm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Family, Field, GateKind, MeasurementRotation, UnitaryBlock};
use crate::sim::Statevector;

pub use engine::{
    noisy_expectation, predict_expectation_with, Evaluator, GradAccumulator, Strategy,
};
pub use qasm::{export_qasm, parse_qasm, simulate_native, QasmProgram};

/// Largest data register accepted by the builders.
pub const MAX_DATA_QUBITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Ttn,
    Mera,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRole {
    Tree,
    Disentangler,
}

/// Structural description of one unitary block inside a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub role: BlockRole,
    /// TTN layer this block belongs to (disentanglers carry the layer they precede).
    pub layer: usize,
    /// Wires in local order; the ancilla (if any) is last.
    pub wires: Vec<usize>,
    pub cnot_reversed: bool,
    /// Wires discarded right after this block.
    pub retires: Vec<usize>,
    pub param_offset: usize,
}

/// Flat parameter vector: all block parameters in block order, then the measurement rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub layout: Layout,
    pub kind: GateKind,
    pub n_data_qubits: usize,
    /// Data wires plus one ancilla per block for ancilla kinds.
    pub n_qubits: usize,
    pub blocks: Vec<Block>,
    pub readout_qubit: usize,
    pub measurement_offset: usize,
    pub n_params: usize,
}

impl ClassifierModel {
    pub fn build(layout: Layout, n_data_qubits: usize, kind: GateKind) -> Result<Self> {
        match layout {
            Layout::Ttn => build_ttn(n_data_qubits, kind),
            Layout::Mera => build_mera(n_data_qubits, kind),
        }
    }

    pub fn measurement_field(&self) -> Field {
        self.kind.field()
    }

    pub fn block_params<'a>(&self, params: &'a [f64], block: usize) -> &'a [f64] {
        let off = self.blocks[block].param_offset;
        &params[off..off + self.kind.param_count()]
    }

    pub fn measurement_params<'a>(&self, params: &'a [f64]) -> &'a [f64] {
        &params[self.measurement_offset..self.n_params]
    }

    pub fn check_params(&self, params: &ParamVector) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                found: params.len(),
            });
        }
        Ok(())
    }

    /// Blocks with their parameters attached.
    pub fn unitary_blocks(&self, params: &ParamVector) -> Result<Vec<UnitaryBlock>> {
        self.check_params(params)?;
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| UnitaryBlock {
                kind: self.kind,
                params: self.block_params(params.as_slice(), i).to_vec(),
                wires: b.wires.clone(),
                cnot_reversed: b.cnot_reversed,
            })
            .collect())
    }

    pub fn measurement_rotation(&self, params: &ParamVector) -> Result<MeasurementRotation> {
        self.check_params(params)?;
        Ok(MeasurementRotation {
            field: self.measurement_field(),
            params: self.measurement_params(params.as_slice()).to_vec(),
            qubit: self.readout_qubit,
        })
    }

    pub fn count_role(&self, role: BlockRole) -> usize {
        self.blocks.iter().filter(|b| b.role == role).count()
    }

    pub fn n_layers(&self) -> usize {
        self.n_data_qubits.trailing_zeros() as usize
    }

    /// Checks that no block touches a wire retired by an earlier block and that exactly the
    /// readout wire survives.
    pub fn check_causality(&self) -> Result<()> {
        let mut retired = vec![false; self.n_qubits];
        for (i, b) in self.blocks.iter().enumerate() {
            if let Some(&w) = b.wires.iter().find(|&&w| retired[w]) {
                return Err(Error::InvalidConfig(format!(
                    "block {i} acts on retired wire {w}"
                )));
            }
            for &w in &b.retires {
                retired[w] = true;
            }
        }
        let live: Vec<usize> = (0..self.n_qubits).filter(|&w| !retired[w]).collect();
        if live != [self.readout_qubit] {
            return Err(Error::InvalidConfig(format!(
                "surviving wires {live:?} != readout {}",
                self.readout_qubit
            )));
        }
        Ok(())
    }

    /// `M_θ(ψ)`: probability of `|0⟩` on the readout wire after the circuit and measurement
    /// rotation. Ancillas are appended in `|0⟩` automatically.
    pub fn predict_expectation(&self, params: &ParamVector, input: &Statevector) -> Result<f64> {
        predict_expectation_with(self, params, input, Strategy::Adaptive)
    }

    /// Label 1 iff the expectation is at least 0.5.
    pub fn predict_label(&self, params: &ParamVector, input: &Statevector) -> Result<u8> {
        Ok(label_from_expectation(
            self.predict_expectation(params, input)?,
        ))
    }

    /// Majority vote over `shots` samples of the readout; outcome `0` votes for label 1.
    pub fn predict_label_sampled(
        &self,
        params: &ParamVector,
        input: &Statevector,
        shots: u64,
        seed: u64,
    ) -> Result<u8> {
        use rand::SeedableRng;
        let p0 = self.predict_expectation(params, input)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Ok(majority_label(
            crate::sim::sample_binomial(shots, p0, &mut rng),
            shots,
        ))
    }
}

pub fn label_from_expectation(p: f64) -> u8 {
    u8::from(p >= 0.5)
}

/// Ties go to label 1, matching [`label_from_expectation`].
pub fn majority_label(zeros: u64, shots: u64) -> u8 {
    u8::from(2 * zeros >= shots)
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() || n > MAX_DATA_QUBITS {
        return Err(Error::UnsupportedSize(n));
    }
    Ok(())
}

struct Builder {
    kind: GateKind,
    n_data: usize,
    blocks: Vec<Block>,
    offset: usize,
}

impl Builder {
    fn push(
        &mut self,
        role: BlockRole,
        layer: usize,
        pair: (usize, usize),
        survivor: Option<usize>,
    ) {
        let (w0, w1) = pair;
        let mut wires = vec![w0, w1];
        let mut retires = Vec::new();
        if let Some(s) = survivor {
            retires.push(if s == w0 { w1 } else { w0 });
        }
        if self.kind.family() == Family::Ancilla {
            let anc = self.n_data + self.blocks.len();
            wires.push(anc);
            retires.push(anc);
        }
        let cnot_reversed = self.kind.family() == Family::Simple && survivor == Some(w0);
        self.blocks.push(Block {
            role,
            layer,
            wires,
            cnot_reversed,
            retires,
            param_offset: self.offset,
        });
        self.offset += self.kind.param_count();
    }

    fn finish(self, layout: Layout, readout: usize) -> ClassifierModel {
        let n_anc = if self.kind.family() == Family::Ancilla {
            self.blocks.len()
        } else {
            0
        };
        let n_params = self.offset + MeasurementRotation::param_count(self.kind.field());
        ClassifierModel {
            layout,
            kind: self.kind,
            n_data_qubits: self.n_data,
            n_qubits: self.n_data + n_anc,
            blocks: self.blocks,
            readout_qubit: readout,
            measurement_offset: self.offset,
            n_params,
        }
    }
}

fn build_layers(n: usize, kind: GateKind, with_disentanglers: bool) -> Result<ClassifierModel> {
    check_size(n)?;
    let mut b = Builder {
        kind,
        n_data: n,
        blocks: Vec::new(),
        offset: 0,
    };
    let mut live: Vec<usize> = (0..n).collect();
    let mut layer = 0;
    while live.len() > 1 {
        let pairs: Vec<(usize, usize)> = live.chunks(2).map(|c| (c[0], c[1])).collect();
        if with_disentanglers {
            for w in pairs.windows(2) {
                b.push(BlockRole::Disentangler, layer, (w[0].1, w[1].0), None);
            }
        }
        let mut next = Vec::with_capacity(pairs.len());
        for (i, &(w0, w1)) in pairs.iter().enumerate() {
            let survivor = if i % 2 == 0 { w1 } else { w0 };
            b.push(BlockRole::Tree, layer, (w0, w1), Some(survivor));
            next.push(survivor);
        }
        live = next;
        layer += 1;
    }
    let layout = if with_disentanglers {
        Layout::Mera
    } else {
        Layout::Ttn
    };
    Ok(b.finish(layout, live[0]))
}

/// Binary-tree classifier: `N - 1` blocks, each discarding one of its outputs.
pub fn build_ttn(n_data_qubits: usize, kind: GateKind) -> Result<ClassifierModel> {
    build_layers(n_data_qubits, kind, false)
}

/// TTN plus a layer of disentanglers before each TTN layer.
pub fn build_mera(n_data_qubits: usize, kind: GateKind) -> Result<ClassifierModel> {
    build_layers(n_data_qubits, kind, true)
}

/// Builds a MERA whose tree blocks copy a trained TTN and whose disentanglers are identity.
///
/// Only exponential-map kinds have an identity setting (all-zero coefficients); simple blocks
/// always contain a CNOT.
pub fn hybrid_init(
    ttn: &ClassifierModel,
    params: &ParamVector,
) -> Result<(ClassifierModel, ParamVector)> {
    if ttn.layout != Layout::Ttn {
        return Err(Error::InvalidConfig(
            "hybrid_init needs a TTN source".into(),
        ));
    }
    if ttn.kind.family() == Family::Simple {
        return Err(Error::UnsupportedKind(ttn.kind));
    }
    ttn.check_params(params)?;
    let mera = build_mera(ttn.n_data_qubits, ttn.kind)?;
    let mut out = vec![0.0; mera.n_params];
    let mut source = ttn.blocks.iter().enumerate();
    for block in &mera.blocks {
        if block.role == BlockRole::Tree {
            let (i, _) = source.next().expect("MERA has the TTN's tree blocks");
            let src = ttn.block_params(params.as_slice(), i);
            out[block.param_offset..block.param_offset + src.len()].copy_from_slice(src);
        }
    }
    out[mera.measurement_offset..].copy_from_slice(ttn.measurement_params(params.as_slice()));
    Ok((mera, ParamVector::new(out)))
}

#[cfg(test)]
mod tests;

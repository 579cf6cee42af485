// SPDX-License-Identifier: Apache-2.0

//! Versioned JSON checkpoints. Parameters are written with 17 significant digits so a
//! save/load cycle is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::topology::{ClassifierModel, Layout, ParamVector};

use super::{TrainConfig, TrainReport};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMetrics {
    pub steps_to_converge: usize,
    pub val_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub test_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub layout: Layout,
    /// Data qubits.
    pub n_qubits: usize,
    pub gate_kind: GateKind,
    /// Wires of every block in application order, ancilla last.
    pub wire_table: Vec<Vec<usize>>,
    pub cnot_reversal_flags: Vec<bool>,
    pub readout_qubit: usize,
    #[serde(serialize_with = "serialize_params")]
    pub params: ParamVector,
    pub train_config: Option<TrainConfig>,
    pub metrics: Option<CheckpointMetrics>,
    /// Task name, when the model was trained on a named task.
    pub task: Option<String>,
    pub split_seed: Option<u64>,
}

fn serialize_params<S: Serializer>(
    params: &ParamVector,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let raw = params
        .as_slice()
        .iter()
        .map(|x| {
            if !x.is_finite() {
                return Err(serde::ser::Error::custom("non-finite parameter"));
            }
            RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    raw.serialize(s)
}

impl Checkpoint {
    pub fn new(model: &ClassifierModel, params: &ParamVector) -> Result<Self> {
        model.check_params(params)?;
        Ok(Self {
            format_version: CHECKPOINT_VERSION,
            layout: model.layout,
            n_qubits: model.n_data_qubits,
            gate_kind: model.kind,
            wire_table: model.blocks.iter().map(|b| b.wires.clone()).collect(),
            cnot_reversal_flags: model.blocks.iter().map(|b| b.cnot_reversed).collect(),
            readout_qubit: model.readout_qubit,
            params: params.clone(),
            train_config: None,
            metrics: None,
            task: None,
            split_seed: None,
        })
    }

    pub fn with_report(mut self, config: &TrainConfig, report: &TrainReport) -> Self {
        self.train_config = Some(config.clone());
        self.metrics = Some(CheckpointMetrics {
            steps_to_converge: report.steps_to_converge,
            val_acc: report.val_acc,
            test_acc: report.test_acc,
            test_cost: report.test_cost,
        });
        self
    }

    /// Rebuilds the model and checks that the stored wiring matches it.
    pub fn model(&self) -> Result<ClassifierModel> {
        let model = ClassifierModel::build(self.layout, self.n_qubits, self.gate_kind)?;
        let wires: Vec<Vec<usize>> = model.blocks.iter().map(|b| b.wires.clone()).collect();
        let flags: Vec<bool> = model.blocks.iter().map(|b| b.cnot_reversed).collect();
        if wires != self.wire_table
            || flags != self.cnot_reversal_flags
            || model.readout_qubit != self.readout_qubit
        {
            return Err(Error::InvalidConfig(
                "checkpoint wiring does not match its layout".into(),
            ));
        }
        model.check_params(&self.params)?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format_version != CHECKPOINT_VERSION {
            return Err(Error::Version {
                found: header.format_version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let ck: Checkpoint = serde_json::from_str(text)?;
        ck.model()?;
        Ok(ck)
    }
}

pub fn save_checkpoint(checkpoint: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, checkpoint.to_json()?)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    Checkpoint::from_json(&std::fs::read_to_string(path)?)
}

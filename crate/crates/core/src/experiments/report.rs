// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Family, Field, GateKind};
use crate::topology::ClassifierModel;
use crate::trainer::{CurvePoint, TrainConfig};

use super::{ClassifierSpec, EntropyHistogram, LayoutChoice, SeedRun, TaskSpec};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Mean and sample standard deviation (`n - 1` denominator; `None` below two values).
pub fn mean_and_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() >= 2)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, std)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub layout: LayoutChoice,
    pub kind: GateKind,
    pub family: Family,
    pub field: Field,
    pub n_qubits: usize,
    pub n_params: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridSteps {
    pub ttn_steps: usize,
    pub mera_steps: usize,
    /// Total hybrid steps over TTN steps.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub task: TaskSpec,
    pub classifier: ClassifierSummary,
    pub train_config: TrainConfig,
    pub seeds: Vec<u64>,
    /// Test accuracy per seed, percent.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std_dev: Option<f64>,
    pub steps_to_converge: Vec<usize>,
    pub hybrid: Option<Vec<HybridSteps>>,
    pub wall_time_s: f64,
}

impl ExperimentResult {
    pub(super) fn from_runs(
        spec: ClassifierSpec,
        task: TaskSpec,
        model: &ClassifierModel,
        config: &TrainConfig,
        runs: &[SeedRun],
        wall_time_s: f64,
    ) -> Result<Self> {
        let accuracies = runs
            .iter()
            .map(|r| r.report.test_acc.map(|a| 100.0 * a))
            .collect::<Option<Vec<f64>>>()
            .ok_or(Error::MissingSplit("test"))?;
        let (mean, std_dev) = mean_and_std(&accuracies);
        let hybrid = (spec.layout == LayoutChoice::Hybrid).then(|| {
            runs.iter()
                .map(|r| {
                    let ttn = r.pretrain_steps.unwrap_or(0);
                    let mera = r.report.steps_to_converge;
                    HybridSteps {
                        ttn_steps: ttn,
                        mera_steps: mera,
                        ratio: (ttn + mera) as f64 / ttn.max(1) as f64,
                    }
                })
                .collect()
        });
        Ok(Self {
            schema_version: RESULT_SCHEMA_VERSION,
            task,
            classifier: ClassifierSummary {
                layout: spec.layout,
                kind: spec.kind,
                family: spec.kind.family(),
                field: spec.kind.field(),
                n_qubits: model.n_data_qubits,
                n_params: runs.last().map_or(model.n_params, |r| r.model.n_params),
            },
            train_config: config.clone(),
            seeds: runs.iter().map(|r| r.seed).collect(),
            accuracies,
            mean,
            std_dev,
            steps_to_converge: runs.iter().map(|r| r.report.steps_to_converge).collect(),
            hybrid,
            wall_time_s,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != RESULT_SCHEMA_VERSION {
            return Err(Error::Version {
                found: r.schema_version,
                expected: RESULT_SCHEMA_VERSION,
            });
        }
        Ok(r)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `seed,iteration,train_cost,train_acc,val_acc,test_acc`; missing values are empty.
pub fn curves_csv(runs: &[(u64, &[CurvePoint])]) -> String {
    let mut out = String::from("seed,iteration,train_cost,train_acc,val_acc,test_acc\n");
    for (seed, curve) in runs {
        for p in *curve {
            let _ = writeln!(
                out,
                "{seed},{},{},{},{},{}",
                p.iteration,
                p.train_cost,
                p.train_acc,
                opt(p.val_acc),
                opt(p.test_acc)
            );
        }
    }
    out
}

/// One row per bin: `bin_low,bin_high` then a count column per class.
pub fn histogram_csv(hists: &[EntropyHistogram]) -> String {
    let mut out = String::from("bin_low,bin_high");
    for h in hists {
        let _ = write!(out, ",class_{}", h.depth);
    }
    out.push('\n');
    let Some(first) = hists.first() else {
        return out;
    };
    let bins = first.counts.len();
    let width = first.n_qubits as f64 / 2.0 / bins as f64;
    for b in 0..bins {
        let _ = write!(out, "{},{}", b as f64 * width, (b + 1) as f64 * width);
        for h in hists {
            let _ = write!(out, ",{}", h.counts[b]);
        }
        out.push('\n');
    }
    out
}

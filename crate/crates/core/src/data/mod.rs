// SPDX-License-Identifier: Apache-2.0

//! Datasets: loaders, binary tasks, splits, feature pipelines and the synthetic quantum classes.

mod encode;
mod iris;
mod logistic;
mod mnist;
mod pca;
mod quantum;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Statevector;

pub use encode::{encode_features, qubit_encoding, rescale_and_encode, Rescaler};
pub use iris::{load_iris, parse_iris};
pub use logistic::{logistic_baseline, LogisticConfig, LogisticModel};
pub use mnist::{load_mnist, load_mnist_dir, read_idx_images, read_idx_labels};
pub use pca::{apply_pca, fit_pca, PcaTransform};
pub use quantum::{
    gen_quantum_class, load_quantum_class, quantum_task, save_quantum_class, QuantumClass,
    QUANTUM_MAGIC, QUANTUM_VERSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    IrisCsv,
    MnistIdx,
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Row-major `D x N` feature matrix with integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDataset {
    pub n_features: usize,
    pub features: Vec<f64>,
    pub labels: Vec<u8>,
    pub source: Source,
    /// Split tags fixed by the source (MNIST's canonical files), if any.
    pub split: Option<Vec<Split>>,
}

impl RawDataset {
    pub fn new(
        n_features: usize,
        features: Vec<f64>,
        labels: Vec<u8>,
        source: Source,
    ) -> Result<Self> {
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * n_features.max(1),
                found: features.len(),
            });
        }
        if let Some(i) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "non-finite feature in row {}",
                i / n_features
            )));
        }
        Ok(Self {
            n_features,
            features,
            labels,
            source,
            split: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    /// Rows whose class `f` maps to `Some`, relabelled.
    fn filter_map(&self, mut f: impl FnMut(u8) -> Option<u8>) -> Self {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut split = self.split.as_ref().map(|_| Vec::new());
        for i in 0..self.len() {
            if let Some(y) = f(self.labels[i]) {
                features.extend_from_slice(self.row(i));
                labels.push(y);
                if let (Some(out), Some(src)) = (split.as_mut(), self.split.as_ref()) {
                    out.push(src[i]);
                }
            }
        }
        Self {
            n_features: self.n_features,
            features,
            labels,
            source: self.source,
            split,
        }
    }
}

/// Encoded product (or entangled) states with binary labels and split tags.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedDataset {
    pub states: Vec<Statevector>,
    pub labels: Vec<u8>,
    pub split: Vec<Split>,
}

impl EncodedDataset {
    pub fn n_qubits(&self) -> usize {
        self.states.first().map_or(0, Statevector::n_qubits)
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.split[i] == split)
            .collect()
    }

    pub fn count(&self, split: Split) -> usize {
        self.split.iter().filter(|&&s| s == split).count()
    }
}

/// Binary tasks; labels map to `{0, 1}` by ascending original class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryTask {
    ZeroOrOne,
    TwoOrSeven,
    IsEven,
    IsGreaterThan4,
    Iris12,
    Iris23,
    Iris13,
}

impl BinaryTask {
    pub const ALL: [BinaryTask; 7] = [
        BinaryTask::ZeroOrOne,
        BinaryTask::TwoOrSeven,
        BinaryTask::IsEven,
        BinaryTask::IsGreaterThan4,
        BinaryTask::Iris12,
        BinaryTask::Iris23,
        BinaryTask::Iris13,
    ];

    pub fn is_iris(self) -> bool {
        matches!(
            self,
            BinaryTask::Iris12 | BinaryTask::Iris23 | BinaryTask::Iris13
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BinaryTask::ZeroOrOne => "0or1",
            BinaryTask::TwoOrSeven => "2or7",
            BinaryTask::IsEven => "even",
            BinaryTask::IsGreaterThan4 => "gt4",
            BinaryTask::Iris12 => "iris12",
            BinaryTask::Iris23 => "iris23",
            BinaryTask::Iris13 => "iris13",
        }
    }

    fn map(self, class: u8) -> Option<u8> {
        let pair = |a: u8, b: u8| {
            if class == a {
                Some(0)
            } else if class == b {
                Some(1)
            } else {
                None
            }
        };
        match self {
            BinaryTask::ZeroOrOne => pair(0, 1),
            BinaryTask::TwoOrSeven => pair(2, 7),
            // "odd" (0) < "even" (1) and "not > 4" (0) < "> 4" (1)
            BinaryTask::IsEven => (class <= 9).then_some(u8::from(class.is_multiple_of(2))),
            BinaryTask::IsGreaterThan4 => (class <= 9).then_some(u8::from(class > 4)),
            BinaryTask::Iris12 => pair(1, 2),
            BinaryTask::Iris23 => pair(2, 3),
            BinaryTask::Iris13 => pair(1, 3),
        }
    }
}

impl fmt::Display for BinaryTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BinaryTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinaryTask::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown task {s:?}")))
    }
}

pub fn make_binary_task(raw: &RawDataset, task: BinaryTask) -> RawDataset {
    raw.filter_map(|c| task.map(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SplitScheme {
    /// Tags fixed by the source files.
    Canonical,
    /// Per class, `round(n_c * test)` rows to test and `round(n_c * val)` to validation.
    Stratified { test: f64, val: f64 },
    /// Per class, a fixed number of rows to test and to validation.
    PerClass { test: usize, val: usize },
}

/// Deterministic per seed. Classes are processed in ascending label order; within a class rows
/// are shuffled once and then dealt to test, validation and train in that order.
pub fn split_dataset(raw: &RawDataset, scheme: SplitScheme, seed: u64) -> Result<Vec<Split>> {
    split_labels(&raw.labels, raw.split.as_deref(), scheme, seed)
}

pub(crate) fn split_labels(
    labels: &[u8],
    canonical: Option<&[Split]>,
    scheme: SplitScheme,
    seed: u64,
) -> Result<Vec<Split>> {
    match scheme {
        SplitScheme::Canonical => {
            return canonical
                .map(<[Split]>::to_vec)
                .ok_or(Error::MissingSplit("canonical"));
        }
        SplitScheme::Stratified { test, val } => {
            if test < 0.0 || val < 0.0 || test + val >= 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "split fractions {test} + {val} must lie in [0, 1)"
                )));
            }
        }
        SplitScheme::PerClass { .. } => {}
    }
    let counts = |n: usize| match scheme {
        SplitScheme::Stratified { test, val } => (
            (n as f64 * test).round() as usize,
            (n as f64 * val).round() as usize,
        ),
        SplitScheme::PerClass { test, val } => (test, val),
        SplitScheme::Canonical => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Split::Train; labels.len()];
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    for c in classes {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        let (t, v) = counts(rows.len());
        if t + v > rows.len() {
            return Err(Error::InvalidConfig(format!(
                "class {c} has {} rows, fewer than {t} test + {v} validation",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        for &i in &rows[..t] {
            out[i] = Split::Test;
        }
        for &i in &rows[t..t + v] {
            out[i] = Split::Val;
        }
    }
    Ok(out)
}

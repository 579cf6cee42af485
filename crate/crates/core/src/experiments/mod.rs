// SPDX-License-Identifier: Apache-2.0

//! End-to-end experiment drivers shared by the `hqc` binary and the acceptance suite.

mod report;

use std::cell::OnceCell;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    apply_pca, fit_pca, gen_quantum_class, load_iris, load_mnist_dir, logistic_baseline,
    make_binary_task, quantum_task, rescale_and_encode, split_dataset, BinaryTask, EncodedDataset,
    LogisticConfig, RawDataset, Split, SplitScheme,
};
use crate::error::{Error, Result};
use crate::gates::{Family, Field, GateKind};
use crate::sim::{max_bipartite_entropy, sample_binomial};
use crate::topology::{majority_label, noisy_expectation, ClassifierModel, Layout, ParamVector};
use crate::trainer::{evaluate, train, train_hybrid, Selection, TrainConfig, TrainReport};

pub use report::{
    curves_csv, histogram_csv, mean_and_std, ClassifierSummary, ExperimentResult, HybridSteps,
    RESULT_SCHEMA_VERSION,
};

/// Environment variable naming the default data root.
pub const DATA_DIR_ENV: &str = "HQC_DATA_DIR";
pub const IRIS_FILE: &str = "iris.csv";
pub const MNIST_DIR: &str = "mnist";
pub const PCA_COMPONENTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutChoice {
    Ttn,
    Mera,
    /// TTN pre-training, then MERA post-training.
    Hybrid,
}

impl FromStr for LayoutChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ttn" => Ok(LayoutChoice::Ttn),
            "mera" => Ok(LayoutChoice::Mera),
            "hybrid" => Ok(LayoutChoice::Hybrid),
            _ => Err(Error::InvalidConfig(format!("unknown layout {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub layout: LayoutChoice,
    pub kind: GateKind,
}

impl ClassifierSpec {
    pub fn new(layout: LayoutChoice, family: Family, field: Field) -> Result<Self> {
        let spec = Self {
            layout,
            kind: GateKind::new(family, field),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Hybrid training needs exponential-map blocks so disentanglers can start at the identity.
    pub fn validate(&self) -> Result<()> {
        if self.layout == LayoutChoice::Hybrid && self.kind.family() == Family::Simple {
            return Err(Error::UnsupportedKind(self.kind));
        }
        Ok(())
    }

    /// The model that is trained first (the TTN for hybrid runs).
    pub fn initial_model(&self, n_data_qubits: usize) -> Result<ClassifierModel> {
        let layout = match self.layout {
            LayoutChoice::Mera => Layout::Mera,
            LayoutChoice::Ttn | LayoutChoice::Hybrid => Layout::Ttn,
        };
        ClassifierModel::build(layout, n_data_qubits, self.kind)
    }
}

/// A binary classification problem: a classical task or two synthetic quantum classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TaskSpec {
    Classical(BinaryTask),
    /// Depths of the two classes; the shallower one is label 0.
    Quantum {
        low: usize,
        high: usize,
    },
}

impl TaskSpec {
    pub fn is_iris(self) -> bool {
        matches!(self, TaskSpec::Classical(t) if t.is_iris())
    }

    pub fn is_mnist(self) -> bool {
        matches!(self, TaskSpec::Classical(t) if !t.is_iris())
    }

    /// Protocol defaults: batch 20 with best-validation selection for MNIST, full training
    /// with the final parameters for Iris (it has no validation split), and batch 40 for
    /// 4000 iterations with best-test selection for quantum data.
    pub fn default_config(self) -> TrainConfig {
        let base = TrainConfig::default();
        match self {
            TaskSpec::Classical(t) if t.is_iris() => TrainConfig {
                max_iters: 300,
                patience: None,
                selection: Selection::Final,
                ..base
            },
            TaskSpec::Classical(_) => TrainConfig {
                max_iters: 20_000,
                ..base
            },
            TaskSpec::Quantum { .. } => TrainConfig {
                batch_size: 40,
                max_iters: 4000,
                eval_every: 50,
                patience: None,
                selection: Selection::BestTest,
                ..base
            },
        }
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskSpec::Classical(t) => write!(f, "{t}"),
            TaskSpec::Quantum { low, high } => write!(f, "q{low}or{high}"),
        }
    }
}

impl FromStr for TaskSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix('q') {
            let bad =
                || Error::InvalidConfig(format!("bad quantum task {s:?}; expected e.g. q1or10"));
            let (a, b) = rest.split_once("or").ok_or_else(bad)?;
            let (a, b): (usize, usize) =
                (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a == 0 || b == 0 || a == b {
                return Err(bad());
            }
            return Ok(TaskSpec::Quantum {
                low: a.min(b),
                high: a.max(b),
            });
        }
        s.parse().map(TaskSpec::Classical)
    }
}

impl From<TaskSpec> for String {
    fn from(t: TaskSpec) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TaskSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataOptions {
    pub root: PathBuf,
    pub split_seed: u64,
    /// States generated per quantum class.
    pub quantum_count: usize,
    /// States per quantum class held out for testing.
    pub quantum_test: usize,
    pub quantum_seed: u64,
    pub quantum_qubits: usize,
}

impl Default for DataOptions {
    fn default() -> Self {
        Self {
            root: default_data_root(),
            split_seed: 0,
            quantum_count: 5000,
            quantum_test: 1000,
            quantum_seed: 0,
            quantum_qubits: 8,
        }
    }
}

/// `$HQC_DATA_DIR`, or `data` in the working directory.
pub fn default_data_root() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("data"), PathBuf::from)
}

/// Seed of the generator for one quantum class.
pub fn quantum_class_seed(base: u64, depth: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(depth as u64)
}

/// Lazily loaded source files, shared across tasks.
pub struct DataStore {
    pub options: DataOptions,
    iris: OnceCell<RawDataset>,
    mnist: OnceCell<RawDataset>,
}

/// A task ready for training.
#[derive(Clone, Debug)]
pub struct PreparedTask {
    pub task: TaskSpec,
    pub data: EncodedDataset,
    /// Features before angle encoding (PCA projections for MNIST), for classical tasks.
    pub features: Option<RawDataset>,
}

impl DataStore {
    pub fn new(options: DataOptions) -> Self {
        Self {
            options,
            iris: OnceCell::new(),
            mnist: OnceCell::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.options.root
    }

    pub fn iris(&self) -> Result<&RawDataset> {
        if let Some(d) = self.iris.get() {
            return Ok(d);
        }
        let d = load_iris(self.root().join(IRIS_FILE))?;
        Ok(self.iris.get_or_init(|| d))
    }

    pub fn mnist(&self) -> Result<&RawDataset> {
        if let Some(d) = self.mnist.get() {
            return Ok(d);
        }
        let d = load_mnist_dir(self.root().join(MNIST_DIR))?;
        Ok(self.mnist.get_or_init(|| d))
    }

    /// Binary subset with its split tags.
    pub fn classical_split(&self, task: BinaryTask) -> Result<(RawDataset, Vec<Split>)> {
        if task.is_iris() {
            let raw = make_binary_task(self.iris()?, task);
            let scheme = SplitScheme::Stratified {
                test: 1.0 / 3.0,
                val: 0.0,
            };
            let split = split_dataset(&raw, scheme, self.options.split_seed)?;
            Ok((raw, split))
        } else {
            let raw = make_binary_task(self.mnist()?, task);
            let split = split_dataset(&raw, SplitScheme::Canonical, 0)?;
            Ok((raw, split))
        }
    }

    pub fn prepare(&self, task: TaskSpec) -> Result<PreparedTask> {
        match task {
            TaskSpec::Classical(t) => {
                let (raw, split) = self.classical_split(t)?;
                let features = if t.is_iris() {
                    raw
                } else {
                    let train: Vec<usize> = (0..raw.len())
                        .filter(|&i| split[i] == Split::Train)
                        .collect();
                    let pca = fit_pca(&raw, &train, PCA_COMPONENTS)?;
                    apply_pca(&pca, &raw)?
                };
                let (data, _) = rescale_and_encode(&features, &split)?;
                Ok(PreparedTask {
                    task,
                    data,
                    features: Some(features),
                })
            }
            TaskSpec::Quantum { low, high } => {
                let o = &self.options;
                let gen = |depth| {
                    gen_quantum_class(
                        o.quantum_qubits,
                        depth,
                        o.quantum_count,
                        quantum_class_seed(o.quantum_seed, depth),
                    )
                };
                let data = quantum_task(&gen(low)?, &gen(high)?, o.quantum_test, 0, o.split_seed)?;
                Ok(PreparedTask {
                    task,
                    data,
                    features: None,
                })
            }
        }
    }
}

/// Outcome of one seeded run.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub model: ClassifierModel,
    pub report: TrainReport,
    /// Steps of the TTN phase of a hybrid run.
    pub pretrain_steps: Option<usize>,
}

/// Trains one classifier per seed and summarizes the test accuracies.
pub fn run_experiment(
    spec: ClassifierSpec,
    prepared: &PreparedTask,
    config: &TrainConfig,
    seeds: &[u64],
) -> Result<(ExperimentResult, Vec<SeedRun>)> {
    spec.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let start = Instant::now();
    let n = prepared.data.n_qubits();
    let first = spec.initial_model(n)?;
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = TrainConfig {
            rng_seed: seed,
            ..config.clone()
        };
        let run = if spec.layout == LayoutChoice::Hybrid {
            let h = train_hybrid(&first, &prepared.data, &cfg, &cfg)?;
            log::info!(
                "seed {seed}: ttn {} steps, mera {} steps",
                h.ttn.steps_to_converge,
                h.mera.steps_to_converge
            );
            SeedRun {
                seed,
                model: h.mera_model,
                pretrain_steps: Some(h.ttn.steps_to_converge),
                report: h.mera,
            }
        } else {
            SeedRun {
                seed,
                model: first.clone(),
                report: train(&first, &prepared.data, &cfg)?,
                pretrain_steps: None,
            }
        };
        log::info!(
            "seed {seed}: test accuracy {:?} after {} steps",
            run.report.test_acc,
            run.report.steps_to_converge
        );
        runs.push(run);
    }
    let result = ExperimentResult::from_runs(
        spec,
        prepared.task,
        &first,
        config,
        &runs,
        start.elapsed().as_secs_f64(),
    )?;
    Ok((result, runs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepConfig {
    pub lambda_max: f64,
    pub lambda_step: f64,
    pub shots: u64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        Self {
            lambda_max: 0.2,
            lambda_step: 0.01,
            shots: 401,
            repeats: 200,
            seed: 0,
        }
    }
}

impl NoiseSweepConfig {
    pub fn lambdas(&self) -> Result<Vec<f64>> {
        if self.lambda_step.is_nan()
            || self.lambda_step <= 0.0
            || !(0.0..=1.0).contains(&self.lambda_max)
        {
            return Err(Error::InvalidConfig(
                "noise grid needs a positive step and a maximum in [0, 1]".into(),
            ));
        }
        if self.shots == 0 || self.repeats == 0 {
            return Err(Error::InvalidConfig(
                "shots and repeats must be positive".into(),
            ));
        }
        let steps = (self.lambda_max / self.lambda_step + 1e-9).floor() as usize;
        Ok((0..=steps).map(|k| k as f64 * self.lambda_step).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub lambda: f64,
    /// Percent.
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
}

/// Accuracy under depolarizing noise: exact noisy probabilities, then `repeats` rounds of
/// `shots`-shot majority votes per example.
pub fn noise_sweep(
    model: &ClassifierModel,
    params: &ParamVector,
    data: &EncodedDataset,
    rows: &[usize],
    config: &NoiseSweepConfig,
) -> Result<Vec<NoisePoint>> {
    if rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    config
        .lambdas()?
        .into_iter()
        .map(|lambda| {
            let probs = rows
                .iter()
                .map(|&r| noisy_expectation(model, params, &data.states[r], lambda))
                .collect::<Result<Vec<_>>>()?;
            let accs: Vec<f64> = (0..config.repeats)
                .map(|_| {
                    let hits = rows
                        .iter()
                        .zip(&probs)
                        .filter(|&(&r, &p)| {
                            majority_label(sample_binomial(config.shots, p, &mut rng), config.shots)
                                == data.labels[r]
                        })
                        .count();
                    100.0 * hits as f64 / rows.len() as f64
                })
                .collect();
            let (mean, std) = mean_and_std(&accs);
            Ok(NoisePoint {
                lambda,
                mean_accuracy: mean,
                std_accuracy: std.unwrap_or(0.0),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyHistogram {
    pub depth: usize,
    pub n_qubits: usize,
    /// Counts over equal bins on `[0, n/2]` bits.
    pub counts: Vec<u64>,
    pub entropies: Vec<f64>,
}

impl EntropyHistogram {
    pub fn median(&self) -> f64 {
        let mut v = self.entropies.clone();
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        }
    }

    /// Shared probability mass of two normalized histograms on the same bins.
    pub fn overlap(&self, other: &Self) -> f64 {
        let (na, nb) = (self.entropies.len() as f64, other.entropies.len() as f64);
        self.counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| (a as f64 / na).min(b as f64 / nb))
            .sum()
    }
}

/// Maximum bipartite entropy of every state of each synthetic class, binned.
pub fn entropy_histograms(
    depths: &[usize],
    n_qubits: usize,
    count: usize,
    seed: u64,
    bins: usize,
) -> Result<Vec<EntropyHistogram>> {
    if bins == 0 {
        return Err(Error::InvalidConfig(
            "histogram needs at least one bin".into(),
        ));
    }
    let top = n_qubits as f64 / 2.0;
    depths
        .iter()
        .map(|&depth| {
            let class = gen_quantum_class(n_qubits, depth, count, quantum_class_seed(seed, depth))?;
            let entropies = class
                .states
                .iter()
                .map(max_bipartite_entropy)
                .collect::<Result<Vec<_>>>()?;
            let mut counts = vec![0u64; bins];
            for &s in &entropies {
                let b = ((s / top) * bins as f64)
                    .floor()
                    .clamp(0.0, (bins - 1) as f64) as usize;
                counts[b] += 1;
            }
            Ok(EntropyHistogram {
                depth,
                n_qubits,
                counts,
                entropies,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub task: TaskSpec,
    pub pca: bool,
    /// Percent.
    pub test_accuracy: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Logistic regression on the task's classical features: PCA projections or raw inputs.
pub fn baseline(store: &DataStore, task: BinaryTask, pca: bool) -> Result<BaselineResult> {
    let (raw, split) = store.classical_split(task)?;
    let features = if pca {
        let train: Vec<usize> = (0..raw.len())
            .filter(|&i| split[i] == Split::Train)
            .collect();
        apply_pca(&fit_pca(&raw, &train, PCA_COMPONENTS)?, &raw)?
    } else {
        raw
    };
    let (model, acc) = logistic_baseline(&features, &split, &LogisticConfig::default())?;
    Ok(BaselineResult {
        task: TaskSpec::Classical(task),
        pca,
        test_accuracy: 100.0 * acc,
        iterations: model.iterations,
        grad_norm: model.grad_norm,
    })
}

/// Test accuracy (percent) and cost of given parameters.
pub fn test_metrics(
    model: &ClassifierModel,
    params: &ParamVector,
    data: &EncodedDataset,
) -> Result<(f64, f64)> {
    let m = evaluate(model, params, data, &data.indices(Split::Test))?;
    Ok((100.0 * m.accuracy, m.cost))
}

#[cfg(test)]
mod tests;

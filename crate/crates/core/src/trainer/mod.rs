// SPDX-License-Identifier: Apache-2.0

//! Minibatch Adam on the mean-squared-error cost, with periodic evaluation and model selection.

mod checkpoint;

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, Split};
use crate::error::{Error, Result};
use crate::gates::{Family, GateKind};
use crate::grad::cost_and_grad;
use crate::topology::{
    hybrid_init, label_from_expectation, ClassifierModel, Evaluator, ParamVector, Strategy,
};

pub use checkpoint::{
    load_checkpoint, save_checkpoint, Checkpoint, CheckpointMetrics, CHECKPOINT_VERSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum InitScheme {
    /// Every parameter uniform in `(-half_range, half_range]`; rotation angles use `π`.
    UniformAngles { half_range: f64 },
    /// Block generator coefficients uniform in `(-half_range, half_range]`, so each block
    /// starts close to the identity; measurement angles uniform in `(-π, π]`.
    NearIdentity { half_range: f64 },
}

impl InitScheme {
    /// Uniform angles for rotation-based blocks, near-identity for exponential-map blocks.
    pub fn default_for(kind: GateKind) -> Self {
        match kind.family() {
            Family::Simple => InitScheme::UniformAngles { half_range: PI },
            Family::General | Family::Ancilla => InitScheme::NearIdentity { half_range: 0.1 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Parameters at the best validation accuracy.
    BestValidation,
    /// Parameters at the best test accuracy (the quantum-data protocol; optimistic by design).
    BestTest,
    /// Parameters after the last iteration.
    Final,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Reshuffle the training rows each epoch and walk through them in batches.
    EpochShuffle,
    /// Draw each batch independently with replacement.
    WithReplacement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Batches between evaluations.
    pub eval_every: usize,
    /// Stop after this many consecutive evaluations without improvement; `None` never stops.
    pub patience: Option<usize>,
    pub rng_seed: u64,
    /// `None` picks [`InitScheme::default_for`] the model's kind.
    pub init: Option<InitScheme>,
    pub selection: Selection,
    pub sampling: Sampling,
    /// Evaluate test accuracy at every evaluation, not only for the selected parameters.
    pub record_test: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 20,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters: 2000,
            eval_every: 10,
            patience: Some(30),
            rng_seed: 0,
            init: None,
            selection: Selection::BestValidation,
            sampling: Sampling::EpochShuffle,
            record_test: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        let open_unit = |b: f64| 0.0 < b && b < 1.0;
        if !open_unit(self.beta1) || !open_unit(self.beta2) {
            return bad("Adam betas must lie in (0, 1)");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        if self.eval_every == 0 {
            return bad("eval_every must be at least 1");
        }
        Ok(())
    }
}

/// Adam moments and step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }
}

/// One bias-corrected Adam descent step.
pub fn adam_step(
    params: &[f64],
    grad: &[f64],
    state: &AdamState,
    config: &TrainConfig,
) -> (Vec<f64>, AdamState) {
    let t = state.t + 1;
    let (b1, b2) = (config.beta1, config.beta2);
    let c1 = 1.0 - b1.powi(t as i32);
    let c2 = 1.0 - b2.powi(t as i32);
    let mut next = AdamState {
        m: Vec::with_capacity(params.len()),
        v: Vec::with_capacity(params.len()),
        t,
    };
    let out = params
        .iter()
        .zip(grad)
        .zip(state.m.iter().zip(&state.v))
        .map(|((&p, &g), (&m, &v))| {
            let m = b1 * m + (1.0 - b1) * g;
            let v = b2 * v + (1.0 - b2) * g * g;
            next.m.push(m);
            next.v.push(v);
            p - config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.epsilon)
        })
        .collect();
    (out, next)
}

fn symmetric_uniform(rng: &mut ChaCha8Rng, half: f64) -> f64 {
    half - 2.0 * half * rng.random::<f64>()
}

/// Deterministic per seed.
pub fn init_params(model: &ClassifierModel, scheme: InitScheme, seed: u64) -> ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..model.n_params)
        .map(|i| {
            let half = match scheme {
                InitScheme::UniformAngles { half_range } => half_range,
                InitScheme::NearIdentity { half_range } if i < model.measurement_offset => {
                    half_range
                }
                InitScheme::NearIdentity { .. } => PI,
            };
            symmetric_uniform(&mut rng, half)
        })
        .collect();
    ParamVector::new(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub cost: f64,
    pub accuracy: f64,
}

/// Cost and thresholded accuracy over the given rows.
pub fn evaluate(
    model: &ClassifierModel,
    params: &ParamVector,
    data: &EncodedDataset,
    rows: &[usize],
) -> Result<Metrics> {
    if rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let eval = Evaluator::new(model, params, Strategy::Adaptive, false)?;
    let (mut cost, mut hits) = (0.0, 0usize);
    for &r in rows {
        let p = eval.expectation(&data.states[r])?;
        let y = data.labels[r];
        cost += (p - f64::from(y)).powi(2);
        hits += usize::from(label_from_expectation(p) == y);
    }
    let d = rows.len() as f64;
    Ok(Metrics {
        cost: cost / d,
        accuracy: hits as f64 / d,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    /// Mean batch cost and accuracy over the batches since the previous point.
    pub train_cost: f64,
    pub train_acc: f64,
    pub val_acc: Option<f64>,
    pub test_acc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub curves: Vec<CurvePoint>,
    /// Cost of every minibatch, before its update.
    pub batch_costs: Vec<f64>,
    pub best_params: ParamVector,
    /// Iteration at which `best_params` were taken.
    pub steps_to_converge: usize,
    pub iterations_run: usize,
    pub stopped_early: bool,
    pub val_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub test_cost: Option<f64>,
}

struct Batcher {
    rows: Vec<usize>,
    pos: usize,
    rng: ChaCha8Rng,
    sampling: Sampling,
}

impl Batcher {
    fn next(&mut self, size: usize) -> Vec<usize> {
        match self.sampling {
            Sampling::WithReplacement => (0..size)
                .map(|_| self.rows[self.rng.random_range(0..self.rows.len())])
                .collect(),
            Sampling::EpochShuffle => (0..size)
                .map(|_| {
                    if self.pos == 0 {
                        self.rows.shuffle(&mut self.rng);
                    }
                    let r = self.rows[self.pos];
                    self.pos = (self.pos + 1) % self.rows.len();
                    r
                })
                .collect(),
        }
    }
}

/// Trains from parameters drawn with `config.init` (or the kind's default) and `config.rng_seed`.
pub fn train(
    model: &ClassifierModel,
    data: &EncodedDataset,
    config: &TrainConfig,
) -> Result<TrainReport> {
    let scheme = config.init.unwrap_or(InitScheme::default_for(model.kind));
    let params = init_params(model, scheme, config.rng_seed);
    train_from(model, params, data, config)
}

/// Trains from the given starting parameters.
pub fn train_from(
    model: &ClassifierModel,
    mut params: ParamVector,
    data: &EncodedDataset,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    model.check_params(&params)?;
    let train_rows = data.indices(Split::Train);
    let val_rows = data.indices(Split::Val);
    let test_rows = data.indices(Split::Test);
    if train_rows.is_empty() {
        return Err(Error::MissingSplit("train"));
    }
    let monitored = match config.selection {
        Selection::BestValidation if val_rows.is_empty() => {
            return Err(Error::MissingSplit("validation"))
        }
        Selection::BestTest if test_rows.is_empty() => return Err(Error::MissingSplit("test")),
        Selection::BestValidation => Some(Split::Val),
        Selection::BestTest => Some(Split::Test),
        Selection::Final => None,
    };

    let mut sampler_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    sampler_rng.set_stream(1);
    let mut batcher = Batcher {
        rows: train_rows,
        pos: 0,
        rng: sampler_rng,
        sampling: config.sampling,
    };

    let mut adam = AdamState::new(params.len());
    let mut curves = Vec::new();
    let mut batch_costs = Vec::with_capacity(config.max_iters);
    let (mut window_cost, mut window_batches, mut window_hits, mut window_n) =
        (0.0, 0usize, 0usize, 0usize);
    let mut best: Option<(f64, ParamVector, usize)> = None;
    let mut since_best = 0;
    let mut stopped_early = false;
    let mut iterations_run = 0;

    for it in 1..=config.max_iters {
        let batch = batcher.next(config.batch_size);
        let g = cost_and_grad(
            model,
            &params,
            batch.iter().map(|&r| (&data.states[r], data.labels[r])),
        )?;
        batch_costs.push(g.cost);
        window_cost += g.cost;
        window_batches += 1;
        window_hits += batch
            .iter()
            .zip(&g.outputs)
            .filter(|&(&r, &p)| label_from_expectation(p) == data.labels[r])
            .count();
        window_n += batch.len();
        let (next, state) = adam_step(params.as_slice(), &g.grad, &adam, config);
        params = ParamVector::new(next);
        adam = state;
        iterations_run = it;

        if it % config.eval_every != 0 && it != config.max_iters {
            continue;
        }
        let val_acc = match val_rows.is_empty() {
            false if monitored == Some(Split::Val) || config.record_test => {
                Some(evaluate(model, &params, data, &val_rows)?.accuracy)
            }
            _ => None,
        };
        let test_acc = match test_rows.is_empty() {
            false if monitored == Some(Split::Test) || config.record_test => {
                Some(evaluate(model, &params, data, &test_rows)?.accuracy)
            }
            _ => None,
        };
        curves.push(CurvePoint {
            iteration: it,
            train_cost: window_cost / window_batches as f64,
            train_acc: window_hits as f64 / window_n as f64,
            val_acc,
            test_acc,
        });
        (window_cost, window_batches, window_hits, window_n) = (0.0, 0, 0, 0);

        let Some(split) = monitored else { continue };
        let score = if split == Split::Val {
            val_acc
        } else {
            test_acc
        }
        .expect("monitored split evaluated");
        if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
            best = Some((score, params.clone(), it));
            since_best = 0;
        } else {
            since_best += 1;
            if config.patience.is_some_and(|p| since_best >= p) {
                stopped_early = true;
                break;
            }
        }
    }

    let (best_params, steps_to_converge) = match best {
        Some((_, p, it)) => (p, it),
        None => (params, iterations_run),
    };
    let val_acc = (!val_rows.is_empty())
        .then(|| evaluate(model, &best_params, data, &val_rows))
        .transpose()?
        .map(|m| m.accuracy);
    let test = (!test_rows.is_empty())
        .then(|| evaluate(model, &best_params, data, &test_rows))
        .transpose()?;
    Ok(TrainReport {
        curves,
        batch_costs,
        best_params,
        steps_to_converge,
        iterations_run,
        stopped_early,
        val_acc,
        test_acc: test.map(|m| m.accuracy),
        test_cost: test.map(|m| m.cost),
    })
}

/// TTN pre-training followed by MERA training from [`hybrid_init`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub ttn: TrainReport,
    pub mera_model: ClassifierModel,
    pub mera: TrainReport,
    /// TTN steps plus MERA steps to the selected parameters.
    pub total_steps: usize,
}

pub fn train_hybrid(
    ttn: &ClassifierModel,
    data: &EncodedDataset,
    ttn_config: &TrainConfig,
    mera_config: &TrainConfig,
) -> Result<HybridReport> {
    let pre = train(ttn, data, ttn_config)?;
    let (mera_model, start) = hybrid_init(ttn, &pre.best_params)?;
    let post = train_from(&mera_model, start, data, mera_config)?;
    Ok(HybridReport {
        total_steps: pre.steps_to_converge + post.steps_to_converge,
        ttn: pre,
        mera_model,
        mera: post,
    })
}

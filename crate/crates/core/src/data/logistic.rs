// SPDX-License-Identifier: Apache-2.0

//! L2-regularized binary logistic regression fitted by damped Newton iterations.
//!
//! Minimizes `(1/D) Σ log-loss + (α/2) |w|²` with the bias unpenalized; `α = 1/D` by default.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{RawDataset, Split};

const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// Penalty weight; `None` means `1 / D_train`.
    pub alpha: Option<f64>,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            grad_tol: 1e-6,
            max_iters: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl LogisticModel {
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.probability(x) >= 0.5)
    }

    pub fn accuracy(&self, data: &RawDataset, rows: &[usize]) -> f64 {
        let hits = rows
            .iter()
            .filter(|&&r| self.predict(data.row(r)) == data.labels[r])
            .count();
        hits as f64 / rows.len().max(1) as f64
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Problem<'a> {
    data: &'a RawDataset,
    rows: &'a [usize],
    alpha: f64,
}

impl Problem<'_> {
    /// Augmented weights: `theta[0]` is the bias.
    fn margin(&self, theta: &DVector<f64>, r: usize) -> f64 {
        theta[0]
            + self
                .data
                .row(r)
                .iter()
                .zip(theta.iter().skip(1))
                .map(|(x, w)| x * w)
                .sum::<f64>()
    }

    fn objective(&self, theta: &DVector<f64>) -> f64 {
        let d = self.rows.len() as f64;
        let loss: f64 = self
            .rows
            .iter()
            .map(|&r| {
                let z = self.margin(theta, r);
                softplus(z) - f64::from(self.data.labels[r]) * z
            })
            .sum();
        let reg: f64 = theta.iter().skip(1).map(|w| w * w).sum();
        loss / d + 0.5 * self.alpha * reg
    }

    fn gradient_and_hessian(&self, theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.data.n_features + 1;
        let d = self.rows.len() as f64;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        let mut buf = Vec::with_capacity(CHUNK * n);
        for chunk in self.rows.chunks(CHUNK) {
            buf.clear();
            for &r in chunk {
                let p = sigmoid(self.margin(theta, r));
                let resid = p - f64::from(self.data.labels[r]);
                g[0] += resid;
                for (gj, x) in g.iter_mut().skip(1).zip(self.data.row(r)) {
                    *gj += resid * x;
                }
                let s = (p * (1.0 - p)).sqrt();
                buf.push(s);
                buf.extend(self.data.row(r).iter().map(|x| s * x));
            }
            let block = DMatrix::from_row_slice(chunk.len(), n, &buf);
            h.gemm_tr(1.0 / d, &block, &block, 1.0);
        }
        g /= d;
        for j in 1..n {
            g[j] += self.alpha * theta[j];
            h[(j, j)] += self.alpha;
        }
        (g, h)
    }
}

/// Fits on the training rows and returns the model with its test accuracy.
pub fn logistic_baseline(
    data: &RawDataset,
    split: &[Split],
    config: &LogisticConfig,
) -> Result<(LogisticModel, f64)> {
    if split.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            found: split.len(),
        });
    }
    let rows_of = |s: Split| -> Vec<usize> { (0..data.len()).filter(|&i| split[i] == s).collect() };
    let (train, test) = (rows_of(Split::Train), rows_of(Split::Test));
    if train.is_empty() {
        return Err(Error::MissingSplit("train"));
    }
    if test.is_empty() {
        return Err(Error::MissingSplit("test"));
    }
    if let Some(&y) = data.labels.iter().find(|&&y| y > 1) {
        return Err(Error::LabelOutOfRange(y));
    }
    let problem = Problem {
        data,
        rows: &train,
        alpha: config.alpha.unwrap_or(1.0 / train.len() as f64),
    };
    let mut theta = DVector::zeros(data.n_features + 1);
    let mut f = problem.objective(&theta);
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    while iterations < config.max_iters {
        let (g, h) = problem.gradient_and_hessian(&theta);
        grad_norm = g.norm();
        if grad_norm < config.grad_tol {
            break;
        }
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => {
                // Only the unpenalized bias can make H singular; fall back to gradient descent.
                g.clone()
            }
        };
        let mut t = 1.0;
        loop {
            let cand = &theta - &step * t;
            let fc = problem.objective(&cand);
            if fc <= f - 1e-4 * t * g.dot(&step) || t < 1e-10 {
                theta = cand;
                f = fc;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
    }
    let model = LogisticModel {
        bias: theta[0],
        weights: theta.iter().skip(1).copied().collect(),
        iterations,
        grad_norm,
    };
    let acc = model.accuracy(data, &test);
    Ok((model, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Source;

    #[test]
    fn separable_toy_data_is_classified_perfectly() {
        let xs = [-3.0, -2.0, -1.5, -1.0, 1.0, 1.5, 2.0, 3.0];
        let labels: Vec<u8> = xs.iter().map(|&x| u8::from(x > 0.0)).collect();
        let raw = RawDataset::new(1, xs.to_vec(), labels, Source::Synthetic).unwrap();
        let split = [Split::Train, Split::Test].repeat(4);
        let (m, acc) = logistic_baseline(&raw, &split, &LogisticConfig::default()).unwrap();
        assert_eq!(acc, 1.0);
        assert!(m.grad_norm < 1e-6);
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn newton_solution_is_stationary() {
        // overlapping classes: the optimum is finite even with a tiny penalty
        let xs = [0.1, 0.4, 0.35, 0.8, 0.2, 0.9, 0.6, 0.7];
        let labels = vec![0, 0, 1, 1, 0, 1, 0, 1];
        let raw = RawDataset::new(1, xs.to_vec(), labels, Source::Synthetic).unwrap();
        let split = vec![Split::Train; 7]
            .into_iter()
            .chain([Split::Test])
            .collect::<Vec<_>>();
        let cfg = LogisticConfig {
            alpha: Some(0.0),
            ..Default::default()
        };
        let (m, _) = logistic_baseline(&raw, &split, &cfg).unwrap();
        // gradient of the mean log-loss at the returned weights, computed directly
        let (mut g0, mut g1) = (0.0, 0.0);
        for (i, &x) in xs.iter().enumerate().take(7) {
            let r = m.probability(&[x]) - f64::from(raw.labels[i]);
            g0 += r;
            g1 += r * x;
        }
        assert!(g0.abs() / 7.0 < 1e-6 && g1.abs() / 7.0 < 1e-6);
    }
}

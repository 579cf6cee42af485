// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::RawDataset;

/// Rows per covariance chunk.
const CHUNK: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaTransform {
    pub n_features: usize,
    pub mean: Vec<f64>,
    /// `k x n_features`, row-major, orthonormal rows in order of decreasing variance.
    pub components: Vec<f64>,
    pub explained_variance: Vec<f64>,
}

impl PcaTransform {
    pub fn k(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        (0..self.k())
            .map(|i| {
                self.component(i)
                    .iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(c, (x, m))| c * (x - m))
                    .sum()
            })
            .collect()
    }
}

/// Top-`k` principal axes of the rows `rows` of `data`, from the eigendecomposition of their
/// sample covariance. Each axis is signed so that its largest-magnitude entry is positive.
pub fn fit_pca(data: &RawDataset, rows: &[usize], k: usize) -> Result<PcaTransform> {
    let n = data.n_features;
    if rows.len() < 2 {
        return Err(Error::RankDeficient {
            requested: k,
            rank: 0,
        });
    }
    let mut mean = vec![0.0; n];
    for &r in rows {
        for (m, x) in mean.iter_mut().zip(data.row(r)) {
            *m += x;
        }
    }
    let count = rows.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);

    let mut cov = DMatrix::<f64>::zeros(n, n);
    let mut buf = Vec::with_capacity(CHUNK * n);
    for chunk in rows.chunks(CHUNK) {
        buf.clear();
        for &r in chunk {
            buf.extend(data.row(r).iter().zip(&mean).map(|(x, m)| x - m));
        }
        let block = DMatrix::from_row_slice(chunk.len(), n, &buf);
        cov.gemm_tr(1.0, &block, &block, 1.0);
    }
    cov /= count - 1.0;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let tol = top * n as f64 * 1e-12;
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > tol && top > 0.0)
        .count();
    if k == 0 || k > rank {
        return Err(Error::RankDeficient { requested: k, rank });
    }

    let mut components = Vec::with_capacity(k * n);
    let mut explained_variance = Vec::with_capacity(k);
    for &i in &order[..k] {
        let v = eig.eigenvectors.column(i);
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        components.extend(v.iter().map(|x| sign * x));
        explained_variance.push(eig.eigenvalues[i]);
    }
    Ok(PcaTransform {
        n_features: n,
        mean,
        components,
        explained_variance,
    })
}

/// Projects every row, keeping labels and split tags.
pub fn apply_pca(t: &PcaTransform, data: &RawDataset) -> Result<RawDataset> {
    if data.n_features != t.n_features {
        return Err(Error::DimensionMismatch {
            expected: t.n_features,
            found: data.n_features,
        });
    }
    let features = (0..data.len())
        .flat_map(|i| t.project(data.row(i)))
        .collect();
    let mut out = RawDataset::new(t.k(), features, data.labels.clone(), data.source)?;
    out.split = data.split.clone();
    Ok(out)
}

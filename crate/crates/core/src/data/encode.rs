// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sim::Statevector;

use super::{EncodedDataset, RawDataset, Split};

/// Per-feature affine map onto `[0, π/2]`, fitted on one split and clipped elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rescaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Rescaler {
    pub fn fit(data: &RawDataset, rows: &[usize]) -> Result<Self> {
        let n = data.n_features;
        let mut min = vec![f64::INFINITY; n];
        let mut max = vec![f64::NEG_INFINITY; n];
        for &r in rows {
            for (j, &x) in data.row(r).iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        if let Some(j) = (0..n).find(|&j| max[j].partial_cmp(&min[j]) != Some(Ordering::Greater)) {
            return Err(Error::DegenerateFeature(j));
        }
        Ok(Self { min, max })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| ((x - lo) / (hi - lo) * FRAC_PI_2).clamp(0.0, FRAC_PI_2))
            .collect()
    }
}

/// `cos(x)|0⟩ + sin(x)|1⟩`.
pub fn qubit_encoding(x: f64) -> [C64; 2] {
    let (s, c) = x.sin_cos();
    [C64::new(c, 0.0), C64::new(s, 0.0)]
}

/// Product state with feature `n` on qubit `n`.
pub fn encode_features(x: &[f64]) -> Result<Statevector> {
    let qubits: Vec<[C64; 2]> = x.iter().map(|&v| qubit_encoding(v)).collect();
    Statevector::product(&qubits)
}

/// Rescales with the range of the training rows, then encodes every row.
pub fn rescale_and_encode(
    data: &RawDataset,
    split: &[Split],
) -> Result<(EncodedDataset, Rescaler)> {
    if split.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            found: split.len(),
        });
    }
    let train: Vec<usize> = (0..data.len())
        .filter(|&i| split[i] == Split::Train)
        .collect();
    if train.is_empty() {
        return Err(Error::MissingSplit("train"));
    }
    let scaler = Rescaler::fit(data, &train)?;
    let states = (0..data.len())
        .map(|i| encode_features(&scaler.transform(data.row(i))))
        .collect::<Result<_>>()?;
    Ok((
        EncodedDataset {
            states,
            labels: data.labels.clone(),
            split: split.to_vec(),
        },
        scaler,
    ))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    use super::*;
    use crate::data::Source;

    #[test]
    fn reference_angles() {
        let z = qubit_encoding(0.0);
        assert_eq!((z[0].re, z[1].re), (1.0, 0.0));
        let one = qubit_encoding(FRAC_PI_2);
        assert!(one[0].re.abs() < 1e-16 && (one[1].re - 1.0).abs() < 1e-16);
        let plus = qubit_encoding(FRAC_PI_4);
        assert!((plus[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((plus[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn train_range_maps_to_quarter_turn_and_test_is_clipped() {
        let raw = RawDataset::new(
            1,
            vec![2.0, 4.0, 3.0, 9.0, -1.0],
            vec![0; 5],
            Source::Synthetic,
        )
        .unwrap();
        let split = [
            Split::Train,
            Split::Train,
            Split::Train,
            Split::Test,
            Split::Test,
        ];
        let (enc, sc) = rescale_and_encode(&raw, &split).unwrap();
        assert_eq!(sc.transform(&[2.0]), [0.0]);
        assert_eq!(sc.transform(&[4.0]), [FRAC_PI_2]);
        assert_eq!(sc.transform(&[9.0]), [FRAC_PI_2]);
        assert_eq!(sc.transform(&[-1.0]), [0.0]);
        assert!(enc
            .states
            .iter()
            .all(|s| (s.norm_sqr() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constant_feature_is_an_error() {
        let raw =
            RawDataset::new(2, vec![1.0, 5.0, 2.0, 5.0], vec![0; 2], Source::Synthetic).unwrap();
        assert!(matches!(
            rescale_and_encode(&raw, &[Split::Train, Split::Train]),
            Err(Error::DegenerateFeature(1))
        ));
    }
}

// SPDX-License-Identifier: Apache-2.0

//! IDX reader for the MNIST files.

use std::path::Path;

use crate::error::{Error, Result};

use super::{RawDataset, Source, Split};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Canonical file names inside a data directory.
pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

/// Images kept for training out of the 60000 in the training file; the rest are validation.
pub const MNIST_TRAIN: usize = 55_000;

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn read_checked(path: &Path, magic: u32, header_len: usize) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 4 {
        return Err(Error::TruncatedFile(path.to_path_buf()));
    }
    let found = be_u32(&bytes, 0);
    if found != magic {
        return Err(Error::MagicMismatch {
            path: path.to_path_buf(),
            expected: magic,
            found,
        });
    }
    if bytes.len() < header_len {
        return Err(Error::TruncatedFile(path.to_path_buf()));
    }
    Ok(bytes)
}

/// Pixels scaled to `[0, 1]`, one flattened row per image, plus the image side lengths.
pub fn read_idx_images(path: impl AsRef<Path>) -> Result<(Vec<f64>, usize, usize)> {
    let path = path.as_ref();
    let bytes = read_checked(path, IMAGES_MAGIC, 16)?;
    let count = be_u32(&bytes, 4) as usize;
    let (rows, cols) = (be_u32(&bytes, 8) as usize, be_u32(&bytes, 12) as usize);
    let pixels = &bytes[16..];
    if pixels.len() < count * rows * cols {
        return Err(Error::TruncatedFile(path.to_path_buf()));
    }
    let data = pixels[..count * rows * cols]
        .iter()
        .map(|&p| f64::from(p) / 255.0)
        .collect();
    Ok((data, rows, cols))
}

pub fn read_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let bytes = read_checked(path, LABELS_MAGIC, 8)?;
    let count = be_u32(&bytes, 4) as usize;
    let labels = &bytes[8..];
    if labels.len() < count {
        return Err(Error::TruncatedFile(path.to_path_buf()));
    }
    Ok(labels[..count].to_vec())
}

pub fn load_mnist(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<RawDataset> {
    let (features, rows, cols) = read_idx_images(images_path)?;
    let labels = read_idx_labels(labels_path)?;
    if labels.iter().any(|&l| l > 9) {
        return Err(Error::InvalidConfig("MNIST label above 9".into()));
    }
    RawDataset::new(rows * cols, features, labels, Source::MnistIdx)
}

/// All 70000 images from the four canonical files in `dir`, tagged with the fixed split: the
/// first 55000 training images train, the last 5000 validate, the 10000 test images test.
pub fn load_mnist_dir(dir: impl AsRef<Path>) -> Result<RawDataset> {
    let dir = dir.as_ref();
    let train = load_mnist(dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS))?;
    let test = load_mnist(dir.join(TEST_IMAGES), dir.join(TEST_LABELS))?;
    if train.n_features != test.n_features || train.len() <= MNIST_TRAIN {
        return Err(Error::InvalidConfig(format!(
            "unexpected MNIST shapes: {} train rows of {} pixels, test rows of {} pixels",
            train.len(),
            train.n_features,
            test.n_features
        )));
    }
    let mut split = vec![Split::Train; MNIST_TRAIN];
    split.resize(train.len(), Split::Val);
    split.resize(train.len() + test.len(), Split::Test);
    let mut features = train.features;
    features.extend(test.features);
    let mut labels = train.labels;
    labels.extend(test.labels);
    let mut raw = RawDataset::new(train.n_features, features, labels, Source::MnistIdx)?;
    raw.split = Some(split);
    Ok(raw)
}

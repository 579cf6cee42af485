// SPDX-License-Identifier: Apache-2.0

//! Hierarchical quantum classifiers: tree tensor network (TTN) and MERA circuits trained on
//! classical and quantum data with an embedded exact simulator.

pub mod data;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod grad;
pub mod linalg;
pub mod sim;
pub mod topology;
pub mod trainer;

pub use error::{Error, Result};

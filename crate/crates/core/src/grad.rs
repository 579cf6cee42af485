// SPDX-License-Identifier: Apache-2.0

//! Mean-squared-error cost over a batch and its exact gradient.

use crate::error::{Error, Result};
use crate::sim::Statevector;
use crate::topology::{ClassifierModel, Evaluator, ParamVector, Strategy};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct GradientResult {
    pub cost: f64,
    pub grad: Vec<f64>,
    /// `M_θ(ψ_d)` per sample, in batch order.
    pub outputs: Vec<f64>,
}

fn collect<'a, I>(batch: I) -> Result<Vec<(&'a Statevector, f64)>>
where
    I: IntoIterator<Item = (&'a Statevector, u8)>,
{
    let items = batch
        .into_iter()
        .map(|(s, y)| match y {
            0 | 1 => Ok((s, f64::from(y))),
            _ => Err(Error::LabelOutOfRange(y)),
        })
        .collect::<Result<Vec<_>>>()?;
    if items.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(items)
}

/// `J(θ) = (1/D) Σ_d (M_θ(ψ_d) - y_d)²` and `∇J`, summed in batch order.
pub fn cost_and_grad<'a, I>(
    model: &ClassifierModel,
    params: &ParamVector,
    batch: I,
) -> Result<GradientResult>
where
    I: IntoIterator<Item = (&'a Statevector, u8)>,
{
    let items = collect(batch)?;
    let eval = Evaluator::new(model, params, Strategy::Adaptive, true)?;
    let mut acc = eval.accumulator();
    let inv_d = 1.0 / items.len() as f64;
    let mut cost = 0.0;
    let mut outputs = Vec::with_capacity(items.len());
    for (state, y) in items {
        let f = eval.accumulate(state, |f| 2.0 * (f - y) * inv_d, &mut acc)?;
        cost += (f - y) * (f - y);
        outputs.push(f);
    }
    Ok(GradientResult {
        cost: cost * inv_d,
        grad: eval.contract(&acc),
        outputs,
    })
}

/// `J(θ)` alone.
pub fn cost<'a, I>(model: &ClassifierModel, params: &ParamVector, batch: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a Statevector, u8)>,
{
    let items = collect(batch)?;
    let eval = Evaluator::new(model, params, Strategy::Adaptive, false)?;
    let mut total = 0.0;
    for (state, y) in &items {
        let r = eval.expectation(state)? - y;
        total += r * r;
    }
    Ok(total / items.len() as f64)
}

/// Central differences of [`cost`], one coordinate at a time.
pub fn finite_diff_grad<'a, I>(
    model: &ClassifierModel,
    params: &ParamVector,
    batch: I,
    step: f64,
) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = (&'a Statevector, u8)>,
{
    let items = collect(batch)?;
    let batch = || items.iter().map(|&(s, y)| (s, y as u8));
    let mut probe = params.clone();
    let mut grad = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        let x = params.as_slice()[k];
        probe.as_mut_slice()[k] = x + step;
        let up = cost(model, &probe, batch())?;
        probe.as_mut_slice()[k] = x - step;
        let down = cost(model, &probe, batch())?;
        probe.as_mut_slice()[k] = x;
        grad.push((up - down) / (2.0 * step));
    }
    Ok(grad)
}

// SPDX-License-Identifier: Apache-2.0

//! Forward evaluation and reverse-mode gradients of a classifier circuit.
//!
//! A model is compiled into a [`Plan`]: a sequence of steps over a register that holds only
//! the wires currently needed. Evaluation starts as a pure statevector over the data wires,
//! appends each ancilla in `|0⟩` just before its block, and switches to a density matrix over
//! the live wires once that is no larger than the statevector. From then on retired wires are
//! traced out right after their block.
//!
//! The backward sweep carries the adjoint of the observable: a vector `λ` in the pure stage and
//! a Hermitian operator `X` in the mixed stage. Each gate contributes an environment matrix
//! `E` with `∂f/∂θ = 2 Re Σ_ab ∂U[a,b]/∂θ · E[a,b]`; environments are linear in the sample
//! weight, so they are summed over a batch and contracted with `∂U` once.

use crate::error::{Error, Result};
use crate::gates::{build_unitary, build_unitary_and_grads, measurement_rotation_matrix, GateKind};
use crate::linalg::{SquareMatrix, C64, ZERO};
use crate::sim::kernel::{apply_matrix, environment, scatter_bits, WireMap};
use crate::sim::{
    conjugate, depolarize_in_place, left_multiply, partial_trace_unchecked, prob_zero,
    prob_zero_dm, reduce_pure, right_multiply, Statevector,
};

use super::{ClassifierModel, ParamVector};

/// How the register is managed during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Pure statevector until the live wires fit a smaller density matrix.
    #[default]
    Adaptive,
    /// One statevector over every wire, ancillas included; nothing is traced out.
    Deferred,
    /// Density matrix from the start; retired wires are traced out after each block.
    ImmediateDensity,
}

#[derive(Clone, Debug)]
enum Step {
    PureAncilla,
    PureGate {
        block: usize,
        pos: Vec<usize>,
    },
    /// `ρ = Tr_rest |ψ⟩⟨ψ|` keeping these register positions, in order.
    ToDensity {
        keep: Vec<usize>,
    },
    DmAncilla,
    DmGate {
        block: usize,
        pos: Vec<usize>,
    },
    DmTrace {
        keep: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
struct Plan {
    /// Each step with the register size before it.
    steps: Vec<(Step, usize)>,
    initial_ancillas: usize,
    final_n: usize,
    measure_pos: usize,
    mixed: bool,
}

fn compile(model: &ClassifierModel, strategy: Strategy) -> Plan {
    let mut steps = Vec::new();
    let mut reg: Vec<usize> = (0..model.n_data_qubits).collect();
    let mut mixed = false;
    let mut initial_ancillas = 0;
    match strategy {
        Strategy::Deferred => {
            initial_ancillas = model.n_qubits - model.n_data_qubits;
            reg = (0..model.n_qubits).collect();
        }
        Strategy::ImmediateDensity => {
            steps.push((
                Step::ToDensity {
                    keep: (0..reg.len()).collect(),
                },
                reg.len(),
            ));
            mixed = true;
        }
        Strategy::Adaptive => {}
    }
    let mut retired = vec![false; model.n_qubits];
    for (index, block) in model.blocks.iter().enumerate() {
        for &w in &block.wires {
            if !reg.contains(&w) {
                let step = if mixed {
                    Step::DmAncilla
                } else {
                    Step::PureAncilla
                };
                steps.push((step, reg.len()));
                reg.push(w);
            }
        }
        let pos: Vec<usize> = block
            .wires
            .iter()
            .map(|w| reg.iter().position(|r| r == w).expect("wire in register"))
            .collect();
        let step = if mixed {
            Step::DmGate { block: index, pos }
        } else {
            Step::PureGate { block: index, pos }
        };
        steps.push((step, reg.len()));
        for &w in &block.retires {
            retired[w] = true;
        }
        if strategy == Strategy::Deferred || !reg.iter().any(|&w| retired[w]) {
            continue;
        }
        let keep: Vec<usize> = (0..reg.len()).filter(|&p| !retired[reg[p]]).collect();
        if mixed {
            steps.push((Step::DmTrace { keep: keep.clone() }, reg.len()));
        } else if 2 * keep.len() + 2 <= reg.len() {
            steps.push((Step::ToDensity { keep: keep.clone() }, reg.len()));
            mixed = true;
        } else {
            continue;
        }
        reg = keep.iter().map(|&p| reg[p]).collect();
    }
    let measure_pos = reg
        .iter()
        .position(|&w| w == model.readout_qubit)
        .expect("readout survives");
    Plan {
        steps,
        initial_ancillas,
        final_n: reg.len(),
        measure_pos,
        mixed,
    }
}

/// Block unitaries, their adjoints and (optionally) their parameter derivatives.
struct GateCache {
    mats: Vec<SquareMatrix>,
    adjoints: Vec<SquareMatrix>,
    grads: Vec<Vec<SquareMatrix>>,
    meas: SquareMatrix,
    meas_adjoint: SquareMatrix,
    meas_grads: Vec<SquareMatrix>,
}

impl GateCache {
    fn new(model: &ClassifierModel, params: &ParamVector, with_grads: bool) -> Result<Self> {
        model.check_params(params)?;
        let p = params.as_slice();
        let mut mats = Vec::with_capacity(model.blocks.len());
        let mut grads = Vec::new();
        for (i, b) in model.blocks.iter().enumerate() {
            let bp = model.block_params(p, i);
            if with_grads {
                let (u, g) = build_unitary_and_grads(model.kind, bp, b.cnot_reversed)?;
                mats.push(u);
                grads.push(g);
            } else {
                mats.push(build_unitary(model.kind, bp, b.cnot_reversed)?);
            }
        }
        let (meas, mut meas_grads) =
            measurement_rotation_matrix(model.measurement_field(), model.measurement_params(p))?;
        if !with_grads {
            meas_grads.clear();
        }
        Ok(Self {
            adjoints: mats.iter().map(SquareMatrix::adjoint).collect(),
            mats,
            grads,
            meas_adjoint: meas.adjoint(),
            meas,
            meas_grads,
        })
    }
}

/// Summed, weighted environment matrices for one batch.
pub struct GradAccumulator {
    blocks: Vec<SquareMatrix>,
    meas: SquareMatrix,
}

/// A model with fixed parameters, compiled for repeated evaluation.
pub struct Evaluator<'m> {
    model: &'m ClassifierModel,
    plan: Plan,
    cache: GateCache,
}

impl<'m> Evaluator<'m> {
    pub fn new(
        model: &'m ClassifierModel,
        params: &ParamVector,
        strategy: Strategy,
        with_grads: bool,
    ) -> Result<Self> {
        Ok(Self {
            model,
            plan: compile(model, strategy),
            cache: GateCache::new(model, params, with_grads)?,
        })
    }

    pub fn model(&self) -> &ClassifierModel {
        self.model
    }

    fn check_input(&self, input: &Statevector) -> Result<()> {
        if input.n_qubits() != self.model.n_data_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.model.n_data_qubits,
                found: input.n_qubits(),
            });
        }
        Ok(())
    }

    /// Probability of `|0⟩` on the readout wire.
    pub fn expectation(&self, input: &Statevector) -> Result<f64> {
        self.check_input(input)?;
        Ok(self.run(input.amplitudes(), None).0)
    }

    pub fn accumulator(&self) -> GradAccumulator {
        let d = self.cache.mats.first().map_or(4, SquareMatrix::dim);
        GradAccumulator {
            blocks: vec![SquareMatrix::zeros(d); self.cache.mats.len()],
            meas: SquareMatrix::zeros(2),
        }
    }

    /// Evaluates `f(input)` and adds `weight(f) · ∂f/∂U` environments to `acc`.
    ///
    /// The evaluator must have been built with gradients enabled.
    pub fn accumulate(
        &self,
        input: &Statevector,
        weight: impl FnOnce(f64) -> f64,
        acc: &mut GradAccumulator,
    ) -> Result<f64> {
        self.check_input(input)?;
        if self.cache.meas_grads.is_empty() {
            return Err(Error::InvalidConfig(
                "evaluator was built without gradients".into(),
            ));
        }
        let mut tape = Vec::with_capacity(self.plan.steps.len() + 1);
        let (f, final_state) = self.run(input.amplitudes(), Some(&mut tape));
        self.backward(tape, final_state, weight(f), acc);
        Ok(f)
    }

    /// Turns accumulated environments into a gradient aligned with the parameter vector.
    pub fn contract(&self, acc: &GradAccumulator) -> Vec<f64> {
        let mut grad = vec![0.0; self.model.n_params];
        for (i, (dus, env)) in self.cache.grads.iter().zip(&acc.blocks).enumerate() {
            let off = self.model.blocks[i].param_offset;
            for (k, du) in dus.iter().enumerate() {
                grad[off + k] = 2.0 * du.elementwise_dot(env).re;
            }
        }
        let off = self.model.measurement_offset;
        for (k, dm) in self.cache.meas_grads.iter().enumerate() {
            grad[off + k] = 2.0 * dm.elementwise_dot(&acc.meas).re;
        }
        grad
    }

    /// `f(input)` and its gradient for one sample.
    pub fn value_and_grad(&self, input: &Statevector) -> Result<(f64, Vec<f64>)> {
        let mut acc = self.accumulator();
        let f = self.accumulate(input, |_| 1.0, &mut acc)?;
        Ok((f, self.contract(&acc)))
    }

    /// Forward pass. With a tape, records the input state of every step and returns the state
    /// entering the measurement rotation.
    fn run(&self, input: &[C64], mut tape: Option<&mut Vec<Vec<C64>>>) -> (f64, Vec<C64>) {
        let mut state = input.to_vec();
        for _ in 0..self.plan.initial_ancillas {
            state = append_zero(&state);
        }
        for (step, n) in &self.plan.steps {
            let n = *n;
            if let Some(t) = tape.as_deref_mut() {
                let keeps_input = matches!(
                    step,
                    Step::PureGate { .. } | Step::DmGate { .. } | Step::ToDensity { .. }
                );
                t.push(if keeps_input {
                    state.clone()
                } else {
                    Vec::new()
                });
            }
            match step {
                Step::PureAncilla => state = append_zero(&state),
                Step::PureGate { block, pos } => {
                    apply_matrix(&mut state, n, &self.cache.mats[*block], pos)
                }
                Step::ToDensity { keep } => {
                    state = reduce_pure(&state, n, keep).entries().to_vec();
                }
                Step::DmAncilla => state = dm_append_zero(&state, n),
                Step::DmGate { block, pos } => {
                    conjugate(&mut state, n, &self.cache.mats[*block], pos)
                }
                Step::DmTrace { keep } => {
                    state = partial_trace_unchecked(&state, n, keep).entries().to_vec();
                }
            }
        }
        let (n, q) = (self.plan.final_n, self.plan.measure_pos);
        let before = if tape.is_some() {
            state.clone()
        } else {
            Vec::new()
        };
        let f = if self.plan.mixed {
            conjugate(&mut state, n, &self.cache.meas, &[q]);
            prob_zero_dm(&state, n, q)
        } else {
            apply_matrix(&mut state, n, &self.cache.meas, &[q]);
            prob_zero(&state, n, q)
        };
        (f, before)
    }

    fn backward(
        &self,
        mut tape: Vec<Vec<C64>>,
        before_meas: Vec<C64>,
        w: f64,
        acc: &mut GradAccumulator,
    ) {
        let (n, q) = (self.plan.final_n, self.plan.measure_pos);
        let weight = C64::new(w, 0.0);
        let mut adj = if self.plan.mixed {
            let x = projector0_operator(n, q);
            let (env, x_in) = dm_backward(
                &before_meas,
                &x,
                n,
                &self.cache.meas,
                &self.cache.meas_adjoint,
                &[q],
            );
            add_scaled(&mut acc.meas, &env, weight);
            Adjoint::Mixed(x_in)
        } else {
            let mut lam = before_meas.clone();
            apply_matrix(&mut lam, n, &self.cache.meas, &[q]);
            let bit = 1usize << (n - 1 - q);
            lam.iter_mut()
                .enumerate()
                .filter(|(i, _)| i & bit != 0)
                .for_each(|(_, z)| *z = ZERO);
            add_scaled(
                &mut acc.meas,
                &environment(&lam, &before_meas, n, &[q]),
                weight,
            );
            apply_matrix(&mut lam, n, &self.cache.meas_adjoint, &[q]);
            Adjoint::Pure(lam)
        };

        for (i, (step, n)) in self.plan.steps.iter().enumerate().rev() {
            let n = *n;
            let saved = std::mem::take(&mut tape[i]);
            adj = match (step, adj) {
                (Step::PureAncilla, Adjoint::Pure(lam)) => {
                    Adjoint::Pure(lam.iter().step_by(2).copied().collect())
                }
                (Step::PureGate { block, pos }, Adjoint::Pure(mut lam)) => {
                    add_scaled(
                        &mut acc.blocks[*block],
                        &environment(&lam, &saved, n, pos),
                        weight,
                    );
                    apply_matrix(&mut lam, n, &self.cache.adjoints[*block], pos);
                    Adjoint::Pure(lam)
                }
                (Step::ToDensity { keep }, Adjoint::Mixed(x)) => {
                    Adjoint::Pure(observable_times_state(&x, &saved, n, keep))
                }
                (Step::DmAncilla, Adjoint::Mixed(x)) => Adjoint::Mixed(dm_restrict_zero(&x, n)),
                (Step::DmGate { block, pos }, Adjoint::Mixed(x)) => {
                    let (env, x_in) = dm_backward(
                        &saved,
                        &x,
                        n,
                        &self.cache.mats[*block],
                        &self.cache.adjoints[*block],
                        pos,
                    );
                    add_scaled(&mut acc.blocks[*block], &env, weight);
                    Adjoint::Mixed(x_in)
                }
                (Step::DmTrace { keep }, Adjoint::Mixed(x)) => {
                    Adjoint::Mixed(extend_identity(&x, n, keep))
                }
                _ => unreachable!("plan steps alternate consistently"),
            };
        }
    }
}

enum Adjoint {
    Pure(Vec<C64>),
    Mixed(Vec<C64>),
}

fn add_scaled(acc: &mut SquareMatrix, env: &SquareMatrix, w: C64) {
    for (a, e) in acc.as_mut_slice().iter_mut().zip(env.as_slice()) {
        *a += e * w;
    }
}

/// `ψ ⊗ |0⟩` with the new wire last.
fn append_zero(amps: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; 2 * amps.len()];
    for (i, &a) in amps.iter().enumerate() {
        out[2 * i] = a;
    }
    out
}

/// `ρ ⊗ |0⟩⟨0|` with the new wire last.
fn dm_append_zero(rho: &[C64], n: usize) -> Vec<C64> {
    let d = 1usize << n;
    let d2 = 2 * d;
    let mut out = vec![ZERO; d2 * d2];
    for r in 0..d {
        for c in 0..d {
            out[(2 * r) * d2 + 2 * c] = rho[r * d + c];
        }
    }
    out
}

/// Adjoint of [`dm_append_zero`]: the `⟨0|·|0⟩` block on the last wire of an `(n+1)`-qubit operator.
fn dm_restrict_zero(x: &[C64], n: usize) -> Vec<C64> {
    let d = 1usize << n;
    let d2 = 2 * d;
    let mut out = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = x[(2 * r) * d2 + 2 * c];
        }
    }
    out
}

/// `X ⊗ I`, with `X` on the register positions `keep` of an `n`-qubit register.
fn extend_identity(x: &[C64], n: usize, keep: &[usize]) -> Vec<C64> {
    let d = 1usize << n;
    let dk = 1usize << keep.len();
    let traced: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let kept_bits: Vec<usize> = (0..dk).map(|a| scatter_bits(a, keep, n)).collect();
    let mut out = vec![ZERO; d * d];
    for t in (0..1usize << traced.len()).map(|t| scatter_bits(t, &traced, n)) {
        for (a, &ka) in kept_bits.iter().enumerate() {
            for (b, &kb) in kept_bits.iter().enumerate() {
                out[(ka | t) * d + (kb | t)] = x[a * dk + b];
            }
        }
    }
    out
}

/// `(X ⊗ I) ψ`, with `X` on the register positions `keep`.
fn observable_times_state(x: &[C64], psi: &[C64], n: usize, keep: &[usize]) -> Vec<C64> {
    let dk = 1usize << keep.len();
    let traced: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let kept_bits: Vec<usize> = (0..dk).map(|a| scatter_bits(a, keep, n)).collect();
    let mut out = vec![ZERO; psi.len()];
    for t in (0..1usize << traced.len()).map(|t| scatter_bits(t, &traced, n)) {
        for (a, &ka) in kept_bits.iter().enumerate() {
            let row = &x[a * dk..(a + 1) * dk];
            out[ka | t] = row
                .iter()
                .zip(&kept_bits)
                .map(|(xab, &kb)| xab * psi[kb | t])
                .sum();
        }
    }
    out
}

/// `|0⟩⟨0|` on register position `q`, as a flattened operator.
fn projector0_operator(n: usize, q: usize) -> Vec<C64> {
    let d = 1usize << n;
    let bit = 1usize << (n - 1 - q);
    let mut x = vec![ZERO; d * d];
    for i in (0..d).filter(|i| i & bit == 0) {
        x[i * d + i] = C64::new(1.0, 0.0);
    }
    x
}

/// For `f = tr(X U ρ U†)`: the environment `E[a,b] = Σ_r (ρ U† X)[(b,r),(a,r)]` and the pulled-back
/// observable `U† X U`.
fn dm_backward(
    rho: &[C64],
    x: &[C64],
    n: usize,
    u: &SquareMatrix,
    u_adj: &SquareMatrix,
    pos: &[usize],
) -> (SquareMatrix, Vec<C64>) {
    let d = 1usize << n;
    let mut y = x.to_vec();
    left_multiply(&mut y, n, u_adj, pos);

    let map = WireMap::new(n, pos);
    let dl = map.dim();
    let offs = map.offsets();
    let mut env = SquareMatrix::zeros(dl);
    let es = env.as_mut_slice();
    let mut col = vec![ZERO; d];
    for base in map.bases() {
        for a in 0..dl {
            let j = base + offs[a];
            for (m, c) in col.iter_mut().enumerate() {
                *c = y[m * d + j];
            }
            for b in 0..dl {
                let i = base + offs[b];
                let row = &rho[i * d..(i + 1) * d];
                let v: C64 = row.iter().zip(&col).map(|(r, c)| r * c).sum();
                es[a * dl + b] += v;
            }
        }
    }
    right_multiply(&mut y, n, u, pos);
    (env, y)
}

/// `M_θ(ψ)` under the given register strategy.
pub fn predict_expectation_with(
    model: &ClassifierModel,
    params: &ParamVector,
    input: &Statevector,
    strategy: Strategy,
) -> Result<f64> {
    Evaluator::new(model, params, strategy, false)?.expectation(input)
}

/// Density-matrix evaluation with the depolarizing channel `ρ -> (1-λ')ρ + λ' I/2^N` applied to the
/// whole data register after every gate: after each `ry` and `cx` for simple real blocks, after each
/// block otherwise, and after the measurement rotation.
pub fn noisy_expectation(
    model: &ClassifierModel,
    params: &ParamVector,
    input: &Statevector,
    noise: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::NoiseOutOfRange(noise));
    }
    if model.n_qubits != model.n_data_qubits {
        return Err(Error::UnsupportedKind(model.kind));
    }
    if input.n_qubits() != model.n_data_qubits {
        return Err(Error::DimensionMismatch {
            expected: model.n_data_qubits,
            found: input.n_qubits(),
        });
    }
    let n = model.n_data_qubits;
    let mut rho = input.to_density().entries().to_vec();
    for block in model.unitary_blocks(params)? {
        if block.kind == GateKind::SimpleReal {
            for gate in crate::gates::decompose_simple_to_native(&block)? {
                conjugate(&mut rho, n, &gate.matrix(), &gate.wires());
                depolarize_in_place(&mut rho, n, noise);
            }
        } else {
            conjugate(&mut rho, n, &block.unitary()?, &block.wires);
            depolarize_in_place(&mut rho, n, noise);
        }
    }
    let meas = model.measurement_rotation(params)?;
    conjugate(&mut rho, n, &meas.matrix()?, &[meas.qubit]);
    depolarize_in_place(&mut rho, n, noise);
    Ok(prob_zero_dm(&rho, n, model.readout_qubit))
}

// SPDX-License-Identifier: Apache-2.0

//! OpenQASM 2.0 emission for simple real classifiers, and a reader for the emitted subset.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gates::{decompose_simple_to_native, GateKind, NativeGate};
use crate::sim::Statevector;

use super::{ClassifierModel, ParamVector};

/// Angles print with 17 significant digits, which round-trips every `f64`.
fn fmt_angle(a: f64) -> String {
    if a == 0.0 {
        "0".to_owned()
    } else {
        format!("{a:.16e}")
    }
}

pub fn export_qasm(model: &ClassifierModel, params: &ParamVector) -> Result<String> {
    if model.kind != GateKind::SimpleReal {
        return Err(Error::UnsupportedKind(model.kind));
    }
    let mut out = String::new();
    let n = model.n_data_qubits;
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];\ncreg c[1];");
    let mut emit = |g: &NativeGate| match *g {
        NativeGate::Ry { angle, wire } => {
            let _ = writeln!(out, "ry({}) q[{wire}];", fmt_angle(angle));
        }
        NativeGate::Cx { control, target } => {
            let _ = writeln!(out, "cx q[{control}],q[{target}];");
        }
    };
    for block in model.unitary_blocks(params)? {
        decompose_simple_to_native(&block)?
            .iter()
            .for_each(&mut emit);
    }
    let meas = model.measurement_rotation(params)?;
    emit(&NativeGate::Ry {
        angle: meas.params[0],
        wire: meas.qubit,
    });
    let _ = writeln!(out, "measure q[{}] -> c[0];", meas.qubit);
    Ok(out)
}

/// The `ry`/`cx`/`measure` subset produced by [`export_qasm`].
#[derive(Clone, Debug, PartialEq)]
pub struct QasmProgram {
    pub n_qubits: usize,
    pub gates: Vec<NativeGate>,
    pub measured: usize,
}

pub fn parse_qasm(text: &str) -> Result<QasmProgram> {
    let mut n_qubits = None;
    let mut gates = Vec::new();
    let mut measured = None;
    for (lineno, raw) in text.lines().enumerate() {
        let loc = format!("line {}", lineno + 1);
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| Error::parse(&loc, "missing ';'"))?
            .trim();
        if stmt == "OPENQASM 2.0" || stmt.starts_with("include ") || stmt.starts_with("creg ") {
            continue;
        }
        let n = n_qubits.unwrap_or(0);
        if let Some(rest) = stmt.strip_prefix("qreg ") {
            n_qubits = Some(parse_index(rest, &loc, usize::MAX)?);
        } else if let Some(rest) = stmt.strip_prefix("ry(") {
            let (angle, wire) = rest
                .split_once(')')
                .ok_or_else(|| Error::parse(&loc, "unterminated ry angle"))?;
            let angle: f64 = angle
                .trim()
                .parse()
                .map_err(|_| Error::parse(&loc, format!("bad angle {angle:?}")))?;
            gates.push(NativeGate::Ry {
                angle,
                wire: parse_index(wire, &loc, n)?,
            });
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let (c, t) = rest
                .split_once(',')
                .ok_or_else(|| Error::parse(&loc, "cx needs two operands"))?;
            gates.push(NativeGate::Cx {
                control: parse_index(c, &loc, n)?,
                target: parse_index(t, &loc, n)?,
            });
        } else if let Some(rest) = stmt.strip_prefix("measure ") {
            let (q, _) = rest
                .split_once("->")
                .ok_or_else(|| Error::parse(&loc, "measure needs a target"))?;
            measured = Some(parse_index(q, &loc, n)?);
        } else {
            return Err(Error::parse(
                &loc,
                format!("unsupported statement {stmt:?}"),
            ));
        }
    }
    Ok(QasmProgram {
        n_qubits: n_qubits.ok_or_else(|| Error::parse("end", "no qreg"))?,
        gates,
        measured: measured.ok_or_else(|| Error::parse("end", "no measure"))?,
    })
}

/// Parses `q[k]` and checks `k < bound`.
fn parse_index(s: &str, loc: &str, bound: usize) -> Result<usize> {
    let inner = s
        .trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::parse(loc, format!("expected q[index], got {s:?}")))?;
    let k: usize = inner
        .parse()
        .map_err(|_| Error::parse(loc, format!("bad index {inner:?}")))?;
    if k >= bound {
        return Err(Error::parse(loc, format!("index {k} out of range")));
    }
    Ok(k)
}

/// Probability of measuring `0` on the measured wire.
pub fn simulate_native(program: &QasmProgram, input: &Statevector) -> Result<f64> {
    if input.n_qubits() != program.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: program.n_qubits,
            found: input.n_qubits(),
        });
    }
    let mut state = input.clone();
    for g in &program.gates {
        state.apply_unitary(&g.matrix(), &g.wires())?;
    }
    state.expectation_projector0(program.measured)
}

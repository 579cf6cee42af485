// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::gates::GateKind;

fn pairs(m: &ClassifierModel, role: BlockRole) -> Vec<(usize, usize)> {
    m.blocks
        .iter()
        .filter(|b| b.role == role)
        .map(|b| (b.wires[0], b.wires[1]))
        .collect()
}

#[test]
fn ttn8_layout_table() {
    let m = build_ttn(8, GateKind::SimpleReal).unwrap();
    assert_eq!(
        pairs(&m, BlockRole::Tree),
        [(0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (5, 6), (2, 5)]
    );
    let reversed: Vec<usize> = (0..7).filter(|&i| m.blocks[i].cnot_reversed).collect();
    assert_eq!(reversed, [1, 3, 5]);
    assert_eq!(m.readout_qubit, 5);
    assert_eq!(m.n_layers(), 3);
    assert_eq!(m.n_params, 7 * 2 + 1);
    m.check_causality().unwrap();
}

#[test]
fn ttn4_reads_out_wire_two() {
    let m = build_ttn(4, GateKind::GeneralReal).unwrap();
    assert_eq!(pairs(&m, BlockRole::Tree), [(0, 1), (2, 3), (1, 2)]);
    assert_eq!(m.readout_qubit, 2);
    assert!(m.blocks.iter().all(|b| !b.cnot_reversed));
}

#[test]
fn mera8_disentanglers_straddle_tree_blocks() {
    let m = build_mera(8, GateKind::GeneralComplex).unwrap();
    assert_eq!(m.blocks.len(), 11);
    assert_eq!(
        pairs(&m, BlockRole::Disentangler),
        [(1, 2), (3, 4), (5, 6), (2, 5)]
    );
    assert_eq!(m.readout_qubit, 5);
    m.check_causality().unwrap();
    // disentanglers come before the tree layer they feed
    let roles: Vec<BlockRole> = m.blocks.iter().map(|b| b.role).collect();
    use BlockRole::{Disentangler as D, Tree as T};
    assert_eq!(roles, [D, D, D, T, T, T, T, D, T, T, T]);
}

#[test]
fn block_counts_across_sizes() {
    for n in [4usize, 8, 16] {
        assert_eq!(
            build_ttn(n, GateKind::GeneralReal).unwrap().blocks.len(),
            n - 1
        );
    }
    assert_eq!(
        build_mera(4, GateKind::GeneralReal).unwrap().blocks.len(),
        4
    );
    // straddling pairs per layer: 3 + 1 for N = 8, 7 + 3 + 1 for N = 16
    assert_eq!(
        build_mera(16, GateKind::GeneralReal)
            .unwrap()
            .count_role(BlockRole::Disentangler),
        11
    );
}

#[test]
fn ancilla_kinds_add_one_wire_per_block() {
    let m = build_mera(8, GateKind::AncillaReal).unwrap();
    assert_eq!(m.n_qubits, 8 + 11);
    for (i, b) in m.blocks.iter().enumerate() {
        assert_eq!(b.wires[2], 8 + i);
        assert!(b.retires.contains(&(8 + i)));
    }
    m.check_causality().unwrap();
}

#[test]
fn rejects_bad_sizes() {
    for n in [0usize, 1, 3, 6, 32] {
        assert!(matches!(
            build_ttn(n, GateKind::SimpleReal),
            Err(Error::UnsupportedSize(_))
        ));
    }
}

#[test]
fn hybrid_init_rejects_simple_kinds() {
    let m = build_ttn(4, GateKind::SimpleComplex).unwrap();
    let p = ParamVector::zeros(m.n_params);
    assert!(matches!(
        hybrid_init(&m, &p),
        Err(Error::UnsupportedKind(_))
    ));
}

#[test]
fn hybrid_init_copies_tree_params() {
    let m = build_ttn(8, GateKind::GeneralReal).unwrap();
    let p = ParamVector::new((0..m.n_params).map(|i| i as f64 + 1.0).collect());
    let (mera, q) = hybrid_init(&m, &p).unwrap();
    let tree: Vec<&[f64]> = mera
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.role == BlockRole::Tree)
        .map(|(i, _)| mera.block_params(q.as_slice(), i))
        .collect();
    for (i, t) in tree.iter().enumerate() {
        assert_eq!(*t, m.block_params(p.as_slice(), i));
    }
    for (i, b) in mera.blocks.iter().enumerate() {
        if b.role == BlockRole::Disentangler {
            assert!(mera.block_params(q.as_slice(), i).iter().all(|&x| x == 0.0));
        }
    }
    assert_eq!(
        mera.measurement_params(q.as_slice()),
        m.measurement_params(p.as_slice())
    );
}

#[test]
fn zero_simple_model_on_zero_state_gives_one() {
    let m = build_ttn(8, GateKind::SimpleReal).unwrap();
    let p = ParamVector::zeros(m.n_params);
    let e = m.predict_expectation(&p, &Statevector::zero(8)).unwrap();
    assert!((e - 1.0).abs() < 1e-14);
    assert_eq!(m.predict_label(&p, &Statevector::zero(8)).unwrap(), 1);
}

#[test]
fn labels_and_votes_follow_tie_rule() {
    assert_eq!(label_from_expectation(0.5), 1);
    assert_eq!(label_from_expectation(0.0), 0);
    assert_eq!(label_from_expectation(1.0), 1);
    assert_eq!(majority_label(200, 401), 0);
    assert_eq!(majority_label(201, 401), 1);
    assert_eq!(majority_label(2, 4), 1);
}

#[test]
fn input_size_is_checked() {
    let m = build_ttn(4, GateKind::GeneralReal).unwrap();
    let p = ParamVector::zeros(m.n_params);
    assert!(matches!(
        m.predict_expectation(&p, &Statevector::zero(8)),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        m.predict_expectation(&ParamVector::zeros(3), &Statevector::zero(4)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn zero_parameter_qasm_structure() {
    let m = build_ttn(4, GateKind::SimpleReal).unwrap();
    let text = export_qasm(&m, &ParamVector::zeros(m.n_params)).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"));
    assert_eq!(text.matches("ry(0) ").count(), 7);
    assert_eq!(text.matches("cx ").count(), 3);
    assert_eq!(text.matches("measure ").count(), 1);
    let prog = parse_qasm(&text).unwrap();
    assert_eq!(prog.n_qubits, 4);
    assert_eq!(prog.measured, 2);
}

#[test]
fn qasm_rejects_other_kinds() {
    let m = build_ttn(4, GateKind::GeneralReal).unwrap();
    assert!(matches!(
        export_qasm(&m, &ParamVector::zeros(m.n_params)),
        Err(Error::UnsupportedKind(_))
    ));
}

// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use clue::core::{build_circuit, GateKind, LogicalCircuit, NeuronId, Role};

pub fn id(s: &str) -> NeuronId {
    NeuronId::new(s).unwrap()
}

/// Circuit from `(receiver, kind, senders)` rows.
pub fn circuit(output: &str, rows: &[(&str, GateKind, &[&str])], role: Role) -> LogicalCircuit {
    let mut nodes = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut gates = Vec::new();
    for (r, kind, senders) in rows {
        nodes.insert(id(r));
        gates.push((id(r), *kind));
        for s in *senders {
            nodes.insert(id(s));
            edges.push((id(s), id(r)));
        }
    }
    build_circuit(nodes, edges, gates, id(output), role).unwrap()
}

/// forget: output = A AND B; retain: output = A OR B.
pub fn pair_and_or() -> (LogicalCircuit, LogicalCircuit) {
    (
        circuit("output", &[("output", GateKind::And, &["A", "B"])], Role::Forget),
        circuit("output", &[("output", GateKind::Or, &["A", "B"])], Role::Retain),
    )
}

/// forget: output = A OR B; retain: output = B AND C.
pub fn pair_or_and() -> (LogicalCircuit, LogicalCircuit) {
    (
        circuit("output", &[("output", GateKind::Or, &["A", "B"])], Role::Forget),
        circuit("output", &[("output", GateKind::And, &["B", "C"])], Role::Retain),
    )
}

/// Two-level toy circuit with one gate of each kind per level.
pub fn toy(role: Role) -> LogicalCircuit {
    circuit(
        "output",
        &[
            ("output", GateKind::Adder, &["C1", "C2"]),
            ("C1", GateKind::And, &["B1", "B2"]),
            ("C2", GateKind::Or, &["B2", "B3"]),
            ("B1", GateKind::Or, &["A1", "A2"]),
            ("B2", GateKind::And, &["A3", "A4"]),
            ("B3", GateKind::Adder, &["A5", "A6"]),
        ],
        role,
    )
}

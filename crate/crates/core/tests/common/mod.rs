// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use clue_core::{build_circuit, CnfFormula, GateKind, Literal, LogicalCircuit, NeuronId, Role};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn id(s: &str) -> NeuronId {
    NeuronId::new(s).unwrap()
}

/// Random layered circuit: `sources` inputs, `gates` gates with fan-in 2..=3
/// drawn from earlier nodes; the last gate is the output.
pub fn random_circuit(
    rng: &mut impl Rng,
    sources: &[String],
    gates: usize,
    prefix: &str,
    output: &str,
    role: Role,
) -> LogicalCircuit {
    let mut nodes: Vec<String> = sources.to_vec();
    let mut edges = Vec::new();
    let mut kinds = Vec::new();
    for g in 0..gates {
        let name = if g + 1 == gates { output.to_string() } else { format!("{prefix}{g}") };
        let fan_in = rng.random_range(2..=3).min(nodes.len());
        let senders: Vec<String> = nodes.choose_multiple(rng, fan_in).cloned().collect();
        for s in senders {
            edges.push((id(&s), id(&name)));
        }
        let kind = *[GateKind::And, GateKind::Or, GateKind::Adder].choose(rng).unwrap();
        kinds.push((id(&name), kind));
        nodes.push(name);
    }
    build_circuit(nodes.iter().map(|n| id(n)), edges, kinds, id(output), role).unwrap()
}

/// Random forget/retain pair over a common pool of source and hidden names.
pub fn random_pair(rng: &mut impl Rng) -> (LogicalCircuit, LogicalCircuit) {
    let pool: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
    let mut side = |role: Role| {
        let n = rng.random_range(2..=5);
        let srcs: Vec<String> = pool.choose_multiple(rng, n).cloned().collect();
        let gates = rng.random_range(1..=4);
        random_circuit(rng, &srcs, gates, "h", "out", role)
    };
    let f = side(Role::Forget);
    let r = side(Role::Retain);
    (f, r)
}

/// Every model of `f`, by plain backtracking over all variables.
pub fn enumerate_models(f: &CnfFormula) -> Vec<Vec<bool>> {
    fn go(f: &CnfFormula, values: &mut Vec<Option<bool>>, i: usize, out: &mut Vec<Vec<bool>>) {
        let falsified = f.clauses().iter().any(|c| {
            c.literals().iter().all(|l| matches!(values[l.var().index()], Some(v) if !l.eval(v)))
        });
        if falsified {
            return;
        }
        if i == values.len() {
            out.push(values.iter().map(|v| v.unwrap()).collect());
            return;
        }
        for b in [false, true] {
            values[i] = Some(b);
            go(f, values, i + 1, out);
        }
        values[i] = None;
    }
    let mut out = Vec::new();
    go(f, &mut vec![None; f.var_count() as usize], 0, &mut out);
    out
}

/// Satisfiability by exhaustive truth table.
pub fn truth_table_sat(f: &CnfFormula) -> bool {
    let n = f.var_count() as usize;
    assert!(n <= 24);
    (0u32..1 << n).any(|m| {
        let values: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
        f.is_satisfied_by(&values)
    })
}

/// Uniform random 3-CNF with `vars` variables and `clauses` clauses.
pub fn random_3cnf(rng: &mut impl Rng, vars: u32, clauses: usize) -> CnfFormula {
    let mut f = CnfFormula::new(vars);
    for _ in 0..clauses {
        let lits: Vec<Literal> = (0..3)
            .map(|_| {
                let v = rng.random_range(1..=vars as i32);
                Literal::from_dimacs(if rng.random_bool(0.5) { v } else { -v }).unwrap()
            })
            .collect();
        f.add_clause(lits).unwrap();
    }
    f
}

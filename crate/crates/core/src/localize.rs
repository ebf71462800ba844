// SPDX-License-Identifier: Apache-2.0

//! Neuron classification and minimum conflict sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::cardinality::SequentialCounter;
use crate::circuit::{LogicalCircuit, NeuronId, Role};
use crate::cnf::{
    compose_phi, encode_circuit, Clause, CnfError, CnfFormula, Literal, Var, VarAllocator,
    VarOrigin,
};
use crate::solver::{Assignment, SolveResult, Solver, SolverConfig, SolverStats};

/// Oracle limit on distinct neurons across both circuits.
pub const BRUTE_FORCE_NEURON_LIMIT: usize = 20;
/// Oracle limit on free source bits across both circuits.
pub const BRUTE_FORCE_BIT_LIMIT: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SafeReason {
    /// Occurs in no clause.
    Absent,
    /// Holds value 1 in the reported model.
    Retain,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NeuronClass {
    Safe(SafeReason),
    Forget,
    Conflict,
}

impl NeuronClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NeuronClass::Safe(SafeReason::Absent) => "safe_absent",
            NeuronClass::Safe(SafeReason::Retain) => "safe_retain",
            NeuronClass::Forget => "forget",
            NeuronClass::Conflict => "conflict",
        }
    }
}

impl fmt::Display for NeuronClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for NeuronClass {
    type Err = LocalizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "safe_absent" => NeuronClass::Safe(SafeReason::Absent),
            "safe_retain" => NeuronClass::Safe(SafeReason::Retain),
            "forget" => NeuronClass::Forget,
            "conflict" => NeuronClass::Conflict,
            _ => return Err(LocalizeError::UnknownClass(s.into())),
        })
    }
}

/// A neuron's value on each side. `None` when the neuron is not part of
/// that side's circuit.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SplitValue {
    pub forget: Option<bool>,
    pub retain: Option<bool>,
}

impl SplitValue {
    pub fn both(v: bool) -> Self {
        SplitValue { forget: Some(v), retain: Some(v) }
    }

    /// The agreed value, if the sides present agree.
    pub fn value(self) -> Option<bool> {
        match (self.forget, self.retain) {
            (Some(a), Some(b)) if a == b => Some(a),
            (Some(a), None) | (None, Some(a)) => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct LocalizationReport {
    pub classes: BTreeMap<NeuronId, NeuronClass>,
    pub conflict_count: usize,
    /// Per-side values in the reported model.
    pub values: BTreeMap<NeuronId, SplitValue>,
    /// Whether Φ was satisfiable without relaxing any neuron.
    pub phi_satisfiable: bool,
    pub stats: SolverStats,
    pub seed: u64,
}

impl LocalizationReport {
    pub fn conflicts(&self) -> BTreeSet<NeuronId> {
        self.with_class(NeuronClass::Conflict)
    }

    pub fn with_class(&self, class: NeuronClass) -> BTreeSet<NeuronId> {
        self.classes.iter().filter(|(_, &c)| c == class).map(|(n, _)| n.clone()).collect()
    }

    pub fn count(&self, class: NeuronClass) -> usize {
        self.classes.values().filter(|&&c| c == class).count()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LocalizeError {
    RoleMismatch { expected: Role, found: Role },
    TooLarge { neurons: usize, bits: usize },
    UnknownClass(alloc::string::String),
    /// The fully relaxed formula was unsatisfiable.
    Infeasible,
    Cnf(CnfError),
}

impl fmt::Display for LocalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalizeError::RoleMismatch { expected, found } => {
                write!(f, "expected a {} circuit, got role {}", expected.as_str(), found.as_str())
            }
            LocalizeError::TooLarge { neurons, bits } => write!(
                f,
                "instance too large for brute force: {neurons} neurons (limit \
                 {BRUTE_FORCE_NEURON_LIMIT}), {bits} free bits (limit {BRUTE_FORCE_BIT_LIMIT})"
            ),
            LocalizeError::UnknownClass(s) => write!(f, "unknown neuron class `{s}`"),
            LocalizeError::Infeasible => write!(f, "relaxed formula is unsatisfiable"),
            LocalizeError::Cnf(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LocalizeError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            LocalizeError::Cnf(e) => Some(e),
            _ => None,
        }
    }
}

impl From<CnfError> for LocalizeError {
    fn from(e: CnfError) -> Self {
        LocalizeError::Cnf(e)
    }
}

fn check_role(c: &LogicalCircuit, expected: Role) -> Result<(), LocalizeError> {
    if c.role() == expected {
        Ok(())
    } else {
        Err(LocalizeError::RoleMismatch { expected, found: c.role() })
    }
}

fn inner_nodes(c: &LogicalCircuit) -> impl Iterator<Item = &NeuronId> + '_ {
    c.nodes().iter().enumerate().filter(move |(i, _)| *i != c.output_index()).map(|(_, n)| n)
}

/// Non-output neurons present in both circuits, sorted.
pub fn shared_neurons(circuit_f: &LogicalCircuit, circuit_r: &LogicalCircuit) -> Vec<NeuronId> {
    let r: BTreeSet<&NeuronId> = inner_nodes(circuit_r).collect();
    let set: BTreeSet<&NeuronId> = inner_nodes(circuit_f).filter(|n| r.contains(n)).collect();
    set.into_iter().cloned().collect()
}

/// Whether `n` takes part in any gate, as sender or receiver.
fn is_connected(c: &LogicalCircuit, n: &NeuronId) -> bool {
    c.index_of(n).is_some_and(|i| {
        c.gate_at(i).is_some() || c.edge_indices().iter().any(|&(s, _)| s == i)
    })
}

fn classify(
    circuit_f: &LogicalCircuit,
    circuit_r: Option<&LogicalCircuit>,
    values: &BTreeMap<NeuronId, SplitValue>,
    conflicts: &BTreeSet<NeuronId>,
    used: impl Fn(&NeuronId) -> bool,
) -> BTreeMap<NeuronId, NeuronClass> {
    values
        .iter()
        .map(|(n, v)| {
            let class = if conflicts.contains(n) {
                NeuronClass::Conflict
            } else if !used(n) {
                NeuronClass::Safe(SafeReason::Absent)
            } else if v.value() == Some(true) {
                NeuronClass::Safe(SafeReason::Retain)
            } else {
                NeuronClass::Forget
            };
            debug_assert!(
                circuit_f.contains(n) || circuit_r.is_some_and(|r| r.contains(n)),
                "classified neuron belongs to a circuit"
            );
            (n.clone(), class)
        })
        .collect()
}

/// Classifies every neuron of the two circuits and, when Φ is
/// unsatisfiable, finds a minimum set of conflict neurons.
pub fn localize(
    circuit_f: &LogicalCircuit,
    circuit_r: &LogicalCircuit,
) -> Result<LocalizationReport, LocalizeError> {
    localize_with(circuit_f, Some(circuit_r), &SolverConfig::default())
}

/// [`localize`] with an explicit solver configuration; `circuit_r` may be
/// omitted to localize against the forget circuit alone.
pub fn localize_with(
    circuit_f: &LogicalCircuit,
    circuit_r: Option<&LogicalCircuit>,
    config: &SolverConfig,
) -> Result<LocalizationReport, LocalizeError> {
    check_role(circuit_f, Role::Forget)?;
    if let Some(r) = circuit_r {
        check_role(r, Role::Retain)?;
    }
    let mut stats = SolverStats::default();

    // Shared variables.
    let mut alloc = VarAllocator::new();
    let phi = build_phi(circuit_f, circuit_r, &mut alloc, &BTreeSet::new())?;
    let mut solver = Solver::from_formula(&phi, config.clone());
    let result = solver.solve();
    stats += solver.stats();
    if let SolveResult::Sat(model) = result {
        let values = read_values(circuit_f, circuit_r, &phi, &model, &BTreeSet::new());
        let used = phi.used_vars();
        let classes = classify(circuit_f, circuit_r, &values, &BTreeSet::new(), |n| {
            phi.names().neuron(n).is_some_and(|v| used.contains(&v))
        });
        return Ok(LocalizationReport {
            classes,
            conflict_count: 0,
            values,
            phi_satisfiable: true,
            stats,
            seed: config.seed,
        });
    }

    // Split every shared neuron behind a selector.
    let circuit_r = circuit_r.expect("Φ without a retain circuit is satisfiable");
    let shared = shared_neurons(circuit_f, circuit_r);
    let split: BTreeSet<NeuronId> = shared.iter().cloned().collect();
    let mut alloc = VarAllocator::new();
    let mut phi = build_phi(circuit_f, Some(circuit_r), &mut alloc, &split)?;
    let mut extra: Vec<Clause> = Vec::new();
    let mut selectors: Vec<Var> = Vec::with_capacity(shared.len());
    for n in &shared {
        let nf = alloc.var(VarOrigin::Split(n.clone(), Role::Forget));
        let nr = alloc.var(VarOrigin::Split(n.clone(), Role::Retain));
        let s = alloc.var(VarOrigin::Selector(n.clone()));
        selectors.push(s);
        let (pf, nf_) = (Literal::positive(nf), Literal::negative(nf));
        let (pr, nr_) = (Literal::positive(nr), Literal::negative(nr));
        let (ps, ns) = (Literal::positive(s), Literal::negative(s));
        // s false exactly when the sides read (0, 1); (1, 0) is excluded.
        extra.extend(Clause::new([nf_, pr])?);
        extra.extend(Clause::new([ps, nf_])?);
        extra.extend(Clause::new([ps, pr])?);
        extra.extend(Clause::new([ns, pf, nr_])?);
    }
    let disabled: Vec<Literal> = selectors.iter().map(|&s| Literal::negative(s)).collect();
    let (counter, counter_clauses) = SequentialCounter::encode(&disabled, &mut alloc)?;
    extra.extend(counter_clauses);
    phi.set_var_count(alloc.var_count());
    for (v, o) in alloc.map().iter() {
        if phi.names().var(o).is_none() {
            phi.name_var(o.clone(), v)?;
        }
    }
    phi.extend(extra)?;

    let mut solver = Solver::from_formula(&phi, config.clone());
    let mut bound = None;
    for k in 0..=shared.len() {
        let assumptions: Vec<Literal> = counter.at_most(k).into_iter().collect();
        if solver.solve_with(&assumptions).is_sat() {
            bound = Some(k);
            break;
        }
    }
    let k = bound.ok_or(LocalizeError::Infeasible)?;

    // Smallest conflict set in lexicographic order at this bound.
    let mut assumptions: Vec<Literal> = counter.at_most(k).into_iter().collect();
    let mut chosen = 0;
    for &s in &selectors {
        if chosen == k {
            assumptions.push(Literal::positive(s));
            continue;
        }
        assumptions.push(Literal::negative(s));
        if solver.solve_with(&assumptions).is_sat() {
            chosen += 1;
        } else {
            assumptions.pop();
            assumptions.push(Literal::positive(s));
        }
    }
    let model = match solver.solve_with(&assumptions) {
        SolveResult::Sat(m) => m,
        SolveResult::Unsat(_) => return Err(LocalizeError::Infeasible),
    };
    stats += solver.stats();

    let conflicts: BTreeSet<NeuronId> = shared
        .iter()
        .zip(&selectors)
        .filter(|(_, &s)| !model.value(s))
        .map(|(n, _)| n.clone())
        .collect();
    debug_assert_eq!(conflicts.len(), k);
    let values = read_values(circuit_f, Some(circuit_r), &phi, &model, &split);
    let used = phi.used_vars();
    let names = phi.names();
    let classes = classify(circuit_f, Some(circuit_r), &values, &conflicts, |n| {
        [
            VarOrigin::Neuron(n.clone()),
            VarOrigin::Split(n.clone(), Role::Forget),
            VarOrigin::Split(n.clone(), Role::Retain),
        ]
        .iter()
        .any(|o| names.var(o).is_some_and(|v| used.contains(&v)))
    });
    Ok(LocalizationReport {
        classes,
        conflict_count: conflicts.len(),
        values,
        phi_satisfiable: false,
        stats,
        seed: config.seed,
    })
}

fn build_phi(
    circuit_f: &LogicalCircuit,
    circuit_r: Option<&LogicalCircuit>,
    alloc: &mut VarAllocator,
    split: &BTreeSet<NeuronId>,
) -> Result<CnfFormula, LocalizeError> {
    let phi_f = encode_circuit(circuit_f, alloc, split)?;
    let Some(circuit_r) = circuit_r else {
        let mut phi = phi_f.clone();
        let out_f = phi.output_var(Role::Forget).ok_or(CnfError::MissingOutputVar(Role::Forget))?;
        phi.add_clause([Literal::negative(out_f)])?;
        return Ok(phi);
    };
    let phi_r = encode_circuit(circuit_r, alloc, split)?;
    let mut phi = compose_phi(&phi_f, &phi_r)?;
    phi.set_var_count(alloc.var_count());
    Ok(phi)
}

fn read_values(
    circuit_f: &LogicalCircuit,
    circuit_r: Option<&LogicalCircuit>,
    phi: &CnfFormula,
    model: &Assignment,
    split: &BTreeSet<NeuronId>,
) -> BTreeMap<NeuronId, SplitValue> {
    let mut values: BTreeMap<NeuronId, SplitValue> = BTreeMap::new();
    let mut side = |c: &LogicalCircuit, role: Role| {
        for n in inner_nodes(c) {
            let origin = if split.contains(n) {
                VarOrigin::Split(n.clone(), role)
            } else {
                VarOrigin::Neuron(n.clone())
            };
            let v = phi.names().var(&origin).map(|v| model.value(v));
            let entry = values.entry(n.clone()).or_default();
            match role {
                Role::Forget => entry.forget = v,
                _ => entry.retain = v,
            }
        }
    };
    side(circuit_f, Role::Forget);
    if let Some(r) = circuit_r {
        side(r, Role::Retain);
    }
    values
}

/// Reference implementation: the smallest conflict set, ties broken
/// lexicographically, found by enumerating every source assignment of the
/// ADDER-simplified circuits.
pub fn brute_force_localize(
    circuit_f: &LogicalCircuit,
    circuit_r: &LogicalCircuit,
) -> Result<LocalizationReport, LocalizeError> {
    check_role(circuit_f, Role::Forget)?;
    check_role(circuit_r, Role::Retain)?;
    let neurons: BTreeSet<&NeuronId> =
        circuit_f.nodes().iter().chain(circuit_r.nodes()).collect();
    let bf = circuit_f.source_indices().len();
    let bits = bf + circuit_r.source_indices().len();
    if neurons.len() > BRUTE_FORCE_NEURON_LIMIT || bits > BRUTE_FORCE_BIT_LIMIT {
        return Err(LocalizeError::TooLarge { neurons: neurons.len(), bits });
    }
    let sf = circuit_f.simplify_adders().map_err(CnfError::from)?;
    let sr = circuit_r.simplify_adders().map_err(CnfError::from)?;
    let shared = shared_neurons(circuit_f, circuit_r);
    let pos_f: Vec<usize> = shared.iter().map(|n| sf.index_of(n).expect("shared")).collect();
    let pos_r: Vec<usize> = shared.iter().map(|n| sr.index_of(n).expect("shared")).collect();

    // Best (conflict indices, forget states, retain states).
    let mut best: Option<(Vec<usize>, Vec<bool>, Vec<bool>)> = None;
    let mut src_f = alloc::vec![false; bf];
    let mut src_r = alloc::vec![false; bits - bf];
    for mask in 0u64..(1u64 << bits) {
        for (i, b) in src_f.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        for (i, b) in src_r.iter_mut().enumerate() {
            *b = mask >> (bf + i) & 1 == 1;
        }
        let states_f: Vec<bool> = sf.evaluate_indexed(&src_f).iter().map(|s| s.is_active()).collect();
        let states_r: Vec<bool> = sr.evaluate_indexed(&src_r).iter().map(|s| s.is_active()).collect();
        if states_f[sf.output_index()] || !states_r[sr.output_index()] {
            continue;
        }
        let mut split = Vec::new();
        let mut ok = true;
        for (j, (&pf, &pr)) in pos_f.iter().zip(&pos_r).enumerate() {
            match (states_f[pf], states_r[pr]) {
                (false, true) => split.push(j),
                (true, false) => {
                    ok = false;
                    break;
                }
                _ => {}
            }
        }
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _, _)) => (split.len(), &split) < (b.len(), b),
        };
        if better {
            best = Some((split, states_f, states_r));
        }
    }
    let (split, states_f, states_r) = best.ok_or(LocalizeError::Infeasible)?;

    let conflicts: BTreeSet<NeuronId> = split.iter().map(|&j| shared[j].clone()).collect();
    let mut values: BTreeMap<NeuronId, SplitValue> = BTreeMap::new();
    for n in inner_nodes(&sf) {
        values.entry(n.clone()).or_default().forget = Some(states_f[sf.index_of(n).unwrap()]);
    }
    for n in inner_nodes(&sr) {
        values.entry(n.clone()).or_default().retain = Some(states_r[sr.index_of(n).unwrap()]);
    }
    let classes = classify(circuit_f, Some(circuit_r), &values, &conflicts, |n| {
        is_connected(circuit_f, n) || is_connected(circuit_r, n)
    });
    Ok(LocalizationReport {
        classes,
        conflict_count: conflicts.len(),
        values,
        phi_satisfiable: conflicts.is_empty(),
        stats: SolverStats::default(),
        seed: 0,
    })
}

/// Checks a report against gate semantics: substituting its values into the
/// ADDER-simplified circuits must give forget output 0 and retain output 1,
/// with every class consistent with its values. Returns a description of
/// the first violation.
pub fn check_report(
    circuit_f: &LogicalCircuit,
    circuit_r: Option<&LogicalCircuit>,
    report: &LocalizationReport,
) -> Result<(), alloc::string::String> {
    use alloc::format;
    let side = |c: &LogicalCircuit, want: bool, pick: fn(&SplitValue) -> Option<bool>| {
        let s = c.simplify_adders().map_err(|e| format!("{e}"))?;
        let value = |n: &NeuronId| {
            report.values.get(n).and_then(pick).ok_or_else(|| format!("no value for `{n}`"))
        };
        let srcs: Vec<bool> = s
            .source_indices()
            .iter()
            .map(|&i| {
                if i == s.output_index() {
                    Ok(!want)
                } else {
                    value(&s.nodes()[i])
                }
            })
            .collect::<Result<_, _>>()?;
        let states = s.evaluate_indexed(&srcs);
        for (i, n) in s.nodes().iter().enumerate() {
            let got = states[i].is_active();
            if i == s.output_index() {
                if got != want {
                    return Err(format!("{} output `{n}` evaluates to {}", c.role().as_str(), got as u8));
                }
            } else if value(n)? != got {
                return Err(format!("`{n}` disagrees with its gate on the {} side", c.role().as_str()));
            }
        }
        Ok(())
    };
    side(circuit_f, false, |v| v.forget)?;
    if let Some(r) = circuit_r {
        side(r, true, |v| v.retain)?;
    }
    let mut conflicts = 0;
    for (n, class) in &report.classes {
        let v = report.values.get(n).copied().unwrap_or_default();
        let ok = match class {
            NeuronClass::Conflict => {
                conflicts += 1;
                v.forget == Some(false) && v.retain == Some(true)
            }
            NeuronClass::Safe(SafeReason::Retain) => v.value() == Some(true),
            NeuronClass::Forget => v.value() == Some(false),
            NeuronClass::Safe(SafeReason::Absent) => v.value().is_some(),
        };
        if !ok {
            return Err(format!("`{n}` classified {class} with values {v:?}"));
        }
    }
    if conflicts != report.conflict_count {
        return Err(format!("conflict_count {} but {conflicts} conflict neurons", report.conflict_count));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_circuit, GateKind};

    fn id(s: &str) -> NeuronId {
        NeuronId::new(s).unwrap()
    }

    fn gate(out: &str, kind: GateKind, ins: &[&str], role: Role) -> LogicalCircuit {
        let mut nodes: Vec<NeuronId> = ins.iter().map(|s| id(s)).collect();
        nodes.push(id(out));
        let edges = ins.iter().map(|s| (id(s), id(out)));
        build_circuit(nodes, edges, [(id(out), kind)], id(out), role).unwrap()
    }

    fn d1() -> (LogicalCircuit, LogicalCircuit) {
        (
            gate("output", GateKind::And, &["A", "B"], Role::Forget),
            gate("output", GateKind::Or, &["A", "B"], Role::Retain),
        )
    }

    fn d2() -> (LogicalCircuit, LogicalCircuit) {
        (
            gate("output", GateKind::Or, &["A", "B"], Role::Forget),
            gate("output", GateKind::And, &["B", "C"], Role::Retain),
        )
    }

    #[test]
    fn satisfiable_pair_has_no_conflicts() {
        let (f, r) = d1();
        let rep = localize(&f, &r).unwrap();
        assert!(rep.phi_satisfiable);
        assert_eq!(rep.conflict_count, 0);
        assert_eq!(rep.count(NeuronClass::Forget), 1);
        assert_eq!(rep.count(NeuronClass::Safe(SafeReason::Retain)), 1);
        check_report(&f, Some(&r), &rep).unwrap();
    }

    #[test]
    fn unsatisfiable_pair_has_one_conflict() {
        let (f, r) = d2();
        let rep = localize(&f, &r).unwrap();
        assert!(!rep.phi_satisfiable);
        assert_eq!(rep.classes[&id("A")], NeuronClass::Forget);
        assert_eq!(rep.classes[&id("B")], NeuronClass::Conflict);
        assert_eq!(rep.classes[&id("C")], NeuronClass::Safe(SafeReason::Retain));
        assert_eq!(rep.conflict_count, 1);
        assert_eq!(rep.values[&id("B")], SplitValue { forget: Some(false), retain: Some(true) });
        check_report(&f, Some(&r), &rep).unwrap();

        let oracle = brute_force_localize(&f, &r).unwrap();
        assert_eq!(oracle.conflicts(), rep.conflicts());
    }

    #[test]
    fn identical_and_splits_first_neuron() {
        let f = gate("out", GateKind::And, &["A", "B"], Role::Forget);
        let r = f.with_role(Role::Retain);
        let rep = localize(&f, &r).unwrap();
        assert_eq!(rep.conflict_count, 1);
        assert_eq!(rep.conflicts(), [id("A")].into_iter().collect());
        assert_eq!(brute_force_localize(&f, &r).unwrap().conflicts(), rep.conflicts());
    }

    #[test]
    fn disjoint_circuits() {
        let f = gate("out", GateKind::And, &["A", "B"], Role::Forget);
        let r = gate("out", GateKind::And, &["C", "D"], Role::Retain);
        let rep = localize(&f, &r).unwrap();
        assert_eq!(rep.conflict_count, 0);
        assert_eq!(rep.count(NeuronClass::Safe(SafeReason::Retain)), 2);
    }

    #[test]
    fn forget_only() {
        let (f, _) = d2();
        let rep = localize_with(&f, None, &SolverConfig::default()).unwrap();
        assert_eq!(rep.conflict_count, 0);
        assert_eq!(rep.count(NeuronClass::Forget), 2);
        check_report(&f, None, &rep).unwrap();
    }

    #[test]
    fn dangling_source_is_absent() {
        let f = build_circuit(
            [id("A"), id("B"), id("Z"), id("out")],
            [(id("A"), id("out")), (id("B"), id("out"))],
            [(id("out"), GateKind::Or)],
            id("out"),
            Role::Forget,
        )
        .unwrap();
        let r = gate("out", GateKind::And, &["A", "C"], Role::Retain);
        let rep = localize(&f, &r).unwrap();
        assert_eq!(rep.classes[&id("Z")], NeuronClass::Safe(SafeReason::Absent));
        let oracle = brute_force_localize(&f, &r).unwrap();
        assert_eq!(oracle.classes[&id("Z")], NeuronClass::Safe(SafeReason::Absent));
    }

    #[test]
    fn role_mismatch() {
        let (f, r) = d1();
        assert!(matches!(localize(&r, &f), Err(LocalizeError::RoleMismatch { .. })));
        assert!(matches!(brute_force_localize(&f, &f), Err(LocalizeError::RoleMismatch { .. })));
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let names: Vec<alloc::string::String> = (0..25).map(|i| alloc::format!("x{i:02}")).collect();
        let ins: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let f = gate("out", GateKind::Or, &ins, Role::Forget);
        let r = gate("out", GateKind::And, &ins[..2], Role::Retain);
        assert!(matches!(brute_force_localize(&f, &r), Err(LocalizeError::TooLarge { .. })));
    }

    #[test]
    fn class_names_round_trip() {
        for c in [
            NeuronClass::Safe(SafeReason::Absent),
            NeuronClass::Safe(SafeReason::Retain),
            NeuronClass::Forget,
            NeuronClass::Conflict,
        ] {
            assert_eq!(c.as_str().parse::<NeuronClass>().unwrap(), c);
        }
        assert!("safe".parse::<NeuronClass>().is_err());
    }
}

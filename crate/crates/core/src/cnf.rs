// SPDX-License-Identifier: Apache-2.0

//! CNF formulas and the Tseitin encoding of AND/OR circuits.
//!
//! Variables are allocated through a [`VarAllocator`] shared by the forget
//! and retain circuits, so a neuron that appears in both maps to a single
//! variable. Each circuit's output node maps to a role-specific variable
//! (`output_f` / `output_r`) instead, even when the two outputs share a name.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use crate::circuit::{CircuitError, GateKind, LogicalCircuit, NeuronId, Role};

/// A propositional variable, numbered from 1 as in DIMACS.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    pub fn new(n: u32) -> Option<Var> {
        (n >= 1).then_some(Var(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing assignment vectors.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Var {
        Var(i as u32 + 1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    var: Var,
    negated: bool,
}

impl Literal {
    pub fn new(var: Var, negated: bool) -> Self {
        Literal { var, negated }
    }

    pub fn positive(var: Var) -> Self {
        Literal { var, negated: false }
    }

    pub fn negative(var: Var) -> Self {
        Literal { var, negated: true }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn from_dimacs(n: i32) -> Option<Self> {
        let var = Var::new(n.unsigned_abs())?;
        Some(Literal { var, negated: n < 0 })
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var.0 as i32;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Truth value of the literal under a variable value.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }
}

impl Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal { var: self.var, negated: !self.negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CnfError {
    EmptyClause,
    EmptyInputs,
    AdderNotSimplified,
    RoleMissing,
    AllocatorMismatch(Var),
    MissingOutputVar(Role),
    VarOutOfRange { var: Var, var_count: u32 },
    Circuit(CircuitError),
}

impl fmt::Display for CnfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfError::EmptyClause => write!(f, "empty clause"),
            CnfError::EmptyInputs => write!(f, "gate has no inputs"),
            CnfError::AdderNotSimplified => write!(f, "ADDER gates must be simplified first"),
            CnfError::RoleMissing => write!(f, "circuit has no forget/retain role"),
            CnfError::AllocatorMismatch(v) => {
                write!(f, "variable {v} has different meanings in the two formulas")
            }
            CnfError::MissingOutputVar(r) => write!(f, "formula has no {r} output variable"),
            CnfError::VarOutOfRange { var, var_count } => {
                write!(f, "variable {var} exceeds variable count {var_count}")
            }
            CnfError::Circuit(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CnfError {}

impl From<CircuitError> for CnfError {
    fn from(e: CircuitError) -> Self {
        CnfError::Circuit(e)
    }
}

/// A non-empty disjunction without repeated or complementary literals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause(Vec<Literal>);

impl Clause {
    /// Normalizes `lits`, keeping first occurrences in order. Returns
    /// `Ok(None)` for a tautology.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Option<Clause>, CnfError> {
        let mut out: Vec<Literal> = Vec::new();
        for l in lits {
            if out.contains(&!l) {
                return Ok(None);
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        if out.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        Ok(Some(Clause(out)))
    }

    pub fn unit(l: Literal) -> Clause {
        Clause(alloc::vec![l])
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.0.iter().any(|l| values.get(l.var.index()).is_some_and(|&v| l.eval(v)))
    }
}

/// What a variable stands for.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VarOrigin {
    /// A neuron shared across circuits.
    Neuron(NeuronId),
    /// The output of the circuit with this role.
    Output(Role),
    /// One side's copy of a neuron relaxed during conflict localization.
    Split(NeuronId, Role),
    /// True iff both copies of a split neuron agree.
    Selector(NeuronId),
    /// Auxiliary register of a cardinality encoding.
    Counter(u32),
}

impl fmt::Display for VarOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarOrigin::Neuron(n) => write!(f, "{n}"),
            VarOrigin::Output(Role::Forget) => write!(f, "output_f"),
            VarOrigin::Output(Role::Retain) => write!(f, "output_r"),
            VarOrigin::Output(Role::Untagged) => write!(f, "output"),
            VarOrigin::Split(n, Role::Forget) => write!(f, "{n}#f"),
            VarOrigin::Split(n, _) => write!(f, "{n}#r"),
            VarOrigin::Selector(n) => write!(f, "{n}#sel"),
            VarOrigin::Counter(i) => write!(f, "#count{i}"),
        }
    }
}

/// Bidirectional, injective map between variables and their origins.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VarMap {
    by_origin: BTreeMap<VarOrigin, Var>,
    by_var: BTreeMap<Var, VarOrigin>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&self, origin: &VarOrigin) -> Option<Var> {
        self.by_origin.get(origin).copied()
    }

    pub fn origin(&self, var: Var) -> Option<&VarOrigin> {
        self.by_var.get(&var)
    }

    pub fn neuron(&self, id: &NeuronId) -> Option<Var> {
        self.var(&VarOrigin::Neuron(id.clone()))
    }

    pub fn len(&self) -> usize {
        self.by_var.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_var.is_empty()
    }

    /// Entries in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, &VarOrigin)> + '_ {
        self.by_var.iter().map(|(&v, o)| (v, o))
    }

    /// Records `origin ↦ var`, rejecting entries that break injectivity.
    pub fn insert(&mut self, origin: VarOrigin, var: Var) -> Result<(), CnfError> {
        match (self.by_origin.get(&origin), self.by_var.get(&var)) {
            (Some(&v), Some(o)) if v == var && *o == origin => Ok(()),
            (None, None) => {
                self.by_origin.insert(origin.clone(), var);
                self.by_var.insert(var, origin);
                Ok(())
            }
            _ => Err(CnfError::AllocatorMismatch(var)),
        }
    }

    fn merge(&mut self, other: &VarMap) -> Result<(), CnfError> {
        for (v, o) in other.iter() {
            self.insert(o.clone(), v)?;
        }
        Ok(())
    }
}

/// Hands out variables in first-request order.
#[derive(Clone, Debug, Default)]
pub struct VarAllocator {
    map: VarMap,
    next: u32,
}

impl VarAllocator {
    pub fn new() -> Self {
        VarAllocator { map: VarMap::new(), next: 1 }
    }

    /// Variable for `origin`, allocating a fresh one on first use.
    pub fn var(&mut self, origin: VarOrigin) -> Var {
        if let Some(v) = self.map.var(&origin) {
            return v;
        }
        let v = Var(self.next);
        self.next += 1;
        self.map.by_origin.insert(origin.clone(), v);
        self.map.by_var.insert(v, origin);
        v
    }

    pub fn var_count(&self) -> u32 {
        self.next - 1
    }

    pub fn map(&self) -> &VarMap {
        &self.map
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    var_count: u32,
    names: VarMap,
    output_names: BTreeMap<Role, NeuronId>,
    simplified_adders: usize,
}

impl CnfFormula {
    pub fn new(var_count: u32) -> Self {
        CnfFormula { var_count, ..Default::default() }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn names(&self) -> &VarMap {
        &self.names
    }

    /// Name of the circuit output node behind `output_f` / `output_r`.
    pub fn output_name(&self, role: Role) -> Option<&NeuronId> {
        self.output_names.get(&role)
    }

    pub fn output_var(&self, role: Role) -> Option<Var> {
        self.names.var(&VarOrigin::Output(role))
    }

    /// Number of ADDER gates rewritten before encoding.
    pub fn simplified_adders(&self) -> usize {
        self.simplified_adders
    }

    /// Appends a normalized clause; tautologies are dropped.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Literal>) -> Result<(), CnfError> {
        if let Some(c) = Clause::new(lits)? {
            self.push(c)?;
        }
        Ok(())
    }

    pub fn push(&mut self, clause: Clause) -> Result<(), CnfError> {
        for l in clause.literals() {
            if l.var.0 > self.var_count {
                return Err(CnfError::VarOutOfRange { var: l.var, var_count: self.var_count });
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn extend(&mut self, clauses: impl IntoIterator<Item = Clause>) -> Result<(), CnfError> {
        for c in clauses {
            self.push(c)?;
        }
        Ok(())
    }

    pub fn set_var_count(&mut self, var_count: u32) {
        debug_assert!(var_count >= self.var_count);
        self.var_count = var_count;
    }

    pub fn name_var(&mut self, origin: VarOrigin, var: Var) -> Result<(), CnfError> {
        if var.0 > self.var_count {
            return Err(CnfError::VarOutOfRange { var, var_count: self.var_count });
        }
        self.names.insert(origin, var)
    }

    /// Independent model check: every clause has a true literal under
    /// `values` (indexed by `Var::index`).
    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        values.len() >= self.var_count as usize
            && self.clauses.iter().all(|c| c.is_satisfied_by(values))
    }

    /// Variables occurring in at least one clause.
    pub fn used_vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.literals().iter().map(|l| l.var)).collect()
    }
}

/// n-ary Tseitin clauses for `out ↔ kind(ins)`.
///
/// AND: `(¬x1 ∨ … ∨ ¬xn ∨ c)` and `(xi ∨ ¬c)` for each input.
/// OR: `(x1 ∨ … ∨ xn ∨ ¬c)` and `(¬xi ∨ c)` for each input.
pub fn tseitin_gate(kind: GateKind, out: Var, ins: &[Var]) -> Result<Vec<Clause>, CnfError> {
    if ins.is_empty() {
        return Err(CnfError::EmptyInputs);
    }
    let conj = match kind {
        GateKind::And => true,
        GateKind::Or => false,
        GateKind::Adder => return Err(CnfError::AdderNotSimplified),
    };
    let mut clauses = Vec::with_capacity(ins.len() + 1);
    let long = ins
        .iter()
        .map(|&x| Literal::new(x, conj))
        .chain(core::iter::once(Literal::new(out, !conj)));
    clauses.extend(Clause::new(long)?);
    for &x in ins {
        clauses.extend(Clause::new([Literal::new(x, !conj), Literal::new(out, conj)])?);
    }
    Ok(clauses)
}

/// Encodes a forget or retain circuit with one shared variable per neuron.
pub fn circuit_to_cnf(
    circuit: &LogicalCircuit,
    alloc: &mut VarAllocator,
) -> Result<CnfFormula, CnfError> {
    encode_circuit(circuit, alloc, &BTreeSet::new())
}

/// Like [`circuit_to_cnf`], but every neuron in `split` gets a
/// [`VarOrigin::Split`] variable private to this circuit's role.
pub fn encode_circuit(
    circuit: &LogicalCircuit,
    alloc: &mut VarAllocator,
    split: &BTreeSet<NeuronId>,
) -> Result<CnfFormula, CnfError> {
    let role = circuit.role();
    if role == Role::Untagged {
        return Err(CnfError::RoleMissing);
    }
    let adders = circuit.gates().values().filter(|&&g| g == GateKind::Adder).count();
    let circuit = circuit.simplify_adders()?;

    let mut names = VarMap::new();
    let vars: Vec<Var> = circuit
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let origin = if i == circuit.output_index() {
                VarOrigin::Output(role)
            } else if split.contains(n) {
                VarOrigin::Split(n.clone(), role)
            } else {
                VarOrigin::Neuron(n.clone())
            };
            let v = alloc.var(origin.clone());
            names.insert(origin, v).map(|_| v)
        })
        .collect::<Result<_, _>>()?;

    let mut clauses = Vec::new();
    for (i, &v) in vars.iter().enumerate() {
        if let Some(kind) = circuit.gate_at(i) {
            let ins: Vec<Var> = circuit.preds_at(i).iter().map(|&p| vars[p]).collect();
            clauses.extend(tseitin_gate(kind, v, &ins)?);
        }
    }

    let mut output_names = BTreeMap::new();
    output_names.insert(role, circuit.output().clone());
    Ok(CnfFormula {
        clauses,
        var_count: alloc.var_count(),
        names,
        output_names,
        simplified_adders: adders,
    })
}

/// `Φ = Φ_f ∧ Φ_r ∧ ¬output_f ∧ output_r`.
pub fn compose_phi(phi_f: &CnfFormula, phi_r: &CnfFormula) -> Result<CnfFormula, CnfError> {
    let out_f = phi_f.output_var(Role::Forget).ok_or(CnfError::MissingOutputVar(Role::Forget))?;
    let out_r = phi_r.output_var(Role::Retain).ok_or(CnfError::MissingOutputVar(Role::Retain))?;
    let mut names = phi_f.names.clone();
    names.merge(&phi_r.names)?;

    let mut clauses = phi_f.clauses.clone();
    clauses.extend(phi_r.clauses.iter().cloned());
    clauses.push(Clause::unit(Literal::negative(out_f)));
    clauses.push(Clause::unit(Literal::positive(out_r)));

    let mut output_names = phi_f.output_names.clone();
    output_names.extend(phi_r.output_names.iter().map(|(r, n)| (*r, n.clone())));
    Ok(CnfFormula {
        clauses,
        var_count: phi_f.var_count.max(phi_r.var_count),
        names,
        output_names,
        simplified_adders: phi_f.simplified_adders + phi_r.simplified_adders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_circuit;
    use alloc::vec;

    fn id(s: &str) -> NeuronId {
        NeuronId::new(s).unwrap()
    }

    fn v(n: u32) -> Var {
        Var::new(n).unwrap()
    }

    fn dimacs(c: &[Clause]) -> Vec<Vec<i32>> {
        c.iter().map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect()).collect()
    }

    fn gate_circuit(kind: GateKind, ins: &[&str], out: &str, role: Role) -> LogicalCircuit {
        let mut nodes: Vec<NeuronId> = ins.iter().map(|s| id(s)).collect();
        nodes.push(id(out));
        build_circuit(
            nodes,
            ins.iter().map(|s| (id(s), id(out))),
            [(id(out), kind)],
            id(out),
            role,
        )
        .unwrap()
    }

    #[test]
    fn tseitin_and_matches_textbook() {
        // A=1, B=2, C=3
        let c = tseitin_gate(GateKind::And, v(3), &[v(1), v(2)]).unwrap();
        assert_eq!(dimacs(&c), vec![vec![-1, -2, 3], vec![1, -3], vec![2, -3]]);
    }

    #[test]
    fn tseitin_or_matches_textbook() {
        let c = tseitin_gate(GateKind::Or, v(3), &[v(1), v(2)]).unwrap();
        assert_eq!(dimacs(&c), vec![vec![1, 2, -3], vec![-1, 3], vec![-2, 3]]);
    }

    #[test]
    fn unary_gate_is_equivalence() {
        let c = tseitin_gate(GateKind::And, v(2), &[v(1)]).unwrap();
        assert_eq!(dimacs(&c), vec![vec![-1, 2], vec![1, -2]]);
    }

    #[test]
    fn and_fan_in_three_truth_table() {
        let c = tseitin_gate(GateKind::And, v(4), &[v(1), v(2), v(3)]).unwrap();
        assert_eq!(c.len(), 4);
        for bits in 0u32..16 {
            let vals: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
            let sat = c.iter().all(|cl| cl.is_satisfied_by(&vals));
            assert_eq!(sat, vals[3] == (vals[0] && vals[1] && vals[2]), "bits {bits:04b}");
        }
    }

    #[test]
    fn gate_errors() {
        assert_eq!(tseitin_gate(GateKind::Adder, v(2), &[v(1)]), Err(CnfError::AdderNotSimplified));
        assert_eq!(tseitin_gate(GateKind::And, v(2), &[]), Err(CnfError::EmptyInputs));
    }

    #[test]
    fn clause_normalization() {
        let a = Literal::positive(v(1));
        let b = Literal::negative(v(2));
        let c = Clause::new([a, b, a]).unwrap().unwrap();
        assert_eq!(c.literals(), &[a, b]);
        assert_eq!(Clause::new([a, !a]).unwrap(), None);
        assert_eq!(Clause::new([]), Err(CnfError::EmptyClause));
    }

    #[test]
    fn single_source_circuit_has_no_clauses() {
        let c = build_circuit([id("A")], [], [], id("A"), Role::Forget).unwrap();
        let mut alloc = VarAllocator::new();
        let f = circuit_to_cnf(&c, &mut alloc).unwrap();
        assert!(f.clauses().is_empty());
        assert_eq!(f.names().len(), 1);
        assert_eq!(f.output_var(Role::Forget), Some(v(1)));
    }

    #[test]
    fn untagged_circuit_is_rejected() {
        let c = gate_circuit(GateKind::And, &["A", "B"], "out", Role::Untagged);
        assert_eq!(circuit_to_cnf(&c, &mut VarAllocator::new()), Err(CnfError::RoleMissing));
    }

    #[test]
    fn adders_are_simplified_and_counted() {
        let c = gate_circuit(GateKind::Adder, &["A", "B"], "out", Role::Retain);
        let f = circuit_to_cnf(&c, &mut VarAllocator::new()).unwrap();
        assert_eq!(f.simplified_adders(), 1);
        assert_eq!(dimacs(f.clauses()), vec![vec![-1, -2, 3], vec![1, -3], vec![2, -3]]);
    }

    #[test]
    fn shared_neurons_share_variables() {
        let f = gate_circuit(GateKind::And, &["A", "B"], "output_f", Role::Forget);
        let r = gate_circuit(GateKind::Or, &["A", "B"], "output_r", Role::Retain);
        let mut alloc = VarAllocator::new();
        let pf = circuit_to_cnf(&f, &mut alloc).unwrap();
        let pr = circuit_to_cnf(&r, &mut alloc).unwrap();
        assert_eq!(pf.names().neuron(&id("A")), pr.names().neuron(&id("A")));
        assert_eq!(pf.output_var(Role::Forget), Some(v(3)));
        assert_eq!(pr.output_var(Role::Retain), Some(v(4)));
    }

    #[test]
    fn equal_output_names_stay_distinct() {
        let f = gate_circuit(GateKind::And, &["A", "B"], "out", Role::Forget);
        let r = gate_circuit(GateKind::And, &["A", "B"], "out", Role::Retain);
        let mut alloc = VarAllocator::new();
        let phi = compose_phi(
            &circuit_to_cnf(&f, &mut alloc).unwrap(),
            &circuit_to_cnf(&r, &mut alloc).unwrap(),
        )
        .unwrap();
        assert_ne!(phi.output_var(Role::Forget), phi.output_var(Role::Retain));
        assert_eq!(phi.output_name(Role::Forget), Some(&id("out")));
    }

    #[test]
    fn disjoint_single_sources_compose_to_units() {
        let f = build_circuit([id("A")], [], [], id("A"), Role::Forget).unwrap();
        let r = build_circuit([id("B")], [], [], id("B"), Role::Retain).unwrap();
        let mut alloc = VarAllocator::new();
        let phi = compose_phi(
            &circuit_to_cnf(&f, &mut alloc).unwrap(),
            &circuit_to_cnf(&r, &mut alloc).unwrap(),
        )
        .unwrap();
        assert_eq!(dimacs(phi.clauses()), vec![vec![-1], vec![2]]);
    }

    #[test]
    fn compose_detects_separate_allocators() {
        let f = gate_circuit(GateKind::And, &["A", "B"], "of", Role::Forget);
        let r = gate_circuit(GateKind::Or, &["B", "C"], "or", Role::Retain);
        let pf = circuit_to_cnf(&f, &mut VarAllocator::new()).unwrap();
        let pr = circuit_to_cnf(&r, &mut VarAllocator::new()).unwrap();
        assert!(matches!(compose_phi(&pf, &pr), Err(CnfError::AllocatorMismatch(_))));
    }

    #[test]
    fn compose_requires_role_outputs() {
        let f = gate_circuit(GateKind::And, &["A", "B"], "of", Role::Forget);
        let mut alloc = VarAllocator::new();
        let pf = circuit_to_cnf(&f, &mut alloc).unwrap();
        assert_eq!(compose_phi(&pf, &pf), Err(CnfError::MissingOutputVar(Role::Retain)));
    }

    #[test]
    fn push_checks_var_range() {
        let mut f = CnfFormula::new(2);
        assert!(f.add_clause([Literal::positive(v(3))]).is_err());
        f.add_clause([Literal::positive(v(2))]).unwrap();
        assert!(f.is_satisfied_by(&[false, true]));
        assert!(!f.is_satisfied_by(&[true, false]));
    }
}

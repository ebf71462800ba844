// SPDX-License-Identifier: Apache-2.0

//! Logical circuits over named neurons.
//!
//! A [`LogicalCircuit`] is a validated DAG whose non-source nodes carry an
//! AND, OR or ADDER gate. Nodes are kept in a canonical order (topological,
//! ties broken lexicographically by name) so that every derived artifact,
//! from evaluation vectors to solver variable numbering, is reproducible.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Name of a neuron, unique within a circuit universe (e.g. `L3.mlp.n17`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NeuronId(String);

impl NeuronId {
    pub fn new(name: impl Into<String>) -> Result<Self, CircuitError> {
        let name = name.into();
        if name.is_empty() {
            return Err(CircuitError::EmptyName);
        }
        Ok(NeuronId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for NeuronId {
    type Error = CircuitError;
    fn try_from(value: &str) -> Result<Self, Self::Error> {
        NeuronId::new(value)
    }
}

impl TryFrom<String> for NeuronId {
    type Error = CircuitError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        NeuronId::new(value)
    }
}

impl AsRef<str> for NeuronId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Logical relation between a receiver node and its senders.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GateKind {
    And,
    Or,
    Adder,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Adder => "ADDER",
        }
    }

    /// Applies the gate to binarized sender states.
    pub fn apply(self, inputs: impl IntoIterator<Item = bool>) -> ActivationState {
        match self {
            GateKind::And => ActivationState::from(inputs.into_iter().all(|x| x)),
            GateKind::Or => ActivationState::from(inputs.into_iter().any(|x| x)),
            GateKind::Adder => ActivationState(inputs.into_iter().filter(|&x| x).count() as u32),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AND" | "and" => Ok(GateKind::And),
            "OR" | "or" => Ok(GateKind::Or),
            "ADDER" | "adder" => Ok(GateKind::Adder),
            _ => Err(CircuitError::UnknownGateKind(String::from(s))),
        }
    }
}

/// Which dataset a circuit was extracted from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Role {
    Forget,
    Retain,
    Untagged,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Forget => "forget",
            Role::Retain => "retain",
            Role::Untagged => "untagged",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Activation of a node: 0/1 for sources, AND and OR nodes; `0..=fan-in`
/// for ADDER nodes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ActivationState(pub u32);

impl ActivationState {
    pub const OFF: ActivationState = ActivationState(0);
    pub const ON: ActivationState = ActivationState(1);

    /// A receiver reads any non-zero sender state as active.
    pub fn is_active(self) -> bool {
        self.0 >= 1
    }
}

impl From<bool> for ActivationState {
    fn from(b: bool) -> Self {
        ActivationState(b as u32)
    }
}

/// Directed connection `(sender, receiver)`.
pub type Edge = (NeuronId, NeuronId);

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CircuitError {
    EmptyName,
    EmptyCircuit,
    UnknownGateKind(String),
    DuplicateNode(NeuronId),
    UnknownNode(NeuronId),
    SelfEdge(NeuronId),
    DuplicateEdge(NeuronId, NeuronId),
    DuplicateGate(NeuronId),
    CycleDetected(Vec<NeuronId>),
    OutputHasSuccessor(NeuronId),
    MissingGate(NeuronId),
    GateOnSource(NeuronId),
    MissingSourceState(NeuronId),
    UnknownSource(NeuronId),
    UntaggedRole,
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::EmptyName => write!(f, "neuron name is empty"),
            CircuitError::EmptyCircuit => write!(f, "circuit has no nodes"),
            CircuitError::UnknownGateKind(s) => write!(f, "unknown gate kind `{s}`"),
            CircuitError::DuplicateNode(n) => write!(f, "node `{n}` listed twice"),
            CircuitError::UnknownNode(n) => write!(f, "`{n}` is not a node of the circuit"),
            CircuitError::SelfEdge(n) => write!(f, "self edge on `{n}`"),
            CircuitError::DuplicateEdge(s, r) => write!(f, "duplicate edge `{s}` -> `{r}`"),
            CircuitError::DuplicateGate(n) => write!(f, "gate for `{n}` given twice"),
            CircuitError::CycleDetected(nodes) => {
                write!(f, "cycle detected among nodes [")?;
                for (i, n) in nodes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str("]")
            }
            CircuitError::OutputHasSuccessor(n) => write!(f, "output `{n}` has an outgoing edge"),
            CircuitError::MissingGate(n) => write!(f, "non-source node `{n}` has no gate"),
            CircuitError::GateOnSource(n) => write!(f, "source node `{n}` carries a gate"),
            CircuitError::MissingSourceState(n) => write!(f, "no state given for source `{n}`"),
            CircuitError::UnknownSource(n) => write!(f, "`{n}` is not a source node"),
            CircuitError::UntaggedRole => write!(f, "circuit role must be forget or retain"),
        }
    }
}

impl core::error::Error for CircuitError {}

/// A validated, immutable logical circuit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogicalCircuit {
    order: Vec<NeuronId>,
    index: BTreeMap<NeuronId, usize>,
    /// Sender indices per node, ascending.
    preds: Vec<Vec<usize>>,
    gates: Vec<Option<GateKind>>,
    sources: Vec<usize>,
    output: usize,
    role: Role,
}

/// Validates the parts of a circuit and returns it in canonical order.
pub fn build_circuit(
    nodes: impl IntoIterator<Item = NeuronId>,
    edges: impl IntoIterator<Item = Edge>,
    gates: impl IntoIterator<Item = (NeuronId, GateKind)>,
    output: NeuronId,
    role: Role,
) -> Result<LogicalCircuit, CircuitError> {
    let mut node_set = BTreeSet::new();
    for n in nodes {
        if !node_set.insert(n.clone()) {
            return Err(CircuitError::DuplicateNode(n));
        }
    }
    if node_set.is_empty() {
        return Err(CircuitError::EmptyCircuit);
    }

    let mut edge_set: BTreeSet<Edge> = BTreeSet::new();
    for (s, r) in edges {
        for n in [&s, &r] {
            if !node_set.contains(n) {
                return Err(CircuitError::UnknownNode(n.clone()));
            }
        }
        if s == r {
            return Err(CircuitError::SelfEdge(s));
        }
        if edge_set.contains(&(s.clone(), r.clone())) {
            return Err(CircuitError::DuplicateEdge(s, r));
        }
        edge_set.insert((s, r));
    }

    let mut gate_map = BTreeMap::new();
    for (n, g) in gates {
        if !node_set.contains(&n) {
            return Err(CircuitError::UnknownNode(n));
        }
        if gate_map.insert(n.clone(), g).is_some() {
            return Err(CircuitError::DuplicateGate(n));
        }
    }
    if !node_set.contains(&output) {
        return Err(CircuitError::UnknownNode(output));
    }

    // Kahn's algorithm; the ready set is ordered by name.
    let mut in_degree: BTreeMap<&NeuronId, usize> = node_set.iter().map(|n| (n, 0)).collect();
    let mut succs: BTreeMap<&NeuronId, Vec<&NeuronId>> = BTreeMap::new();
    for (s, r) in &edge_set {
        *in_degree.get_mut(r).expect("edge endpoint checked") += 1;
        succs.entry(s).or_default().push(r);
    }
    let mut ready: BTreeSet<&NeuronId> =
        in_degree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
    let mut order: Vec<NeuronId> = Vec::with_capacity(node_set.len());
    while let Some(n) = ready.pop_first() {
        order.push(n.clone());
        if let Some(rs) = succs.get(n) {
            for r in rs {
                let d = in_degree.get_mut(r).expect("edge endpoint checked");
                *d -= 1;
                if *d == 0 {
                    ready.insert(r);
                }
            }
        }
    }
    if order.len() != node_set.len() {
        let placed: BTreeSet<&NeuronId> = order.iter().collect();
        let stuck = node_set.iter().filter(|n| !placed.contains(n)).cloned().collect();
        return Err(CircuitError::CycleDetected(stuck));
    }

    if succs.contains_key(&output) {
        return Err(CircuitError::OutputHasSuccessor(output));
    }

    let index: BTreeMap<NeuronId, usize> =
        order.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    let mut preds = alloc::vec![Vec::new(); order.len()];
    for (s, r) in &edge_set {
        preds[index[r]].push(index[s]);
    }
    for p in &mut preds {
        p.sort_unstable();
    }

    let mut gate_vec = alloc::vec![None; order.len()];
    let mut sources = Vec::new();
    for (i, n) in order.iter().enumerate() {
        match (preds[i].is_empty(), gate_map.get(n)) {
            (true, None) => sources.push(i),
            (true, Some(_)) => return Err(CircuitError::GateOnSource(n.clone())),
            (false, None) => return Err(CircuitError::MissingGate(n.clone())),
            (false, Some(&g)) => gate_vec[i] = Some(g),
        }
    }

    let output = index[&output];
    Ok(LogicalCircuit { order, index, preds, gates: gate_vec, sources, output, role })
}

impl LogicalCircuit {
    /// Nodes in canonical order.
    pub fn nodes(&self) -> &[NeuronId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn output(&self) -> &NeuronId {
        &self.order[self.output]
    }

    pub fn output_index(&self) -> usize {
        self.output
    }

    pub fn index_of(&self, id: &NeuronId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &NeuronId) -> bool {
        self.index.contains_key(id)
    }

    pub fn gate(&self, id: &NeuronId) -> Option<GateKind> {
        self.index.get(id).and_then(|&i| self.gates[i])
    }

    pub fn gate_at(&self, i: usize) -> Option<GateKind> {
        self.gates[i]
    }

    /// Gate assignment of every non-source node, keyed by name.
    pub fn gates(&self) -> BTreeMap<NeuronId, GateKind> {
        self.order
            .iter()
            .zip(&self.gates)
            .filter_map(|(n, g)| g.map(|g| (n.clone(), g)))
            .collect()
    }

    pub fn is_source(&self, id: &NeuronId) -> bool {
        self.gate(id).is_none() && self.contains(id)
    }

    /// Source node indices in canonical order.
    pub fn source_indices(&self) -> &[usize] {
        &self.sources
    }

    pub fn sources(&self) -> impl Iterator<Item = &NeuronId> + '_ {
        self.sources.iter().map(move |&i| &self.order[i])
    }

    /// Sender indices of node `i`, ascending.
    pub fn preds_at(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn senders(&self, id: &NeuronId) -> impl Iterator<Item = &NeuronId> + '_ {
        let preds: &[usize] = self.index.get(id).map(|&i| self.preds[i].as_slice()).unwrap_or(&[]);
        preds.iter().map(move |&p| &self.order[p])
    }

    /// Edges as `(sender, receiver)` index pairs, ordered by receiver then sender.
    pub fn edge_indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, ps) in self.preds.iter().enumerate() {
            out.extend(ps.iter().map(|&s| (s, r)));
        }
        out
    }

    /// Edges sorted lexicographically by `(sender, receiver)` name.
    pub fn edges(&self) -> BTreeSet<Edge> {
        self.edge_indices()
            .into_iter()
            .map(|(s, r)| (self.order[s].clone(), self.order[r].clone()))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.preds.iter().map(Vec::len).sum()
    }

    /// Copy of this circuit carrying a different role tag.
    pub fn with_role(&self, role: Role) -> LogicalCircuit {
        LogicalCircuit { role, ..self.clone() }
    }

    /// Evaluates the circuit from named source states.
    pub fn evaluate(
        &self,
        source_states: &BTreeMap<NeuronId, bool>,
    ) -> Result<BTreeMap<NeuronId, ActivationState>, CircuitError> {
        for n in source_states.keys() {
            if !self.is_source(n) {
                return Err(CircuitError::UnknownSource(n.clone()));
            }
        }
        let mut values = Vec::with_capacity(self.sources.len());
        for n in self.sources() {
            match source_states.get(n) {
                Some(&v) => values.push(v),
                None => return Err(CircuitError::MissingSourceState(n.clone())),
            }
        }
        let states = self.evaluate_indexed(&values);
        Ok(self.order.iter().cloned().zip(states).collect())
    }

    /// Evaluates the circuit from source values given in canonical source
    /// order and returns the state of every node in canonical node order.
    ///
    /// Panics if `sources.len()` differs from the number of source nodes.
    pub fn evaluate_indexed(&self, sources: &[bool]) -> Vec<ActivationState> {
        assert_eq!(sources.len(), self.sources.len(), "one value per source node");
        let mut states = alloc::vec![ActivationState::OFF; self.order.len()];
        for (&i, &v) in self.sources.iter().zip(sources) {
            states[i] = v.into();
        }
        for i in 0..self.order.len() {
            if let Some(g) = self.gates[i] {
                states[i] = g.apply(self.preds[i].iter().map(|&p| states[p].is_active()));
            }
        }
        states
    }

    /// Like [`evaluate_indexed`](Self::evaluate_indexed), except that along
    /// every edge in `patched` (sorted `(sender, receiver)` index pairs) the
    /// receiver reads the sender's state from `reference` instead.
    pub fn evaluate_patched(
        &self,
        sources: &[bool],
        patched: &[(usize, usize)],
        reference: &[ActivationState],
    ) -> Vec<ActivationState> {
        assert_eq!(sources.len(), self.sources.len(), "one value per source node");
        assert_eq!(reference.len(), self.order.len());
        let mut states = alloc::vec![ActivationState::OFF; self.order.len()];
        for (&i, &v) in self.sources.iter().zip(sources) {
            states[i] = v.into();
        }
        for i in 0..self.order.len() {
            if let Some(g) = self.gates[i] {
                let inputs = self.preds[i].iter().map(|&p| {
                    if patched.binary_search(&(p, i)).is_ok() {
                        reference[p].is_active()
                    } else {
                        states[p].is_active()
                    }
                });
                states[i] = g.apply(inputs);
            }
        }
        states
    }

    /// Replaces ADDER gates by OR in a forget circuit and by AND in a retain
    /// circuit. Idempotent.
    pub fn simplify_adders(&self) -> Result<LogicalCircuit, CircuitError> {
        let replacement = match self.role {
            Role::Forget => GateKind::Or,
            Role::Retain => GateKind::And,
            Role::Untagged => return Err(CircuitError::UntaggedRole),
        };
        let mut out = self.clone();
        for g in out.gates.iter_mut().flatten() {
            if *g == GateKind::Adder {
                *g = replacement;
            }
        }
        Ok(out)
    }

    pub fn has_adders(&self) -> bool {
        self.gates.contains(&Some(GateKind::Adder))
    }
}

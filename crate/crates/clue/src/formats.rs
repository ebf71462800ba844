// SPDX-License-Identifier: Apache-2.0

//! JSON and DIMACS readers and writers.
//!
//! Every writer emits pretty-printed JSON with sorted map keys and a
//! trailing newline, so parsing and re-serializing is byte-stable.

use std::collections::{BTreeMap, BTreeSet};

use clue_core::{
    build_circuit, CircuitError, CnfFormula, Discovery, EdgeSweep, GateKind, LocalizationReport,
    LogicalCircuit, MaskSpec, ModelLayout, NeuronClass, NeuronId, ParameterGroup, Role,
    ScheduleSpec, SolveResult, SolverStats, SplitValue, Stage, Var,
};
use clue_core::{Literal, LossKind, MaskKind};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::provenance::Provenance;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{what}: malformed JSON: {source}")]
    Json { what: &'static str, source: serde_json::Error },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

fn field(field: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Field { field: field.into(), message: message.to_string() }
}

fn parse_json<T: DeserializeOwned>(what: &'static str, text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json { what, source })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory serialization");
    s.push('\n');
    s
}

fn neuron(name: &str, at: impl FnOnce() -> String) -> Result<NeuronId, FormatError> {
    NeuronId::new(name).map_err(|e| field(at(), e))
}

// ---------------------------------------------------------------- circuits

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub gates: BTreeMap<String, String>,
    pub output: String,
    #[serde(default)]
    pub role: Option<String>,
}

impl From<&LogicalCircuit> for CircuitDoc {
    fn from(c: &LogicalCircuit) -> Self {
        CircuitDoc {
            nodes: c.nodes().iter().map(|n| n.to_string()).collect(),
            edges: c.edges().into_iter().map(|(s, r)| [s.to_string(), r.to_string()]).collect(),
            gates: c.gates().into_iter().map(|(n, g)| (n.to_string(), g.as_str().into())).collect(),
            output: c.output().to_string(),
            role: match c.role() {
                Role::Untagged => None,
                r => Some(r.as_str().into()),
            },
        }
    }
}

/// JSON field most likely responsible for a circuit validation error.
fn circuit_field(e: &CircuitError) -> &'static str {
    match e {
        CircuitError::EmptyName | CircuitError::EmptyCircuit | CircuitError::DuplicateNode(_) => {
            "nodes"
        }
        CircuitError::SelfEdge(_)
        | CircuitError::DuplicateEdge(..)
        | CircuitError::CycleDetected(_)
        | CircuitError::UnknownNode(_) => "edges",
        CircuitError::OutputHasSuccessor(_) => "output",
        CircuitError::UnknownGateKind(_)
        | CircuitError::DuplicateGate(_)
        | CircuitError::MissingGate(_)
        | CircuitError::GateOnSource(_) => "gates",
        CircuitError::UntaggedRole => "role",
        CircuitError::MissingSourceState(_) | CircuitError::UnknownSource(_) => "sources",
    }
}

pub fn parse_role(s: Option<&str>) -> Result<Role, FormatError> {
    match s {
        None => Ok(Role::Untagged),
        Some("forget") => Ok(Role::Forget),
        Some("retain") => Ok(Role::Retain),
        Some(other) => Err(field("role", format!("expected \"forget\", \"retain\" or null, got {other:?}"))),
    }
}

impl CircuitDoc {
    pub fn build(&self) -> Result<LogicalCircuit, FormatError> {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| neuron(n, || format!("nodes[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, [s, r])| Ok((neuron(s, || format!("edges[{i}]"))?, neuron(r, || format!("edges[{i}]"))?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let gates = self
            .gates
            .iter()
            .map(|(n, g)| {
                let kind: GateKind = g.parse().map_err(|e| field(format!("gates.{n}"), e))?;
                Ok((neuron(n, || "gates".into())?, kind))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        let output = neuron(&self.output, || "output".into())?;
        let role = parse_role(self.role.as_deref())?;
        build_circuit(nodes, edges, gates, output, role).map_err(|e| field(circuit_field(&e), e))
    }
}

pub fn circuit_to_json(c: &LogicalCircuit) -> String {
    to_json(&CircuitDoc::from(c))
}

pub fn circuit_from_json(text: &str) -> Result<LogicalCircuit, FormatError> {
    parse_json::<CircuitDoc>("circuit", text)?.build()
}

// ---------------------------------------------------------------- discovery

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EdgeEffect {
    pub edge: [String; 2],
    pub rate: f64,
    pub kept: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SweepDoc {
    pub mode: String,
    pub effects: Vec<EdgeEffect>,
}

impl From<&EdgeSweep> for SweepDoc {
    fn from(s: &EdgeSweep) -> Self {
        SweepDoc {
            mode: s.mode.as_str().into(),
            effects: s
                .effects
                .iter()
                .map(|(e, &rate)| EdgeEffect {
                    edge: [e.0.to_string(), e.1.to_string()],
                    rate,
                    kept: s.kept.contains(e),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DiscoveryReportDoc {
    pub mode: String,
    pub seed: u64,
    pub samples: usize,
    pub exhaustive: bool,
    pub sparsity: f64,
    pub effect_threshold: f64,
    pub sweeps: Vec<SweepDoc>,
    pub gates: BTreeMap<String, String>,
}

impl DiscoveryReportDoc {
    pub fn new(
        mode: &str,
        seed: u64,
        config: &clue_core::DiscoveryConfig,
        sweeps: &[&EdgeSweep],
        circuit: &LogicalCircuit,
    ) -> Self {
        DiscoveryReportDoc {
            mode: mode.into(),
            seed,
            samples: config.samples.len(),
            exhaustive: config.seed.is_none(),
            sparsity: config.sparsity,
            effect_threshold: config.effect_threshold,
            sweeps: sweeps.iter().map(|s| SweepDoc::from(*s)).collect(),
            gates: circuit.gates().into_iter().map(|(n, g)| (n.to_string(), g.as_str().into())).collect(),
        }
    }

    pub fn from_discovery(seed: u64, config: &clue_core::DiscoveryConfig, d: &Discovery) -> Self {
        Self::new("ns_plus_dn", seed, config, &[&d.noising, &d.denoising], &d.circuit)
    }
}

// ---------------------------------------------------------------- DIMACS

/// `p cnf V C` header followed by one clause per line.
pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.var_count(), f.clauses().len());
    for c in f.clauses() {
        for l in c.literals() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span
/// lines. Empty clauses and literals beyond the declared variable count are
/// rejected; tautologies are dropped.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
    let err = |line: usize, m: String| FormatError::Dimacs { line, message: m };
    let mut header: Option<(u32, usize)> = None;
    let mut formula = CnfFormula::new(0);
    let mut current: Vec<Literal> = Vec::new();
    let mut seen = 0usize;
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lineno, "second problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", v, c] = parts.as_slice() else {
                return Err(err(lineno, "expected `p cnf <vars> <clauses>`".into()));
            };
            let v: u32 = v.parse().map_err(|_| err(lineno, format!("bad variable count `{v}`")))?;
            let c: usize = c.parse().map_err(|_| err(lineno, format!("bad clause count `{c}`")))?;
            header = Some((v, c));
            formula = CnfFormula::new(v);
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(lineno, "clause before the problem line".into()));
        };
        for tok in line.split_whitespace() {
            let n: i32 = tok.parse().map_err(|_| err(lineno, format!("bad literal `{tok}`")))?;
            if n == 0 {
                if current.is_empty() {
                    return Err(err(lineno, "empty clause".into()));
                }
                formula
                    .add_clause(current.drain(..))
                    .map_err(|e| err(lineno, e.to_string()))?;
                seen += 1;
                continue;
            }
            if n.unsigned_abs() > vars {
                return Err(err(lineno, format!("literal {n} exceeds the {vars} declared variables")));
            }
            current.push(Literal::from_dimacs(n).expect("non-zero"));
        }
    }
    // A file with neither header nor clauses is the empty formula.
    let Some((_, clauses)) = header else {
        return Ok(formula);
    };
    if !current.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0".into()));
    }
    if seen != clauses {
        return Err(err(last_line.max(1), format!("header declares {clauses} clauses, found {seen}")));
    }
    Ok(formula)
}

/// Sidecar naming every variable of a DIMACS export.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VarMapDoc {
    pub var_count: u32,
    pub vars: BTreeMap<u32, String>,
    pub outputs: BTreeMap<String, String>,
}

impl From<&CnfFormula> for VarMapDoc {
    fn from(f: &CnfFormula) -> Self {
        VarMapDoc {
            var_count: f.var_count(),
            vars: f.names().iter().map(|(v, o)| (v.get(), o.to_string())).collect(),
            outputs: [Role::Forget, Role::Retain]
                .into_iter()
                .filter_map(|r| f.output_name(r).map(|n| (r.as_str().to_string(), n.to_string())))
                .collect(),
        }
    }
}

pub fn var_map_from_json(text: &str) -> Result<VarMapDoc, FormatError> {
    parse_json("variable map", text)
}

// ---------------------------------------------------------------- solve

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatsDoc {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
    pub solves: u64,
}

impl From<SolverStats> for StatsDoc {
    fn from(s: SolverStats) -> Self {
        StatsDoc {
            conflicts: s.conflicts,
            decisions: s.decisions,
            propagations: s.propagations,
            restarts: s.restarts,
            learned: s.learned,
            deleted: s.deleted,
            solves: s.solves,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SolveDoc {
    pub status: String,
    pub model: Option<Vec<i32>>,
    pub core: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub named: Option<BTreeMap<String, bool>>,
    pub stats: StatsDoc,
}

impl SolveDoc {
    pub fn new(result: &SolveResult, stats: SolverStats, names: Option<&VarMapDoc>) -> Self {
        let named = match (result, names) {
            (SolveResult::Sat(m), Some(map)) => Some(
                map.vars
                    .iter()
                    .filter_map(|(&v, name)| {
                        Var::new(v).and_then(|v| m.get(v)).map(|b| (name.clone(), b))
                    })
                    .collect(),
            ),
            _ => None,
        };
        SolveDoc {
            status: result.to_string(),
            model: result.model().map(|m| m.to_dimacs()),
            core: result.core().map(|c| c.iter().map(|l| l.to_dimacs()).collect()),
            named,
            stats: stats.into(),
        }
    }
}

// ---------------------------------------------------------------- reports

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
pub struct SidesDoc {
    pub forget: Option<u8>,
    pub retain: Option<u8>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub conflict_count: usize,
    pub phi_satisfiable: bool,
    pub classes: BTreeMap<String, String>,
    pub values: BTreeMap<String, SidesDoc>,
    pub stats: StatsDoc,
    pub seed: u64,
}

impl From<&LocalizationReport> for ReportDoc {
    fn from(r: &LocalizationReport) -> Self {
        ReportDoc {
            conflict_count: r.conflict_count,
            phi_satisfiable: r.phi_satisfiable,
            classes: r.classes.iter().map(|(n, c)| (n.to_string(), c.as_str().into())).collect(),
            values: r
                .values
                .iter()
                .map(|(n, v)| {
                    let b = |x: Option<bool>| x.map(u8::from);
                    (n.to_string(), SidesDoc { forget: b(v.forget), retain: b(v.retain) })
                })
                .collect(),
            stats: r.stats.into(),
            seed: r.seed,
        }
    }
}

impl ReportDoc {
    pub fn build(&self) -> Result<LocalizationReport, FormatError> {
        let mut classes = BTreeMap::new();
        for (n, c) in &self.classes {
            let class: NeuronClass = c.parse().map_err(|e| field(format!("classes.{n}"), e))?;
            classes.insert(neuron(n, || "classes".into())?, class);
        }
        let mut values = BTreeMap::new();
        for (n, v) in &self.values {
            let bit = |x: Option<u8>, side: &str| match x {
                None => Ok(None),
                Some(0) => Ok(Some(false)),
                Some(1) => Ok(Some(true)),
                Some(k) => Err(field(format!("values.{n}.{side}"), format!("expected 0 or 1, got {k}"))),
            };
            let sv = SplitValue { forget: bit(v.forget, "forget")?, retain: bit(v.retain, "retain")? };
            values.insert(neuron(n, || "values".into())?, sv);
        }
        let conflicts = classes.values().filter(|&&c| c == NeuronClass::Conflict).count();
        if conflicts != self.conflict_count {
            return Err(field(
                "conflict_count",
                format!("{} but {conflicts} neurons are classified conflict", self.conflict_count),
            ));
        }
        let s = self.stats;
        Ok(LocalizationReport {
            classes,
            conflict_count: self.conflict_count,
            values,
            phi_satisfiable: self.phi_satisfiable,
            stats: SolverStats {
                conflicts: s.conflicts,
                decisions: s.decisions,
                propagations: s.propagations,
                restarts: s.restarts,
                learned: s.learned,
                deleted: s.deleted,
                solves: s.solves,
            },
            seed: self.seed,
        })
    }
}

pub fn report_to_json(r: &LocalizationReport) -> String {
    to_json(&ReportDoc::from(r))
}

pub fn report_from_json(text: &str) -> Result<LocalizationReport, FormatError> {
    parse_json::<ReportDoc>("localization report", text)?.build()
}

// ---------------------------------------------------------------- layouts

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub group: String,
    pub indices: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LayoutDoc {
    pub groups: Vec<GroupDoc>,
    #[serde(default)]
    pub neurons: BTreeMap<String, SlotDoc>,
}

impl From<&ModelLayout> for LayoutDoc {
    fn from(l: &ModelLayout) -> Self {
        LayoutDoc {
            groups: l.groups().iter().map(|g| GroupDoc { name: g.name.clone(), shape: g.shape.clone() }).collect(),
            neurons: l
                .neurons()
                .iter()
                .map(|(n, s)| {
                    (n.to_string(), SlotDoc { group: s.group.clone(), indices: s.indices.iter().copied().collect() })
                })
                .collect(),
        }
    }
}

impl LayoutDoc {
    pub fn build(&self) -> Result<ModelLayout, FormatError> {
        let groups = self.groups.iter().map(|g| ParameterGroup { name: g.name.clone(), shape: g.shape.clone() });
        let mut layout = ModelLayout::new(groups).map_err(|e| field("groups", e))?;
        for (n, slot) in &self.neurons {
            let id = neuron(n, || "neurons".into())?;
            layout
                .map_neuron(id, &slot.group, slot.indices.iter().copied())
                .map_err(|e| field(format!("neurons.{n}"), e))?;
        }
        Ok(layout)
    }
}

pub fn layout_to_json(l: &ModelLayout) -> String {
    to_json(&LayoutDoc::from(l))
}

pub fn layout_from_json(text: &str) -> Result<ModelLayout, FormatError> {
    parse_json::<LayoutDoc>("layout", text)?.build()
}

// ---------------------------------------------------------------- masks

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MaskDoc {
    pub provenance: Provenance,
    pub groups: BTreeMap<String, Vec<usize>>,
}

impl MaskDoc {
    pub fn new(mask: &MaskSpec, provenance: Provenance) -> Self {
        MaskDoc {
            provenance,
            groups: mask.groups.iter().map(|(g, s)| (g.clone(), s.iter().copied().collect())).collect(),
        }
    }

    pub fn mask(&self) -> Result<MaskSpec, FormatError> {
        let mut groups = BTreeMap::new();
        for (g, idx) in &self.groups {
            let set: BTreeSet<usize> = idx.iter().copied().collect();
            if set.len() != idx.len() || !idx.windows(2).all(|w| w[0] < w[1]) {
                return Err(field(format!("groups.{g}"), "indices must be strictly increasing"));
            }
            groups.insert(g.clone(), set);
        }
        Ok(MaskSpec { groups })
    }
}

pub fn mask_from_json(text: &str) -> Result<MaskDoc, FormatError> {
    let doc: MaskDoc = parse_json("mask", text)?;
    doc.mask()?;
    Ok(doc)
}

// ---------------------------------------------------------------- schedules

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub stage: usize,
    pub mask: String,
    pub epochs: u32,
    pub loss: String,
    pub lambda: f64,
    pub learning_rate: f64,
    pub optimizer: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub provenance: Provenance,
    pub stages: Vec<StageDoc>,
    pub warnings: Vec<String>,
}

impl ScheduleDoc {
    pub fn new(spec: &ScheduleSpec, provenance: Provenance) -> Self {
        ScheduleDoc {
            provenance,
            stages: spec
                .stages
                .iter()
                .enumerate()
                .map(|(i, s)| StageDoc {
                    stage: i + 1,
                    mask: s.mask.as_str().into(),
                    epochs: s.epochs,
                    loss: s.loss.as_str().into(),
                    lambda: s.lambda,
                    learning_rate: s.learning_rate,
                    optimizer: s.optimizer.clone(),
                })
                .collect(),
            warnings: spec.warnings.clone(),
        }
    }

    pub fn stages(&self) -> Result<Vec<Stage>, FormatError> {
        self.stages
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mask = match s.mask.as_str() {
                    "forget_mask" => MaskKind::Forget,
                    "conflict_mask" => MaskKind::Conflict,
                    m => return Err(field(format!("stages[{i}].mask"), format!("unknown mask `{m}`"))),
                };
                let loss = match s.loss.as_str() {
                    "forget_only" => LossKind::ForgetOnly,
                    "forget_plus_retain" => LossKind::ForgetPlusRetain,
                    l => return Err(field(format!("stages[{i}].loss"), format!("unknown loss `{l}`"))),
                };
                Ok(Stage {
                    mask,
                    epochs: s.epochs,
                    loss,
                    lambda: s.lambda,
                    learning_rate: s.learning_rate,
                    optimizer: s.optimizer.clone(),
                })
            })
            .collect()
    }
}

pub fn schedule_from_json(text: &str) -> Result<ScheduleDoc, FormatError> {
    let doc: ScheduleDoc = parse_json("schedule", text)?;
    doc.stages()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clue_core::{circuit_to_cnf, VarAllocator};

    const TOY: &str = r#"{
  "nodes": ["b", "a", "out"],
  "edges": [["a", "out"], ["b", "out"]],
  "gates": {"out": "and"},
  "output": "out",
  "role": "forget"
}"#;

    #[test]
    fn circuit_round_trip_is_stable() {
        let c = circuit_from_json(TOY).unwrap();
        let text = circuit_to_json(&c);
        assert_eq!(circuit_to_json(&circuit_from_json(&text).unwrap()), text);
        assert!(text.contains("\"AND\""));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }

    #[test]
    fn circuit_errors_name_fields() {
        let bad = TOY.replace("[\"b\", \"out\"]", "[\"b\", \"zz\"]");
        let e = circuit_from_json(&bad).unwrap_err().to_string();
        assert!(e.starts_with("edges:"), "{e}");
        let bad = TOY.replace("\"and\"", "\"xor\"");
        assert!(circuit_from_json(&bad).unwrap_err().to_string().starts_with("gates.out:"));
        let bad = TOY.replace("\"forget\"", "\"keep\"");
        assert!(circuit_from_json(&bad).unwrap_err().to_string().starts_with("role:"));
        let bad = TOY.replace("\"output\": \"out\"", "\"output\": \"out\", \"extra\": 1");
        assert!(matches!(circuit_from_json(&bad), Err(FormatError::Json { .. })));
    }

    #[test]
    fn dimacs_round_trip() {
        let c = circuit_from_json(TOY).unwrap();
        let f = circuit_to_cnf(&c, &mut VarAllocator::new()).unwrap();
        let text = write_dimacs(&f);
        assert!(text.starts_with("p cnf 3 3\n"));
        let g = parse_dimacs(&text).unwrap();
        assert_eq!(write_dimacs(&g), text);
        assert_eq!(g.clauses(), f.clauses());

        let side = to_json(&VarMapDoc::from(&f));
        assert!(side.contains("output_f"));
        assert_eq!(to_json(&var_map_from_json(&side).unwrap()), side);
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        let cases = [
            "1 2 0\n",
            "c only\n1 0\n",
            "p cnf 2 1\n0\n",
            "p cnf 2 1\n1 3 0\n",
            "p cnf 2 2\n1 2 0\n",
            "p cnf 2 1\n1 2\n",
            "p cnf 2 1\n1 x 0\n",
            "p dnf 2 1\n1 0\n",
        ];
        for text in cases {
            assert!(matches!(parse_dimacs(text), Err(FormatError::Dimacs { .. })), "{text:?}");
        }
        let f = parse_dimacs("c comment\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(f.clauses().len(), 2);
        assert_eq!(parse_dimacs("p cnf 0 0\n").unwrap().clauses().len(), 0);
        assert_eq!(parse_dimacs("c nothing here\n").unwrap().var_count(), 0);
        assert_eq!(parse_dimacs("").unwrap().clauses().len(), 0);
    }
}

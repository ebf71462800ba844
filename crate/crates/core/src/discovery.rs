// SPDX-License-Identifier: Apache-2.0

//! Recovering logical circuits from a black-box gate network by
//! intervention sweeps.
//!
//! A *noising* sweep runs the clean input and patches one edge with the
//! sender's corrupt-run state; a *denoising* sweep runs the corrupt input and
//! patches one edge with the clean-run state. Each edge is scored at its
//! receiver, which acts as the output of the sub-network it roots: the score
//! is the fraction of informative sample pairs on which the patch changes the
//! receiver's state. A pair is informative for an edge when the receiver
//! starts from the mode's resting state (every sender active in the clean
//! run for noising, every sender inactive in the corrupt run for denoising)
//! and the patch actually perturbs the sender.
//!
//! Under this protocol noising sees AND and ADDER edges but not OR edges,
//! denoising sees OR and ADDER edges but not AND edges, and the two sweeps
//! together separate the three gate kinds.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{
    build_circuit, ActivationState, CircuitError, Edge, GateKind, LogicalCircuit, NeuronId, Role,
};

/// Source counts up to this bound get exhaustive sample pairs by default.
pub const EXHAUSTIVE_SOURCE_LIMIT: usize = 12;
/// Number of pairs in the default random sample set.
pub const RANDOM_SAMPLE_COUNT: usize = 256;
pub const DEFAULT_EFFECT_THRESHOLD: f64 = 0.05;
pub const DEFAULT_SPARSITY: f64 = 0.0;

#[derive(Clone, PartialEq, Debug)]
pub enum DiscoveryError {
    EmptySampleSet,
    SampleWidth { index: usize, expected: usize },
    IdenticalSample(usize),
    InvalidSparsity(f64),
    InvalidThreshold(f64),
    UnknownEdge(NeuronId, NeuronId),
    UnsupportedMode(InterventionMode),
    MixedEvidence(NeuronId),
    Circuit(CircuitError),
}

impl fmt::Display for DiscoveryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscoveryError::EmptySampleSet => write!(f, "no input samples"),
            DiscoveryError::SampleWidth { index, expected } => {
                write!(f, "sample {index} does not cover the {expected} sources")
            }
            DiscoveryError::IdenticalSample(i) => {
                write!(f, "sample {i}: clean and corrupt inputs are identical")
            }
            DiscoveryError::InvalidSparsity(s) => write!(f, "sparsity {s} outside [0, 1)"),
            DiscoveryError::InvalidThreshold(t) => write!(f, "effect threshold {t} outside (0, 1]"),
            DiscoveryError::UnknownEdge(s, r) => write!(f, "`{s}` -> `{r}` is not a network edge"),
            DiscoveryError::UnsupportedMode(m) => write!(f, "{m:?} is not a single sweep mode"),
            DiscoveryError::MixedEvidence(n) => {
                write!(f, "recovered edges into `{n}` disagree on the gate kind")
            }
            DiscoveryError::Circuit(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DiscoveryError {}

impl From<CircuitError> for DiscoveryError {
    fn from(e: CircuitError) -> Self {
        DiscoveryError::Circuit(e)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum InterventionMode {
    Noising,
    Denoising,
    NsPlusDn,
}

impl InterventionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InterventionMode::Noising => "noising",
            InterventionMode::Denoising => "denoising",
            InterventionMode::NsPlusDn => "ns+dn",
        }
    }
}

/// Which run supplies the activations along patched edges.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Fill {
    /// Run the corrupt input, patch with clean activations (denoising).
    CleanFill,
    /// Run the clean input, patch with corrupt activations (noising).
    CorruptFill,
}

/// A clean/corrupt pair of source assignments in canonical source order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SamplePair {
    pub clean: Vec<bool>,
    pub corrupt: Vec<bool>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct DiscoveryConfig {
    /// Required fraction of network edges left out of the circuit.
    pub sparsity: f64,
    pub effect_threshold: f64,
    pub samples: Vec<SamplePair>,
    /// Seed used to draw `samples`, when they were drawn at random.
    pub seed: Option<u64>,
}

impl DiscoveryConfig {
    /// Every source pattern paired with its complement.
    pub fn exhaustive(source_count: usize) -> Self {
        let samples = (0u64..1 << source_count)
            .rev()
            .map(|bits| {
                let clean: Vec<bool> = (0..source_count).map(|i| bits >> i & 1 == 1).collect();
                let corrupt = clean.iter().map(|b| !b).collect();
                SamplePair { clean, corrupt }
            })
            .collect();
        DiscoveryConfig {
            sparsity: DEFAULT_SPARSITY,
            effect_threshold: DEFAULT_EFFECT_THRESHOLD,
            samples,
            seed: None,
        }
    }

    /// The all-active/all-inactive anchor pair followed by `count - 1`
    /// random clean inputs, each with a random non-empty subset of sources
    /// complemented in the corrupt input.
    pub fn random(source_count: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(count);
        if count > 0 && source_count > 0 {
            samples.push(SamplePair {
                clean: alloc::vec![true; source_count],
                corrupt: alloc::vec![false; source_count],
            });
        }
        while samples.len() < count && source_count > 0 {
            let clean: Vec<bool> = (0..source_count).map(|_| rng.random()).collect();
            let mut flip: Vec<bool> = (0..source_count).map(|_| rng.random()).collect();
            if !flip.contains(&true) {
                flip[rng.random_range(0..source_count)] = true;
            }
            let corrupt = clean.iter().zip(&flip).map(|(&c, &f)| c ^ f).collect();
            samples.push(SamplePair { clean, corrupt });
        }
        DiscoveryConfig {
            sparsity: DEFAULT_SPARSITY,
            effect_threshold: DEFAULT_EFFECT_THRESHOLD,
            samples,
            seed: Some(seed),
        }
    }

    /// Exhaustive pairs for small networks, seeded random pairs otherwise.
    pub fn for_network(network: &GateNetwork, seed: u64) -> Self {
        let n = network.source_count();
        if n <= EXHAUSTIVE_SOURCE_LIMIT {
            Self::exhaustive(n)
        } else {
            Self::random(n, RANDOM_SAMPLE_COUNT, seed)
        }
    }

    pub fn validate(&self, source_count: usize) -> Result<(), DiscoveryError> {
        if !(0.0..1.0).contains(&self.sparsity) {
            return Err(DiscoveryError::InvalidSparsity(self.sparsity));
        }
        if !(self.effect_threshold > 0.0 && self.effect_threshold <= 1.0) {
            return Err(DiscoveryError::InvalidThreshold(self.effect_threshold));
        }
        if self.samples.is_empty() {
            return Err(DiscoveryError::EmptySampleSet);
        }
        for (index, s) in self.samples.iter().enumerate() {
            if s.clean.len() != source_count || s.corrupt.len() != source_count {
                return Err(DiscoveryError::SampleWidth { index, expected: source_count });
            }
            if s.clean == s.corrupt {
                return Err(DiscoveryError::IdenticalSample(index));
            }
        }
        Ok(())
    }
}

/// A planted circuit used as an opaque, evaluable network.
#[derive(Clone, Debug)]
pub struct GateNetwork {
    truth: LogicalCircuit,
}

impl GateNetwork {
    pub fn new(ground_truth: LogicalCircuit) -> Self {
        GateNetwork { truth: ground_truth }
    }

    /// The planted circuit, for labelling results only.
    pub fn ground_truth(&self) -> &LogicalCircuit {
        &self.truth
    }

    pub fn nodes(&self) -> &[NeuronId] {
        self.truth.nodes()
    }

    pub fn sources(&self) -> impl Iterator<Item = &NeuronId> + '_ {
        self.truth.sources()
    }

    pub fn source_count(&self) -> usize {
        self.truth.source_indices().len()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        self.truth.edges()
    }

    pub fn output(&self) -> &NeuronId {
        self.truth.output()
    }

    fn edge_index(&self, (s, r): &Edge) -> Result<(usize, usize), DiscoveryError> {
        let unknown = || DiscoveryError::UnknownEdge(s.clone(), r.clone());
        let si = self.truth.index_of(s).ok_or_else(unknown)?;
        let ri = self.truth.index_of(r).ok_or_else(unknown)?;
        if self.truth.preds_at(ri).binary_search(&si).is_err() {
            return Err(unknown());
        }
        Ok((si, ri))
    }

    /// States of every node with `removed_edges` patched according to `fill`.
    pub fn ablate_states(
        &self,
        removed_edges: &BTreeSet<Edge>,
        clean: &[bool],
        corrupt: &[bool],
        fill: Fill,
    ) -> Result<Vec<ActivationState>, DiscoveryError> {
        let mut patched = removed_edges
            .iter()
            .map(|e| self.edge_index(e))
            .collect::<Result<Vec<_>, _>>()?;
        patched.sort_unstable();
        let n = self.source_count();
        for (index, v) in [clean, corrupt].into_iter().enumerate() {
            if v.len() != n {
                return Err(DiscoveryError::SampleWidth { index, expected: n });
            }
        }
        let (run, reference) = match fill {
            Fill::CorruptFill => (clean, corrupt),
            Fill::CleanFill => (corrupt, clean),
        };
        let reference = self.truth.evaluate_indexed(reference);
        Ok(self.truth.evaluate_patched(run, &patched, &reference))
    }

    /// Output state of the network with `removed_edges` patched.
    pub fn ablate_evaluate(
        &self,
        removed_edges: &BTreeSet<Edge>,
        clean: &[bool],
        corrupt: &[bool],
        fill: Fill,
    ) -> Result<ActivationState, DiscoveryError> {
        let states = self.ablate_states(removed_edges, clean, corrupt, fill)?;
        Ok(states[self.truth.output_index()])
    }
}

/// Result of one sweep: the kept edges and every edge's effect rate.
#[derive(Clone, PartialEq, Debug)]
pub struct EdgeSweep {
    pub mode: InterventionMode,
    pub kept: BTreeSet<Edge>,
    pub effects: BTreeMap<Edge, f64>,
}

/// Scores every network edge under `mode` and keeps the edges whose effect
/// reaches the threshold, then prunes the weakest kept edges until the
/// sparsity requirement holds.
pub fn discover_edges(
    network: &GateNetwork,
    config: &DiscoveryConfig,
    mode: InterventionMode,
) -> Result<EdgeSweep, DiscoveryError> {
    let fill = match mode {
        InterventionMode::Noising => Fill::CorruptFill,
        InterventionMode::Denoising => Fill::CleanFill,
        InterventionMode::NsPlusDn => return Err(DiscoveryError::UnsupportedMode(mode)),
    };
    config.validate(network.source_count())?;
    let circuit = &network.truth;

    // Base and reference runs are shared by every edge.
    let runs: Vec<(Vec<ActivationState>, Vec<ActivationState>)> = config
        .samples
        .iter()
        .map(|s| {
            let clean = circuit.evaluate_indexed(&s.clean);
            let corrupt = circuit.evaluate_indexed(&s.corrupt);
            match fill {
                Fill::CorruptFill => (clean, corrupt),
                Fill::CleanFill => (corrupt, clean),
            }
        })
        .collect();
    let resting = matches!(fill, Fill::CorruptFill);

    // Reverse topological sweep: edges nearest the output first.
    let mut order = circuit.edge_indices();
    order.sort_unstable_by_key(|&(s, r)| core::cmp::Reverse((r, s)));

    let mut effects = BTreeMap::new();
    for (s, r) in order {
        let mut informative = 0usize;
        let mut changed = 0usize;
        for (sample, (base, reference)) in config.samples.iter().zip(&runs) {
            let at_rest = circuit.preds_at(r).iter().all(|&p| base[p].is_active() == resting);
            if !at_rest || reference[s].is_active() == resting {
                continue;
            }
            informative += 1;
            let run = if resting { &sample.clean } else { &sample.corrupt };
            let patched = circuit.evaluate_patched(run, &[(s, r)], reference);
            if patched[r] != base[r] {
                changed += 1;
            }
        }
        let rate = if informative == 0 { 0.0 } else { changed as f64 / informative as f64 };
        let names = circuit.nodes();
        effects.insert((names[s].clone(), names[r].clone()), rate);
    }

    let mut kept: BTreeSet<Edge> = effects
        .iter()
        .filter(|(_, &rate)| rate >= config.effect_threshold)
        .map(|(e, _)| e.clone())
        .collect();

    let total = effects.len();
    let max_kept = ((1.0 - config.sparsity) * total as f64 + 1e-9) as usize;
    if kept.len() > max_kept {
        let mut by_effect: Vec<(&Edge, f64)> = kept.iter().map(|e| (e, effects[e])).collect();
        by_effect.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        let drop: Vec<Edge> =
            by_effect.iter().take(kept.len() - max_kept).map(|(e, _)| (*e).clone()).collect();
        for e in drop {
            kept.remove(&e);
        }
    }

    Ok(EdgeSweep { mode, kept, effects })
}

/// Assigns a gate kind to every receiver of a recovered edge.
///
/// Edges found only by noising vote AND, only by denoising vote OR, and by
/// both vote ADDER. All recovered edges into a receiver must agree.
pub fn classify_gates(
    c_ns: &BTreeSet<Edge>,
    c_dn: &BTreeSet<Edge>,
) -> Result<BTreeMap<NeuronId, GateKind>, DiscoveryError> {
    let mut kinds: BTreeMap<NeuronId, GateKind> = BTreeMap::new();
    for edge in c_ns.union(c_dn) {
        let kind = match (c_ns.contains(edge), c_dn.contains(edge)) {
            (true, false) => GateKind::And,
            (false, true) => GateKind::Or,
            _ => GateKind::Adder,
        };
        let receiver = &edge.1;
        match kinds.get(receiver) {
            Some(&k) if k != kind => return Err(DiscoveryError::MixedEvidence(receiver.clone())),
            Some(_) => {}
            None => {
                kinds.insert(receiver.clone(), kind);
            }
        }
    }
    Ok(kinds)
}

/// Output of the combined Ns+Dn discovery.
#[derive(Clone, Debug)]
pub struct Discovery {
    pub circuit: LogicalCircuit,
    pub noising: EdgeSweep,
    pub denoising: EdgeSweep,
}

/// Runs both sweeps, unions the recovered edges, classifies the gates and
/// returns an untagged circuit rooted at the network output.
pub fn discover_logical_circuit(
    network: &GateNetwork,
    config: &DiscoveryConfig,
) -> Result<Discovery, DiscoveryError> {
    let noising = discover_edges(network, config, InterventionMode::Noising)?;
    let denoising = discover_edges(network, config, InterventionMode::Denoising)?;
    let gates = classify_gates(&noising.kept, &denoising.kept)?;

    let edges: BTreeSet<Edge> = noising.kept.union(&denoising.kept).cloned().collect();
    let mut nodes: BTreeSet<NeuronId> = BTreeSet::new();
    nodes.insert(network.output().clone());
    for (s, r) in &edges {
        nodes.insert(s.clone());
        nodes.insert(r.clone());
    }
    let circuit = build_circuit(nodes, edges, gates, network.output().clone(), Role::Untagged)?;
    Ok(Discovery { circuit, noising, denoising })
}

// SPDX-License-Identifier: Apache-2.0

//! Planted gate networks, random circuit pairs and synthetic layouts.

use std::collections::BTreeSet;
use std::str::FromStr;

use clue_core::{
    build_circuit, CircuitError, GateKind, LogicalCircuit, MaskError, ModelLayout, NeuronId, Role,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use thiserror::Error;

/// Largest planted network, in nodes.
pub const MAX_NETWORK_NODES: usize = 30;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Mask(#[from] MaskError),
}

/// Relative weights of the gate kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateMix {
    pub and: u32,
    pub or: u32,
    pub adder: u32,
}

impl Default for GateMix {
    fn default() -> Self {
        GateMix { and: 1, or: 1, adder: 1 }
    }
}

impl GateMix {
    pub fn draw(&self, rng: &mut impl Rng) -> GateKind {
        let total = self.and + self.or + self.adder;
        let x = rng.random_range(0..total);
        if x < self.and {
            GateKind::And
        } else if x < self.and + self.or {
            GateKind::Or
        } else {
            GateKind::Adder
        }
    }
}

/// Parses `and=2,or=1,adder=0`; omitted kinds get weight 0.
impl FromStr for GateMix {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| GenError::InvalidSpec(format!("mix: {m}"));
        let mut mix = GateMix { and: 0, or: 0, adder: 0 };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected kind=weight, got `{part}`")))?;
            let v: u32 = v.trim().parse().map_err(|_| bad(format!("bad weight `{v}`")))?;
            match k.trim().to_ascii_lowercase().as_str() {
                "and" => mix.and = v,
                "or" => mix.or = v,
                "adder" => mix.adder = v,
                other => return Err(bad(format!("unknown gate kind `{other}`"))),
            }
        }
        if mix.and + mix.or + mix.adder == 0 {
            return Err(bad("all weights are zero".into()));
        }
        Ok(mix)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub sources: usize,
    pub gates: usize,
    pub mix: GateMix,
}

fn id(s: &str) -> NeuronId {
    NeuronId::new(s).expect("generated names are non-empty")
}

/// Random network with the given sources and gates. Every gate has fan-in
/// at least two and every non-output node feeds some gate. The last gate is
/// the output, named `out`.
pub fn planted_network(rng: &mut impl Rng, spec: &NetworkSpec) -> Result<LogicalCircuit, GenError> {
    let NetworkSpec { sources, gates, mix } = *spec;
    if sources < 2 {
        return Err(GenError::InvalidSpec("sources: at least 2 required".into()));
    }
    if gates == 0 {
        return Err(GenError::InvalidSpec("gates: at least 1 required".into()));
    }
    if sources + gates > MAX_NETWORK_NODES {
        return Err(GenError::InvalidSpec(format!(
            "sources + gates = {} exceeds {MAX_NETWORK_NODES} nodes",
            sources + gates
        )));
    }
    let sources: Vec<String> = (0..sources).map(|i| format!("x{i}")).collect();
    let kinds: Vec<GateKind> = (0..gates).map(|_| mix.draw(rng)).collect();
    layered(rng, &sources, &kinds, "g", "out", Role::Untagged)
}

fn layered(
    rng: &mut impl Rng,
    sources: &[String],
    kinds: &[GateKind],
    prefix: &str,
    output: &str,
    role: Role,
) -> Result<LogicalCircuit, GenError> {
    let mut nodes: Vec<String> = sources.to_vec();
    let mut unused: BTreeSet<usize> = (0..nodes.len()).collect();
    let mut edges = Vec::new();
    let mut gates = Vec::new();
    for (g, &kind) in kinds.iter().enumerate() {
        let last = g + 1 == kinds.len();
        let name = if last { output.to_string() } else { format!("{prefix}{g}") };
        let mut senders: BTreeSet<usize> = BTreeSet::new();
        if last {
            senders.extend(unused.iter().copied());
        } else if let Some(&u) = unused.iter().copied().collect::<Vec<_>>().choose(rng) {
            senders.insert(u);
        }
        let want = if last { 2 } else { rng.random_range(2..=3) };
        while senders.len() < want.min(nodes.len()) {
            senders.insert(rng.random_range(0..nodes.len()));
        }
        for &s in &senders {
            unused.remove(&s);
            edges.push((id(&nodes[s]), id(&name)));
        }
        gates.push((id(&name), kind));
        unused.insert(nodes.len());
        nodes.push(name);
    }
    Ok(build_circuit(nodes.iter().map(|n| id(n)), edges, gates, id(output), role)?)
}

/// Bounds for [`random_pair`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairSpec {
    /// Source names are drawn from `s0..s{pool}`.
    pub pool: usize,
    pub max_sources: usize,
    pub max_gates: usize,
    /// Chance that the retain circuit reuses the forget circuit's wiring.
    pub reuse: f64,
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec { pool: 8, max_sources: 5, max_gates: 4, reuse: 0.4 }
    }
}

/// Random forget/retain pair. Hidden gates are named `h{i}` on both sides,
/// so sources and hidden neurons may be shared; outputs are named `out`.
pub fn random_pair(rng: &mut impl Rng, spec: &PairSpec) -> Result<(LogicalCircuit, LogicalCircuit), GenError> {
    if spec.pool < 2 || spec.max_sources < 2 || spec.max_gates == 0 {
        return Err(GenError::InvalidSpec("pair: pool and max_sources >= 2, max_gates >= 1".into()));
    }
    let mix = GateMix::default();
    let f = random_side(rng, spec, Role::Forget)?;
    let r = if rng.random_bool(spec.reuse) {
        let nodes = f.nodes().to_vec();
        let gates: Vec<(NeuronId, GateKind)> = f.gates().into_keys().map(|n| (n, mix.draw(rng))).collect();
        build_circuit(nodes, f.edges(), gates, f.output().clone(), Role::Retain)?
    } else {
        random_side(rng, spec, Role::Retain)?
    };
    Ok((f, r))
}

fn random_side(rng: &mut impl Rng, spec: &PairSpec, role: Role) -> Result<LogicalCircuit, GenError> {
    let pool: Vec<String> = (0..spec.pool).map(|i| format!("s{i}")).collect();
    let n = rng.random_range(2..=spec.max_sources.min(spec.pool));
    let mut srcs: Vec<String> = pool.choose_multiple(rng, n).cloned().collect();
    srcs.sort();
    let mix = GateMix::default();
    let kinds: Vec<GateKind> = (0..rng.random_range(1..=spec.max_gates)).map(|_| mix.draw(rng)).collect();
    layered(rng, &srcs, &kinds, "h", "out", role)
}

/// Decoder-stack layout in which each of `neurons` that does not already
/// follow the `{group}.n{row}` convention gets its own row, assigned round
/// robin over the groups.
pub fn layout_for_neurons<'a>(
    neurons: impl IntoIterator<Item = &'a NeuronId>,
    layers: usize,
    rows: usize,
    cols: usize,
) -> Result<ModelLayout, GenError> {
    if layers == 0 || rows == 0 || cols == 0 {
        return Err(GenError::InvalidSpec("layout: layers, rows and cols must be positive".into()));
    }
    let mut layout = ModelLayout::decoder_stack(layers, rows, cols)?;
    let names: Vec<String> = layout.groups().iter().map(|g| g.name.clone()).collect();
    let explicit: BTreeSet<&NeuronId> = neurons.into_iter().filter(|n| layout.resolve(n).is_err()).collect();
    for (i, n) in explicit.into_iter().enumerate() {
        let row = i / names.len();
        if row >= rows {
            return Err(GenError::InvalidSpec(format!("layout: more neurons than {} rows", rows * names.len())));
        }
        layout.map_neuron(n.clone(), &names[i % names.len()], row * cols..(row + 1) * cols)?;
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_networks_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let spec = NetworkSpec { sources: rng.random_range(2..=8), gates: rng.random_range(1..=10), mix: GateMix::default() };
            let c = planted_network(&mut rng, &spec).unwrap();
            assert_eq!(c.len(), spec.sources + spec.gates);
            for (i, _) in c.nodes().iter().enumerate() {
                if c.gate_at(i).is_some() {
                    assert!(c.preds_at(i).len() >= 2);
                }
                if i != c.output_index() {
                    assert!(c.edge_indices().iter().any(|&(s, _)| s == i), "dangling node");
                }
            }
        }
    }

    #[test]
    fn spec_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = NetworkSpec { sources: 20, gates: 11, mix: GateMix::default() };
        assert!(planted_network(&mut rng, &spec).is_err());
        assert!("and=0,or=0".parse::<GateMix>().is_err());
        assert!("xor=1".parse::<GateMix>().is_err());
        assert_eq!("or=2".parse::<GateMix>().unwrap(), GateMix { and: 0, or: 2, adder: 0 });
    }

    #[test]
    fn pairs_are_deterministic() {
        let a = random_pair(&mut ChaCha8Rng::seed_from_u64(4), &PairSpec::default()).unwrap();
        let b = random_pair(&mut ChaCha8Rng::seed_from_u64(4), &PairSpec::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.role(), Role::Forget);
        assert_eq!(a.1.role(), Role::Retain);
    }

    #[test]
    fn layout_rows_per_neuron() {
        let ns: Vec<NeuronId> = ["A", "B", "L0.q_proj.n1"].into_iter().map(id).collect();
        let l = layout_for_neurons(&ns, 1, 2, 3).unwrap();
        assert_eq!(l.neurons().len(), 2);
        assert_eq!(l.resolve(&id("B")).unwrap().group, "L0.k_proj");
        assert!(layout_for_neurons(&ns, 1, 0, 3).is_err());
    }
}

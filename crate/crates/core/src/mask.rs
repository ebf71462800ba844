// SPDX-License-Identifier: Apache-2.0

//! Parameter masks and the two-stage fine-tuning schedule.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::NeuronId;
use crate::localize::{LocalizationReport, NeuronClass};

/// Parameter matrices per decoder layer.
pub const DECODER_MATRICES: [&str; 7] =
    ["q_proj", "k_proj", "v_proj", "o_proj", "gate_proj", "up_proj", "down_proj"];

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MaskError {
    UnmappedNeuron(NeuronId),
    IndexOutOfBounds { group: String, index: usize, size: usize },
    UnknownGroup(String),
    DuplicateGroup(String),
    EmptyGroup(String),
    DuplicateNeuron(NeuronId),
    OverlappingNeurons { group: String, first: NeuronId, second: NeuronId },
    InvalidConfig(String),
}

impl fmt::Display for MaskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaskError::UnmappedNeuron(n) => write!(f, "neuron `{n}` has no layout mapping"),
            MaskError::IndexOutOfBounds { group, index, size } => {
                write!(f, "index {index} out of bounds for group `{group}` of size {size}")
            }
            MaskError::UnknownGroup(g) => write!(f, "unknown parameter group `{g}`"),
            MaskError::DuplicateGroup(g) => write!(f, "parameter group `{g}` listed twice"),
            MaskError::EmptyGroup(g) => write!(f, "parameter group `{g}` has no elements"),
            MaskError::DuplicateNeuron(n) => write!(f, "neuron `{n}` mapped twice"),
            MaskError::OverlappingNeurons { group, first, second } => {
                write!(f, "neurons `{first}` and `{second}` share indices in group `{group}`")
            }
            MaskError::InvalidConfig(msg) => write!(f, "invalid schedule config: {msg}"),
        }
    }
}

impl core::error::Error for MaskError {}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParameterGroup {
    pub name: String,
    pub shape: Vec<usize>,
}

impl ParameterGroup {
    pub fn size(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Where a neuron lives: a group and flat row-major indices into it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeuronSlot {
    pub group: String,
    pub indices: BTreeSet<usize>,
}

/// Parameter groups of a model and the neuron to index mapping.
///
/// Neurons named `{group}.n{row}` that have no explicit mapping resolve to
/// row `row` of a two-dimensional group.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ModelLayout {
    groups: Vec<ParameterGroup>,
    by_name: BTreeMap<String, usize>,
    neurons: BTreeMap<NeuronId, NeuronSlot>,
}

impl ModelLayout {
    pub fn new(groups: impl IntoIterator<Item = ParameterGroup>) -> Result<Self, MaskError> {
        let mut layout = ModelLayout::default();
        for g in groups {
            if g.size() == 0 {
                return Err(MaskError::EmptyGroup(g.name));
            }
            if layout.by_name.contains_key(&g.name) {
                return Err(MaskError::DuplicateGroup(g.name));
            }
            layout.by_name.insert(g.name.clone(), layout.groups.len());
            layout.groups.push(g);
        }
        Ok(layout)
    }

    /// `layers` decoder layers of seven `rows x cols` matrices each, named
    /// `L{layer}.{matrix}`.
    pub fn decoder_stack(layers: usize, rows: usize, cols: usize) -> Result<Self, MaskError> {
        let groups = (0..layers).flat_map(|l| {
            DECODER_MATRICES.iter().map(move |m| ParameterGroup {
                name: alloc::format!("L{l}.{m}"),
                shape: alloc::vec![rows, cols],
            })
        });
        Self::new(groups)
    }

    pub fn groups(&self) -> &[ParameterGroup] {
        &self.groups
    }

    pub fn group(&self, name: &str) -> Option<&ParameterGroup> {
        self.by_name.get(name).map(|&i| &self.groups[i])
    }

    pub fn neurons(&self) -> &BTreeMap<NeuronId, NeuronSlot> {
        &self.neurons
    }

    /// Maps `neuron` to `indices` of `group`. Index sets of different
    /// neurons may not overlap.
    pub fn map_neuron(
        &mut self,
        neuron: NeuronId,
        group: &str,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<(), MaskError> {
        let g = self.group(group).ok_or_else(|| MaskError::UnknownGroup(group.into()))?;
        let size = g.size();
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&index) = indices.iter().find(|&&i| i >= size) {
            return Err(MaskError::IndexOutOfBounds { group: group.into(), index, size });
        }
        if self.neurons.contains_key(&neuron) {
            return Err(MaskError::DuplicateNeuron(neuron));
        }
        for (other, slot) in &self.neurons {
            if slot.group == group && !slot.indices.is_disjoint(&indices) {
                return Err(MaskError::OverlappingNeurons {
                    group: group.into(),
                    first: other.clone(),
                    second: neuron,
                });
            }
        }
        self.neurons.insert(neuron, NeuronSlot { group: group.into(), indices });
        Ok(())
    }

    /// Group and indices for `neuron`.
    pub fn resolve(&self, neuron: &NeuronId) -> Result<NeuronSlot, MaskError> {
        if let Some(slot) = self.neurons.get(neuron) {
            return Ok(slot.clone());
        }
        let unmapped = || MaskError::UnmappedNeuron(neuron.clone());
        let (group, row) = neuron.as_str().rsplit_once(".n").ok_or_else(unmapped)?;
        let row: usize = row.parse().map_err(|_| unmapped())?;
        let g = self.group(group).ok_or_else(unmapped)?;
        let &[rows, cols] = g.shape.as_slice() else {
            return Err(unmapped());
        };
        if row >= rows {
            return Err(MaskError::IndexOutOfBounds { group: group.into(), index: row, size: rows });
        }
        Ok(NeuronSlot { group: group.into(), indices: (row * cols..(row + 1) * cols).collect() })
    }
}

/// Sparse binary mask: listed indices are 1, everything else 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MaskSpec {
    pub groups: BTreeMap<String, BTreeSet<usize>>,
}

impl MaskSpec {
    pub fn is_empty(&self) -> bool {
        self.groups.values().all(|s| s.is_empty())
    }

    pub fn index_count(&self) -> usize {
        self.groups.values().map(|s| s.len()).sum()
    }

    pub fn contains(&self, group: &str, index: usize) -> bool {
        self.groups.get(group).is_some_and(|s| s.contains(&index))
    }

    pub fn is_disjoint(&self, other: &MaskSpec) -> bool {
        self.groups
            .iter()
            .all(|(g, s)| other.groups.get(g).is_none_or(|o| s.is_disjoint(o)))
    }

    /// Checks every index against `layout`.
    pub fn validate(&self, layout: &ModelLayout) -> Result<(), MaskError> {
        for (name, set) in &self.groups {
            let g = layout.group(name).ok_or_else(|| MaskError::UnknownGroup(name.clone()))?;
            if let Some(&index) = set.iter().find(|&&i| i >= g.size()) {
                return Err(MaskError::IndexOutOfBounds { group: name.clone(), index, size: g.size() });
            }
        }
        Ok(())
    }

    fn add(&mut self, slot: NeuronSlot) {
        self.groups.entry(slot.group).or_default().extend(slot.indices);
    }
}

/// Forget mask from Forget neurons and conflict mask from Conflict neurons.
pub fn emit_masks(
    report: &LocalizationReport,
    layout: &ModelLayout,
) -> Result<(MaskSpec, MaskSpec), MaskError> {
    let mut m_f = MaskSpec::default();
    let mut m_c = MaskSpec::default();
    // Index owner per group, to reject neurons that resolve to shared indices.
    let mut owner: BTreeMap<(String, usize), &NeuronId> = BTreeMap::new();
    for (n, class) in &report.classes {
        let target = match class {
            NeuronClass::Forget => &mut m_f,
            NeuronClass::Conflict => &mut m_c,
            NeuronClass::Safe(_) => continue,
        };
        let slot = layout.resolve(n)?;
        for &i in &slot.indices {
            if let Some(first) = owner.insert((slot.group.clone(), i), n) {
                return Err(MaskError::OverlappingNeurons {
                    group: slot.group,
                    first: first.clone(),
                    second: n.clone(),
                });
            }
        }
        target.add(slot);
    }
    m_f.groups.retain(|_, s| !s.is_empty());
    m_c.groups.retain(|_, s| !s.is_empty());
    Ok((m_f, m_c))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum MaskKind {
    Forget,
    Conflict,
}

impl MaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskKind::Forget => "forget_mask",
            MaskKind::Conflict => "conflict_mask",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum LossKind {
    ForgetOnly,
    ForgetPlusRetain,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::ForgetOnly => "forget_only",
            LossKind::ForgetPlusRetain => "forget_plus_retain",
        }
    }
}

/// One fine-tuning stage.
#[derive(Clone, PartialEq, Debug)]
pub struct Stage {
    pub mask: MaskKind,
    pub epochs: u32,
    pub loss: LossKind,
    /// Weight of the retain loss.
    pub lambda: f64,
    pub learning_rate: f64,
    pub optimizer: String,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ScheduleConfig {
    pub stages: Vec<Stage>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let stage = |mask, epochs, loss, lambda| Stage {
            mask,
            epochs,
            loss,
            lambda,
            learning_rate: 1e-5,
            optimizer: "AdamW".to_string(),
        };
        ScheduleConfig {
            stages: alloc::vec![
                stage(MaskKind::Forget, 1, LossKind::ForgetOnly, 0.0),
                stage(MaskKind::Conflict, 5, LossKind::ForgetPlusRetain, 1.0),
            ],
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct ScheduleSpec {
    pub stages: Vec<Stage>,
    pub warnings: Vec<String>,
}

/// Validates `config` and produces the schedule document.
pub fn emit_schedule(
    masks: (&MaskSpec, &MaskSpec),
    config: &ScheduleConfig,
) -> Result<ScheduleSpec, MaskError> {
    let invalid = |m: &str| Err(MaskError::InvalidConfig(m.into()));
    if !masks.0.is_disjoint(masks.1) {
        return invalid("forget and conflict masks overlap");
    }
    let [first, second] = config.stages.as_slice() else {
        return invalid("exactly two stages are required");
    };
    if first.mask != MaskKind::Forget || second.mask != MaskKind::Conflict {
        return invalid("the forget mask stage must come before the conflict mask stage");
    }
    if first.loss != LossKind::ForgetOnly {
        return invalid("stage 1 must use the forget_only loss");
    }
    if second.loss != LossKind::ForgetPlusRetain {
        return invalid("stage 2 must use the forget_plus_retain loss");
    }
    let mut warnings = Vec::new();
    for (i, s) in config.stages.iter().enumerate() {
        let n = i + 1;
        if s.epochs == 0 {
            return Err(MaskError::InvalidConfig(alloc::format!("stage {n}: epochs must be positive")));
        }
        if !(s.lambda.is_finite() && s.lambda >= 0.0) {
            return Err(MaskError::InvalidConfig(alloc::format!("stage {n}: lambda must be >= 0")));
        }
        if !(s.learning_rate.is_finite() && s.learning_rate > 0.0) {
            return Err(MaskError::InvalidConfig(alloc::format!(
                "stage {n}: learning_rate must be positive"
            )));
        }
        if s.optimizer.is_empty() {
            return Err(MaskError::InvalidConfig(alloc::format!("stage {n}: optimizer is empty")));
        }
    }
    if second.lambda == 0.0 {
        warnings.push("stage 2 lambda is 0; its objective reduces to the forget loss".to_string());
    }
    Ok(ScheduleSpec { stages: config.stages.clone(), warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localize::SafeReason;
    use crate::solver::SolverStats;

    fn id(s: &str) -> NeuronId {
        NeuronId::new(s).unwrap()
    }

    fn report(classes: &[(&str, NeuronClass)]) -> LocalizationReport {
        LocalizationReport {
            classes: classes.iter().map(|(n, c)| (id(n), *c)).collect(),
            conflict_count: classes.iter().filter(|(_, c)| *c == NeuronClass::Conflict).count(),
            values: BTreeMap::new(),
            phi_satisfiable: true,
            stats: SolverStats::default(),
            seed: 0,
        }
    }

    fn small_layout() -> ModelLayout {
        let mut l = ModelLayout::new([ParameterGroup { name: "mlp.0".into(), shape: alloc::vec![8] }])
            .unwrap();
        l.map_neuron(id("n1"), "mlp.0", [3]).unwrap();
        l.map_neuron(id("n2"), "mlp.0", [4, 5]).unwrap();
        l
    }

    #[test]
    fn single_forget_neuron() {
        let (m_f, m_c) =
            emit_masks(&report(&[("n1", NeuronClass::Forget)]), &small_layout()).unwrap();
        assert_eq!(m_f.groups["mlp.0"], [3].into_iter().collect());
        assert!(m_c.is_empty());
    }

    #[test]
    fn safe_neurons_contribute_nothing() {
        let r = report(&[
            ("n1", NeuronClass::Safe(SafeReason::Retain)),
            ("n2", NeuronClass::Safe(SafeReason::Absent)),
            ("unmapped", NeuronClass::Safe(SafeReason::Retain)),
        ]);
        let (m_f, m_c) = emit_masks(&r, &small_layout()).unwrap();
        assert!(m_f.is_empty() && m_c.is_empty());
    }

    #[test]
    fn unmapped_and_out_of_bounds() {
        let r = report(&[("ghost", NeuronClass::Forget)]);
        assert_eq!(emit_masks(&r, &small_layout()), Err(MaskError::UnmappedNeuron(id("ghost"))));
        let mut l = small_layout();
        assert!(matches!(
            l.map_neuron(id("n3"), "mlp.0", [8]),
            Err(MaskError::IndexOutOfBounds { index: 8, size: 8, .. })
        ));
        assert!(matches!(
            l.map_neuron(id("n3"), "mlp.0", [5]),
            Err(MaskError::OverlappingNeurons { .. })
        ));
    }

    #[test]
    fn decoder_stack_convention() {
        let l = ModelLayout::decoder_stack(32, 4, 3).unwrap();
        assert_eq!(l.groups().len(), 224);
        let slot = l.resolve(&id("L31.down_proj.n2")).unwrap();
        assert_eq!(slot.group, "L31.down_proj");
        assert_eq!(slot.indices, (6..9).collect());
        assert!(matches!(
            l.resolve(&id("L0.q_proj.n4")),
            Err(MaskError::IndexOutOfBounds { .. })
        ));
        assert!(l.resolve(&id("L32.q_proj.n0")).is_err());

        let r = report(&[("L0.q_proj.n0", NeuronClass::Forget), ("L0.q_proj.n1", NeuronClass::Conflict)]);
        let (m_f, m_c) = emit_masks(&r, &l).unwrap();
        assert!(m_f.is_disjoint(&m_c));
        assert_eq!(m_f.index_count() + m_c.index_count(), 6);
        m_f.validate(&l).unwrap();
    }

    #[test]
    fn overlapping_resolution_is_rejected() {
        let mut l = ModelLayout::decoder_stack(1, 2, 2).unwrap();
        l.map_neuron(id("x"), "L0.q_proj", [1]).unwrap();
        let r = report(&[("x", NeuronClass::Forget), ("L0.q_proj.n0", NeuronClass::Conflict)]);
        assert!(matches!(emit_masks(&r, &l), Err(MaskError::OverlappingNeurons { .. })));
    }

    #[test]
    fn default_schedule() {
        let empty = MaskSpec::default();
        let s = emit_schedule((&empty, &empty), &ScheduleConfig::default()).unwrap();
        assert_eq!(s.stages.len(), 2);
        assert_eq!((s.stages[0].epochs, s.stages[1].epochs), (1, 5));
        assert_eq!(s.stages[1].lambda, 1.0);
        assert_eq!(s.stages[0].learning_rate, 1e-5);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn schedule_validation() {
        let empty = MaskSpec::default();
        let mut cfg = ScheduleConfig::default();
        cfg.stages[1].lambda = 0.0;
        let s = emit_schedule((&empty, &empty), &cfg).unwrap();
        assert_eq!(s.warnings.len(), 1);

        let mut swapped = ScheduleConfig::default();
        swapped.stages.swap(0, 1);
        assert!(matches!(
            emit_schedule((&empty, &empty), &swapped),
            Err(MaskError::InvalidConfig(_))
        ));

        let mut neg = ScheduleConfig::default();
        neg.stages[1].lambda = -1.0;
        assert!(emit_schedule((&empty, &empty), &neg).is_err());
    }
}

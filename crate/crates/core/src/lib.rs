// SPDX-License-Identifier: Apache-2.0

//! Core of the conflict-guided localization pipeline.
//!
//! Logical circuits over named neurons, gate discovery by edge ablation,
//! Tseitin encoding to CNF, a CDCL solver, minimum conflict-set search and
//! mask/schedule construction. Everything here is deterministic and free of
//! I/O; file formats live in the `clue` crate.

#![no_std]

extern crate alloc;

pub mod cardinality;
pub mod circuit;
pub mod cnf;
pub mod discovery;
pub mod localize;
pub mod mask;
pub mod solver;

pub use circuit::{
    build_circuit, ActivationState, CircuitError, Edge, GateKind, LogicalCircuit, NeuronId, Role,
};
pub use cnf::{
    circuit_to_cnf, compose_phi, encode_circuit, tseitin_gate, Clause, CnfError, CnfFormula,
    Literal, Var, VarAllocator, VarMap, VarOrigin,
};
pub use discovery::{
    classify_gates, discover_edges, discover_logical_circuit, Discovery, DiscoveryConfig,
    DiscoveryError, EdgeSweep, GateNetwork, InterventionMode, SamplePair,
};
pub use localize::{
    brute_force_localize, check_report, localize, localize_with, LocalizationReport,
    LocalizeError, NeuronClass, SafeReason, SplitValue,
};
pub use mask::{
    emit_masks, emit_schedule, LossKind, MaskError, MaskKind, MaskSpec, ModelLayout,
    ParameterGroup, ScheduleConfig, ScheduleSpec, Stage,
};
pub use solver::{
    solve, solve_under_assumptions, Assignment, SolveResult, Solver, SolverConfig, SolverStats,
};

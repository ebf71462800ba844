// SPDX-License-Identifier: Apache-2.0

//! The `clue` command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use clue_core::{
    brute_force_localize, build_circuit, check_report, circuit_to_cnf, classify_gates, compose_phi,
    discover_edges, discover_logical_circuit, emit_masks, emit_schedule, localize_with,
    DiscoveryConfig, GateNetwork, InterventionMode, Literal, LocalizationReport, LocalizeError,
    LogicalCircuit, NeuronId, Role, ScheduleConfig, Solver, SolverConfig, VarAllocator,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formats::{self, to_json, DiscoveryReportDoc, MaskDoc, ScheduleDoc, SolveDoc, VarMapDoc};
use crate::gen::{self, GateMix, NetworkSpec, PairSpec};
use crate::provenance::Provenance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Invariant(m) => m,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "clue", version, about = "Conflict-guided neuron localization toolkit")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "CLUE_SEED", default_value_t = 0)]
    seed: u64,
    /// Where to write the JSON result (a directory for `emit` and `gen --kind pair`).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted network, a random circuit pair or a layout.
    Gen(GenArgs),
    /// Recover a logical circuit from a network by edge ablation.
    Discover(DiscoverArgs),
    /// Encode circuits as DIMACS CNF with a variable-name sidecar.
    ToCnf(ToCnfArgs),
    /// Solve a DIMACS formula.
    Solve(SolveArgs),
    /// Classify neurons and find a minimum conflict set.
    Localize(LocalizeArgs),
    /// Write forget/conflict masks and the fine-tuning schedule.
    Emit(EmitArgs),
    /// Cross-check localization against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GenKind {
    Network,
    Pair,
    Layout,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Source nodes of a planted network.
    #[arg(long, default_value_t = 4)]
    sources: usize,
    /// Gates of a planted network.
    #[arg(long, default_value_t = 4)]
    gates: usize,
    /// Gate kind weights, e.g. `and=1,or=1,adder=1`.
    #[arg(long, default_value = "and=1,or=1,adder=1")]
    mix: String,
    /// Size of the shared source-name pool for pairs.
    #[arg(long, default_value_t = 8)]
    pool: usize,
    #[arg(long, default_value_t = 5)]
    max_sources: usize,
    #[arg(long, default_value_t = 4)]
    max_gates: usize,
    #[arg(long, default_value_t = 32)]
    layers: usize,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// Circuits whose neurons get explicit layout rows.
    #[arg(long = "circuit")]
    circuits: Vec<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Ns,
    Dn,
    #[value(name = "ns+dn")]
    NsDn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RoleArg {
    Forget,
    Retain,
    None,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Role {
        match r {
            RoleArg::Forget => Role::Forget,
            RoleArg::Retain => Role::Retain,
            RoleArg::None => Role::Untagged,
        }
    }
}

#[derive(Args, Debug)]
struct DiscoverArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum, default_value = "ns+dn")]
    mode: ModeArg,
    /// Role tag of the emitted circuit.
    #[arg(long, value_enum, default_value = "none")]
    role: RoleArg,
    #[arg(long, default_value_t = clue_core::discovery::DEFAULT_SPARSITY)]
    sparsity: f64,
    #[arg(long, default_value_t = clue_core::discovery::DEFAULT_EFFECT_THRESHOLD)]
    threshold: f64,
    /// Use this many seeded random sample pairs instead of the default set.
    #[arg(long)]
    samples: Option<usize>,
    /// Where to write the per-edge discovery report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ToCnfArgs {
    /// A single role-tagged circuit.
    #[arg(long, conflicts_with_all = ["forget", "retain"], required_unless_present = "forget")]
    circuit: Option<PathBuf>,
    /// Role to assume when the circuit file has none.
    #[arg(long, value_enum, requires = "circuit")]
    role: Option<RoleArg>,
    #[arg(long, requires = "retain")]
    forget: Option<PathBuf>,
    #[arg(long, requires = "forget")]
    retain: Option<PathBuf>,
    /// Sidecar path; defaults to `<output>.map.json`.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    dimacs: PathBuf,
    /// Comma-separated DIMACS literals to assume.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    assume: Vec<i32>,
    /// Sidecar naming the variables.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LocalizeArgs {
    #[arg(long)]
    forget: PathBuf,
    /// Omit to localize against the forget circuit alone.
    #[arg(long)]
    retain: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmitArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    layout: PathBuf,
    #[arg(long, default_value_t = 1)]
    forget_epochs: u32,
    #[arg(long, default_value_t = 5)]
    conflict_epochs: u32,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-5)]
    lr: f64,
    #[arg(long, default_value = "AdamW")]
    optimizer: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, requires = "retain", conflicts_with = "corpus")]
    forget: Option<PathBuf>,
    #[arg(long, requires = "forget")]
    retain: Option<PathBuf>,
    /// Check this many generated pairs.
    #[arg(long, required_unless_present = "forget")]
    corpus: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

struct Output {
    path: Option<PathBuf>,
    quiet: bool,
}

impl Output {
    /// JSON goes to the output path and the summary to stdout; without a
    /// path the JSON goes to stdout and the summary to stderr.
    fn emit(&self, json: &str, summary: &str) -> Result<(), CliError> {
        match &self.path {
            Some(p) => {
                write_file(p, json)?;
                if !self.quiet {
                    println!("{summary}");
                }
            }
            None => {
                print!("{json}");
                if !self.quiet {
                    eprintln!("{summary}");
                }
            }
        }
        Ok(())
    }

    fn dir(&self, what: &str) -> Result<&Path, CliError> {
        let dir = self
            .path
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("{what} requires --output <DIR>")))?;
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        Ok(dir)
    }

    fn summary(&self, summary: &str) {
        if !self.quiet {
            println!("{summary}");
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<(LogicalCircuit, String), CliError> {
    let text = read(path)?;
    let c = formats::circuit_from_json(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((c, text))
}

fn load_tagged(path: &Path, role: Role) -> Result<LogicalCircuit, CliError> {
    let (c, _) = load_circuit(path)?;
    match c.role() {
        Role::Untagged => Ok(c.with_role(role)),
        r if r == role => Ok(c),
        r => Err(input(format!(
            "{}: role: expected {}, found {}",
            path.display(),
            role.as_str(),
            r.as_str()
        ))),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let out = Output { path: cli.output, quiet: cli.quiet };
    let seed = cli.seed;
    match cli.command {
        Command::Gen(a) => cmd_gen(a, seed, &out),
        Command::Discover(a) => cmd_discover(a, seed, &out),
        Command::ToCnf(a) => cmd_to_cnf(a, &out),
        Command::Solve(a) => cmd_solve(a, seed, &out),
        Command::Localize(a) => cmd_localize(a, seed, &out),
        Command::Emit(a) => cmd_emit(a, seed, &out),
        Command::Verify(a) => cmd_verify(a, seed, &out),
    }
}

fn cmd_gen(a: GenArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match a.kind {
        GenKind::Network => {
            let mix: GateMix = a.mix.parse().map_err(input)?;
            let spec = NetworkSpec { sources: a.sources, gates: a.gates, mix };
            let c = gen::planted_network(&mut rng, &spec).map_err(input)?;
            let summary = format!(
                "network: {} nodes, {} edges, {} sources (seed {seed})",
                c.len(),
                c.edge_count(),
                c.source_indices().len()
            );
            out.emit(&formats::circuit_to_json(&c), &summary)
        }
        GenKind::Pair => {
            let spec = PairSpec { pool: a.pool, max_sources: a.max_sources, max_gates: a.max_gates, ..PairSpec::default() };
            let (f, r) = gen::random_pair(&mut rng, &spec).map_err(input)?;
            let dir = out.dir("gen --kind pair")?;
            write_file(&dir.join("forget.json"), &formats::circuit_to_json(&f))?;
            write_file(&dir.join("retain.json"), &formats::circuit_to_json(&r))?;
            out.summary(&format!(
                "pair: forget {} nodes, retain {} nodes, {} shared (seed {seed}) -> {}",
                f.len(),
                r.len(),
                clue_core::localize::shared_neurons(&f, &r).len(),
                dir.display()
            ));
            Ok(())
        }
        GenKind::Layout => {
            let mut neurons = std::collections::BTreeSet::new();
            for p in &a.circuits {
                let (c, _) = load_circuit(p)?;
                let output = c.output().clone();
                neurons.extend(c.nodes().iter().filter(|&n| *n != output).cloned());
            }
            let l = gen::layout_for_neurons(&neurons, a.layers, a.rows, a.cols).map_err(input)?;
            let summary = format!(
                "layout: {} parameter groups, {} mapped neurons",
                l.groups().len(),
                l.neurons().len()
            );
            out.emit(&formats::layout_to_json(&l), &summary)
        }
    }
}

fn cmd_discover(a: DiscoverArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let text = read(&a.network)?;
    let truth = formats::circuit_from_json(&text).map_err(|e| input(format!("{}: {e}", a.network.display())))?;
    let network = GateNetwork::new(truth.with_role(Role::Untagged));
    let mut config = match a.samples {
        Some(n) => DiscoveryConfig::random(network.source_count(), n, seed),
        None => DiscoveryConfig::for_network(&network, seed),
    };
    config.sparsity = a.sparsity;
    config.effect_threshold = a.threshold;

    let (circuit, report) = match a.mode {
        ModeArg::NsDn => {
            let d = discover_logical_circuit(&network, &config).map_err(input)?;
            let report = DiscoveryReportDoc::from_discovery(seed, &config, &d);
            (d.circuit, report)
        }
        ModeArg::Ns | ModeArg::Dn => {
            let mode = if a.mode == ModeArg::Ns { InterventionMode::Noising } else { InterventionMode::Denoising };
            let sweep = discover_edges(&network, &config, mode).map_err(input)?;
            let none = Default::default();
            let gates = if mode == InterventionMode::Noising {
                classify_gates(&sweep.kept, &none)
            } else {
                classify_gates(&none, &sweep.kept)
            }
            .map_err(input)?;
            let mut nodes: std::collections::BTreeSet<NeuronId> = [network.output().clone()].into();
            for (s, r) in &sweep.kept {
                nodes.insert(s.clone());
                nodes.insert(r.clone());
            }
            let c = build_circuit(nodes, sweep.kept.clone(), gates, network.output().clone(), Role::Untagged)
                .map_err(input)?;
            let report = DiscoveryReportDoc::new(mode.as_str(), seed, &config, &[&sweep], &c);
            (c, report)
        }
    };
    let circuit = circuit.with_role(a.role.into());
    if let Some(p) = &a.report {
        write_file(p, &to_json(&report))?;
    }
    let truth_edges = network.edges().len();
    let summary = format!(
        "discover ({}): kept {} of {} edges, {} gates",
        report.mode,
        circuit.edge_count(),
        truth_edges,
        circuit.gates().len()
    );
    out.emit(&formats::circuit_to_json(&circuit), &summary)
}

fn cmd_to_cnf(a: ToCnfArgs, out: &Output) -> Result<(), CliError> {
    let mut alloc = VarAllocator::new();
    let formula = match (&a.circuit, &a.forget, &a.retain) {
        (Some(p), None, None) => {
            let (c, _) = load_circuit(p)?;
            let c = match (c.role(), a.role) {
                (Role::Untagged, Some(r)) => c.with_role(r.into()),
                (Role::Untagged, None) => {
                    return Err(input(format!("{}: role: circuit is untagged; pass --role", p.display())))
                }
                _ => c,
            };
            circuit_to_cnf(&c, &mut alloc).map_err(input)?
        }
        (None, Some(f), Some(r)) => {
            let f = load_tagged(f, Role::Forget)?;
            let r = load_tagged(r, Role::Retain)?;
            let phi_f = circuit_to_cnf(&f, &mut alloc).map_err(input)?;
            let phi_r = circuit_to_cnf(&r, &mut alloc).map_err(input)?;
            compose_phi(&phi_f, &phi_r).map_err(input)?
        }
        _ => return Err(CliError::Usage("pass --circuit, or both --forget and --retain".into())),
    };
    let map_path = a.map.clone().or_else(|| {
        out.path.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".map.json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = &map_path {
        write_file(p, &to_json(&VarMapDoc::from(&formula)))?;
    }
    let summary = format!("p cnf {} {}", formula.var_count(), formula.clauses().len());
    out.emit(&formats::write_dimacs(&formula), &summary)
}

fn cmd_solve(a: SolveArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let text = read(&a.dimacs)?;
    let formula = formats::parse_dimacs(&text).map_err(|e| input(format!("{}: {e}", a.dimacs.display())))?;
    let names = match &a.map {
        Some(p) => Some(formats::var_map_from_json(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut assumptions = Vec::with_capacity(a.assume.len());
    for &n in &a.assume {
        match Literal::from_dimacs(n) {
            Some(l) if n.unsigned_abs() <= formula.var_count() => assumptions.push(l),
            _ => return Err(input(format!("assume: literal {n} is outside 1..={}", formula.var_count()))),
        }
    }
    let mut solver = Solver::from_formula(&formula, SolverConfig { seed, ..SolverConfig::default() });
    let result = solver.solve_with(&assumptions);
    if let Some(m) = result.model() {
        if !formula.is_satisfied_by(m.as_slice()) {
            return Err(CliError::Invariant("model fails the independent check".into()));
        }
    }
    let stats = solver.stats();
    let doc = SolveDoc::new(&result, stats, names.as_ref());
    let summary = format!(
        "{result}: {} vars, {} clauses, {} conflicts, {} decisions, {} propagations",
        formula.var_count(),
        formula.clauses().len(),
        stats.conflicts,
        stats.decisions,
        stats.propagations
    );
    out.emit(&to_json(&doc), &summary)
}

fn report_summary(r: &LocalizationReport) -> String {
    use clue_core::{NeuronClass, SafeReason};
    let mut s = format!("conflict_count {}:", r.conflict_count);
    for (label, class) in [
        ("forget", NeuronClass::Forget),
        ("conflict", NeuronClass::Conflict),
        ("safe_retain", NeuronClass::Safe(SafeReason::Retain)),
        ("safe_absent", NeuronClass::Safe(SafeReason::Absent)),
    ] {
        let _ = write!(s, " {label}={}", r.count(class));
    }
    s
}

fn cmd_localize(a: LocalizeArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let f = load_tagged(&a.forget, Role::Forget)?;
    let r = a.retain.as_deref().map(|p| load_tagged(p, Role::Retain)).transpose()?;
    let config = SolverConfig { seed, ..SolverConfig::default() };
    let report = localize_with(&f, r.as_ref(), &config).map_err(input)?;
    check_report(&f, r.as_ref(), &report).map_err(CliError::Invariant)?;
    out.emit(&formats::report_to_json(&report), &report_summary(&report))
}

fn cmd_emit(a: EmitArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let report_text = read(&a.report)?;
    let report = formats::report_from_json(&report_text).map_err(|e| input(format!("{}: {e}", a.report.display())))?;
    let layout_text = read(&a.layout)?;
    let layout = formats::layout_from_json(&layout_text).map_err(|e| input(format!("{}: {e}", a.layout.display())))?;
    let (m_f, m_c) = emit_masks(&report, &layout).map_err(input)?;
    let mut config = ScheduleConfig::default();
    config.stages[0].epochs = a.forget_epochs;
    config.stages[1].epochs = a.conflict_epochs;
    config.stages[1].lambda = a.lambda;
    for s in &mut config.stages {
        s.learning_rate = a.lr;
        s.optimizer = a.optimizer.clone();
    }
    let schedule = emit_schedule((&m_f, &m_c), &config).map_err(input)?;
    let prov = Provenance::new(seed)
        .with_input("report", report_text.as_bytes())
        .with_input("layout", layout_text.as_bytes());
    let dir = out.dir("emit")?;
    write_file(&dir.join("forget_mask.json"), &to_json(&MaskDoc::new(&m_f, prov.clone())))?;
    write_file(&dir.join("conflict_mask.json"), &to_json(&MaskDoc::new(&m_c, prov.clone())))?;
    write_file(&dir.join("schedule.json"), &to_json(&ScheduleDoc::new(&schedule, prov)))?;
    let mut summary = format!(
        "masks: forget {} indices, conflict {} indices; schedule: {} stages -> {}",
        m_f.index_count(),
        m_c.index_count(),
        schedule.stages.len(),
        dir.display()
    );
    for w in &schedule.warnings {
        let _ = write!(summary, "\nwarning: {w}");
    }
    out.summary(&summary);
    Ok(())
}

#[derive(Serialize, Debug, Clone, PartialEq)]
struct Mismatch {
    index: usize,
    detail: String,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
struct VerifyDoc {
    status: String,
    seed: u64,
    instances: usize,
    checked: usize,
    skipped: usize,
    /// Minimum conflict-set size to number of instances.
    conflict_counts: BTreeMap<usize, usize>,
    mismatches: Vec<Mismatch>,
}

enum Verdict {
    Agree(usize),
    Skipped,
    Mismatch(String),
}

fn verify_pair(f: &LogicalCircuit, r: &LogicalCircuit, seed: u64) -> Result<Verdict, CliError> {
    let config = SolverConfig { seed, ..SolverConfig::default() };
    let rep = localize_with(f, Some(r), &config).map_err(input)?;
    let oracle = match brute_force_localize(f, r) {
        Ok(o) => o,
        Err(LocalizeError::TooLarge { .. }) => return Ok(Verdict::Skipped),
        Err(e) => return Err(input(e)),
    };
    if let Err(e) = check_report(f, Some(r), &rep) {
        return Ok(Verdict::Mismatch(format!("localize report unsound: {e}")));
    }
    if rep.conflicts() != oracle.conflicts() {
        let names = |r: &LocalizationReport| r.conflicts().iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        return Ok(Verdict::Mismatch(format!(
            "localize conflicts {{{}}}, oracle {{{}}}",
            names(&rep),
            names(&oracle)
        )));
    }
    Ok(Verdict::Agree(rep.conflict_count))
}

fn cmd_verify(a: VerifyArgs, seed: u64, out: &Output) -> Result<(), CliError> {
    let verdicts: Vec<Result<Verdict, CliError>> = match (&a.forget, &a.retain, a.corpus) {
        (Some(f), Some(r), None) => {
            let f = load_tagged(f, Role::Forget)?;
            let r = load_tagged(r, Role::Retain)?;
            vec![verify_pair(&f, &r, seed)]
        }
        (None, None, Some(n)) => {
            let threads = a.threads.max(1);
            let check = |i: usize| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let (f, r) = gen::random_pair(&mut rng, &PairSpec::default()).map_err(input)?;
                verify_pair(&f, &r, seed)
            };
            let mut slots: Vec<Option<Result<Verdict, CliError>>> = (0..n).map(|_| None).collect();
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..threads)
                    .map(|t| {
                        let check = &check;
                        s.spawn(move || (t..n).step_by(threads).map(|i| (i, check(i))).collect::<Vec<_>>())
                    })
                    .collect();
                for h in handles {
                    for (i, v) in h.join().expect("verify worker panicked") {
                        slots[i] = Some(v);
                    }
                }
            });
            slots.into_iter().map(|v| v.expect("every index checked")).collect()
        }
        _ => return Err(CliError::Usage("pass --forget and --retain, or --corpus N".into())),
    };

    let mut doc = VerifyDoc {
        status: "ok".into(),
        seed,
        instances: verdicts.len(),
        checked: 0,
        skipped: 0,
        conflict_counts: BTreeMap::new(),
        mismatches: Vec::new(),
    };
    for (index, v) in verdicts.into_iter().enumerate() {
        match v? {
            Verdict::Agree(k) => {
                doc.checked += 1;
                *doc.conflict_counts.entry(k).or_default() += 1;
            }
            Verdict::Skipped => doc.skipped += 1,
            Verdict::Mismatch(detail) => doc.mismatches.push(Mismatch { index, detail }),
        }
    }
    if !doc.mismatches.is_empty() {
        doc.status = "mismatch".into();
    }
    let summary = format!(
        "verify: {} instances, {} agree, {} skipped, {} mismatches",
        doc.instances,
        doc.checked,
        doc.skipped,
        doc.mismatches.len()
    );
    out.emit(&to_json(&doc), &summary)?;
    if doc.mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("{} oracle mismatches", doc.mismatches.len())))
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Conflict-driven clause-learning SAT solver.
//!
//! Two-watched-literal propagation, first-UIP learning with recursive
//! clause minimization, VSIDS branching with phase saving, geometric
//! restarts and activity-based learned-clause reduction. Assumptions are
//! decided first; an unsatisfiable call under assumptions reports the subset
//! of assumptions responsible.

mod heap;

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{CnfFormula, Literal, Var};
use heap::VarHeap;

/// Internal literal code: `2 * var_index + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Lit(u32);

impl Lit {
    #[inline]
    fn new(var: u32, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }
    #[inline]
    fn var(self) -> u32 {
        self.0 >> 1
    }
    #[inline]
    fn negated(self) -> bool {
        self.0 & 1 == 1
    }
    #[inline]
    fn code(self) -> usize {
        self.0 as usize
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl From<Literal> for Lit {
    fn from(l: Literal) -> Lit {
        Lit::new(l.var().index() as u32, l.is_negated())
    }
}

impl From<Lit> for Literal {
    fn from(l: Lit) -> Literal {
        Literal::new(Var::from_index(l.var() as usize), l.negated())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum LBool {
    True,
    False,
    Undef,
}

type CRef = u32;

#[derive(Clone, Debug)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Tunables. The defaults are fixed so runs are reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Probability of a uniformly random branching variable.
    pub random_decision_freq: f64,
    /// Conflicts before the first restart.
    pub restart_base: u64,
    pub restart_factor: f64,
    /// Polarity tried for a variable that has never been assigned.
    pub default_polarity: bool,
    pub var_decay: f64,
    pub clause_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            random_decision_freq: 0.0,
            restart_base: 100,
            restart_factor: 1.5,
            default_polarity: false,
            var_decay: 0.95,
            clause_decay: 0.999,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
    pub solves: u64,
}

impl core::ops::AddAssign for SolverStats {
    fn add_assign(&mut self, o: SolverStats) {
        self.conflicts += o.conflicts;
        self.decisions += o.decisions;
        self.propagations += o.propagations;
        self.restarts += o.restarts;
        self.learned += o.learned;
        self.deleted += o.deleted;
        self.solves += o.solves;
    }
}

/// Total assignment, indexed by variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var.index()).copied()
    }

    pub fn satisfies(&self, lit: Literal) -> bool {
        lit.eval(self.value(lit.var()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i32> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| Literal::new(Var::from_index(i), !b).to_dimacs())
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveResult {
    Sat(Assignment),
    /// Failed assumptions; empty when the formula alone is unsatisfiable.
    Unsat(Vec<Literal>),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat(_) => None,
        }
    }

    pub fn core(&self) -> Option<&[Literal]> {
        match self {
            SolveResult::Sat(_) => None,
            SolveResult::Unsat(c) => Some(c),
        }
    }
}

impl fmt::Display for SolveResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_sat() { "SAT" } else { "UNSAT" })
    }
}

enum SearchOutcome {
    Sat,
    Unsat(Vec<Literal>),
    Restart,
}

/// An incremental CDCL solver. Clauses learned in one call are kept for the
/// next, so repeated calls with different assumptions share work.
#[derive(Clone, Debug)]
pub struct Solver {
    config: SolverConfig,
    rng: ChaCha8Rng,
    stats: SolverStats,
    /// False once the clause set is unsatisfiable without assumptions.
    ok: bool,

    clauses: Vec<ClauseData>,
    learnts: Vec<CRef>,
    learnt_units: Vec<Lit>,
    watches: Vec<Vec<Watcher>>,

    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    heap: VarHeap,
    var_inc: f64,
    cla_inc: f64,

    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    seen: Vec<bool>,
    analyze_stack: Vec<Lit>,
    analyze_toclear: Vec<Lit>,
    max_learnts: f64,
}

impl Default for Solver {
    fn default() -> Self {
        Self::with_config(SolverConfig::default())
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: SolverConfig) -> Self {
        Solver {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            stats: SolverStats::default(),
            ok: true,
            clauses: Vec::new(),
            learnts: Vec::new(),
            learnt_units: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            heap: VarHeap::default(),
            var_inc: 1.0,
            cla_inc: 1.0,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            analyze_stack: Vec::new(),
            analyze_toclear: Vec::new(),
            max_learnts: 0.0,
        }
    }

    /// Solver loaded with every clause of `formula`.
    pub fn from_formula(formula: &CnfFormula, config: SolverConfig) -> Self {
        let mut s = Self::with_config(config);
        s.add_formula(formula);
        s
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn var_count(&self) -> usize {
        self.assigns.len()
    }

    /// Makes sure variables `1..=n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.assigns.len() < n {
            let v = self.assigns.len() as u32;
            self.assigns.push(LBool::Undef);
            self.level.push(0);
            self.reason.push(None);
            self.polarity.push(self.config.default_polarity);
            self.activity.push(0.0);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.insert(v, &self.activity);
        }
    }

    pub fn add_formula(&mut self, formula: &CnfFormula) {
        self.reserve_vars(formula.var_count() as usize);
        for c in formula.clauses() {
            self.add_clause(c.literals());
        }
    }

    /// Adds a clause at the top level. Returns false if the clause set is
    /// now known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Literal]) -> bool {
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return false;
        }
        if let Some(max) = lits.iter().map(|l| l.var().get() as usize).max() {
            self.reserve_vars(max);
        }
        let mut ps: Vec<Lit> = lits.iter().map(|&l| Lit::from(l)).collect();
        ps.sort_unstable();
        ps.dedup();
        let mut out: Vec<Lit> = Vec::with_capacity(ps.len());
        for (i, &p) in ps.iter().enumerate() {
            if self.value(p) == LBool::True || (i > 0 && ps[i - 1] == !p) {
                return true;
            }
            if self.value(p) != LBool::False {
                out.push(p);
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach_new(out, false);
                true
            }
        }
    }

    /// Learned clauses currently in the database, including learned units.
    pub fn learnt_clauses(&self) -> Vec<Vec<Literal>> {
        let mut out: Vec<Vec<Literal>> =
            self.learnt_units.iter().map(|&l| alloc::vec![Literal::from(l)]).collect();
        for &c in &self.learnts {
            let c = &self.clauses[c as usize];
            if !c.deleted {
                out.push(c.lits.iter().map(|&l| Literal::from(l)).collect());
            }
        }
        out
    }

    pub fn solve(&mut self) -> SolveResult {
        self.solve_with(&[])
    }

    /// Solves with `assumptions` decided before any other variable.
    pub fn solve_with(&mut self, assumptions: &[Literal]) -> SolveResult {
        self.stats.solves += 1;
        if let Some(max) = assumptions.iter().map(|l| l.var().get() as usize).max() {
            self.reserve_vars(max);
        }
        if !self.ok {
            return SolveResult::Unsat(Vec::new());
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from(l)).collect();
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(1000.0);
        let mut restart_limit = self.config.restart_base.max(1) as f64;
        let result = loop {
            match self.search(restart_limit as u64, &assumptions) {
                SearchOutcome::Sat => {
                    let values = self.assigns.iter().map(|&a| a == LBool::True).collect();
                    break SolveResult::Sat(Assignment::new(values));
                }
                SearchOutcome::Unsat(core) => break SolveResult::Unsat(core),
                SearchOutcome::Restart => {
                    self.stats.restarts += 1;
                    restart_limit *= self.config.restart_factor;
                    self.max_learnts *= 1.1;
                }
            }
        };
        self.cancel_until(0);
        result
    }

    #[inline]
    fn value(&self, p: Lit) -> LBool {
        match self.assigns[p.var() as usize] {
            LBool::Undef => LBool::Undef,
            LBool::True if p.negated() => LBool::False,
            LBool::False if p.negated() => LBool::True,
            a => a,
        }
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, p: Lit, from: Option<CRef>) {
        let v = p.var() as usize;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if p.negated() { LBool::False } else { LBool::True };
        self.level[v] = self.decision_level();
        self.reason[v] = from;
        self.trail.push(p);
    }

    fn attach_new(&mut self, lits: Vec<Lit>, learnt: bool) -> CRef {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as CRef;
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(ClauseData { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let p = self.trail[i];
            let v = p.var() as usize;
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.polarity[v] = !p.negated();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    /// Unit propagation. Watches for literal `l` hold the clauses in which
    /// `l` is one of the first two literals; they are visited when `l`
    /// becomes false.
    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let lits = &mut self.clauses[cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher { cref, blocker: first };
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref as usize].lits.len() {
                    let l = self.clauses[cref as usize].lits[k];
                    if self.value(l) != LBool::False {
                        self.clauses[cref as usize].lits.swap(1, k);
                        self.watches[l.code()].push(kept);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: u32) -> u32 {
        1 << (self.level[v as usize] & 31)
    }

    /// First-UIP conflict analysis. Returns the learned clause, asserting
    /// literal first, and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = alloc::vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v as usize] && self.level[v as usize] > 0 {
                    self.bump_var(v);
                    self.seen[v as usize] = true;
                    if self.level[v as usize] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var() as usize] = false;
            p = Some(lit);
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict involves the current level");

        // Recursive minimization.
        self.analyze_toclear.clear();
        self.analyze_toclear.extend_from_slice(&learnt);
        let levels = learnt[1..].iter().fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        let mut kept = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var() as usize].is_none() || !self.lit_redundant(l, levels) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for &l in &self.analyze_toclear {
            self.seen[l.var() as usize] = false;
        }

        let bt_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize]
        };
        (learnt, bt_level)
    }

    fn lit_redundant(&mut self, p: Lit, levels: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_toclear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[q.var() as usize].expect("only implied literals are expanded");
            for k in 1..self.clauses[cref as usize].lits.len() {
                let l = self.clauses[cref as usize].lits[k];
                let v = l.var() as usize;
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v].is_some() && self.abstract_level(v as u32) & levels != 0 {
                    self.seen[v] = true;
                    self.analyze_stack.push(l);
                    self.analyze_toclear.push(l);
                } else {
                    for x in self.analyze_toclear.drain(top..) {
                        self.seen[x.var() as usize] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    /// Collects the assumptions that imply `!failed`, where `failed` is an
    /// assumption found false.
    fn analyze_final(&mut self, failed: Lit) -> Vec<Literal> {
        let mut core = alloc::vec![Literal::from(failed)];
        if self.decision_level() == 0 {
            return core;
        }
        self.seen[failed.var() as usize] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => core.push(Literal::from(l)),
                Some(cref) => {
                    for k in 1..self.clauses[cref as usize].lits.len() {
                        let q = self.clauses[cref as usize].lits[k];
                        if self.level[q.var() as usize] > 0 {
                            self.seen[q.var() as usize] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[failed.var() as usize] = false;
        core
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        let mut next: Option<u32> = None;
        if self.config.random_decision_freq > 0.0
            && !self.heap.is_empty()
            && self.rng.random::<f64>() < self.config.random_decision_freq
        {
            let v = self.rng.random_range(0..self.assigns.len()) as u32;
            if self.assigns[v as usize] == LBool::Undef {
                next = Some(v);
            }
        }
        while next.is_none() {
            let v = self.heap.pop(&self.activity)?;
            if self.assigns[v as usize] == LBool::Undef {
                next = Some(v);
            }
        }
        let v = next?;
        Some(Lit::new(v, !self.polarity[v as usize]))
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let first = c.lits[0];
        self.reason[first.var() as usize] == Some(cref) && self.value(first) == LBool::True
    }

    /// Deletes the less active half of the learned clauses, sparing binary
    /// and reason clauses.
    fn reduce_db(&mut self) {
        let mut order: Vec<CRef> = self.learnts.clone();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity.total_cmp(&cb.activity).then(a.cmp(&b))
        });
        let half = order.len() / 2;
        let mut removed = 0u64;
        for &c in &order[..half] {
            if self.clauses[c as usize].lits.len() > 2 && !self.locked(c) {
                let cd = &mut self.clauses[c as usize];
                cd.deleted = true;
                cd.lits = Vec::new();
                removed += 1;
            }
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
        self.stats.deleted += removed;
        for w in &mut self.watches {
            w.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn search(&mut self, conflict_budget: u64, assumptions: &[Lit]) -> SearchOutcome {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchOutcome::Unsat(Vec::new());
                }
                let (learnt, bt_level) = self.analyze(confl);
                self.cancel_until(bt_level);
                self.stats.learned += 1;
                if learnt.len() == 1 {
                    self.learnt_units.push(learnt[0]);
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach_new(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;
                continue;
            }

            if conflicts >= conflict_budget {
                self.cancel_until(0);
                return SearchOutcome::Restart;
            }
            if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_db();
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let p = assumptions[self.decision_level() as usize];
                match self.value(p) {
                    LBool::True => self.trail_lim.push(self.trail.len()),
                    LBool::False => {
                        let core = self.analyze_final(p);
                        return SearchOutcome::Unsat(core);
                    }
                    LBool::Undef => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => {
                    self.stats.decisions += 1;
                    match self.pick_branch() {
                        Some(p) => p,
                        None => return SearchOutcome::Sat,
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }
}

/// Solves `formula` with the default configuration.
pub fn solve(formula: &CnfFormula) -> SolveResult {
    solve_under_assumptions(formula, &[])
}

pub fn solve_under_assumptions(formula: &CnfFormula, assumptions: &[Literal]) -> SolveResult {
    Solver::from_formula(formula, SolverConfig::default()).solve_with(assumptions)
}

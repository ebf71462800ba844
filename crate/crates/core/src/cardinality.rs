// SPDX-License-Identifier: Apache-2.0

//! Sequential-counter cardinality encoding.

use alloc::vec::Vec;

use crate::cnf::{Clause, CnfError, Literal, Var, VarAllocator, VarOrigin};

/// Registers of a sequential counter over some input literals.
///
/// `at_least(j)` is forced true whenever `j` or more inputs are true, so
/// assuming its negation bounds the count by `j - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialCounter {
    outputs: Vec<Var>,
}

impl SequentialCounter {
    /// Builds the counter and returns it with its clauses.
    pub fn encode(
        inputs: &[Literal],
        alloc: &mut VarAllocator,
    ) -> Result<(SequentialCounter, Vec<Clause>), CnfError> {
        let n = inputs.len();
        let base = alloc.var_count();
        let mut next = 0u32;
        let mut fresh = |alloc: &mut VarAllocator| {
            next += 1;
            alloc.var(VarOrigin::Counter(base + next))
        };
        let mut clauses = Vec::new();
        // prev[j]: at least j+1 of the inputs seen so far are true.
        let mut prev: Vec<Var> = Vec::new();
        for (i, &x) in inputs.iter().enumerate() {
            let cur: Vec<Var> = (0..=i).map(|_| fresh(alloc)).collect();
            clauses.extend(Clause::new([!x, Literal::positive(cur[0])])?);
            for j in 0..i {
                clauses.extend(Clause::new([
                    Literal::negative(prev[j]),
                    Literal::positive(cur[j]),
                ])?);
                clauses.extend(Clause::new([
                    !x,
                    Literal::negative(prev[j]),
                    Literal::positive(cur[j + 1]),
                ])?);
            }
            prev = cur;
        }
        debug_assert_eq!(prev.len(), n);
        Ok((SequentialCounter { outputs: prev }, clauses))
    }

    pub fn width(&self) -> usize {
        self.outputs.len()
    }

    /// Register meaning "at least `j` inputs are true", for `1 <= j <= width`.
    pub fn at_least(&self, j: usize) -> Option<Var> {
        j.checked_sub(1).and_then(|i| self.outputs.get(i)).copied()
    }

    /// Assumption bounding the number of true inputs by `k`, or `None` when
    /// `k >= width` and no bound is needed.
    pub fn at_most(&self, k: usize) -> Option<Literal> {
        self.at_least(k + 1).map(Literal::negative)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::CnfFormula;
    use crate::solver::{Solver, SolverConfig};

    fn setup(n: usize) -> (Vec<Var>, SequentialCounter, Solver) {
        let mut alloc = VarAllocator::new();
        let xs: Vec<Var> = (0..n).map(|i| alloc.var(VarOrigin::Counter(1000 + i as u32))).collect();
        let lits: Vec<Literal> = xs.iter().map(|&v| Literal::positive(v)).collect();
        let (counter, clauses) = SequentialCounter::encode(&lits, &mut alloc).unwrap();
        let mut f = CnfFormula::new(alloc.var_count());
        f.extend(clauses).unwrap();
        (xs, counter, Solver::from_formula(&f, SolverConfig::default()))
    }

    #[test]
    fn bounds_are_exact() {
        let n = 5;
        let (xs, counter, mut solver) = setup(n);
        assert_eq!(counter.width(), n);
        assert_eq!(counter.at_most(n), None);
        for k in 0..n {
            for forced in 0..=n {
                let mut assumptions: Vec<Literal> =
                    xs[..forced].iter().map(|&v| Literal::positive(v)).collect();
                assumptions.push(counter.at_most(k).unwrap());
                let sat = solver.solve_with(&assumptions).is_sat();
                assert_eq!(sat, forced <= k, "k={k} forced={forced}");
            }
        }
    }

    #[test]
    fn empty_counter() {
        let (_, counter, mut solver) = setup(0);
        assert_eq!(counter.width(), 0);
        assert_eq!(counter.at_most(0), None);
        assert!(solver.solve().is_sat());
    }
}

// SPDX-License-Identifier: Apache-2.0

mod common;

use clue_core::{solve, Literal, SolveResult, Solver, SolverConfig};
use common::{random_3cnf, truth_table_sat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_3cnf_agrees_with_truth_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..500 {
        let n = rng.random_range(3..=20);
        let m = (n as f64 * rng.random_range(3.0..5.5)) as usize;
        let f = random_3cnf(&mut rng, n, m);
        let expected = truth_table_sat(&f);
        match solve(&f) {
            SolveResult::Sat(model) => {
                assert!(expected);
                assert!(f.is_satisfied_by(model.as_slice()));
                sat += 1;
            }
            SolveResult::Unsat(core) => {
                assert!(!expected);
                assert!(core.is_empty());
                unsat += 1;
            }
        }
    }
    assert!(sat > 50 && unsat > 50, "sat={sat} unsat={unsat}");
}

#[test]
fn learned_clauses_are_implied() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..60 {
        let n = 12;
        let f = random_3cnf(&mut rng, n, 55);
        let mut s = Solver::from_formula(&f, SolverConfig::default());
        s.solve();
        let models: Vec<Vec<bool>> = (0u32..1 << n)
            .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|v| f.is_satisfied_by(v))
            .collect();
        for clause in s.learnt_clauses() {
            for m in &models {
                assert!(clause.iter().any(|l| l.eval(m[l.var().index()])), "{clause:?}");
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn failed_assumptions_form_a_core() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cores = 0;
    for _ in 0..200 {
        let n = rng.random_range(6..=14);
        let f = random_3cnf(&mut rng, n, (n * 3) as usize);
        let mut assumptions: Vec<Literal> = Vec::new();
        for v in 1..=n as i32 {
            match rng.random_range(0..3) {
                0 => assumptions.push(Literal::from_dimacs(v).unwrap()),
                1 => assumptions.push(Literal::from_dimacs(-v).unwrap()),
                _ => {}
            }
        }
        let mut s = Solver::from_formula(&f, SolverConfig::default());
        match s.solve_with(&assumptions) {
            SolveResult::Sat(m) => {
                assert!(f.is_satisfied_by(m.as_slice()));
                assert!(assumptions.iter().all(|&a| m.satisfies(a)));
            }
            SolveResult::Unsat(core) => {
                assert!(core.iter().all(|l| assumptions.contains(l)));
                assert!(!s.solve_with(&core).is_sat());
                let mut fixed = f.clone();
                for &l in &core {
                    fixed.add_clause([l]).unwrap();
                }
                assert!(!truth_table_sat(&fixed));
                cores += 1;
            }
        }
    }
    assert!(cores > 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_3cnf(&mut rng, 15, 64);
        let a = Solver::from_formula(&f, SolverConfig::default());
        let (mut a, mut b) = (a.clone(), a);
        prop_assert_eq!(a.solve(), b.solve());
        prop_assert_eq!(a.stats(), b.stats());
    }

    #[test]
    fn adding_clauses_never_restores_sat(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_3cnf(&mut rng, 12, 40);
        let mut g = f.clone();
        for c in random_3cnf(&mut rng, 12, 20).clauses() {
            g.add_clause(c.literals().iter().copied()).unwrap();
        }
        if !solve(&f).is_sat() {
            prop_assert!(!solve(&g).is_sat());
        }
        if let SolveResult::Sat(m) = solve(&g) {
            prop_assert!(f.is_satisfied_by(m.as_slice()));
        }
    }
}

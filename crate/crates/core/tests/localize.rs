// SPDX-License-Identifier: Apache-2.0

mod common;

use clue_core::localize::shared_neurons;
use clue_core::{brute_force_localize, check_report, localize, localize_with, NeuronClass, SolverConfig};
use common::random_pair;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, r) = random_pair(&mut rng);
        let rep = localize(&f, &r).unwrap();
        let oracle = brute_force_localize(&f, &r).unwrap();
        prop_assert_eq!(rep.conflict_count, oracle.conflict_count);
        prop_assert_eq!(rep.conflicts(), oracle.conflicts());
        prop_assert!(rep.conflict_count <= shared_neurons(&f, &r).len());
        if let Err(e) = check_report(&f, Some(&r), &rep) {
            return Err(TestCaseError::fail(e));
        }
        if let Err(e) = check_report(&f, Some(&r), &oracle) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn forget_only_never_conflicts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, _) = random_pair(&mut rng);
        let rep = localize_with(&f, None, &SolverConfig::default()).unwrap();
        prop_assert_eq!(rep.conflict_count, 0);
        prop_assert_eq!(rep.count(NeuronClass::Conflict), 0);
        if let Err(e) = check_report(&f, None, &rep) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, r) = random_pair(&mut rng);
        prop_assert_eq!(localize(&f, &r).unwrap(), localize(&f, &r).unwrap());
    }
}

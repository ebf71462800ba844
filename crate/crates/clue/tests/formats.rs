// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use clue::core::{
    emit_schedule, LocalizationReport, MaskSpec, ScheduleConfig, SolverConfig,
};
use clue::formats::{
    circuit_from_json, circuit_to_json, mask_from_json, parse_dimacs, report_from_json,
    report_to_json, schedule_from_json, to_json, write_dimacs, MaskDoc, ScheduleDoc,
};
use clue::gen::{self, PairSpec};
use clue::provenance::Provenance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mask_strategy() -> impl Strategy<Value = MaskSpec> {
    prop::collection::btree_map("[a-z]{1,6}(\\.[a-z_]{1,6})?", prop::collection::btree_set(0usize..4096, 1..20), 0..6)
        .prop_map(|groups| MaskSpec { groups })
}

proptest! {
    #[test]
    fn mask_round_trip(mask in mask_strategy(), seed in any::<u64>(), input in ".*") {
        let doc = MaskDoc::new(&mask, Provenance::new(seed).with_input("report", input.as_bytes()));
        let text = to_json(&doc);
        let back = mask_from_json(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.mask().unwrap(), mask);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn schedule_round_trip(
        e1 in 1u32..50,
        e2 in 1u32..50,
        lambda in 0.0f64..100.0,
        lr in 1e-8f64..1.0,
        opt in "[A-Za-z]{1,10}",
    ) {
        let mut config = ScheduleConfig::default();
        config.stages[0].epochs = e1;
        config.stages[1].epochs = e2;
        config.stages[1].lambda = lambda;
        for s in &mut config.stages {
            s.learning_rate = lr;
            s.optimizer = opt.clone();
        }
        let empty = MaskSpec::default();
        let spec = emit_schedule((&empty, &empty), &config).unwrap();
        let text = to_json(&ScheduleDoc::new(&spec, Provenance::new(7)));
        let back = schedule_from_json(&text).unwrap();
        prop_assert_eq!(back.stages().unwrap(), spec.stages);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn circuit_report_and_dimacs_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, r) = gen::random_pair(&mut rng, &PairSpec::default()).unwrap();
        prop_assert_eq!(circuit_from_json(&circuit_to_json(&f)).unwrap(), f.clone());
        let report: LocalizationReport =
            clue::core::localize_with(&f, Some(&r), &SolverConfig::default()).unwrap();
        prop_assert_eq!(report_from_json(&report_to_json(&report)).unwrap(), report);

        let mut alloc = clue::core::VarAllocator::new();
        let phi = clue::core::circuit_to_cnf(&f, &mut alloc).unwrap();
        let back = parse_dimacs(&write_dimacs(&phi)).unwrap();
        prop_assert_eq!(back.var_count(), phi.var_count());
        prop_assert_eq!(back.clauses(), phi.clauses());
    }
}

#[test]
fn mask_rejects_unsorted_indices() {
    let text = to_json(&MaskDoc {
        provenance: Provenance::new(0),
        groups: BTreeMap::from([("g".to_string(), vec![3, 1])]),
    });
    assert!(mask_from_json(&text).is_err());
    let dup = text.replace("3,\n      1", "1,\n      1");
    assert!(mask_from_json(&dup).is_err());
}

//! Randomized invariants over seeded specifications and programs.

mod common;

use std::collections::BTreeSet;

use common::{random_instance, random_program, random_spec, random_tbox, rng, Limits, CONSTANTS};
use obdarew::datalog::{evaluate, naive_evaluate, FactSet, Program};
use obdarew::dl::{dllite_closure, norm_and, norm_exists, saturate_existential_cis, Entailer};
use obdarew::expansion::{default_oracle, is_db_defined, ucq_answers, DefaultOracle, OracleAnswer};
use obdarew::io;
use obdarew::rewriter::{rew_obda, RewriteOptions};
use obdarew::Name;
use proptest::prelude::*;
use rand::Rng;

fn program_instance(seed: u64) -> (Program, FactSet) {
    let mut g = rng(seed);
    let p = random_program(&mut g, 6);
    let mut d = FactSet::new();
    for _ in 0..g.gen_range(0..12) {
        let c = |g: &mut rand::rngs::StdRng| Name::from(CONSTANTS[g.gen_range(0..CONSTANTS.len())]);
        match g.gen_range(0..3) {
            0 => d.insert("E0", vec![c(&mut g)]),
            1 => d.insert("E1", vec![c(&mut g), c(&mut g)]),
            _ => d.insert("E2", vec![c(&mut g)]),
        };
    }
    (p, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semi_naive_matches_naive(seed in any::<u64>(), rounds in 0usize..5) {
        let (p, d) = program_instance(seed);
        prop_assert_eq!(
            evaluate(&p, &d, Some(rounds)).unwrap().facts,
            naive_evaluate(&p, &d, Some(rounds)).unwrap().facts
        );
        prop_assert_eq!(
            evaluate(&p, &d, None).unwrap().facts,
            naive_evaluate(&p, &d, None).unwrap().facts
        );
    }

    #[test]
    fn more_rounds_never_lose_facts(seed in any::<u64>()) {
        let (p, d) = program_instance(seed);
        let full = evaluate(&p, &d, None).unwrap();
        let mut prev = evaluate(&p, &d, Some(0)).unwrap();
        prop_assert_eq!(&prev.facts, &d.facts);
        for k in 1..6 {
            let next = evaluate(&p, &d, Some(k)).unwrap();
            for (pred, ts) in &prev.facts {
                for t in ts {
                    prop_assert!(next.contains(pred, t));
                    prop_assert!(full.contains(pred, t));
                }
            }
            prev = next;
        }
    }

    #[test]
    fn program_text_round_trips(seed in any::<u64>()) {
        let (p, d) = program_instance(seed);
        let back = io::parse_program(&io::write_program(&p)).unwrap();
        let once = io::write_program(&back);
        prop_assert_eq!(io::write_program(&io::parse_program(&once).unwrap()), once);
        prop_assert_eq!(
            evaluate(&back, &d, None).unwrap().facts,
            evaluate(&p, &d, None).unwrap().facts
        );
        let facts = io::parse_facts(&io::write_facts(&d)).unwrap();
        prop_assert_eq!(facts.facts, d.facts);
    }

    #[test]
    fn bounded_default_answers_match_evaluation(seed in any::<u64>()) {
        let (p, d) = program_instance(seed);
        let full = evaluate(&p, &d, None).unwrap();
        for n in p.idb.clone() {
            if let Ok(OracleAnswer::Bounded(qs)) = default_oracle(&p, &n) {
                prop_assert_eq!(ucq_answers(&qs, &d), full.tuples(&n), "predicate {}", n);
            }
        }
    }

    #[test]
    fn tbox_text_round_trips(seed in any::<u64>()) {
        let t = random_tbox(&mut rng(seed), &Limits::default());
        let back = io::parse_tbox(&io::write_tbox(&t)).unwrap();
        prop_assert_eq!(&back.axioms, &t.axioms);
        prop_assert_eq!(&back.sig.concepts, &t.sig.concepts);
        prop_assert_eq!(&back.sig.roles, &t.sig.roles);
    }

    #[test]
    fn normalization_steps_keep_the_input_axioms(seed in any::<u64>()) {
        let t = random_tbox(&mut rng(seed), &Limits::default());
        let (t1, _) = saturate_existential_cis(&t, 2, None);
        let t2 = norm_exists(&t1);
        let t3 = norm_and(&t2);
        for out in [&t1, &t2, &t3] {
            let e = Entailer::new(out);
            for ax in &t.axioms {
                prop_assert!(e.check(ax).unwrap().holds(), "{} lost", ax);
            }
        }
        let e = Entailer::new(&t);
        for ax in &t1.axioms {
            prop_assert!(e.check(ax).unwrap().holds(), "{} not entailed", ax);
        }
    }

    #[test]
    fn dllite_closure_is_entailed(seed in any::<u64>()) {
        let t = random_tbox(&mut rng(seed), &Limits::default());
        let t3 = norm_and(&norm_exists(&t));
        let (t4, _) = dllite_closure(&t3);
        let e = Entailer::new(&t3);
        for ax in &t4.axioms {
            prop_assert!(e.check_dllite(ax).holds(), "{} not entailed", ax);
        }
        let back = io::parse_dllite(&io::write_dllite(&t4)).unwrap();
        let names: BTreeSet<_> = t4.signature().concepts;
        prop_assert!(back.axioms.is_superset(&t4.axioms));
        prop_assert!(back.signature().concepts.is_superset(&names));
    }

    #[test]
    fn rewritten_mappings_only_read_sources(seed in any::<u64>()) {
        let mut g = rng(seed);
        let spec = random_spec(&mut g, &Limits::default());
        let opts = RewriteOptions { k: 2, ..RewriteOptions::default() };
        if let Ok(r) = rew_obda(&spec, &opts, &DefaultOracle) {
            let views: BTreeSet<Name> = spec.schema.views.keys().cloned().collect();
            for (target, q) in r.mapping_c.cqs() {
                prop_assert!(is_db_defined(q, &views), "{} :- {}", target, q);
            }
            let d = random_instance(&mut g, &spec.schema, &Limits::default());
            prop_assert!(obdarew::verify::virtual_abox(&r.mapping_c, &d).is_ok());
        }
    }
}

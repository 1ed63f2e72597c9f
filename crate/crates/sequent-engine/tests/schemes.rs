use std::sync::Arc;

use quiver_core::parse_quiver;
use sequent_engine::instances::scheme_instances;
use sequent_engine::{eval_sequent, prove_in_i, random_exact_model, Budget, Dims, Theory, Verdict};

fn nori3() -> Arc<quiver_core::Quiver> {
    Arc::new(parse_quiver(include_str!("../../../data/nori3.qv")).unwrap())
}

#[test]
fn scheme_instances_are_proved_and_replay() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let t0 = std::time::Instant::now();
    let inst = scheme_instances(&theory, 3);
    let mut counts = std::collections::BTreeMap::new();
    for i in &inst {
        *counts.entry(i.scheme).or_insert(0) += 1;
    }
    eprintln!("instances {:?} generated in {:?}", counts, t0.elapsed());
    let budget = Budget { depth: 4, samples: 0, max_dim: 3, seed: 1 };
    for i in &inst {
        match prove_in_i(&theory, &i.sequent, &budget).unwrap() {
            Verdict::Proved(t) => t.replay(&theory, &i.sequent).unwrap(),
            other => panic!("{} {} -> {}", i.scheme, i.sequent.display(&q), other.tag()),
        }
    }
    eprintln!("proved in {:?}", t0.elapsed());
}

#[test]
fn scheme_instances_hold_in_exact_models() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let inst = scheme_instances(&theory, 3);
    for seed in 0..5 {
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        for i in &inst {
            assert!(eval_sequent(&q, &m, &i.sequent).unwrap(), "{}", i.sequent.display(&q));
        }
    }
}

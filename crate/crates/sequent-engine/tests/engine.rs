use std::sync::Arc;

use proptest::prelude::*;
use quiver_core::{parse_quiver, parse_sequent, Quiver};
use sequent_engine::instances::{kernel_probe, random_sequent};
use sequent_engine::{
    eval_sequent, prove_in_i, random_exact_model, saturate, task_rng, Budget, Dims, EngineError, Theory, Verdict,
};

fn nori3() -> Arc<Quiver> {
    Arc::new(parse_quiver(include_str!("../../../data/nori3.qv")).unwrap())
}

#[test]
fn zero_depth_is_rejected() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let goal = kernel_probe(&q, 0);
    assert!(matches!(saturate(&theory, &goal, 0), Err(EngineError::Budget(_))));
}

#[test]
fn saturation_does_not_refute() {
    let q =
        Arc::new(parse_quiver("sort A = homology X _ 0\nsort B = homology Y _ 0\nedge functorial f : A -> B over f\n").unwrap());
    let theory = Theory::exact(q.clone());
    let goal = parse_sequent("context x : A\nconclude x = 0\n", &q).unwrap();
    assert!(matches!(saturate(&theory, &goal, 3).unwrap(), Verdict::Unknown(_)));
}

#[test]
fn base_axioms_are_proved() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    for ax in quiver_core::base_axioms(&q).axioms {
        let v = prove_in_i(&theory, &ax.sequent, &Budget { depth: 1, samples: 0, ..Budget::default() }).unwrap();
        match v {
            Verdict::Proved(t) => {
                assert_eq!(t.rounds, 0, "{}", ax.label);
                t.replay(&theory, &ax.sequent).unwrap();
            }
            other => panic!("{} -> {}", ax.label, other.tag()),
        }
    }
}

#[test]
fn coefficient_term_through_exact_pair_vanishes() {
    let q = Arc::new(parse_quiver(include_str!("../../../data/zero_terms.qv")).unwrap());
    let theory = Theory::exact(q.clone());
    let goal = parse_sequent("context x : XY1\nconclude bang.Y(d(x)) = 0\n", &q).unwrap();
    let v = prove_in_i(&theory, &goal, &Budget::default()).unwrap();
    let Verdict::Proved(t) = v else { panic!("not proved") };
    t.replay(&theory, &goal).unwrap();
}

#[test]
fn kernel_probe_is_refuted_by_a_substructure() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    for pair in 0..q.pairs().len() {
        let goal = kernel_probe(&q, pair);
        let v = prove_in_i(&theory, &goal, &Budget { depth: 3, samples: 100, max_dim: 6, seed: 42 }).unwrap();
        let Verdict::Refuted(w) = v else { panic!("pair {pair}: {}", v.tag()) };
        assert!(w.replays(&q, &goal));
        // The generated substructure loses exactness at the probed pair.
        assert!(!w.model.exact_flags()[pair]);
        assert!(w.model.dims().iter().zip(&w.ambient_dims).all(|(a, b)| a <= b));
    }
}

#[test]
fn tampered_trace_fails_replay() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let goal = parse_sequent("context x : XZ1\npremise b1(x) = 0\nconclude d1(b1(x)) = 0\n", &q).unwrap();
    let Verdict::Proved(mut t) = saturate(&theory, &goal, 2).unwrap() else { panic!() };
    t.replay(&theory, &goal).unwrap();
    let last = t.steps.len() - 1;
    t.steps[last].term = t.steps[last].term.scale(&quiver_core::Q::from_i64(2));
    assert!(t.replay(&theory, &goal).is_err());
}

#[test]
fn proved_random_sequents_hold_in_exact_models() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let mut rng = task_rng(7, 0);
    let models: Vec<_> = (0..10).map(|s| random_exact_model(&q, &Dims::uniform(&q, 4), s).unwrap()).collect();
    let mut checked = 0;
    let mut proved = 0;
    for _ in 0..150 {
        let s = random_sequent(&q, &mut rng, 3);
        if let Verdict::Proved(t) = saturate(&theory, &s, 3).unwrap() {
            proved += 1;
            t.replay(&theory, &s).unwrap();
            for m in &models {
                assert!(eval_sequent(&q, m, &s).unwrap(), "{}", s.display(&q));
                checked += 1;
            }
        }
    }
    assert!(proved > 0);
    eprintln!("{proved} proved sequents, {checked} model checks");
}

#[test]
fn verdicts_ignore_thread_count() {
    let q = nori3();
    let theory = Theory::exact(q.clone());
    let goals: Vec<_> = (0..q.pairs().len()).map(|i| kernel_probe(&q, i)).collect();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            goals
                .iter()
                .map(|g| prove_in_i(&theory, g, &Budget { depth: 2, samples: 40, max_dim: 5, seed: 3 }).unwrap())
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sampled_models_are_exact(seed in any::<u64>(), bound in 0usize..5) {
        let q = nori3();
        let m = random_exact_model(&q, &Dims::uniform(&q, bound), seed).unwrap();
        prop_assert!(m.is_exact());
        prop_assert!(m.check_base(&q, &quiver_core::base_axioms(&q)).is_ok());
        prop_assert!(m.dims().iter().all(|&d| d <= bound.max(1)));
    }

    #[test]
    fn saturation_is_monotone_in_depth(seed in any::<u64>()) {
        let q = nori3();
        let theory = Theory::exact(q.clone());
        let s = random_sequent(&q, &mut task_rng(seed, 0), 3);
        let mut was_proved = false;
        for depth in 1..=3 {
            let now = saturate(&theory, &s, depth).unwrap().is_proved();
            prop_assert!(!was_proved || now, "lost at depth {}", depth);
            was_proved = now;
        }
    }

    #[test]
    fn counterexamples_replay(seed in any::<u64>()) {
        let q = nori3();
        let s = random_sequent(&q, &mut task_rng(seed, 1), 3);
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        if let Some(a) = sequent_engine::counterexample(&q, &m, &s).unwrap() {
            prop_assert!(sequent_engine::fails_at(&q, &m, &s, &a).unwrap());
        }
    }
}

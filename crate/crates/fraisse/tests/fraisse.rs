use std::sync::Arc;

use fraisse::*;
use presentation::{initial_model, Presentation};
use proptest::prelude::*;
use quiver_core::{parse_quiver, parse_term, Context, Matrix, Quiver, Term, Q};
use sequent_engine::{random_exact_model, task_rng, Budget, Dims, LinearModel, Theory};

fn nori3() -> (Arc<Quiver>, Theory) {
    let q = Arc::new(parse_quiver(include_str!("../../../data/nori3.qv")).unwrap());
    let t = Theory::exact(q.clone());
    (q, t)
}

fn term(q: &Quiver, ctx: &Context, src: &str) -> Term {
    parse_term(src, q, ctx, None).unwrap()
}

/// Zero everywhere except a line at one sort: the second leg of each pair
/// kills it and nothing maps onto it.
fn cokernel_at(q: &Quiver, sort: &str) -> LinearModel {
    let line = q.sort_by_name(sort).unwrap();
    let dims: Vec<usize> = q.sort_ids().map(|s| usize::from(s == line || s == q.coefficient())).collect();
    let maps = q.edges().iter().map(|e| Matrix::zeros(dims[e.tgt.0], dims[e.src.0])).collect();
    LinearModel::new(q, dims, maps).unwrap()
}

fn exact_model(q: &Quiver, seed: u64) -> LinearModel {
    random_exact_model(q, &Dims::uniform(q, 3), seed).unwrap()
}

#[test]
fn finite_categories_amalgamate() {
    let ba = check_ap(&BooleanAlgebras { injective: true }, 100, 1);
    assert_eq!(ba.count("amalgamated"), 100, "{:?}", ba.summary);
    let plain = check_ap(&BooleanAlgebras { injective: false }, 100, 1);
    assert_eq!(plain.summary, Summary::Holds);
    let sets = check_ap(&FiniteSets, 100, 2);
    assert_eq!(sets.count("amalgamated"), 100);
    let vector = check_ap(&VectorSpaces::default(), 100, 3);
    assert_eq!(vector.count("amalgamated"), 100);
}

#[test]
fn joint_embedding_goes_through_the_initial_object() {
    let sets = check_jep(&FiniteSets, 50, 4);
    assert_eq!(sets.count("amalgamated"), 50);
    assert!(sets.note.as_deref().unwrap().starts_with("implied by AP"));
    let vector = check_jep(&VectorSpaces::default(), 50, 4);
    assert_eq!(vector.summary, Summary::Holds);
}

#[test]
fn presentation_spans_never_prove_bottom() {
    let (_, theory) = nori3();
    let cat = Presentations::new(Arc::new(theory), Budget::default());
    let report = check_ap(&cat, 50, 7);
    assert_eq!(report.count("failed"), 0);
    assert!(report.count("unknown") < 5, "{} unknown", report.count("unknown"));
    let jep = check_jep(&cat, 10, 7);
    assert_eq!(jep.count("failed"), 0);
    assert!(jep.note.is_some());
}

#[test]
fn boolean_chain_is_atomless_on_samples() {
    let cat = BooleanAlgebras { injective: true };
    let chain = fraisse_chain(&cat, 8, 11).unwrap();
    assert!(chain.pending.is_empty());
    let split = split_report(&chain, 200, 5);
    assert_eq!(split.sampled, 200);
    assert_eq!(split.fraction(), 1.0);
}

#[test]
fn finite_boolean_algebras_are_not_homogeneous() {
    let cat = BooleanAlgebras { injective: true };
    let u = FiniteBa { atoms: 4 };
    let report = solve_problems(&cat, &u, &cat.growth_problems(&u));
    assert_eq!(report.summary, Summary::Fails);
}

#[test]
fn set_and_vector_chains_grow() {
    for n in [1, 3, 5] {
        let sets = fraisse_chain(&FiniteSets, n, 2).unwrap();
        assert!(sets.last().size >= n);
        let vector = fraisse_chain(&VectorSpaces::default(), n, 2).unwrap();
        assert!(vector.last().dim >= n);
    }
}

#[test]
fn vector_extension_fails_exactly_past_the_fragment_dimension() {
    let cat = VectorSpaces::default();
    let mut rng = task_rng(9, 0);
    for u in 0..=4 {
        for b in 0..=5 {
            for a in 0..=b.min(u) {
                let p = cat.problem(a, b, u, &mut rng);
                let report = solve_problems(&cat, &VectorSpace { dim: u }, &[p]);
                let expected = if b > u { "failed" } else { "extended" };
                assert_eq!(report.records[0].outcome, expected, "a={a} b={b} u={u}");
            }
        }
    }
}

#[test]
fn a_long_vector_chain_is_homogeneous_on_samples() {
    let cat = VectorSpaces::default();
    let chain = fraisse_chain(&cat, 6, 3).unwrap();
    let report = check_homogeneous(&cat, chain.last(), 50, 8);
    assert_eq!(report.summary, Summary::Holds);
    assert_eq!(check_universal(&cat, chain.last(), 20, 8).summary, Summary::Holds);
}

#[test]
fn chains_from_different_seeds_agree() {
    let cat = BooleanAlgebras { injective: true };
    let left = fraisse_chain(&cat, 8, 1).unwrap();
    let right = fraisse_chain(&cat, 8, 2).unwrap();
    let report = agreement(left.last(), right.last(), 200, 3);
    assert_eq!(report.agree, 200, "{:?}", report.disagreements);
    assert!(report.valid > 0 && report.valid < 200);
}

#[test]
fn chains_are_deterministic() {
    let cat = BooleanAlgebras { injective: true };
    assert_eq!(fraisse_chain(&cat, 5, 4).unwrap().to_json(), fraisse_chain(&cat, 5, 4).unwrap().to_json());
}

#[test]
fn triviality_fires_for_plain_theories_only() {
    for tag in TheoryTag::ALL {
        let r = triviality_test(tag);
        let plain = matches!(tag, TheoryTag::BooleanAlgebras | TheoryTag::Sets | TheoryTag::VectorSpaces);
        assert_eq!(r.fires, plain, "{tag}");
    }
    let ba = triviality_test(TheoryTag::BooleanAlgebras);
    assert!(ba.collapse.contains(&"⊤ ⊢_x x = 0".to_string()));
    assert!(ba.collapse.contains(&"⊤ ⊢_x x = 1".to_string()));
    let injective = triviality_test(TheoryTag::InjectiveBooleanAlgebras);
    assert!(!injective.free_one && injective.collapse.is_empty());
    assert!(triviality_test(TheoryTag::InjectiveSets).free_one);
}

#[test]
fn exact_models_have_generic_preimages() {
    let (q, _) = nori3();
    for seed in 0..4 {
        let h = exact_model(&q, seed);
        for pair in 0..q.pairs().len() {
            let r = strong_exactness_check(&q, &h, pair, 5, seed);
            assert!(r.preimages_exist && r.generic, "seed {seed} pair {pair}");
        }
    }
}

#[test]
fn a_cokernel_blocks_preimages() {
    let (q, _) = nori3();
    let h = cokernel_at(&q, "XZ0");
    let a0 = q.pairs().iter().position(|&(f, _)| q.edge_name(f) == "a0").unwrap();
    let r = strong_exactness_check(&q, &h, a0, 5, 1);
    assert!(!r.preimages_exist);
}

#[test]
fn surjectivity_onto_kernels() {
    let (q, _) = nori3();
    let a0 = q.edge_by_name("a0").unwrap();
    let ctx = Context::single("y", q.sort_by_name("XZ0").unwrap());
    let psi = Presentation::new(ctx.clone(), vec![term(&q, &ctx, "b0(y)")], Vec::new(), 3).unwrap();
    for seed in 0..5 {
        assert!(surjectivity_check(&q, &exact_model(&q, seed), a0, &psi).unwrap());
    }
    assert!(!surjectivity_check(&q, &cokernel_at(&q, "XZ0"), a0, &psi).unwrap());
    let free = Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 3).unwrap();
    assert!(surjectivity_check(&q, &initial_model(&q), a0, &free).unwrap());
    let wrong = Presentation::new(Context::single("y", q.sort_by_name("YZ0").unwrap()), Vec::new(), Vec::new(), 3).unwrap();
    assert!(surjectivity_check(&q, &initial_model(&q), a0, &wrong).is_err());
}

#[test]
fn homogeneity_sequents_one_per_pair() {
    let (q, theory) = nori3();
    let xz1 = q.sort_by_name("XZ1").unwrap();
    let ctx = Context::single("x", xz1);
    let ps = vec![
        Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 3).unwrap(),
        Presentation::new(ctx.clone(), vec![term(&q, &ctx, "b1(x)")], Vec::new(), 3).unwrap(),
        Presentation::new(ctx.clone(), vec![term(&q, &ctx, "2*b1(x)")], Vec::new(), 3).unwrap(),
    ];
    let tuples = vec![vec![Term::var(&ctx, 0)], vec![term(&q, &ctx, "b1(x)")]];
    let axioms = homogeneity_axioms(&theory, &ps, &tuples, 3).unwrap();
    assert_eq!(axioms.len(), 6);
    let h = exact_model(&q, 3);
    for ax in axioms.iter().filter(|a| a.tuple == tuples[0]) {
        let c = ax.check_in(&q, &h, 10, 1);
        assert_eq!(c.satisfied, c.sampled, "{}", ax.display(&q));
    }
}

#[test]
fn pushing_along_the_first_leg_gives_exactness() {
    let (q, theory) = nori3();
    let ctx = Context::single("x", q.sort_by_name("YZ1").unwrap());
    let p = Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 3).unwrap();
    let w = vec![term(&q, &ctx, "a1(x)")];
    let ax = homogeneity_axioms(&theory, &[p], &[w], 3).unwrap().remove(0);
    // The premise carries the second leg of the pair.
    assert!(ax.display(&q).contains("b1"), "{}", ax.display(&q));
    for seed in 0..4 {
        let c = ax.check_in(&q, &exact_model(&q, seed), 10, seed);
        assert_eq!(c.satisfied, c.sampled);
    }
    let c = ax.check_in(&q, &cokernel_at(&q, "XZ1"), 10, 0);
    assert!(c.satisfied < c.sampled);
}

#[test]
fn inconsistent_presentations_are_rejected() {
    let (q, theory) = nori3();
    let ctx = Context::single("x", q.sort_by_name("XZ1").unwrap());
    let p = Presentation::new(ctx.clone(), vec![Term::unit(&q, &ctx)], Vec::new(), 2).unwrap();
    let err = homogeneity_axioms(&theory, &[p], &[vec![Term::var(&ctx, 0)]], 2).unwrap_err();
    assert!(matches!(err, FraisseError::Refuted(_)));
    let ok = Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 2).unwrap();
    let other = Context::single("z", q.sort_by_name("XZ1").unwrap());
    let err = homogeneity_axioms(&theory, &[ok], &[vec![Term::var(&other, 0)]], 2).unwrap_err();
    assert!(matches!(err, FraisseError::Context(_)));
}

#[test]
fn rationals_are_not_a_homogeneous_field() {
    let k = FieldFragment { transcendence: 0, closure_degrees: Vec::new(), dim: 4 };
    let r = variable_field_homogeneity(&k, Images::Generic, 10, 0);
    assert_eq!(r.field_summary, Summary::Fails);
    assert!(r.vectors.is_empty());
}

#[test]
fn large_fragments_pass_with_generic_images() {
    let k = FieldFragment { transcendence: 30, closure_degrees: vec![2, 3], dim: 30 };
    let r = variable_field_homogeneity(&k, Images::Generic, 30, 1);
    assert_eq!(r.field_summary, Summary::Holds);
    assert_eq!(r.vector_summary, Summary::Holds);
    assert!(r.vectors.iter().all(|v| v.factorization && v.commutes));
}

#[test]
fn dependent_images_break_the_construction() {
    let k = FieldFragment { transcendence: 30, closure_degrees: vec![2, 3], dim: 30 };
    let r = variable_field_homogeneity(&k, Images::Dependent, 10, 2);
    assert_eq!(r.vector_summary, Summary::Fails);
    for v in &r.vectors {
        assert_eq!(v.independent, vec![0]);
        assert!(v.factorization);
        assert!(!v.commutes);
        assert_eq!(v.outcome, "failed");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn boolean_amalgams_commute(seed in any::<u64>()) {
        let cat = BooleanAlgebras { injective: true };
        let span = sample_span(&cat, &mut task_rng(seed, 0));
        let Amalgamation::Amalgamated { d, f2, g2, .. } = cat.amalgamate(&span) else { panic!("no amalgam") };
        prop_assert!(cat.is_arrow(&f2, &span.b, &d) && cat.is_arrow(&g2, &span.c, &d));
        prop_assert_eq!(cat.compose(&span.f, &f2), cat.compose(&span.g, &g2));
    }

    #[test]
    fn vector_extensions_commute(seed in any::<u64>(), extra in 0usize..3) {
        let cat = VectorSpaces::default();
        let mut rng = task_rng(seed, 0);
        let u = VectorSpace { dim: 3 + extra };
        let p = sample_problem(&cat, &u, &mut rng);
        if p.b.dim <= u.dim {
            let Extension::Extended(x) = cat.extend(&p, &u) else { panic!("no extension") };
            prop_assert!(cat.is_arrow(&x, &p.b, &u));
            prop_assert_eq!(cat.compose(&p.j, &x), p.chi);
        }
    }

    #[test]
    fn set_chain_links_are_injections(seed in any::<u64>()) {
        let chain = fraisse_chain(&FiniteSets, 4, seed).unwrap();
        for (i, l) in chain.links.iter().enumerate() {
            prop_assert!(FiniteSets.is_arrow(l, &chain.stages[i], &chain.stages[i + 1]));
        }
    }
}

#[test]
fn rational_entries_survive_json() {
    let cat = VectorSpaces::default();
    let f = LinearEmbedding { matrix: Matrix::from_rows(vec![vec![Q::new(1, 2)]], 1) };
    assert_eq!(cat.arrow_json(&f)["matrix"][0][0], "1/2");
}

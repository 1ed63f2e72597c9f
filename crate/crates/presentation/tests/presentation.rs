use std::sync::Arc;

use presentation::{
    build_presented_model, extend_by_preimage, generated_submodel, hom_set, initial_model, is_irreducible, kernel_generators,
    pushforward, HomFilter, Irreducibility, Membership, Presentation, PresentationError, DEFAULT_DEPTH,
};
use proptest::prelude::*;
use quiver_core::{parse_quiver, parse_term, Context, DiersAtom, Field, Quiver, SortId, Term, Q};
use sequent_engine::random::small_int;
use sequent_engine::{hom_space, random_exact_model, task_rng, Budget, Dims, LinearModel, Theory};

fn load(text: &str) -> (Arc<Quiver>, Theory) {
    let q = Arc::new(parse_quiver(text).unwrap());
    let t = Theory::exact(q.clone());
    (q, t)
}

fn nori3() -> (Arc<Quiver>, Theory) {
    load(include_str!("../../../data/nori3.qv"))
}

fn points() -> (Arc<Quiver>, Theory) {
    load(include_str!("../../../data/points.qv"))
}

fn random_vector(dim: usize, seed: u64, stream: u64) -> Vec<Q> {
    let mut rng = task_rng(seed, stream);
    loop {
        let v: Vec<Q> = (0..dim).map(|_| small_int(&mut rng)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// A nonzero element of a random nonzero sort other than the coefficients.
fn random_element(q: &Quiver, m: &LinearModel, seed: u64) -> Option<(SortId, Vec<Q>)> {
    let sorts: Vec<SortId> = q.sort_ids().filter(|&s| s != q.coefficient() && m.dim(s) > 0).collect();
    if sorts.is_empty() {
        return None;
    }
    let s = sorts[(seed as usize) % sorts.len()];
    Some((s, random_vector(m.dim(s), seed, 1)))
}

fn term(q: &Quiver, ctx: &Context, src: &str) -> Term {
    parse_term(src, q, ctx, None).unwrap()
}

#[test]
fn initial_model_maps_uniquely_into_exact_models() {
    let (q, _) = points();
    let i = initial_model(&q);
    for seed in 0..20 {
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let homs = hom_space(&q, &i, &m);
        assert!(homs.is_unique(), "seed {seed}");
        assert!(homs.particular.unwrap().is_natural(&q, &i, &m));
    }
}

#[test]
fn no_generators_in_the_initial_model_keeps_the_prime_field() {
    let (q, _) = points();
    let i = initial_model(&q);
    let (sub, p) = generated_submodel(&q, &i, &[], DEFAULT_DEPTH).unwrap();
    assert_eq!(sub.model.dim(q.coefficient()), 1);
    assert_eq!(sub.model.dims(), i.dims());
    assert!(p.context.is_empty());
}

#[test]
fn presented_models_round_trip() {
    let (q, theory) = nori3();
    let mut checked = 0;
    for seed in 0..20u64 {
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let Some((s, b)) = random_element(&q, &m, seed) else { continue };
        let (sub, p) = generated_submodel(&q, &m, &[(s, b.clone())], DEFAULT_DEPTH).unwrap();
        let a = build_presented_model(&theory, &p, 4).unwrap();
        assert_eq!(a.model.dims(), sub.model.dims(), "seed {seed}");
        // The generator of the built model satisfies exactly the same relations.
        let again =
            kernel_generators(&q, &p.context, p.depth, |_, mono| Some(a.model.eval_monomial(&q, mono, &a.generators))).unwrap();
        assert_eq!(again, p.generators);
        // The identity tuple realizes an isomorphism onto the submodel.
        let homs = hom_set(&theory, &p, &p, 1, HomFilter::All, 4).unwrap();
        let identity = vec![Term::var(&p.context, 0)];
        assert!(homs.tuples.contains(&identity));
        let coords = vec![sub.coordinates(s, &b).unwrap()];
        let iso = a.hom_to(&q, &sub.model, &coords);
        assert!(iso.is_natural(&q, &a.model, &sub.model));
        assert!(iso.maps.iter().all(|f| f.rows() == f.cols() && f.is_injective()));
        checked += 1;
    }
    assert!(checked >= 15);
}

#[test]
fn extracted_presentations_are_irreducible() {
    let (q, theory) = nori3();
    let m = random_exact_model(&q, &Dims::uniform(&q, 3), 11).unwrap();
    let (s, b) = random_element(&q, &m, 11).unwrap();
    let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
    let v = is_irreducible(&theory, &p, &Budget::default()).unwrap();
    assert_eq!(v.tag(), "proved");
}

#[test]
fn killing_every_variable_is_realized_by_the_zero_assignment() {
    let (q, theory) = points();
    let ctx = Context::single("x", q.sort_by_name("X0").unwrap());
    let p = Presentation::new(ctx.clone(), vec![Term::var(&ctx, 0)], Vec::new(), 3).unwrap();
    let Irreducibility::Irreducible(r) = is_irreducible(&theory, &p, &Budget { samples: 0, ..Budget::default() }).unwrap() else {
        panic!("expected a realization");
    };
    assert_eq!(r.model, initial_model(&q));
    assert!(r.assignment[0].iter().all(|x| x.is_zero()));
}

#[test]
fn unit_relation_is_reducible() {
    let (q, theory) = points();
    let ctx = Context::single("x", q.sort_by_name("X0").unwrap());
    let p = Presentation::new(ctx.clone(), vec![Term::unit(&q, &ctx)], Vec::new(), 2).unwrap();
    let Irreducibility::Reducible(t) = is_irreducible(&theory, &p, &Budget::default()).unwrap() else { panic!() };
    assert!(t.steps.iter().any(|s| s.term == Term::unit(&q, &ctx)));
    assert_eq!(build_presented_model(&theory, &p, 2).unwrap_err(), PresentationError::Inconsistent);
}

#[test]
fn closure_repairs_missing_consequences() {
    let (q, theory) = nori3();
    let ctx = Context::single("x", q.sort_by_name("XZ1").unwrap());
    // b1(x) = 0 forces x into the image of a1, hence d... nothing new; but
    // the complex condition is always available.
    let p = Presentation::new(ctx.clone(), vec![term(&q, &ctx, "b1(x)")], Vec::new(), 3).unwrap();
    let w = term(&q, &ctx, "d1(b1(x))");
    assert_eq!(p.membership(&theory, &w, &Budget::default()).unwrap(), Membership::Member);
    let other = term(&q, &ctx, "x");
    assert_eq!(p.membership(&theory, &other, &Budget { max_dim: 3, ..Budget::default() }).unwrap(), Membership::NonMember);
}

#[test]
fn independence_needs_a_larger_field() {
    let (q, theory) = points();
    let ctx = Context::single("x", q.sort_by_name("X0").unwrap());
    let atom = DiersAtom { terms: vec![term(&q, &ctx, "bang.X(x)")] };
    let p = Presentation::new(ctx, Vec::new(), vec![atom], 2).unwrap();
    assert_eq!(build_presented_model(&theory, &p, 2).unwrap_err(), PresentationError::NotRational);
    assert_eq!(is_irreducible(&theory, &p, &Budget::default()).unwrap().tag(), "unknown");
}

#[test]
fn free_loops_do_not_close() {
    let (q, theory) = nori3();
    let ctx = Context::single("y", q.sort_by_name("XY1").unwrap());
    let p = Presentation::new(ctx, Vec::new(), Vec::new(), 3).unwrap();
    assert!(matches!(build_presented_model(&theory, &p, 2), Err(PresentationError::Truncated { .. })));
}

#[test]
fn equal_closure_gives_equal_rank_drop() {
    let (q, theory) = nori3();
    let ctx = Context::single("x", q.sort_by_name("YZ2").unwrap());
    let free = Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 3).unwrap();
    let cut = Presentation::new(ctx.clone(), vec![term(&q, &ctx, "a2(x)")], Vec::new(), 3).unwrap();
    let a = build_presented_model(&theory, &free, 3).unwrap();
    let b = build_presented_model(&theory, &cut, 3).unwrap();
    let xz2 = q.sort_by_name("XZ2").unwrap();
    assert_eq!(a.model.dim(xz2), 1);
    assert_eq!(b.model.dim(xz2), 0);
    // c2 = b2 a2 vanishes as well once a2 does.
    assert_eq!(b.model.dim(q.sort_by_name("XY2").unwrap()), 0);
}

#[test]
fn pushforward_along_identity_is_trivial() {
    let (q, theory) = nori3();
    let m = random_exact_model(&q, &Dims::uniform(&q, 3), 4).unwrap();
    let (s, b) = random_element(&q, &m, 4).unwrap();
    let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
    let id = vec![Term::var(&p.context, 0)];
    let same = pushforward(&theory, &p, &id, 3).unwrap();
    assert_eq!(same.generators.len(), p.generators.len());
    assert_eq!(same.realization, p.realization);
}

#[test]
fn pushforward_through_a_complex_contains_the_composite() {
    let (q, theory) = nori3();
    let ctx = Context::single("x", q.sort_by_name("YZ1").unwrap());
    let p = Presentation::new(ctx.clone(), Vec::new(), Vec::new(), 3).unwrap();
    let t = pushforward(&theory, &p, &[term(&q, &ctx, "a1(x)")], 3).unwrap();
    let b1y = term(&q, &t.context, "b1(y)");
    assert!(t.generators.contains(&b1y), "{:?}", t.generators.iter().map(|g| g.display(&q)).collect::<Vec<_>>());
}

#[test]
fn hom_sets_merge_provably_equal_tuples() {
    let (q, theory) = nori3();
    let src_ctx = Context::single("x", q.sort_by_name("YZ1").unwrap());
    let src = Presentation::new(src_ctx, Vec::new(), Vec::new(), 3).unwrap();
    let dst_ctx = Context::single("y", q.sort_by_name("XY1").unwrap());
    let dst = Presentation::new(dst_ctx, Vec::new(), Vec::new(), 3).unwrap();
    // Every nonzero candidate factors through c1(x), which is provably zero.
    let homs = hom_set(&theory, &src, &dst, 2, HomFilter::All, 3).unwrap();
    assert!(homs.examined >= 2);
    assert_eq!(homs.tuples.len(), 1);
}

#[test]
fn maps_out_of_the_initial_presentation_are_unique() {
    let (q, theory) = points();
    let initial = Presentation::new(Context::empty(), Vec::new(), Vec::new(), DEFAULT_DEPTH).unwrap();
    let m = random_exact_model(&q, &Dims::uniform(&q, 3), 2).unwrap();
    let (s, b) = random_element(&q, &m, 2).unwrap();
    let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
    let homs = hom_set(&theory, &p, &initial, 2, HomFilter::All, 3).unwrap();
    assert_eq!(homs.tuples.len(), 1);
}

#[test]
fn injective_filter_drops_the_zero_map() {
    let (q, theory) = nori3();
    let m = random_exact_model(&q, &Dims::uniform(&q, 3), 8).unwrap();
    let (s, b) = random_element(&q, &m, 8).unwrap();
    let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
    let all = hom_set(&theory, &p, &p, 1, HomFilter::All, 3).unwrap();
    let inj = hom_set(&theory, &p, &p, 1, HomFilter::Injective, 3).unwrap();
    assert!(all.tuples.len() >= inj.tuples.len());
    assert!(inj.tuples.contains(&vec![Term::var(&p.context, 0)]));
    assert!(!inj.tuples.iter().any(|w| w[0].is_zero()));
}

#[test]
fn presentations_survive_json() {
    let (q, _) = nori3();
    let m = random_exact_model(&q, &Dims::uniform(&q, 3), 6).unwrap();
    let (s, b) = random_element(&q, &m, 6).unwrap();
    let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
    let text = serde_json::to_string(&p.to_json(&q)).unwrap();
    let back = Presentation::from_json(&q, &serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, p);
    assert_eq!(serde_json::to_string(&back.to_json(&q)).unwrap(), text);

    let (pq, _) = points();
    let ctx = Context::single("x", pq.sort_by_name("X0").unwrap());
    let atom = DiersAtom { terms: vec![term(&pq, &ctx, "bang.X(x)")] };
    let with_u = Presentation::new(ctx, Vec::new(), vec![atom], 2).unwrap();
    let v = with_u.to_json(&pq);
    assert_eq!(v["independence"]["matrix"], serde_json::json!([[1]]));
    assert_eq!(Presentation::from_json(&pq, &v).unwrap(), with_u);
}

/// An exact model with an element `a0` of the source of `f0` and `b = f0(a0)`.
fn preimage_setup(q: &Quiver, pair: usize, seed: u64) -> Option<(LinearModel, Vec<Q>, Vec<Q>)> {
    let (f0, _) = q.pairs()[pair];
    let h = random_exact_model(q, &Dims::uniform(q, 3), seed).unwrap();
    let src = q.edge(f0).src;
    if h.dim(src) == 0 {
        return None;
    }
    let a0 = random_vector(h.dim(src), seed, 2);
    let b = h.map(f0).mul_vec(&a0);
    b.iter().any(|x| !x.is_zero()).then_some((h, a0, b))
}

#[test]
fn preimage_extension_embeds_and_identifies() {
    let (q, theory) = nori3();
    let mut built = 0;
    for pair in 0..q.pairs().len() {
        let (f0, _) = q.pairs()[pair];
        for seed in 0..4u64 {
            let Some((h, a0, b)) = preimage_setup(&q, pair, seed * 7 + pair as u64) else { continue };
            let c0 = q.edge(f0).tgt;
            let sub = sequent_engine::generated_submodel(&q, &h, &[(c0, b.clone())]);
            let bb = sub.coordinates(c0, &b).unwrap();
            let ext = match extend_by_preimage(&theory, &sub.model, &bb, pair, DEFAULT_DEPTH, 3) {
                Ok(e) => e,
                Err(PresentationError::Truncated { .. }) => {
                    // Only pairs whose source carries a free loop.
                    let src = q.edge(f0).src;
                    assert!(q.edge_ids().any(|e| q.edge(e).src == src && q.edge(e).tgt == src), "pair {pair}");
                    continue;
                }
                Err(e) => panic!("pair {pair}: {e}"),
            };
            assert!(ext.embeds(&q, &sub.model), "pair {pair}");
            assert!(ext.identifies(&q, &bb));
            // Preimages of b in the ambient model: a0 plus the kernel of f0.
            let kernel = h.map(f0).kernel();
            let mut preimages = vec![a0.clone()];
            for (i, k) in kernel.iter().enumerate() {
                let c = Q::from_i64(i as i64 + 2);
                preimages.push(a0.iter().zip(k).map(|(x, y)| x.plus(&c.times(y))).collect());
            }
            assert!(ext.uniform_on(&q, &h, &preimages).unwrap());
            // Every preimage receives a homomorphism from A.
            for a in &preimages {
                let hom = ext.model.hom_to(&q, &h, &vec![a.clone()]);
                assert!(hom.is_natural(&q, &ext.model.model, &h));
            }
            built += 1;
        }
    }
    assert!(built >= 10, "{built}");
}

#[test]
fn preimage_needs_the_kernel() {
    let (q, theory) = nori3();
    let (f0, g0) = q.pairs()[0];
    for seed in 0..10 {
        let h = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let c0 = q.edge(f0).tgt;
        if h.dim(c0) == 0 || h.map(g0).is_zero() {
            continue;
        }
        let b = (0..h.dim(c0))
            .map(|i| {
                let mut e = vec![Q::zero(); h.dim(c0)];
                e[i] = Q::one();
                e
            })
            .find(|e| h.map(g0).mul_vec(e).iter().any(|x| !x.is_zero()))
            .unwrap();
        let err = extend_by_preimage(&theory, &h, &b, 0, DEFAULT_DEPTH, 2).unwrap_err();
        assert_eq!(err, PresentationError::NotInKernel);
        return;
    }
    panic!("no model with a nonzero second leg");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pushforward_is_functorial(seed in 0u64..1000) {
        let (q, theory) = nori3();
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let yz1 = q.sort_by_name("YZ1").unwrap();
        prop_assume!(m.dim(yz1) > 0);
        let b = random_vector(m.dim(yz1), seed, 3);
        let (_, p) = generated_submodel(&q, &m, &[(yz1, b)], DEFAULT_DEPTH).unwrap();
        let w = vec![term(&q, &p.context, "a1(x)")];
        let step = pushforward(&theory, &p, &w, 3).unwrap();
        let w2 = vec![term(&q, &step.context, "b1(y)")];
        let twice = pushforward(&theory, &step, &w2, 3).unwrap();
        let composite = vec![w2[0].substitute(&q, &p.context, &w)];
        let once = pushforward(&theory, &p, &composite, 3).unwrap();
        prop_assert_eq!(twice.realization, once.realization);
        prop_assert_eq!(twice.generators, once.generators);
    }

    #[test]
    fn composed_homs_stay_homs(seed in 0u64..1000) {
        let (q, theory) = nori3();
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let Some((s, b)) = random_element(&q, &m, seed) else { return Ok(()) };
        let (_, p) = generated_submodel(&q, &m, &[(s, b)], DEFAULT_DEPTH).unwrap();
        let homs = hom_set(&theory, &p, &p, 1, HomFilter::All, 3).unwrap();
        let a = build_presented_model(&theory, &p, 3).unwrap();
        for w in &homs.tuples {
            for v in &homs.tuples {
                let composite: Vec<Term> = vec![v[0].substitute(&q, &p.context, w)];
                let image: Vec<_> = composite.iter().map(|t| a.class_of(&q, t)).collect();
                let hom = a.hom_to(&q, &a.model, &image);
                prop_assert!(hom.is_natural(&q, &a.model, &a.model));
            }
        }
    }
}

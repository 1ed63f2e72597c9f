use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use quiver_core::{parse_quiver, SortKind};
use sequent_engine::Arrow;
use tricat::*;

fn example() -> SchemeGraph {
    let q = parse_quiver(include_str!("../../../data/example2.qv")).unwrap();
    SchemeGraph::from_quiver(&q).unwrap()
}

fn level0() -> TriCatState {
    init_level0(&example(), Caps::default()).unwrap()
}

fn level1() -> &'static TriCatState {
    static STATE: OnceLock<TriCatState> = OnceLock::new();
    STATE.get_or_init(|| build(&example(), Caps::default(), 1).unwrap())
}

fn report1() -> &'static AxiomReport {
    static REPORT: OnceLock<AxiomReport> = OnceLock::new();
    REPORT.get_or_init(|| verify_triangulated_axioms(level1(), 1))
}

fn translatable(st: &TriCatState, s: quiver_core::SortId) -> bool {
    match &st.sort_decls()[s.0].kind {
        SortKind::Graded { degree, .. } => *degree > st.input.degrees.0,
        SortKind::ZeroObject => true,
        _ => false,
    }
}

#[test]
fn scheme_graph_reads_the_input() {
    let g = example();
    assert_eq!(g.schemes, ["X", "Y"]);
    assert_eq!(g.morphisms, [Morphism { name: "f".into(), src: "X".into(), tgt: "Y".into() }]);
    assert_eq!(g.degrees, (-2, 0));
}

#[test]
fn level0_signature() {
    let st = level0();
    let names: Vec<&str> = st.sort_decls().iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["K0", "(X,0)", "(X,-1)", "(X,-2)", "(Y,0)", "(Y,-1)", "(Y,-2)", "0"]);
    let shifts: Vec<&str> =
        st.edge_decls().iter().filter(|e| matches!(e.symbol, Symbol::Shift { .. })).map(|e| e.name.as_str()).collect();
    assert_eq!(shifts, ["(f,0)", "(f,-1)", "(f,-2)"]);
    // one zero map per ordered pair of the 7 objects, except 0 -> 0
    let zeros = st.edge_decls().iter().filter(|e| e.symbol == Symbol::Zero).count();
    assert_eq!(zeros, 7 * 7 - 1);
    assert_eq!(st.relations().len(), zeros + 1);
    let x0 = st.graded_sort("X", 0).unwrap();
    assert_eq!(st.shift_sort(x0), st.graded_sort("X", -1));
    assert_eq!(st.shift_sort(st.graded_sort("X", -2).unwrap()), None);
    assert_eq!(st.shift_sort(st.zero_object()), Some(st.zero_object()));
}

#[test]
fn level0_has_only_trivial_triangles() {
    let st = level0();
    let q = st.quiver(0);
    assert_eq!(st.registry.len(), 4);
    for t in st.registry.triangles() {
        assert!(matches!(t.provenance, Provenance::Trivial { .. }));
        assert!(!t.arrows[0].is_zero() && t.arrows[0].src == t.arrows[0].tgt);
        assert!(t.composites(&q).iter().all(|a| st.theory(0).vanishes(a)));
    }
    let report = verify_triangulated_axioms(&st, 0);
    assert!(report.all_pass());
    assert_eq!(report.tr1.checked + report.tr2.checked + report.tr3.checked + report.tr4.checked, 0);
}

#[test]
fn level0_rejects_bad_input() {
    let mut g = example();
    g.schemes.clear();
    assert!(matches!(init_level0(&g, Caps::default()), Err(TricatError::NoSchemes)));
    let mut g = example();
    g.degrees = (-2, 1);
    assert!(matches!(init_level0(&g, Caps::default()), Err(TricatError::Degrees(-2, 1))));
    let mut g = example();
    g.morphisms[0].tgt = "Z".into();
    assert!(matches!(init_level0(&g, Caps::default()), Err(TricatError::UnknownScheme(..))));
}

/// Classes at level 0 by rewriting: a path is zero once it uses a zero map,
/// otherwise it is its own class.
#[test]
fn level0_classes_match_rewriting() {
    let st = level0();
    let zero_obj = st.zero_object();
    let n = st.sort_decls().len();
    let mut expected: BTreeSet<(usize, usize, String)> = BTreeSet::new();
    for s in 0..n {
        expected.insert((s, s, "id".into()));
    }
    let edges = st.edge_decls();
    let mut paths: Vec<(usize, usize, Vec<usize>)> = edges.iter().enumerate().map(|(i, e)| (e.src.0, e.tgt.0, vec![i])).collect();
    let singles = paths.clone();
    for (s, t, p) in &singles {
        for (i, e) in edges.iter().enumerate() {
            if e.src.0 == *t {
                let mut p2 = p.clone();
                p2.push(i);
                paths.push((*s, e.tgt.0, p2));
            }
        }
    }
    for (s, t, p) in paths {
        let zero = p.iter().any(|&i| edges[i].symbol == Symbol::Zero);
        let key = if !zero {
            p.iter().map(|&i| edges[i].name.clone()).collect::<Vec<_>>().join(";")
        } else if s == t && s == zero_obj.0 {
            "id".into()
        } else {
            "0".into()
        };
        expected.insert((s, t, key));
    }
    let classes = term_classes(&st, 0, 2);
    assert_eq!(classes.len(), expected.len());
    let zero_classes = classes.iter().filter(|c| c.kind == ClassKind::Zero).count();
    assert_eq!(zero_classes, expected.iter().filter(|(_, _, k)| k == "0").count());
}

#[test]
fn identity_class_is_its_own() {
    let st = level0();
    let x0 = st.graded_sort("X", 0).unwrap();
    let c = st.classify(0, &Arrow::identity(x0)).unwrap();
    assert_eq!(c.kind, ClassKind::Identity);
    assert!(!c.vanishing);
    let o = st.classify(0, &Arrow::identity(st.zero_object())).unwrap();
    assert_eq!(o.kind, ClassKind::Identity);
    assert!(o.vanishing);
}

/// Cones at level 1: one per zero class and per shifted morphism between
/// translatable objects, counted straight from the sorts and edges.
#[test]
fn new_sorts_match_brute_force_count() {
    let st = level1();
    let objects: Vec<_> = st.sorts_at(0).filter(|&s| translatable(st, s)).collect();
    let o = st.zero_object();
    let zero_classes = objects.len() * objects.len() - usize::from(objects.contains(&o));
    let morphisms = st
        .edge_decls()
        .iter()
        .filter(|e| matches!(e.symbol, Symbol::Shift { .. }) && translatable(st, e.src) && translatable(st, e.tgt))
        .count();
    assert_eq!(st.reports[1].new_sorts, zero_classes + morphisms);
    assert_eq!(st.reports[1].new_sorts, 26);
    assert!(!st.reports[1].truncated());
    assert!(st.cone("(f,0)").is_some() && st.cone("(f,-1)").is_some());
    assert!(st.cone("(f,-2)").is_none());
}

#[test]
fn square_relations_hold() {
    let st = level1();
    let q = st.quiver(1);
    let theory = st.theory(1);
    let labels: BTreeSet<&str> = st.relations().iter().map(|r| r.relation.label.as_str()).collect();
    for sq in st.squares.iter().take(40) {
        let name = q.edge_name(sq.edge);
        assert!(labels.contains(format!("naturality π {name}").as_str()), "{name}");
        let r = Arrow::edge(&q, sq.edge);
        let (ct, ct2) = (&st.cones[sq.t], &st.cones[sq.t2]);
        let lhs = Arrow::edge(&q, ct.pi).then(&q, &r);
        let rhs = sq.z.rep.then(&q, &Arrow::edge(&q, ct2.pi));
        assert!(theory.vanishes(&lhs.sub(&rhs)), "{name}");
    }
    let composites: Vec<_> = st.relations().iter().filter(|r| r.relation.label.starts_with("composite")).collect();
    assert!(!composites.is_empty());
    for r in composites.iter().take(20) {
        assert!(theory.vanishes(&r.relation.arrow), "{}", r.relation.label);
    }
}

#[test]
fn identity_square_filler_is_identity() {
    let st = level1();
    let q = st.quiver(1);
    let mut seen = 0;
    for sq in st.squares.iter().filter(|s| s.t == s.t2 && s.w.kind == ClassKind::Identity && s.z.kind == ClassKind::Identity) {
        let cone = &st.cones[sq.t];
        assert!(st.theory(1).vanishes(&Arrow::edge(&q, sq.edge).sub(&Arrow::identity(cone.sort))));
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn canonical_and_octahedral_triangles_are_registered() {
    let st = level1();
    let q = st.quiver(1);
    for cone in st.cones.iter() {
        let arrows = [cone.class.rep.clone(), Arrow::edge(&q, cone.pi), Arrow::edge(&q, cone.delta)];
        assert!(st.registry.find(&arrows).is_some(), "{}", cone.class.key);
    }
    let r = &st.reports[1];
    assert_eq!(r.octahedra + r.octahedra_truncated, r.composable_pairs);
    assert!(r.octahedra > 0);
    let octahedral = st.registry.triangles().iter().filter(|t| matches!(t.provenance, Provenance::Octahedron { .. })).count();
    assert_eq!(octahedral, r.octahedra);
}

#[test]
fn registry_is_closed_under_rotation_and_translation() {
    let st = level1();
    for t in st.registry.triangles() {
        if let Some(s) = st.shift_triangle(&t.arrows) {
            assert!(st.registry.find(&s).is_some());
        }
        if let Some(r) = st.rotate(&t.arrows) {
            assert!(st.registry.find(&r).is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cone_of_a_class_ignores_the_representative(i in 0usize..26) {
        let st = level1();
        let cone = &st.cones[i];
        let q = st.quiver(1);
        let c = &cone.class;
        let padded = match st.zero_edge(c.src, c.tgt) {
            Some(z) => c.rep.add(&Arrow::edge(&q, z)),
            None => c.rep.clone(),
        };
        let class = st.classify(0, &padded).unwrap();
        prop_assert_eq!(st.cone_index(&class.key), Some(i));
    }

    #[test]
    fn translated_cone_is_cone_of_translate(i in 0usize..26) {
        let st = level1();
        let cone = &st.cones[i];
        if let Some(t) = st.shift(&cone.class.rep) {
            let class = st.classify(0, &t).unwrap();
            match st.cone(&class.key) {
                Some(other) => prop_assert_eq!(st.shift_sort(cone.sort), Some(other.sort)),
                None => prop_assert_eq!(st.shift_sort(cone.sort), None),
            }
        } else {
            prop_assert_eq!(st.shift_sort(cone.sort), None);
        }
    }
}

#[test]
fn level1_axioms_pass() {
    let r = report1();
    for c in [&r.tr1, &r.tr2, &r.tr3, &r.tr4] {
        assert!(c.failures.is_empty(), "{:?}", c.failures);
        assert!(c.checked > 0);
    }
    assert!(r.all_pass());
    assert_eq!(r.tr1.checked, 26);
    assert_eq!(r.tr4.checked, level1().reports[1].octahedra);
}

#[test]
fn missing_rotation_is_reported() {
    let mut st = level1().clone();
    let q = st.quiver(1);
    let canonical = st
        .registry
        .triangles()
        .iter()
        .position(|t| matches!(&t.provenance, Provenance::Canonical { class } if class == "(f,0)"))
        .unwrap();
    let rotated = st.rotate(&st.registry.triangles()[canonical].arrows).unwrap();
    let i = st.registry.find(&rotated).unwrap();
    let removed = st.registry.remove(i);
    let report = verify_triangulated_axioms(&st, 1);
    assert!(!report.all_pass());
    let shown = removed.display(&q);
    assert!(report.tr2.failures.iter().any(|f| f.ends_with(&shown)), "{:?}", report.tr2.failures);
}

#[test]
fn isomorphic_copies_are_checked() {
    let mut st = level0();
    let t = st.registry.triangles()[0].clone();
    let ids = t.arrows.clone().map(|a| Arrow::identity(a.src));
    let minus = ids.clone().map(|a| a.scale(&quiver_core::Q::from_i64(-1)));
    assert_eq!(st.register_isomorphic_copy(0, t.arrows.clone(), ids.clone(), ids.clone()).unwrap(), 0);
    assert_eq!(st.register_isomorphic_copy(0, t.arrows.clone(), minus.clone(), minus.clone()).unwrap(), 1);
    assert_eq!(st.registry.witnesses.len(), 2);

    let mixed = [ids[0].clone(), minus[1].clone(), ids[2].clone()];
    assert!(matches!(st.register_isomorphic_copy(0, t.arrows.clone(), mixed.clone(), mixed), Err(TricatError::Isomorphism(_))));
    let a = t.arrows[0].src;
    let singular = [Arrow::zero(a, a), ids[1].clone(), ids[2].clone()];
    assert!(st.register_isomorphic_copy(0, t.arrows.clone(), singular.clone(), singular).is_err());
}

#[test]
fn tprime_quotient_proves_every_composite() {
    let mut st = level1().clone();
    let report = st.quotient_tprime();
    assert_eq!(report.composites, 2 * report.triangles);
    assert_eq!(report.proved, report.composites, "{:?}", &report.failures[..report.failures.len().min(5)]);
    assert!(report.equations.iter().any(|e| e == "π[(f,0)]∘(f,0) = 0"));
    assert_eq!(report.equations.len(), 26);
    assert!(report.images.iter().any(|e| e == "im (f,0) = {y : π[(f,0)](y) = 0}"));

    for seed in 0..20 {
        let rep = mapping_cone_representation(&st, seed, 5);
        assert!(rep.dims.iter().all(|&d| d <= 10));
        let check = rep.check(&st);
        assert!(check.tprime > 0);
        assert!(check.ok(), "seed {seed}: {:?}", &check.failures[..check.failures.len().min(5)]);
    }
}

#[test]
fn export_views() {
    let st0 = level0();
    let g0 = GraphExport::from_state(&st0);
    assert!(g0.nodes.iter().all(|n| n.kind != "cone"));
    let g1 = GraphExport::from_state(level1());
    assert_eq!(g1.nodes.len(), 8 + 26);
    assert_eq!(g1.nodes.iter().filter(|n| n.kind == "cone").count(), 26);

    let json = export_graph(level1(), Format::Json);
    let back = load_graph(&json).unwrap();
    assert_eq!(back, g1);
    assert_eq!(back.to_json(), json);

    let dot = export_graph(&st0, Format::Dot);
    assert!(dot.starts_with("digraph tricat {\n") && dot.ends_with("}\n"));
    assert!(dot.contains("\"(X,0)\" -> \"(Y,0)\" [label=\"(f,0)\"];"));
    assert!(matches!("svg".parse::<Format>(), Err(TricatError::Format(_))));
    assert!(load_graph("{").is_err());
}

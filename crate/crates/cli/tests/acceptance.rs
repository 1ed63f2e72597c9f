//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fraisse::{
    agreement, check_ap, fraisse_chain, solve_problems, split_report, triviality_test, BooleanAlgebras, Presentations, TheoryTag,
    VectorSpace, VectorSpaces,
};
use presentation::{
    build_presented_model, extend_by_preimage, generated_submodel, hom_set, initial_model, HomFilter, PresentationError,
    DEFAULT_DEPTH,
};
use quiver_core::{parse_quiver, Field, Quiver, SortId, Term, Q};
use sequent_engine::instances::{kernel_probe, random_sequent, scheme_instances};
use sequent_engine::random::small_int;
use sequent_engine::{
    eval_sequent, hom_space, prove_in_i, random_exact_model, saturate, task_rng, Budget, Dims, LinearModel, Theory, Verdict,
};
use tricat::{build, mapping_cone_representation, verify_triangulated_axioms, Caps, SchemeGraph, Symbol, TriCatState};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> (Arc<Quiver>, Theory) {
    let q = Arc::new(parse_quiver(&std::fs::read_to_string(data(name)).unwrap()).unwrap());
    let t = Theory::exact(q.clone());
    (q, t)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
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

fn random_element(q: &Quiver, m: &LinearModel, seed: u64) -> Option<(SortId, Vec<Q>)> {
    let sorts: Vec<SortId> = q.sort_ids().filter(|&s| s != q.coefficient() && m.dim(s) > 0).collect();
    if sorts.is_empty() {
        return None;
    }
    let s = sorts[(seed as usize) % sorts.len()];
    Some((s, random_vector(m.dim(s), seed, 1)))
}

fn scheme_derivability() -> Outcome {
    let (q, theory) = load("nori3.qv");
    let start = Instant::now();
    let instances = scheme_instances(&theory, 3);
    let budget = Budget { depth: 4, samples: 0, max_dim: 3, seed: 1 };
    let mut failed = Vec::new();
    let mut kinds = BTreeSet::new();
    for i in &instances {
        kinds.insert(i.scheme);
        match prove_in_i(&theory, &i.sequent, &budget) {
            Ok(Verdict::Proved(t)) if t.replay(&theory, &i.sequent).is_ok() => {}
            other => {
                failed.push(format!("{} {} -> {}", i.scheme, i.sequent.display(&q), other.map(|v| v.tag()).unwrap_or("error")))
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failed.is_empty() && kinds.len() == 3 && elapsed < Duration::from_secs(60),
        format!("{} instances of {:?}, {} not proved, {:.1} s", instances.len(), kinds, failed.len(), elapsed.as_secs_f64()),
    )
}

fn non_inheritance() -> Outcome {
    let (q, theory) = load("nori3.qv");
    let budget = Budget { depth: 3, samples: 100, max_dim: 6, seed: 42 };
    let mut worst = 0;
    for pair in 0..q.pairs().len() {
        let goal = kernel_probe(&q, pair);
        match prove_in_i(&theory, &goal, &budget) {
            Ok(Verdict::Refuted(w)) if w.replays(&q, &goal) && w.sample < 100 => worst = worst.max(w.sample + 1),
            other => return Err(format!("pair {pair}: {}", other.map(|v| v.tag()).unwrap_or("error"))),
        }
    }
    Ok(format!("all {} probes refuted, at most {worst} samples needed", q.pairs().len()))
}

fn soundness() -> Outcome {
    let (q, theory) = load("nori3.qv");
    let models: Vec<LinearModel> = (0..10).map(|s| random_exact_model(&q, &Dims::uniform(&q, 4), 100 + s).unwrap()).collect();
    let mut rng = task_rng(2024, 0);
    let (mut pairs, mut proved_pairs, mut false_proved) = (0, 0, 0);
    for _ in 0..400 {
        let s = random_sequent(&q, &mut rng, 3);
        let proved = saturate(&theory, &s, 3).map(|v| v.is_proved()).unwrap_or(false);
        for m in &models {
            pairs += 1;
            if proved {
                proved_pairs += 1;
                if !eval_sequent(&q, m, &s).unwrap() {
                    false_proved += 1;
                }
            }
        }
        if proved_pairs >= 1000 && pairs >= 1000 {
            break;
        }
    }
    check(
        false_proved == 0 && proved_pairs >= 1000,
        format!("{pairs} pairs, {proved_pairs} with a proved sequent, {false_proved} false"),
    )
}

fn initiality() -> Outcome {
    let (q, _) = load("points.qv");
    let i = initial_model(&q);
    let unique = (0..20)
        .filter(|&seed| {
            let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
            let homs = hom_space(&q, &i, &m);
            homs.is_unique() && homs.particular.is_some_and(|h| h.is_natural(&q, &i, &m))
        })
        .count();
    check(unique == 20, format!("{unique}/20 models with exactly one hom"))
}

fn amalgamation() -> Outcome {
    let (_, theory) = load("nori3.qv");
    let cat = Presentations::new(Arc::new(theory), Budget::default());
    let report = check_ap(&cat, 50, 7);
    let (failed, unknown) = (report.count("failed"), report.count("unknown"));
    check(failed == 0 && unknown * 10 < 50, format!("50 spans: {failed} failed, {unknown} unknown"))
}

fn round_trip() -> Outcome {
    let (q, theory) = load("nori3.qv");
    let mut done = 0;
    let mut seed = 0u64;
    while done < 20 && seed < 200 {
        seed += 1;
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
        let Some((s, b)) = random_element(&q, &m, seed) else { continue };
        let (sub, p) = generated_submodel(&q, &m, &[(s, b.clone())], DEFAULT_DEPTH).map_err(|e| format!("seed {seed}: {e}"))?;
        let a = build_presented_model(&theory, &p, 4).map_err(|e| format!("seed {seed}: {e}"))?;
        let homs = hom_set(&theory, &p, &p, 1, HomFilter::Injective, 4).map_err(|e| format!("seed {seed}: {e}"))?;
        if !homs.tuples.contains(&vec![Term::var(&p.context, 0)]) {
            return Err(format!("seed {seed}: identity tuple missing from the hom set"));
        }
        let coords = vec![sub.coordinates(s, &b).unwrap()];
        let iso = a.hom_to(&q, &sub.model, &coords);
        let bijective = iso.maps.iter().all(|f| f.rows() == f.cols() && f.is_injective());
        if !(iso.is_natural(&q, &a.model, &sub.model) && bijective) {
            return Err(format!("seed {seed}: not an isomorphism"));
        }
        done += 1;
    }
    check(done == 20, format!("{done}/20 submodels rebuilt up to isomorphism"))
}

fn fraisse_beds() -> Outcome {
    let ba = BooleanAlgebras { injective: true };
    let chain = fraisse_chain(&ba, 8, 11).map_err(|e| e.to_string())?;
    let split = split_report(&chain, 200, 5);
    let a = split.fraction() == 1.0;

    let b = triviality_test(TheoryTag::BooleanAlgebras).fires && !triviality_test(TheoryTag::InjectiveBooleanAlgebras).fires;

    let cat = VectorSpaces::default();
    let mut rng = task_rng(9, 0);
    let mut c = true;
    for u in 0..=4 {
        for bd in 0..=5 {
            for ad in 0..=bd.min(u) {
                let p = cat.problem(ad, bd, u, &mut rng);
                let r = solve_problems(&cat, &VectorSpace { dim: u }, &[p]);
                c &= (r.records[0].outcome == "failed") == (bd > u);
            }
        }
    }

    let left = fraisse_chain(&ba, 8, 1).map_err(|e| e.to_string())?;
    let right = fraisse_chain(&ba, 8, 2).map_err(|e| e.to_string())?;
    let agree = agreement(left.last(), right.last(), 200, 3);
    let d = agree.agree == 200;
    check(
        a && b && c && d,
        format!(
            "(a) split {}/{} (b) {} (c) {} (d) {}/200 agree",
            split.split,
            split.sampled,
            if b { "ok" } else { "wrong" },
            if c { "ok" } else { "wrong" },
            agree.agree
        ),
    )
}

fn preimage_extension() -> Outcome {
    let (q, theory) = load("nori3.qv");
    let (mut built, mut truncated, mut preimages_checked) = (0, 0, 0);
    for pair in 0..q.pairs().len() {
        let (f0, _) = q.pairs()[pair];
        for seed in 0..4u64 {
            let seed = seed * 7 + pair as u64;
            let h = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
            let src = q.edge(f0).src;
            if h.dim(src) == 0 {
                continue;
            }
            let a0 = random_vector(h.dim(src), seed, 2);
            let b = h.map(f0).mul_vec(&a0);
            if b.iter().all(|x| x.is_zero()) {
                continue;
            }
            let c0 = q.edge(f0).tgt;
            let sub = sequent_engine::generated_submodel(&q, &h, &[(c0, b.clone())]);
            let bb = sub.coordinates(c0, &b).unwrap();
            let ext = match extend_by_preimage(&theory, &sub.model, &bb, pair, DEFAULT_DEPTH, 3) {
                Ok(e) => e,
                Err(PresentationError::Truncated { .. }) => {
                    truncated += 1;
                    continue;
                }
                Err(e) => return Err(format!("pair {pair}: {e}")),
            };
            if !ext.embeds(&q, &sub.model) {
                return Err(format!("pair {pair} seed {seed}: does not embed"));
            }
            if !ext.identifies(&q, &bb) {
                return Err(format!("pair {pair} seed {seed}: canonical preimage misses b"));
            }
            let mut preimages = vec![a0.clone()];
            for (i, k) in h.map(f0).kernel().iter().enumerate() {
                let c = Q::from_i64(i as i64 + 2);
                preimages.push(a0.iter().zip(k).map(|(x, y)| x.plus(&c.times(y))).collect());
            }
            if !ext.uniform_on(&q, &h, &preimages).map_err(|e| e.to_string())? {
                return Err(format!("pair {pair} seed {seed}: not uniform"));
            }
            preimages_checked += preimages.len();
            built += 1;
        }
    }
    check(
        built >= 10,
        format!("{built} extensions checked over {preimages_checked} preimages, {truncated} truncated by free loops"),
    )
}

/// Eligible classes at level 0 by path enumeration and rewriting: a path
/// through a zero map is zero, paths through the zero object's identity
/// collapse into it, everything else is its own class.
fn brute_force_cone_count(st: &TriCatState) -> usize {
    let base: BTreeSet<SortId> = st.sorts_at(0).collect();
    let edges: Vec<_> = st.edge_decls().iter().filter(|e| base.contains(&e.src) && base.contains(&e.tgt)).collect();
    let sorts = st.sort_decls();
    let lo = st.input.degrees.0;
    let translatable = |s: SortId| match &sorts[s.0].kind {
        quiver_core::SortKind::Graded { degree, .. } => *degree > lo,
        quiver_core::SortKind::ZeroObject => true,
        _ => false,
    };
    let edges = &edges;
    let mut paths: Vec<Vec<usize>> = (0..edges.len()).map(|i| vec![i]).collect();
    for len in 1..st.caps.term_depth {
        let longer: Vec<Vec<usize>> = paths
            .iter()
            .filter(|p| p.len() == len)
            .flat_map(|p| {
                let end = edges[*p.last().unwrap()].tgt;
                (0..edges.len()).filter(move |&j| edges[j].src == end).map(move |j| [p.clone(), vec![j]].concat())
            })
            .collect();
        paths.extend(longer);
    }
    let o = st.zero_object();
    let mut classes = BTreeSet::new();
    for p in paths {
        let (src, tgt) = (edges[p[0]].src, edges[*p.last().unwrap()].tgt);
        if !translatable(src) || !translatable(tgt) {
            continue;
        }
        let zero = p.iter().any(|&i| edges[i].symbol == Symbol::Zero);
        let key = match zero {
            false => p.iter().map(|&i| edges[i].name.clone()).collect::<Vec<_>>().join(";"),
            true if src == o && tgt == o => continue,
            true => "0".into(),
        };
        classes.insert((src, tgt, key));
    }
    classes.len()
}

fn tricat_fragment() -> Outcome {
    let q = parse_quiver(&std::fs::read_to_string(data("example2.qv")).unwrap()).unwrap();
    let g = SchemeGraph::from_quiver(&q).map_err(|e| e.to_string())?;
    if g.schemes.len() != 2 || g.morphisms.len() != 1 || g.degrees.1 - g.degrees.0 + 1 != 3 {
        return Err(format!("unexpected input shape {g:?}"));
    }
    let mut st = build(&g, Caps::default(), 1).map_err(|e| e.to_string())?;
    let axioms = verify_triangulated_axioms(&st, 1);
    let oracle = brute_force_cone_count(&st);
    let new_sorts = st.reports[1].new_sorts;
    let tprime = st.quotient_tprime();
    let mut reps_ok = 0;
    for seed in 0..20 {
        let rep = mapping_cone_representation(&st, seed, 5);
        if rep.check(&st).ok() {
            reps_ok += 1;
        }
    }
    check(
        axioms.all_pass() && new_sorts == oracle && tprime.failures.is_empty() && reps_ok == 20,
        format!(
            "TR1-TR4 {}, {new_sorts} new sorts vs {oracle} by brute force, {}/{} composites proved zero, {reps_ok}/20 representations",
            if axioms.all_pass() { "pass" } else { "FAIL" },
            tprime.proved,
            tprime.composites
        ),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qlogic");
    let nori3 = data("nori3.qv").to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["prove".into(), nori3.clone(), data("kernel_probe.seq").to_string_lossy().into_owned()],
        vec!["prove".into(), nori3.clone(), data("complex.seq").to_string_lossy().into_owned()],
        vec!["present".into(), nori3.clone(), "--seed".into(), "3".into()],
        vec!["hom".into(), data("points.qv").to_string_lossy().into_owned(), "--seed".into(), "4".into()],
        vec!["fraisse".into(), "--cat".into(), "boolean".into(), "--chain".into(), "8".into()],
        vec!["fraisse".into(), "--cat".into(), "vector".into(), "--samples".into(), "30".into()],
        vec!["tricat".into(), data("example2.qv").to_string_lossy().into_owned(), "--level".into(), "1".into()],
    ];
    let run = |args: &[String], threads: &str| {
        let out = Command::new(bin).args(args).args(["--threads", threads]).env_remove("QLOGIC_PROFILE").output().unwrap();
        (out.status.code(), out.stdout)
    };
    let mut bytes = 0;
    for args in &runs {
        let one = run(args, "1");
        let eight = run(args, "8");
        let again = run(args, "8");
        if one != eight || eight != again {
            return Err(format!("{} differs across runs or thread counts", args.join(" ")));
        }
        bytes += one.1.len();
    }
    Ok(format!("{} commands byte-identical across 3 runs (threads 1, 8, 8), {bytes} bytes each", runs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("scheme derivability", scheme_derivability),
        ("exactness non-inheritance", non_inheritance),
        ("soundness cross-check", soundness),
        ("initiality", initiality),
        ("amalgamation", amalgamation),
        ("round trip", round_trip),
        ("Fraïssé test beds", fraisse_beds),
        ("preimage extension", preimage_extension),
        ("tricat", tricat_fragment),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

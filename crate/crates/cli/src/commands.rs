use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use fraisse::{
    check_ap, check_jep, fraisse_chain, split_report, triviality_test, BooleanAlgebras, Chain, FiniteSets,
    FiniteStructureCategory, TheoryTag, VectorSpaces,
};
use presentation::{
    build_presented_model, generated_submodel, hom_set, initial_model, is_irreducible, HomFilter, Presentation,
    PresentationError, DEFAULT_DEPTH,
};
use quiver_core::{parse_quiver, parse_sequent, EdgeKind, Field, Quiver, SortId};
use sequent_engine::random::small_int;
use sequent_engine::{hom_space, prove_in_i, random_exact_model, task_rng, Budget, Dims, Theory, Verdict};
use serde_json::{json, Value};
use tricat::{build, export_graph, verify_triangulated_axioms, Caps, Format, GraphExport, SchemeGraph};

use crate::{exit, read_file, write_file, CliError, Command, OutputFormat, Report, RunConfig};

/// Term depth of candidate tuples in `hom`.
const HOM_TERM_DEPTH: usize = 2;

pub fn dispatch(command: &Command, config: RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Prove { quiver, sequent, witness } => prove(config, quiver, sequent, witness.as_deref()),
        Command::Present { quiver, sort, presentation } => present(config, quiver, sort.as_deref(), presentation.as_deref()),
        Command::Hom { quiver, source, target, injective } => {
            hom(config, quiver, source.as_deref().zip(target.as_deref()), *injective)
        }
        Command::Fraisse { cat, chain, triviality } => fraisse(config, cat, *chain, *triviality),
        Command::Tricat { input, level, tprime } => tricat(config, input, *level, *tprime),
        Command::Export { quiver } => export(config, quiver),
    }
}

fn load_quiver(path: &Path) -> Result<Arc<Quiver>, CliError> {
    let text = read_file(path)?;
    parse_quiver(&text).map(Arc::new).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_presentation(q: &Quiver, path: &Path) -> Result<Presentation, CliError> {
    let text = read_file(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Presentation::from_json(q, &v).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn budget(config: &RunConfig) -> Budget {
    Budget { depth: config.budgets.depth, samples: config.budgets.samples, max_dim: config.budgets.dims, seed: config.seed }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn prove(config: RunConfig, quiver: &Path, sequent: &Path, witness: Option<&Path>) -> Result<Report, CliError> {
    let q = load_quiver(quiver)?;
    let text = read_file(sequent)?;
    let goal = parse_sequent(&text, &q).map_err(|e| CliError::Parse(format!("{}: {e}", sequent.display())))?;
    let theory = Theory::exact(q.clone());
    let verdict = prove_in_i(&theory, &goal, &budget(&config)).map_err(|e| CliError::Usage(e.to_string()))?;
    let code = match &verdict {
        Verdict::Proved(_) => exit::PROVED,
        Verdict::Refuted(w) => {
            if let Some(path) = witness {
                write_file(path, &pretty(&w.to_json()))?;
            }
            exit::REFUTED
        }
        Verdict::Unknown(_) => exit::UNKNOWN,
    };
    let result = json!({ "goal": goal.display(&q), "verdict": verdict.to_json(&q) });
    Ok(Report { code, text: config.json_document(result) })
}

/// A presentation extracted from a nonzero element of a sampled exact model.
fn sampled_presentation(q: &Quiver, config: &RunConfig, sort: Option<&str>) -> Result<Presentation, CliError> {
    let m = random_exact_model(q, &Dims::uniform(q, config.budgets.dims), config.seed).map_err(internal)?;
    let s = match sort {
        Some(name) => q.sort_by_name(name).ok_or_else(|| CliError::Usage(format!("unknown sort {name}")))?,
        None => q
            .sort_ids()
            .find(|&s| s != q.coefficient() && m.dim(s) > 0)
            .ok_or_else(|| CliError::Usage("the sampled model is zero; try another --seed".into()))?,
    };
    if m.dim(s) == 0 {
        return Err(CliError::Usage(format!("sort {} is zero in the sampled model; try another --seed", q.sort_name(s))));
    }
    let mut rng = task_rng(config.seed, 1);
    let b = loop {
        let v: Vec<_> = (0..m.dim(s)).map(|_| small_int(&mut rng)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            break v;
        }
    };
    let (_, p) = generated_submodel(q, &m, &[(s, b)], DEFAULT_DEPTH).map_err(internal)?;
    Ok(p)
}

fn present(mut config: RunConfig, quiver: &Path, sort: Option<&str>, file: Option<&Path>) -> Result<Report, CliError> {
    let q = load_quiver(quiver)?;
    let theory = Theory::exact(q.clone());
    let p = match file {
        Some(path) => load_presentation(&q, path)?,
        None => sampled_presentation(&q, &config, sort)?,
    };
    config.extra.insert("presentation_depth".into(), json!(p.depth));
    let mut code = match is_irreducible(&theory, &p, &budget(&config)).map_err(internal)?.tag() {
        "proved" => exit::PROVED,
        "refuted" => exit::REFUTED,
        _ => exit::UNKNOWN,
    };
    let model = match build_presented_model(&theory, &p, config.budgets.depth) {
        Ok(a) => json!({ "dims": a.model.dims(), "exact": a.model.is_exact() }),
        Err(PresentationError::Truncated { depth }) => {
            code = exit::TRUNCATED;
            json!({ "truncated_at_depth": depth })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let verdict = ["proved", "refuted", "unknown"][usize::from(code.min(2))];
    let result = json!({ "presentation": p.to_json(&q), "irreducible": verdict, "model": model });
    Ok(Report { code, text: config.json_document(result) })
}

fn hom(mut config: RunConfig, quiver: &Path, pair: Option<(&Path, &Path)>, injective: bool) -> Result<Report, CliError> {
    let q = load_quiver(quiver)?;
    match pair {
        Some((src, dst)) => {
            let theory = Theory::exact(q.clone());
            let (src, dst) = (load_presentation(&q, src)?, load_presentation(&q, dst)?);
            config.extra.insert("term_depth".into(), json!(HOM_TERM_DEPTH));
            let filter = if injective { HomFilter::Injective } else { HomFilter::All };
            let homs = hom_set(&theory, &src, &dst, HOM_TERM_DEPTH, filter, config.budgets.depth).map_err(internal)?;
            let tuples: Vec<Vec<String>> = homs.tuples.iter().map(|w| w.iter().map(|t| t.display(&q)).collect()).collect();
            let code = if homs.truncated { exit::TRUNCATED } else { exit::PROVED };
            let result = json!({ "tuples": tuples, "examined": homs.examined, "truncated": homs.truncated });
            Ok(Report { code, text: config.json_document(result) })
        }
        None => {
            let i = initial_model(&q);
            let m = random_exact_model(&q, &Dims::uniform(&q, config.budgets.dims), config.seed).map_err(internal)?;
            let homs = hom_space(&q, &i, &m);
            let result = json!({
                "source": "initial",
                "target_dims": m.dims(),
                "exists": homs.exists(),
                "unique": homs.is_unique(),
                "directions": homs.directions,
            });
            Ok(Report { code: exit::PROVED, text: config.json_document(result) })
        }
    }
}

fn chain_json<C: FiniteStructureCategory + Clone>(cat: &C, steps: usize, seed: u64) -> Result<(Chain<C>, Value), CliError> {
    let chain = fraisse_chain(cat, steps, seed).map_err(internal)?;
    let v = chain.to_json();
    Ok((chain, v))
}

fn fraisse(mut config: RunConfig, cat: &str, chain: Option<usize>, triviality: bool) -> Result<Report, CliError> {
    let tag: TheoryTag = cat.parse().map_err(|_| CliError::Usage(format!("unknown category instance {cat}")))?;
    let (samples, seed) = (config.budgets.samples, config.seed);
    let injective = !tag.name().ends_with("-plain");
    let result = if triviality {
        serde_json::to_value(triviality_test(tag)).expect("reports serialize")
    } else if let Some(steps) = chain {
        config.extra.insert("chain".into(), json!(steps));
        match tag {
            TheoryTag::BooleanAlgebras | TheoryTag::InjectiveBooleanAlgebras => {
                let (c, v) = chain_json(&BooleanAlgebras { injective }, steps, seed)?;
                let split = split_report(&c, samples, seed);
                json!({ "chain": v, "atoms": c.last().atoms, "split": split, "split_fraction": split.fraction() })
            }
            TheoryTag::Sets | TheoryTag::InjectiveSets => {
                let (c, v) = chain_json(&FiniteSets, steps, seed)?;
                json!({ "chain": v, "size": c.last().size })
            }
            TheoryTag::VectorSpaces | TheoryTag::InjectiveVectorSpaces => {
                let (c, v) = chain_json(&VectorSpaces::default(), steps, seed)?;
                json!({ "chain": v, "dim": c.last().dim })
            }
        }
    } else {
        let (ap, jep) = match tag {
            TheoryTag::BooleanAlgebras | TheoryTag::InjectiveBooleanAlgebras => {
                let c = BooleanAlgebras { injective };
                (check_ap(&c, samples, seed), check_jep(&c, samples, seed))
            }
            TheoryTag::Sets | TheoryTag::InjectiveSets => {
                (check_ap(&FiniteSets, samples, seed), check_jep(&FiniteSets, samples, seed))
            }
            TheoryTag::VectorSpaces | TheoryTag::InjectiveVectorSpaces => {
                let c = VectorSpaces::default();
                (check_ap(&c, samples, seed), check_jep(&c, samples, seed))
            }
        };
        json!({ "ap": ap.to_json(), "jep": jep.to_json() })
    };
    let result = json!({ "category": tag.name(), "report": result });
    Ok(Report { code: exit::PROVED, text: config.json_document(result) })
}

fn tricat(mut config: RunConfig, input: &Path, level: usize, tprime: bool) -> Result<Report, CliError> {
    let q = load_quiver(input)?;
    let graph = SchemeGraph::from_quiver(&q).map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
    let caps = Caps::default();
    config.extra.insert("level".into(), json!(level));
    config.extra.insert("tprime".into(), json!(tprime));
    config.extra.insert("caps".into(), serde_json::to_value(caps).expect("caps serialize"));
    let mut state = build(&graph, caps, level).map_err(|e| match e {
        tricat::TricatError::Quiver(_) => internal(e),
        other => CliError::Parse(format!("{}: {other}", input.display())),
    })?;
    let axioms: Vec<_> = (1..=level).map(|l| verify_triangulated_axioms(&state, l)).collect();
    let quotient = tprime.then(|| state.quotient_tprime());

    let mut code = exit::PROVED;
    if state.reports.iter().any(|r| r.truncated()) {
        code = exit::TRUNCATED;
    }
    if axioms.iter().any(|a| !a.all_pass()) || quotient.as_ref().is_some_and(|t| !t.failures.is_empty()) {
        code = exit::REFUTED;
    }
    let text = match config.format.unwrap_or(OutputFormat::Dot) {
        OutputFormat::Json => {
            let result = json!({
                "levels": state.reports,
                "axioms": axioms,
                "tprime": quotient,
                "graph": GraphExport::from_state(&state),
            });
            config.json_document(result)
        }
        OutputFormat::Dot => {
            let mut out = config.comment_header();
            for r in &state.reports {
                let _ = writeln!(
                    out,
                    "// level {}: {} sorts, {} symbols, {} relations, {} triangles{}",
                    r.level,
                    r.new_sorts,
                    r.new_symbols,
                    r.new_relations,
                    r.triangles,
                    if r.truncated() { " (truncated)" } else { "" }
                );
            }
            for a in &axioms {
                for (name, c) in [("TR1", &a.tr1), ("TR2", &a.tr2), ("TR3", &a.tr3), ("TR4", &a.tr4)] {
                    let verdict = if c.ok() { "pass" } else { "FAIL" };
                    let _ = writeln!(
                        out,
                        "// {name} level {}: {verdict} {}/{} ({} truncated)",
                        a.level, c.passed, c.checked, c.truncated
                    );
                    for f in &c.failures {
                        let _ = writeln!(out, "//   {f}");
                    }
                }
            }
            if !axioms.is_empty() {
                let all = axioms.iter().all(|a| a.all_pass());
                let _ = writeln!(out, "// axioms: {}", if all { "all pass" } else { "FAILED" });
            }
            if let Some(t) = &quotient {
                let _ = writeln!(out, "// tprime: {}/{} composites proved zero", t.proved, t.composites);
                for e in &t.equations {
                    let _ = writeln!(out, "// tprime {e}");
                }
                for f in &t.failures {
                    let _ = writeln!(out, "//   not proved: {f}");
                }
            }
            out.push_str(&export_graph(&state, Format::Dot));
            out
        }
    };
    Ok(Report { code, text })
}

fn export(config: RunConfig, quiver: &Path) -> Result<Report, CliError> {
    let q = load_quiver(quiver)?;
    let text = match config.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let v: Value = serde_json::from_str(&q.to_json()).map_err(internal)?;
            config.json_document(v)
        }
        OutputFormat::Dot => {
            let mut out = config.comment_header();
            out.push_str("digraph quiver {\n");
            let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
            for s in q.sort_ids() {
                let _ = writeln!(out, "  {};", quote(q.sort_name(s)));
            }
            for e in q.edge_ids() {
                let edge = q.edge(e);
                let style = match edge.kind {
                    EdgeKind::Functorial { .. } => "",
                    _ => ", style=dashed",
                };
                let (s, t): (SortId, SortId) = (edge.src, edge.tgt);
                let _ = writeln!(
                    out,
                    "  {} -> {} [label={}{style}];",
                    quote(q.sort_name(s)),
                    quote(q.sort_name(t)),
                    quote(q.edge_name(e))
                );
            }
            out.push_str("}\n");
            out
        }
    };
    Ok(Report { code: exit::PROVED, text })
}

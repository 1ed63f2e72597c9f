//! Categories of finite structures with embeddings, and the generic AP, JEP
//! and homogeneity checkers that run over them.

use std::fmt::Debug;

use rand::Rng;
use rayon::prelude::*;
use sequent_engine::task_rng;
use serde::Serialize;
use serde_json::{json, Value};

/// A small category presented by sampling: objects, arrows, and the two
/// constructions the checkers need (amalgams and extensions into a target).
pub trait FiniteStructureCategory: Sync {
    type Object: Clone + Debug + Send + Sync;
    type Arrow: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> &'static str;

    /// A registered initial object, if the category has one.
    fn initial(&self) -> Option<Self::Object> {
        None
    }

    /// The arrow out of the initial object.
    fn from_initial(&self, _a: &Self::Object) -> Option<Self::Arrow> {
        None
    }

    fn identity(&self, a: &Self::Object) -> Self::Arrow;

    /// `g ∘ f`.
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow;

    fn is_arrow(&self, f: &Self::Arrow, src: &Self::Object, dst: &Self::Object) -> bool;

    /// Equality of two arrows into `dst`.
    fn same_arrow(&self, f: &Self::Arrow, g: &Self::Arrow, _dst: &Self::Object) -> bool {
        f == g
    }

    fn sample_object<R: Rng>(&self, rng: &mut R) -> Self::Object;

    /// An object `b` with an arrow `a -> b`.
    fn sample_arrow_from<R: Rng>(&self, a: &Self::Object, rng: &mut R) -> (Self::Object, Self::Arrow);

    /// An object `a` with an arrow `a -> u`.
    fn sample_arrow_into<R: Rng>(&self, u: &Self::Object, rng: &mut R) -> (Self::Object, Self::Arrow);

    fn amalgamate(&self, span: &Span<Self>) -> Amalgamation<Self>;

    /// An arrow `χ̃: b -> u` with `χ̃ ∘ j = χ`.
    fn extend(&self, problem: &Problem<Self>, u: &Self::Object) -> Extension<Self::Arrow>;

    /// Problems a chain must solve at every stage to grow towards the
    /// homogeneous object.
    fn growth_problems(&self, _u: &Self::Object) -> Vec<Problem<Self>> {
        Vec::new()
    }

    fn object_json(&self, a: &Self::Object) -> Value;

    fn arrow_json(&self, f: &Self::Arrow) -> Value;
}

/// `b <-f- a -g-> c`.
pub struct Span<C: FiniteStructureCategory + ?Sized> {
    pub a: C::Object,
    pub b: C::Object,
    pub f: C::Arrow,
    pub c: C::Object,
    pub g: C::Arrow,
}

impl<C: FiniteStructureCategory + ?Sized> Clone for Span<C> {
    fn clone(&self) -> Self {
        Span { a: self.a.clone(), b: self.b.clone(), f: self.f.clone(), c: self.c.clone(), g: self.g.clone() }
    }
}

impl<C: FiniteStructureCategory + ?Sized> Span<C> {
    pub fn to_json(&self, cat: &C) -> Value {
        json!({
            "a": cat.object_json(&self.a),
            "b": cat.object_json(&self.b),
            "f": cat.arrow_json(&self.f),
            "c": cat.object_json(&self.c),
            "g": cat.arrow_json(&self.g),
        })
    }
}

pub enum Amalgamation<C: FiniteStructureCategory + ?Sized> {
    /// `f2: b -> d` and `g2: c -> d` with `f2 ∘ f = g2 ∘ g`.
    Amalgamated {
        d: C::Object,
        f2: C::Arrow,
        g2: C::Arrow,
        certificate: Value,
    },
    Failed(Value),
    Unknown(Value),
}

/// An extension problem: `j: a -> b` and `χ: a -> u`.
pub struct Problem<C: FiniteStructureCategory + ?Sized> {
    pub a: C::Object,
    pub b: C::Object,
    pub j: C::Arrow,
    pub chi: C::Arrow,
}

impl<C: FiniteStructureCategory + ?Sized> Clone for Problem<C> {
    fn clone(&self) -> Self {
        Problem { a: self.a.clone(), b: self.b.clone(), j: self.j.clone(), chi: self.chi.clone() }
    }
}

impl<C: FiniteStructureCategory + ?Sized> Problem<C> {
    pub fn to_json(&self, cat: &C) -> Value {
        json!({
            "a": cat.object_json(&self.a),
            "b": cat.object_json(&self.b),
            "j": cat.arrow_json(&self.j),
            "chi": cat.arrow_json(&self.chi),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extension<A> {
    Extended(A),
    /// The counter-configuration that blocks every extension.
    Failed(Value),
    Unknown(Value),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Summary {
    Holds,
    Fails,
    Unknown,
}

impl Summary {
    fn from_counts(failed: usize, unknown: usize) -> Summary {
        if failed > 0 {
            Summary::Fails
        } else if unknown > 0 {
            Summary::Unknown
        } else {
            Summary::Holds
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    /// `amalgamated` / `extended`, `failed` or `unknown`.
    pub outcome: &'static str,
    pub input: Value,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub category: &'static str,
    pub property: &'static str,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub note: Option<String>,
}

impl Report {
    fn new(category: &'static str, property: &'static str, records: Vec<Record>, note: Option<String>) -> Report {
        let failed = records.iter().filter(|r| r.outcome == "failed").count();
        let unknown = records.iter().filter(|r| r.outcome == "unknown").count();
        Report { category, property, summary: Summary::from_counts(failed, unknown), records, note }
    }

    pub fn count(&self, outcome: &str) -> usize {
        self.records.iter().filter(|r| r.outcome == outcome).count()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Samples a span with a common source.
pub fn sample_span<C: FiniteStructureCategory, R: Rng>(cat: &C, rng: &mut R) -> Span<C> {
    let a = cat.sample_object(rng);
    let (b, f) = cat.sample_arrow_from(&a, rng);
    let (c, g) = cat.sample_arrow_from(&a, rng);
    Span { a, b, f, c, g }
}

/// Samples an extension problem against `u`.
pub fn sample_problem<C: FiniteStructureCategory, R: Rng>(cat: &C, u: &C::Object, rng: &mut R) -> Problem<C> {
    let (a, chi) = cat.sample_arrow_into(u, rng);
    let (b, j) = cat.sample_arrow_from(&a, rng);
    Problem { a, b, j, chi }
}

/// An amalgam is accepted only once both legs are arrows and the square
/// commutes.
fn verified_amalgam<C: FiniteStructureCategory>(cat: &C, span: &Span<C>) -> Record {
    let input = span.to_json(cat);
    let (outcome, detail) = match cat.amalgamate(span) {
        Amalgamation::Amalgamated { d, f2, g2, certificate } => {
            let ok = cat.is_arrow(&f2, &span.b, &d)
                && cat.is_arrow(&g2, &span.c, &d)
                && cat.same_arrow(&cat.compose(&span.f, &f2), &cat.compose(&span.g, &g2), &d);
            if ok {
                (
                    "amalgamated",
                    json!({ "d": cat.object_json(&d), "f2": cat.arrow_json(&f2), "g2": cat.arrow_json(&g2), "certificate": certificate }),
                )
            } else {
                ("unknown", json!({ "unverified": cat.object_json(&d) }))
            }
        }
        Amalgamation::Failed(v) => ("failed", v),
        Amalgamation::Unknown(v) => ("unknown", v),
    };
    Record { index: 0, outcome, input, detail }
}

/// Amalgamation on `samples` sampled spans. Spans are drawn from the seed
/// up front and checked in parallel.
pub fn check_ap<C: FiniteStructureCategory>(cat: &C, samples: usize, seed: u64) -> Report {
    let spans: Vec<Span<C>> = (0..samples).map(|i| sample_span(cat, &mut task_rng(seed, i as u64))).collect();
    let records = spans.par_iter().enumerate().map(|(i, s)| Record { index: i, ..verified_amalgam(cat, s) }).collect();
    Report::new(cat.name(), "amalgamation", records, None)
}

/// Joint embedding on sampled pairs. With an initial object this is the
/// amalgamation of the two arrows out of it.
pub fn check_jep<C: FiniteStructureCategory>(cat: &C, samples: usize, seed: u64) -> Report {
    let note = cat.initial().map(|_| "implied by AP: the category has an initial object".to_string());
    let pairs: Vec<(C::Object, C::Object)> = (0..samples)
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            (cat.sample_object(&mut rng), cat.sample_object(&mut rng))
        })
        .collect();
    let records = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (b, c))| {
            let input = json!({ "a": cat.object_json(b), "b": cat.object_json(c) });
            let (Some(init), Some(f), Some(g)) = (cat.initial(), cat.from_initial(b), cat.from_initial(c)) else {
                return Record { index: i, outcome: "unknown", input, detail: json!("no initial object registered") };
            };
            let span = Span { a: init, b: b.clone(), f, c: c.clone(), g };
            Record { index: i, input, ..verified_amalgam(cat, &span) }
        })
        .collect();
    Report::new(cat.name(), "joint embedding", records, note)
}

/// Solves each problem against `u`, checking every witness exactly.
pub fn solve_problems<C: FiniteStructureCategory>(cat: &C, u: &C::Object, problems: &[Problem<C>]) -> Report {
    let records = problems
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let input = p.to_json(cat);
            let (outcome, detail) = match cat.extend(p, u) {
                Extension::Extended(x) => {
                    if cat.is_arrow(&x, &p.b, u) && cat.same_arrow(&cat.compose(&p.j, &x), &p.chi, u) {
                        ("extended", cat.arrow_json(&x))
                    } else {
                        ("unknown", json!({ "unverified": cat.arrow_json(&x) }))
                    }
                }
                Extension::Failed(v) => ("failed", v),
                Extension::Unknown(v) => ("unknown", v),
            };
            Record { index: i, outcome, input, detail }
        })
        .collect();
    Report::new(cat.name(), "homogeneity", records, None)
}

/// Homogeneity of `u` on sampled extension problems.
pub fn check_homogeneous<C: FiniteStructureCategory>(cat: &C, u: &C::Object, samples: usize, seed: u64) -> Report {
    let problems: Vec<Problem<C>> = (0..samples).map(|i| sample_problem(cat, u, &mut task_rng(seed, i as u64))).collect();
    solve_problems(cat, u, &problems)
}

/// Universality of `u`: every sampled object maps into it. Needs an initial
/// object, through which the question becomes an extension problem.
pub fn check_universal<C: FiniteStructureCategory>(cat: &C, u: &C::Object, samples: usize, seed: u64) -> Report {
    let problems: Vec<Problem<C>> = match (cat.initial(), cat.from_initial(u)) {
        (Some(init), Some(chi)) => (0..samples)
            .filter_map(|i| {
                let b = cat.sample_object(&mut task_rng(seed, i as u64));
                let j = cat.from_initial(&b)?;
                Some(Problem { a: init.clone(), b, j, chi: chi.clone() })
            })
            .collect(),
        _ => Vec::new(),
    };
    let mut report = solve_problems(cat, u, &problems);
    report.property = "universality";
    if problems.is_empty() {
        report.summary = Summary::Unknown;
        report.note = Some("no initial object registered".into());
    }
    report
}

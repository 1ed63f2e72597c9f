//! Detects theories whose homogeneous models collapse: when `{x. ⊤}` and
//! `{x, y. ⊤}` both present models, every homogeneous model satisfies
//! `⊤ ⊢ x = y`.
//!
//! "Presents" is decided by brute force: a candidate object with a generator
//! tuple presents the formula when, for every small target, evaluating the
//! generators is a bijection from homs onto tuples of the target.

use std::fmt;
use std::str::FromStr;

use quiver_core::{Matrix, Q};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryTag {
    BooleanAlgebras,
    InjectiveBooleanAlgebras,
    Sets,
    InjectiveSets,
    VectorSpaces,
    InjectiveVectorSpaces,
}

impl TheoryTag {
    pub const ALL: [TheoryTag; 6] = [
        TheoryTag::BooleanAlgebras,
        TheoryTag::InjectiveBooleanAlgebras,
        TheoryTag::Sets,
        TheoryTag::InjectiveSets,
        TheoryTag::VectorSpaces,
        TheoryTag::InjectiveVectorSpaces,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoryTag::BooleanAlgebras => "boolean-plain",
            TheoryTag::InjectiveBooleanAlgebras => "boolean",
            TheoryTag::Sets => "sets-plain",
            TheoryTag::InjectiveSets => "sets",
            TheoryTag::VectorSpaces => "vector-plain",
            TheoryTag::InjectiveVectorSpaces => "vector",
        }
    }

    fn injective(self) -> bool {
        matches!(self, TheoryTag::InjectiveBooleanAlgebras | TheoryTag::InjectiveSets | TheoryTag::InjectiveVectorSpaces)
    }

    /// Constants available in the initial object, if any.
    fn constants(self) -> &'static [&'static str] {
        match self {
            TheoryTag::BooleanAlgebras | TheoryTag::InjectiveBooleanAlgebras => &["0", "1"],
            TheoryTag::VectorSpaces | TheoryTag::InjectiveVectorSpaces => &["0"],
            TheoryTag::Sets | TheoryTag::InjectiveSets => &[],
        }
    }
}

impl fmt::Display for TheoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TheoryTag::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown theory {s}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivialityReport {
    pub theory: TheoryTag,
    /// `{x. ⊤}` presents a model.
    pub free_one: bool,
    /// `{x, y. ⊤}` presents a model.
    pub free_two: bool,
    pub fires: bool,
    /// Sequents provable in the homogeneous theory.
    pub collapse: Vec<String>,
}

pub fn triviality_test(theory: TheoryTag) -> TrivialityReport {
    let free_one = presents(theory, 1);
    let free_two = presents(theory, 2);
    let fires = free_one && free_two;
    let mut collapse = Vec::new();
    if free_one {
        // `⊤` holds at every constant of the initial object.
        collapse.extend(theory.constants().iter().map(|c| format!("⊤ ⊢_x x = {c}")));
    }
    if fires {
        collapse.push("⊤ ⊢_{x, y} x = y".to_string());
    }
    TrivialityReport { theory, free_one, free_two, fires, collapse }
}

fn presents(theory: TheoryTag, n: usize) -> bool {
    let inj = theory.injective();
    match theory {
        TheoryTag::BooleanAlgebras | TheoryTag::InjectiveBooleanAlgebras => ba_presents(n, inj),
        TheoryTag::Sets | TheoryTag::InjectiveSets => set_presents(n, inj),
        TheoryTag::VectorSpaces | TheoryTag::InjectiveVectorSpaces => vector_presents(n, inj),
    }
}

/// Every function `0..m -> 0..k`, as vectors.
fn functions(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|f| (0..k).map(move |i| [f.clone(), vec![i]].concat())).collect();
    }
    out
}

fn is_injective(f: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    f.iter().all(|x| seen.insert(x))
}

fn is_onto(f: &[usize], k: usize) -> bool {
    (0..k).all(|i| f.contains(&i))
}

/// A hom between finite Boolean algebras with `k` and `m` atoms is a map
/// from target atoms to source atoms; it is injective when that map is onto.
/// Elements are bit masks over atoms.
fn ba_presents(n: usize, injective: bool) -> bool {
    (0..=4usize).any(|k| {
        let elements = 1usize << k;
        functions(n, elements).into_iter().any(|gens| {
            (0..=2usize).all(|m| {
                let mut hits = vec![0usize; 1 << (m * n)];
                for h in functions(m, k) {
                    if injective && !is_onto(&h, k) {
                        continue;
                    }
                    // Image of a source element: target atoms whose source atom lies in it.
                    let image = |x: usize| (0..m).filter(|&a| x >> h[a] & 1 == 1).fold(0, |acc, a| acc | 1 << a);
                    let key = gens.iter().fold(0, |acc, &g| acc << m | image(g));
                    hits[key] += 1;
                }
                hits.iter().all(|&c| c == 1)
            })
        })
    })
}

fn set_presents(n: usize, injective: bool) -> bool {
    (0..=n).any(|k| {
        functions(n, k).into_iter().any(|gens| {
            (0..=3usize).all(|m| {
                let mut hits = std::collections::HashMap::new();
                for h in functions(k, m) {
                    if injective && !is_injective(&h) {
                        continue;
                    }
                    let key: Vec<usize> = gens.iter().map(|&g| h[g]).collect();
                    *hits.entry(key).or_insert(0usize) += 1;
                }
                functions(n, m).iter().all(|t| hits.get(t) == Some(&1))
            })
        })
    })
}

/// Candidates `Q^k` with generator columns in `{0, 1}^k`; targets `Q^m` for
/// `m <= 2` with tuples over `{-1, 0, 1}`. A tuple has exactly one preimage
/// iff `A G = T` has a unique solution, which must be injective if required.
fn vector_presents(n: usize, injective: bool) -> bool {
    (0..=n).any(|k| {
        functions(n * k, 2).into_iter().any(|bits| {
            let rows: Vec<Vec<Q>> = (0..k).map(|i| (0..n).map(|j| Q::from_i64(bits[i * n + j] as i64)).collect()).collect();
            let g = Matrix::from_rows(rows, n);
            (0..=2usize).all(|m| {
                functions(m * n, 3).into_iter().all(|entries| {
                    let t: Vec<Vec<Q>> =
                        (0..m).map(|i| (0..n).map(|j| Q::from_i64(entries[i * n + j] as i64 - 1)).collect()).collect();
                    unique_injective_solution(&g, &t, m, injective)
                })
            })
        })
    })
}

/// Solves `A G = T` row by row: each row `a` of `A` satisfies `Gᵀ a = t`.
fn unique_injective_solution(g: &Matrix<Q>, t: &[Vec<Q>], m: usize, injective: bool) -> bool {
    let k = g.rows();
    let gt = Matrix::from_cols(&g.row_vecs(), g.cols());
    if gt.rank() < k {
        return false;
    }
    let mut rows = Vec::new();
    for r in t.iter().take(m) {
        match gt.solve(r) {
            Some(a) => rows.push(a),
            None => return false,
        }
    }
    !injective || Matrix::from_rows(rows, k).rank() == k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_parse_by_name() {
        for t in TheoryTag::ALL {
            assert_eq!(t.name().parse::<TheoryTag>().unwrap(), t);
        }
        assert!("groups".parse::<TheoryTag>().is_err());
    }

    #[test]
    fn one_generator_boolean_algebras() {
        assert!(presents(TheoryTag::BooleanAlgebras, 1));
        assert!(!presents(TheoryTag::InjectiveBooleanAlgebras, 1));
    }
}

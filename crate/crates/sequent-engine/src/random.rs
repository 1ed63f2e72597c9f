//! Seeded construction of exact representations.
//!
//! Edges declared as composites are computed from their factors. The remaining
//! edges are filled one at a time: the next edge is the one for which the most
//! relations have become linear, its matrix is a random point of the solution
//! space of those relations. Exactness of every distinguished pair is checked
//! at the end; a pair that keeps failing has its middle dimension lowered.

use std::collections::BTreeMap;

use quiver_core::{base_axioms, BaseAxioms, Composite, EdgeId, Field, Matrix, Quiver, SortId, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::LinearModel;

/// Per-sort dimension bounds (or exact targets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dims {
    pub per_sort: Vec<usize>,
    /// Use `per_sort` as exact targets instead of upper bounds.
    pub exact: bool,
}

impl Dims {
    pub fn uniform(q: &Quiver, bound: usize) -> Dims {
        Dims { per_sort: vec![bound; q.sorts().len()], exact: false }
    }

    pub fn exact(per_sort: Vec<usize>) -> Dims {
        Dims { per_sort, exact: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RandomModelError {
    #[error("dimension vector has {0} entries for {1} sorts")]
    Arity(usize, usize),
    #[error("no exact filling found; first unsatisfiable constraint: {0}")]
    Infeasible(String),
}

/// An RNG for task `index` under `root`, independent of scheduling.
pub fn task_rng(root: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(index);
    rng
}

pub fn small_nonzero(rng: &mut impl Rng) -> Q {
    let v = rng.gen_range(1..=3i64);
    Q::from_i64(if rng.gen_bool(0.5) { v } else { -v })
}

pub fn small_int(rng: &mut impl Rng) -> Q {
    Q::from_i64(rng.gen_range(-3..=3i64))
}

/// A relation over free edges only: `sum c * path = 0`.
#[derive(Clone, Debug)]
struct Expanded {
    label: String,
    src: SortId,
    tgt: SortId,
    terms: Vec<(Q, Vec<EdgeId>)>,
}

struct Plan {
    definitions: BTreeMap<EdgeId, (EdgeId, EdgeId)>,
    free: Vec<EdgeId>,
    relations: Vec<Expanded>,
    point_edges: Vec<EdgeId>,
}

impl Plan {
    fn new(q: &Quiver, ax: &BaseAxioms) -> Plan {
        let mut definitions = BTreeMap::new();
        for (&(g, f), &h) in q.compositions() {
            if let Composite::Edge(h) = h {
                if h != g
                    && h != f
                    && !definitions.contains_key(&h)
                    && !depends_on(&definitions, g, h)
                    && !depends_on(&definitions, f, h)
                {
                    definitions.insert(h, (g, f));
                }
            }
        }
        let free = q.edge_ids().filter(|e| !definitions.contains_key(e) && !q.edge(*e).is_identity()).collect();
        let relations = ax
            .axioms
            .iter()
            .map(|a| {
                let mut acc: BTreeMap<Vec<EdgeId>, Q> = BTreeMap::new();
                for (c, p) in &a.relation.terms {
                    let mut out = Vec::new();
                    for &e in p {
                        expand(q, &definitions, e, &mut out);
                    }
                    let entry = acc.entry(out).or_insert_with(Q::zero);
                    *entry = entry.plus(c);
                }
                Expanded {
                    label: a.label.clone(),
                    src: a.relation.src,
                    tgt: a.relation.tgt,
                    terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (c, p)).collect(),
                }
            })
            .filter(|r| !r.terms.is_empty())
            .collect();
        let point_edges = q.points().iter().map(|p| p.edge).collect();
        Plan { definitions, free, relations, point_edges }
    }
}

fn depends_on(defs: &BTreeMap<EdgeId, (EdgeId, EdgeId)>, e: EdgeId, target: EdgeId) -> bool {
    if e == target {
        return true;
    }
    match defs.get(&e) {
        Some(&(g, f)) => depends_on(defs, g, target) || depends_on(defs, f, target),
        None => false,
    }
}

fn expand(q: &Quiver, defs: &BTreeMap<EdgeId, (EdgeId, EdgeId)>, e: EdgeId, out: &mut Vec<EdgeId>) {
    if q.edge(e).is_identity() {
        return;
    }
    match defs.get(&e) {
        Some(&(g, f)) => {
            expand(q, defs, f, out);
            expand(q, defs, g, out);
        }
        None => out.push(e),
    }
}

enum FillError {
    Infeasible(String),
    Relation(String),
    Independence,
    NotExact(usize),
}

pub fn random_exact_model(q: &Quiver, dims: &Dims, seed: u64) -> Result<LinearModel, RandomModelError> {
    if dims.per_sort.len() != q.sorts().len() {
        return Err(RandomModelError::Arity(dims.per_sort.len(), q.sorts().len()));
    }
    let ax = base_axioms(q);
    let plan = Plan::new(q, &ax);
    let mut rng = task_rng(seed, 0);
    let k0 = q.coefficient();
    let mut d: Vec<usize> = q
        .sort_ids()
        .map(|s| {
            let b = dims.per_sort[s.0];
            if s == k0 {
                b.min(1)
            } else if dims.exact || b == 0 {
                b
            } else {
                rng.gen_range(1..=b)
            }
        })
        .collect();
    if d[k0.0] == 0 {
        // Without a unit nothing can be pointed; everything collapses.
        return Ok(LinearModel::zero(q));
    }
    for (vertex, comps) in q.point_components() {
        let s = q.points().iter().find(|p| p.vertex == vertex).expect("vertex has a point").sort;
        d[s.0] = d[s.0].max(comps.len());
    }
    enforce_identity_dims(q, &mut d);

    let mut failures: BTreeMap<usize, usize> = BTreeMap::new();
    let mut first_error: Option<String> = None;
    let mut stream = 1u64;
    for _ in 0..64 {
        let mut reduced = false;
        for _ in 0..8 {
            let mut sub = task_rng(seed, stream);
            stream += 1;
            match fill(q, &ax, &plan, &d, &mut sub) {
                Ok(m) => return Ok(m),
                Err(FillError::NotExact(p)) => {
                    let n = failures.entry(p).or_insert(0);
                    *n += 1;
                    if *n >= 2 {
                        let (f, _) = q.pairs()[p];
                        let mid = q.edge(f).tgt;
                        if d[mid.0] == 0 {
                            break;
                        }
                        d[mid.0] -= 1;
                        enforce_identity_dims(q, &mut d);
                        failures.clear();
                        reduced = true;
                        break;
                    }
                }
                Err(FillError::Infeasible(s)) | Err(FillError::Relation(s)) => {
                    first_error.get_or_insert(s);
                }
                Err(FillError::Independence) => {
                    first_error.get_or_insert_with(|| "component independence".into());
                }
            }
        }
        if !reduced {
            // Lower the largest non-coefficient dimension and try again.
            let Some(s) = q.sort_ids().filter(|&s| s != k0 && d[s.0] > 0).max_by_key(|s| (d[s.0], std::cmp::Reverse(s.0))) else {
                break;
            };
            d[s.0] -= 1;
            enforce_identity_dims(q, &mut d);
        }
    }
    Err(RandomModelError::Infeasible(first_error.unwrap_or_else(|| "exactness".into())))
}

/// `g o f = id` forces `dim tgt(f) >= dim src(f)`.
fn enforce_identity_dims(q: &Quiver, d: &mut [usize]) {
    for _ in 0..q.sorts().len() {
        let mut changed = false;
        for (&(_, f), &h) in q.compositions() {
            if h == Composite::Identity {
                let e = q.edge(f);
                if d[e.tgt.0] < d[e.src.0] {
                    d[e.tgt.0] = d[e.src.0];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn path_product(q: &Quiver, d: &[usize], maps: &[Option<Matrix<Q>>], src: SortId, path: &[EdgeId]) -> Option<Matrix<Q>> {
    let mut m = Matrix::identity(d[src.0]);
    for &e in path {
        m = maps[e.0].as_ref()?.mul(&m);
    }
    let _ = q;
    Some(m)
}

fn fill(q: &Quiver, ax: &BaseAxioms, plan: &Plan, d: &[usize], rng: &mut ChaCha8Rng) -> Result<LinearModel, FillError> {
    let mut maps: Vec<Option<Matrix<Q>>> = vec![None; q.edges().len()];
    for e in q.edge_ids() {
        if q.edge(e).is_identity() {
            maps[e.0] = Some(Matrix::identity(d[q.edge(e).src.0]));
        }
    }
    let mut pending: Vec<EdgeId> = plan.free.clone();
    while !pending.is_empty() {
        let mut best: Option<(bool, usize, EdgeId)> = None;
        for &e in &pending {
            let n = plan.relations.iter().filter(|r| linear_in(r, e, &maps)).count();
            let key = (plan.point_edges.contains(&e), n, e);
            let better = match best {
                None => true,
                Some((p, c, b)) => (key.0, key.1) > (p, c) || ((key.0, key.1) == (p, c) && e < b),
            };
            if better {
                best = Some(key);
            }
        }
        let (_, _, e) = best.expect("pending is non-empty");
        // Edges sharing a relation with `e` that is linear in both are solved jointly.
        let mut group = vec![e];
        for &other in &pending {
            if other != e
                && plan
                    .relations
                    .iter()
                    .any(|r| linear_in_set(r, &[e, other], &maps) && !linear_in(r, e, &maps) && mentions(r, e))
            {
                group.push(other);
            }
        }
        pending.retain(|x| !group.contains(x));
        let solved = solve_edges(q, plan, d, &maps, &group, rng)?;
        for (e, m) in group.into_iter().zip(solved) {
            maps[e.0] = Some(m);
        }
    }
    fn resolve(plan: &Plan, maps: &mut Vec<Option<Matrix<Q>>>, e: EdgeId) -> Matrix<Q> {
        if let Some(m) = &maps[e.0] {
            return m.clone();
        }
        let (g, f) = plan.definitions[&e];
        let mf = resolve(plan, maps, f);
        let mg = resolve(plan, maps, g);
        let m = mg.mul(&mf);
        maps[e.0] = Some(m.clone());
        m
    }
    let mut full = maps;
    for e in q.edge_ids() {
        resolve(plan, &mut full, e);
    }
    let maps: Vec<Matrix<Q>> = full.into_iter().map(|m| m.expect("all edges resolved")).collect();
    let model = LinearModel::new(q, d.to_vec(), maps).map_err(|e| FillError::Relation(e.to_string()))?;
    match model.check_base(q, ax) {
        Ok(()) => {}
        Err(crate::model::ModelError::Independence(_)) => return Err(FillError::Independence),
        Err(e) => return Err(FillError::Relation(e.to_string())),
    }
    if let Some(p) = model.exact_flags().iter().position(|&x| !x) {
        return Err(FillError::NotExact(p));
    }
    Ok(model)
}

/// Every term is known except for at most one occurrence of an edge of `set`,
/// and some term has one.
fn linear_in_set(r: &Expanded, set: &[EdgeId], maps: &[Option<Matrix<Q>>]) -> bool {
    let mut occurs = false;
    for (_, p) in &r.terms {
        let k = p.iter().filter(|x| set.contains(x)).count();
        if k > 1 {
            return false;
        }
        if k == 1 {
            occurs = true;
        }
        if p.iter().any(|x| !set.contains(x) && maps[x.0].is_none()) {
            return false;
        }
    }
    occurs
}

fn linear_in(r: &Expanded, e: EdgeId, maps: &[Option<Matrix<Q>>]) -> bool {
    linear_in_set(r, &[e], maps)
}

fn mentions(r: &Expanded, e: EdgeId) -> bool {
    r.terms.iter().any(|(_, p)| p.contains(&e))
}

fn solve_edges(
    q: &Quiver,
    plan: &Plan,
    d: &[usize],
    maps: &[Option<Matrix<Q>>],
    set: &[EdgeId],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Matrix<Q>>, FillError> {
    let shapes: Vec<(usize, usize)> = set.iter().map(|e| (d[q.edge(*e).tgt.0], d[q.edge(*e).src.0])).collect();
    let mut offsets = Vec::with_capacity(set.len());
    let mut n = 0;
    for (t, s) in &shapes {
        offsets.push(n);
        n += t * s;
    }
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    let mut labels: Vec<&str> = Vec::new();
    for r in plan.relations.iter().filter(|r| linear_in_set(r, set, maps)) {
        let (rt, rs) = (d[r.tgt.0], d[r.src.0]);
        let mut block = vec![vec![Q::zero(); n]; rt * rs];
        let mut constant = Matrix::<Q>::zeros(rt, rs);
        for (c, p) in &r.terms {
            match p.iter().position(|x| set.contains(x)) {
                None => {
                    let m = path_product(q, d, maps, r.src, p).expect("known path");
                    constant = constant.add(&m.scale(c));
                }
                Some(i) => {
                    let k = set.iter().position(|x| *x == p[i]).expect("member");
                    let (t, s) = shapes[k];
                    let edge = q.edge(p[i]);
                    let before = path_product(q, d, maps, r.src, &p[..i]).expect("known prefix");
                    let after = path_product(q, d, maps, edge.tgt, &p[i + 1..]).expect("known suffix");
                    // (A X B)[k][l] = sum A[k][i] X[i][j] B[j][l]
                    for kk in 0..rt {
                        for l in 0..rs {
                            let row = &mut block[kk * rs + l];
                            for ii in 0..t {
                                let a = after.get(kk, ii);
                                if a.is_zero() {
                                    continue;
                                }
                                for jj in 0..s {
                                    let b = before.get(jj, l);
                                    if b.is_zero() {
                                        continue;
                                    }
                                    let idx = offsets[k] + ii * s + jj;
                                    row[idx] = row[idx].plus(&c.times(&a.times(b)));
                                }
                            }
                        }
                    }
                }
            }
        }
        for kk in 0..rt {
            for l in 0..rs {
                rows.push(std::mem::take(&mut block[kk * rs + l]));
                rhs.push(constant.get(kk, l).negated());
                labels.push(&r.label);
            }
        }
    }
    let x = if n == 0 {
        Vec::new()
    } else {
        let (particular, kernel) = if rows.is_empty() {
            let basis = (0..n)
                .map(|i| {
                    let mut v = vec![Q::zero(); n];
                    v[i] = Q::one();
                    v
                })
                .collect::<Vec<_>>();
            (vec![Q::zero(); n], basis)
        } else {
            let a = Matrix::from_rows(rows, n);
            let Some(x0) = a.solve(&rhs) else {
                let first = labels.first().copied().unwrap_or("?");
                let names: Vec<&str> = set.iter().map(|e| q.edge_name(*e)).collect();
                return Err(FillError::Infeasible(format!("{first} (solving for {})", names.join(", "))));
            };
            (x0, a.kernel())
        };
        let mut x = particular;
        for k in &kernel {
            let r = small_nonzero(rng);
            for (xi, ki) in x.iter_mut().zip(k) {
                if !ki.is_zero() {
                    *xi = xi.plus(&r.times(ki));
                }
            }
        }
        x
    };
    Ok(shapes.iter().zip(&offsets).map(|(&(t, s), &o)| Matrix::from_vec(t, s, x[o..o + t * s].to_vec())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use quiver_core::parse_quiver;

    #[test]
    fn single_pair_rank_matches_kernel() {
        let q = parse_quiver(
            "sort A = homology X _ 0\nsort B = homology Y _ 0\nsort C = homology Z _ 0\n\
             edge functorial f : A -> B over f\nedge functorial g : B -> C over g\npair f g\n",
        )
        .unwrap();
        let (a, b, c) = (q.sort_by_name("A").unwrap(), q.sort_by_name("B").unwrap(), q.sort_by_name("C").unwrap());
        let mut per = vec![1; q.sorts().len()];
        per[a.0] = 2;
        per[b.0] = 3;
        per[c.0] = 2;
        let m = random_exact_model(&q, &Dims::exact(per), 7).unwrap();
        let f = m.map(q.edge_by_name("f").unwrap());
        let g = m.map(q.edge_by_name("g").unwrap());
        let ker_g = m.dim(b) - g.rank();
        assert_eq!(f.rank(), ker_g);
        assert!(m.is_exact());
    }

    #[test]
    fn zero_dims_give_zero_model() {
        let q = parse_quiver("sort A = homology X _ 0\nsort B = homology Y _ 0\nedge functorial f : A -> B over f\n").unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 0), 1).unwrap();
        assert!(m.dims().iter().all(|&d| d == 0));
    }

    #[test]
    fn deterministic_in_seed() {
        let q = parse_quiver(include_str!("../../../data/nori3.qv")).unwrap();
        let a = random_exact_model(&q, &Dims::uniform(&q, 4), 11).unwrap();
        let b = random_exact_model(&q, &Dims::uniform(&q, 4), 11).unwrap();
        assert_eq!(a, b);
        assert!(a.is_exact());
    }
}

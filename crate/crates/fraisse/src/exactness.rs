//! Semantic checks on a single model: preimages along distinguished pairs and
//! surjectivity onto solution sets.

use presentation::Presentation;
use quiver_core::{Context, EdgeId, Field, Matrix, Quiver, Term, Q};
use rand::Rng;
use sequent_engine::closure::Universe;
use sequent_engine::eval::affine_form;
use sequent_engine::saturate::UNIVERSE_CAP;
use sequent_engine::{task_rng, LinearModel};
use serde::Serialize;

use crate::FraisseError;

/// Path length of the terms tested against a preimage.
const TERM_DEPTH: usize = 3;

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(Q::to_string).collect()
}

fn combination<R: Rng>(basis: &[Vec<Q>], n: usize, range: i64, rng: &mut R) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for b in basis {
        let c = Q::from_i64(rng.gen_range(-range..=range));
        for (o, x) in out.iter_mut().zip(b) {
            *o = o.plus(&c.times(x));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FibreRecord {
    pub y: Vec<String>,
    pub preimage: Option<Vec<String>>,
    /// Every tested term vanishing at the preimage vanishes on the whole fibre.
    pub generic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongExactnessReport {
    pub pair: usize,
    pub terms: usize,
    pub fibres: Vec<FibreRecord>,
    pub preimages_exist: bool,
    pub generic: bool,
}

/// Samples `y` in the kernel of `H(g)` and looks for a preimage under `H(f)`
/// at which no tested term vanishes unless it vanishes on the whole fibre.
pub fn strong_exactness_check(q: &Quiver, h: &LinearModel, pair: usize, samples: usize, seed: u64) -> StrongExactnessReport {
    let (f, g) = q.pairs()[pair];
    let src = q.edge(f).src;
    let ctx = Context::single("x", src);
    let u = Universe::build(q, &ctx, TERM_DEPTH, UNIVERSE_CAP);
    let mut rng = task_rng(seed, pair as u64);
    let mut terms: Vec<Term> = Vec::new();
    for s in q.sort_ids() {
        let n = u.sort_size(s);
        for i in 0..n {
            let mut e = vec![Q::zero(); n];
            e[i] = Q::one();
            terms.push(u.term(q, s, &e));
        }
        if n > 1 {
            for _ in 0..2 {
                let v: Vec<Q> = (0..n).map(|_| sequent_engine::random::small_int(&mut rng)).collect();
                terms.push(u.term(q, s, &v));
            }
        }
    }
    let n = h.dim(src);
    let forms: Vec<(Matrix<Q>, Vec<Q>)> = terms.iter().map(|t| affine_form(q, h, t, &[0], n)).collect();
    let fibre_kernel = h.map(f).kernel();
    let kernel = h.map(g).kernel();
    let mut fibres = Vec::new();
    for _ in 0..samples {
        let y = combination(&kernel, h.dim(q.edge(g).src), 3, &mut rng);
        let Some(x0) = h.map(f).solve(&y) else {
            fibres.push(FibreRecord { y: strings(&y), preimage: None, generic: false });
            continue;
        };
        // A term that vanishes at x but not along the kernel of f separates x
        // from another preimage.
        let generic_at = |x: &[Q]| {
            forms.iter().all(|(a, c)| {
                let vanishes = a.mul_vec(x).iter().zip(c).all(|(p, q)| p.plus(q).is_zero());
                !vanishes || fibre_kernel.iter().all(|k| a.mul_vec(k).iter().all(Q::is_zero))
            })
        };
        let mut found = None;
        for _ in 0..16 {
            let k = combination(&fibre_kernel, n, 1000, &mut rng);
            let x: Vec<Q> = x0.iter().zip(&k).map(|(a, b)| a.plus(b)).collect();
            if generic_at(&x) {
                found = Some(x);
                break;
            }
        }
        let generic = found.is_some();
        let x = found.unwrap_or(x0);
        fibres.push(FibreRecord { y: strings(&y), preimage: Some(strings(&x)), generic });
    }
    let preimages_exist = fibres.iter().all(|r| r.preimage.is_some());
    let generic = fibres.iter().all(|r| r.generic);
    StrongExactnessReport { pair, terms: terms.len(), fibres, preimages_exist, generic }
}

/// Whether `H(f)` maps onto the solutions of `psi` in `H`, where `psi` has a
/// single variable of the target sort of `f`.
pub fn surjectivity_check(q: &Quiver, h: &LinearModel, f: EdgeId, psi: &Presentation) -> Result<bool, FraisseError> {
    let tgt = q.edge(f).tgt;
    if psi.context.len() != 1 || psi.context.0[0].sort != tgt {
        return Err(FraisseError::Context(format!("expected one variable of sort {}", q.sort_name(tgt))));
    }
    let n = h.dim(tgt);
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    for t in &psi.generators {
        let (a, c) = affine_form(q, h, t, &[0], n);
        for r in 0..a.rows() {
            rows.push(a.row(r).to_vec());
            rhs.push(c[r].negated());
        }
    }
    let system = Matrix::from_rows(rows, n);
    let (particular, directions) = if system.rows() == 0 {
        (vec![Q::zero(); n], Matrix::<Q>::identity(n).col_vecs())
    } else {
        match system.solve(&rhs) {
            Some(x) => (x, system.kernel()),
            // No solutions at all: vacuously onto.
            None => return Ok(true),
        }
    };
    let image = h.map(f);
    Ok(image.solve(&particular).is_some() && directions.iter().all(|d| image.solve(d).is_some()))
}

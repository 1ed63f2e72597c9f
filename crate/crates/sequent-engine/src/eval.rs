//! Satisfaction of sequents in rational representations.
//!
//! The context is stacked into one vector. Premises cut out an affine subspace
//! `v0 + ker`, and an equational conclusion holds iff it vanishes on `v0` and
//! on every kernel direction.

use quiver_core::{AlgebraicSequent, Atom, Conclusion, Field, Matrix, Quiver, Term, Q};

use crate::model::{Assignment, LinearModel, ModelError};

/// Column offsets of each context variable in the stacked vector.
fn offsets(m: &LinearModel, s: &AlgebraicSequent) -> (Vec<usize>, usize) {
    let mut out = Vec::with_capacity(s.context.len());
    let mut n = 0;
    for v in &s.context.0 {
        out.push(n);
        n += m.dim(v.sort);
    }
    (out, n)
}

/// `t(x) = A x + c` over the stacked context vector.
pub fn affine_form(q: &Quiver, m: &LinearModel, t: &Term, offs: &[usize], n: usize) -> (Matrix<Q>, Vec<Q>) {
    let rows = m.dim(t.target());
    let mut a = Matrix::<Q>::zeros(rows, n);
    let mut c = vec![Q::zero(); rows];
    for (mono, coef) in t.body() {
        match mono.atom {
            Atom::Unit => {
                let v = m.apply_path(&mono.path, &m.unit(q));
                for (ci, vi) in c.iter_mut().zip(&v) {
                    *ci = ci.plus(&coef.times(vi));
                }
            }
            Atom::Var(i) => {
                let src = t.context().sort(i);
                let pm = m.path_matrix(q, src, &mono.path);
                for r in 0..rows {
                    for k in 0..pm.cols() {
                        let x = pm.get(r, k);
                        if !x.is_zero() {
                            let cur = a.get(r, offs[i] + k).plus(&coef.times(x));
                            a.set(r, offs[i] + k, cur);
                        }
                    }
                }
            }
        }
    }
    (a, c)
}

fn split(m: &LinearModel, s: &AlgebraicSequent, x: &[Q], offs: &[usize]) -> Assignment {
    s.context.0.iter().zip(offs).map(|(v, &o)| x[o..o + m.dim(v.sort)].to_vec()).collect()
}

/// `None` when the sequent holds, otherwise an assignment satisfying the premises
/// but not the conclusion.
pub fn counterexample(q: &Quiver, m: &LinearModel, s: &AlgebraicSequent) -> Result<Option<Assignment>, ModelError> {
    if m.dims().len() != q.sorts().len() || s.context.0.iter().any(|v| v.sort.0 >= m.dims().len()) {
        return Err(ModelError::Assignment);
    }
    if s.diers.iter().any(|d| !d.terms.is_empty()) {
        // Rational values are never transcendental.
        return Ok(None);
    }
    let (offs, n) = offsets(m, s);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for p in s.live_premises() {
        let (a, c) = affine_form(q, m, p, &offs, n);
        for r in 0..a.rows() {
            rows.push(a.row(r).to_vec());
            rhs.push(c[r].negated());
        }
    }
    let system = Matrix::from_rows(rows, n);
    let v0 = if system.rows() == 0 { Some(vec![Q::zero(); n]) } else { system.solve(&rhs) };
    let Some(v0) = v0 else {
        return Ok(None);
    };
    let failing = match &s.conclusion {
        Conclusion::Bottom => Some(v0),
        Conclusion::Diers(d) if d.terms.is_empty() => None,
        Conclusion::Diers(_) => Some(v0),
        Conclusion::Eq(t) => {
            let (a, c) = affine_form(q, m, t, &offs, n);
            let at_v0: Vec<Q> = a.mul_vec(&v0).iter().zip(&c).map(|(x, y)| x.plus(y)).collect();
            if at_v0.iter().any(|x| !x.is_zero()) {
                Some(v0)
            } else {
                let kernel = if system.rows() == 0 {
                    (0..n)
                        .map(|i| {
                            let mut e = vec![Q::zero(); n];
                            e[i] = Q::one();
                            e
                        })
                        .collect()
                } else {
                    system.kernel()
                };
                kernel
                    .into_iter()
                    .find(|k| a.mul_vec(k).iter().any(|x| !x.is_zero()))
                    .map(|k| v0.iter().zip(&k).map(|(x, y)| x.plus(y)).collect())
            }
        }
    };
    Ok(failing.map(|x| split(m, s, &x, &offs)))
}

pub fn eval_sequent(q: &Quiver, m: &LinearModel, s: &AlgebraicSequent) -> Result<bool, ModelError> {
    counterexample(q, m, s).map(|c| c.is_none())
}

/// Premises hold and the conclusion fails at this particular assignment.
pub fn fails_at(q: &Quiver, m: &LinearModel, s: &AlgebraicSequent, a: &Assignment) -> Result<bool, ModelError> {
    m.check_assignment(&s.context, a)?;
    if s.diers.iter().any(|d| !d.terms.is_empty()) {
        return Ok(false);
    }
    if s.live_premises().any(|p| m.eval_term(q, p, a).iter().any(|x| !x.is_zero())) {
        return Ok(false);
    }
    Ok(match &s.conclusion {
        Conclusion::Bottom => true,
        Conclusion::Diers(d) => !d.terms.is_empty(),
        Conclusion::Eq(t) => m.eval_term(q, t, a).iter().any(|x| !x.is_zero()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_exact_model, Dims};
    use quiver_core::{parse_quiver, parse_sequent};

    #[test]
    fn nonzero_sort_refutes_vanishing() {
        let q = parse_quiver("sort A = homology X _ 0\nsort B = homology Y _ 0\nedge functorial f : A -> B over f\n").unwrap();
        let s = parse_sequent("context x : A\nconclude x = 0\n", &q).unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 2), 3).unwrap();
        let c = counterexample(&q, &m, &s).unwrap().unwrap();
        assert!(fails_at(&q, &m, &s, &c).unwrap());
    }

    #[test]
    fn complex_condition_holds_on_exact_models() {
        let q = parse_quiver(include_str!("../../../data/nori3.qv")).unwrap();
        let s = parse_sequent("context x : YZ1\nconclude b1(a1(x)) = 0\n", &q).unwrap();
        for seed in 0..5 {
            let m = random_exact_model(&q, &Dims::uniform(&q, 3), seed).unwrap();
            assert!(eval_sequent(&q, &m, &s).unwrap());
        }
    }

    #[test]
    fn inconsistent_premises_hold_vacuously() {
        let q = parse_quiver("sort A = homology X _ 0\npoint X.x component c\n").unwrap();
        let s = parse_sequent("context y : A\npremise 1 = 0\nconclude bottom\n", &q).unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 2), 0).unwrap();
        assert!(eval_sequent(&q, &m, &s).unwrap());
    }
}

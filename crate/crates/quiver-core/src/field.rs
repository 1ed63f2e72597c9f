//! Rational function fields `Q(a_1, ..., a_k)` over named transcendentals.
//!
//! Polynomials are sparse maps from exponent vectors to rational coefficients.
//! Exponent vectors are kept trimmed (no trailing zeros) so that the derived
//! `Ord` on `Vec<u32>` is the lexicographic monomial order with `a_1 > a_2 > ...`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::scalar::{Field, Q};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, Q>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn add_exp(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)).collect()
}

fn divides_exp(a: &[u32], b: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &x)| x <= b.get(i).copied().unwrap_or(0))
}

fn sub_exp(b: &[u32], a: &[u32]) -> Vec<u32> {
    trim((0..b.len()).map(|i| b[i] - a.get(i).copied().unwrap_or(0)).collect())
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Q) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Poly {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        let mut p = Poly::zero();
        p.terms.insert(e, Q::one());
        p
    }

    pub fn monomial(exp: Vec<u32>, c: Q) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(trim(exp), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Indices of variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> =
            self.terms.keys().flat_map(|e| e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry = entry.plus(&c);
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(add_exp(e1, e2), c1.times(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, x)| (e.clone(), x.times(c))).collect() }
    }

    /// Multivariate division by leading terms; returns `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let (le, lc) = d.leading().expect("division by zero polynomial");
        let (le, lc) = (le.clone(), lc.clone());
        let mut q = Poly::zero();
        let mut r = Poly::zero();
        let mut p = self.clone();
        while let Some((pe, pc)) = p.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if divides_exp(&le, &pe) {
                let t = Poly::monomial(sub_exp(&pe, &le), pc.divided(&lc));
                q = q.add(&t);
                p = p.sub(&t.mul(d));
            } else {
                r.add_term(pe.clone(), pc.clone());
                p.terms.remove(&pe);
            }
        }
        (q, r)
    }

    /// `Some(self / d)` when the division is exact.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Largest monomial dividing every term.
    fn monomial_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Vec::new();
        };
        let mut m = first.clone();
        for e in it {
            for (i, x) in m.iter_mut().enumerate() {
                *x = (*x).min(e.get(i).copied().unwrap_or(0));
            }
        }
        trim(m)
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(trim(ne), c.times(&Q::from_i64(k as i64)));
        }
        out
    }

    fn make_monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inverse()),
            None => Poly::zero(),
        }
    }

    /// Evaluates at rational values for the variables (missing ones count as 0).
    pub fn eval(&self, at: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                let v = at.get(i).cloned().unwrap_or_else(Q::zero);
                for _ in 0..k {
                    t = t.times(&v);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let n = names.get(i).cloned().unwrap_or_else(|| format!("a{}", i + 1));
                    if k == 1 {
                        n
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            let s = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if c.negated().is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", c, mono.join("*"))
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// Univariate gcd by Euclid; both inputs must involve at most variable `v`.
fn univariate_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.make_monic()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A quotient of polynomials with nonzero, monic-led denominator.
#[derive(Clone)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFunc { num, den };
        r.normalize();
        r
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::constant(Q::one()) }
    }

    pub fn var(i: usize) -> RatFunc {
        RatFunc::from_poly(Poly::var(i))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn as_constant(&self) -> Option<Q> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n.divided(&d))
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::constant(Q::one());
            return;
        }
        let mn = self.num.monomial_content();
        let md = self.den.monomial_content();
        let common: Vec<u32> = trim((0..mn.len().min(md.len())).map(|i| mn[i].min(md[i])).collect());
        if !common.is_empty() {
            let m = Poly::monomial(common, Q::one());
            self.num = self.num.exact_div(&m).expect("monomial content divides");
            self.den = self.den.exact_div(&m).expect("monomial content divides");
        }
        if self.den.as_constant().is_none() {
            if let Some(q) = self.num.exact_div(&self.den) {
                self.num = q;
                self.den = Poly::constant(Q::one());
            } else {
                let vn = self.num.variables();
                let vd = self.den.variables();
                let single = vd.len() == 1 && vn.iter().all(|v| *v == vd[0]);
                if single {
                    let g = univariate_gcd(&self.num, &self.den);
                    if g.as_constant().is_none() {
                        self.num = self.num.exact_div(&g).expect("gcd divides");
                        self.den = self.den.exact_div(&g).expect("gcd divides");
                    }
                } else if let Some(q) = self.den.exact_div(&self.num) {
                    self.den = q;
                    self.num = Poly::constant(Q::one());
                }
            }
        }
        let lc = self.den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.inverse();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn derivative(&self, var: usize) -> RatFunc {
        let n = self.num.derivative(var).mul(&self.den).sub(&self.num.mul(&self.den.derivative(var)));
        RatFunc::new(n, self.den.mul(&self.den))
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            self.num.fmt_with(names)
        } else {
            format!("({})/({})", self.num.fmt_with(names), self.den.fmt_with(names))
        }
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &RatFunc) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(Poly::constant(Q::one()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }
    fn times(&self, o: &Self) -> Self {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn negated(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }
    fn from_q(q: &Q) -> Self {
        RatFunc::from_poly(Poly::constant(q.clone()))
    }
}

/// `Q(a_1, ..., a_k)` with the `a_i` algebraically independent.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoefficientField {
    pub generators: Vec<String>,
}

impl CoefficientField {
    pub fn rationals() -> Self {
        CoefficientField { generators: Vec::new() }
    }

    pub fn with_generators<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        CoefficientField { generators: names.into_iter().map(Into::into).collect() }
    }

    pub fn transcendence_degree(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, i: usize) -> RatFunc {
        assert!(i < self.generators.len(), "generator index out of range");
        RatFunc::var(i)
    }

    pub fn constant(&self, q: &Q) -> RatFunc {
        RatFunc::from_q(q)
    }

    pub fn display(&self, x: &RatFunc) -> String {
        x.fmt_with(&self.generators)
    }

    /// Jacobian matrix `d x_i / d a_j` of the given elements.
    pub fn jacobian(&self, xs: &[RatFunc]) -> Matrix<RatFunc> {
        let k = self.generators.len();
        let rows = xs.iter().map(|x| (0..k).map(|j| x.derivative(j)).collect()).collect();
        Matrix::from_rows(rows, k)
    }

    /// Algebraic independence over `Q` via the Jacobian criterion (characteristic 0).
    pub fn are_independent(&self, xs: &[RatFunc]) -> bool {
        if xs.len() > self.generators.len() {
            return false;
        }
        xs.is_empty() || self.jacobian(xs).rank() == xs.len()
    }

    /// Indices of a maximal algebraically independent subset, scanning left to right.
    pub fn max_independent_subset(&self, xs: &[RatFunc]) -> Vec<usize> {
        if xs.is_empty() {
            return Vec::new();
        }
        self.jacobian(xs).transpose().independent_columns()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> RatFunc {
        RatFunc::var(0)
    }
    fn y() -> RatFunc {
        RatFunc::var(1)
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::from_q(&Q::from_i64(n))
    }

    #[test]
    fn cancels_univariate_common_factor() {
        // (x^2 - 1) / (x - 1) = x + 1
        let n = x().times(&x()).minus(&c(1));
        let d = x().minus(&c(1));
        let r = n.divided(&d);
        assert_eq!(r.den().as_constant(), Some(Q::one()));
        assert_eq!(r, x().plus(&c(1)));
    }

    #[test]
    fn field_identities() {
        let a = x().plus(&y()).divided(&x().minus(&y()));
        assert!(a.minus(&a).is_zero());
        assert!(a.times(&a.inverse()).is_one());
        assert_eq!(a.plus(&c(1)), x().times(&c(2)).divided(&x().minus(&y())));
    }

    #[test]
    fn derivative_of_quotient() {
        let f = c(1).divided(&x());
        assert_eq!(f.derivative(0), c(-1).divided(&x().times(&x())));
    }

    #[test]
    fn jacobian_independence() {
        let k = CoefficientField::with_generators(["a", "b"]);
        let a = k.generator(0);
        let b = k.generator(1);
        assert!(k.are_independent(&[a.clone(), b.clone()]));
        assert!(!k.are_independent(&[a.clone(), a.times(&a)]));
        assert!(!k.are_independent(&[c(3)]));
        let s = k.max_independent_subset(&[a.clone(), a.times(&c(2)), b.clone()]);
        assert_eq!(s, vec![0, 2]);
    }

    #[test]
    fn display_uses_names() {
        let k = CoefficientField::with_generators(["t"]);
        let e = k.generator(0).times(&c(2)).plus(&c(1));
        assert_eq!(k.display(&e), "2*t + 1");
    }
}

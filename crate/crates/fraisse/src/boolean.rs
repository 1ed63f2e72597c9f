//! Finite Boolean algebras, stored by their atoms. A homomorphism
//! `2^m -> 2^n` is a map from the `n` target atoms to the `m` source atoms:
//! each target atom lies below exactly one source atom. It is injective iff
//! that map is onto.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use sequent_engine::task_rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::category::{Amalgamation, Extension, FiniteStructureCategory, Problem, Span};
use crate::chain::Chain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteBa {
    pub atoms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaHom {
    pub src_atoms: usize,
    /// For each target atom, the source atom above it.
    pub below: Vec<usize>,
}

impl BaHom {
    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.src_atoms];
        for &a in &self.below {
            hit[a] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Image of an element given as a set of source atoms.
    pub fn apply(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.below.len());
        for (t, &s) in self.below.iter().enumerate() {
            if x.contains(s) {
                out.insert(t);
            }
        }
        out
    }
}

/// Boolean algebras with all homomorphisms (`injective = false`) or with the
/// injective ones only.
#[derive(Clone, Copy, Debug)]
pub struct BooleanAlgebras {
    pub injective: bool,
}

fn random_onto<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(n >= k);
    let mut map: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    map.shuffle(rng);
    map
}

impl FiniteStructureCategory for BooleanAlgebras {
    type Object = FiniteBa;
    type Arrow = BaHom;

    fn name(&self) -> &'static str {
        if self.injective {
            "boolean"
        } else {
            "boolean-plain"
        }
    }

    fn initial(&self) -> Option<FiniteBa> {
        Some(FiniteBa { atoms: 1 })
    }

    fn from_initial(&self, a: &FiniteBa) -> Option<BaHom> {
        (a.atoms > 0 || !self.injective).then(|| BaHom { src_atoms: 1, below: vec![0; a.atoms] })
    }

    fn identity(&self, a: &FiniteBa) -> BaHom {
        BaHom { src_atoms: a.atoms, below: (0..a.atoms).collect() }
    }

    fn compose(&self, f: &BaHom, g: &BaHom) -> BaHom {
        BaHom { src_atoms: f.src_atoms, below: g.below.iter().map(|&t| f.below[t]).collect() }
    }

    fn is_arrow(&self, f: &BaHom, src: &FiniteBa, dst: &FiniteBa) -> bool {
        f.src_atoms == src.atoms
            && f.below.len() == dst.atoms
            && f.below.iter().all(|&a| a < src.atoms)
            && (!self.injective || f.is_injective())
    }

    fn sample_object<R: Rng>(&self, rng: &mut R) -> FiniteBa {
        FiniteBa { atoms: rng.gen_range(1..=4) }
    }

    fn sample_arrow_from<R: Rng>(&self, a: &FiniteBa, rng: &mut R) -> (FiniteBa, BaHom) {
        if !self.injective && rng.gen_bool(0.3) {
            let n = rng.gen_range(1..=4);
            let below = (0..n).map(|_| rng.gen_range(0..a.atoms.max(1))).collect();
            return (FiniteBa { atoms: n }, BaHom { src_atoms: a.atoms, below });
        }
        let mut below = Vec::new();
        for s in 0..a.atoms {
            for _ in 0..rng.gen_range(1..=3) {
                below.push(s);
            }
        }
        below.shuffle(rng);
        (FiniteBa { atoms: below.len() }, BaHom { src_atoms: a.atoms, below })
    }

    fn sample_arrow_into<R: Rng>(&self, u: &FiniteBa, rng: &mut R) -> (FiniteBa, BaHom) {
        let k = rng.gen_range(1..=u.atoms.clamp(1, 3));
        if u.atoms == 0 {
            return (FiniteBa { atoms: k }, BaHom { src_atoms: k, below: Vec::new() });
        }
        (FiniteBa { atoms: k }, BaHom { src_atoms: k, below: random_onto(u.atoms, k, rng) })
    }

    /// The pushout: atoms of `d` are the pairs of atoms of `b` and `c` lying
    /// over the same atom of `a`.
    fn amalgamate(&self, s: &Span<Self>) -> Amalgamation<Self> {
        let (mut f2, mut g2) = (Vec::new(), Vec::new());
        for (i, &x) in s.f.below.iter().enumerate() {
            for (j, &y) in s.g.below.iter().enumerate() {
                if x == y {
                    f2.push(i);
                    g2.push(j);
                }
            }
        }
        let d = FiniteBa { atoms: f2.len() };
        Amalgamation::Amalgamated {
            d,
            f2: BaHom { src_atoms: s.b.atoms, below: f2 },
            g2: BaHom { src_atoms: s.c.atoms, below: g2 },
            certificate: json!("fibre product of atoms"),
        }
    }

    /// Each fibre of `χ` over an atom of `a` must be shared out among the
    /// atoms of `b` over it, onto when injectivity is required.
    fn extend(&self, p: &Problem<Self>, u: &FiniteBa) -> Extension<BaHom> {
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); p.a.atoms];
        for (t, &s) in p.j.below.iter().enumerate() {
            parts[s].push(t);
        }
        let mut fibre_sizes = vec![0usize; p.a.atoms];
        for &s in &p.chi.below {
            fibre_sizes[s] += 1;
        }
        for (s, ps) in parts.iter().enumerate() {
            let blocked = if self.injective { fibre_sizes[s] < ps.len() } else { ps.is_empty() && fibre_sizes[s] > 0 };
            if blocked {
                return Extension::Failed(json!({
                    "atom": s,
                    "fibre_in_target": fibre_sizes[s],
                    "parts_in_extension": ps.len(),
                }));
            }
        }
        let mut used = vec![0usize; p.a.atoms];
        let below = p
            .chi
            .below
            .iter()
            .map(|&s| {
                let k = used[s];
                used[s] += 1;
                parts[s][k.min(parts[s].len() - 1)]
            })
            .collect();
        debug_assert_eq!(u.atoms, p.chi.below.len());
        Extension::Extended(BaHom { src_atoms: p.b.atoms, below })
    }

    /// Split every atom in two.
    fn growth_problems(&self, u: &FiniteBa) -> Vec<Problem<Self>> {
        let b = FiniteBa { atoms: 2 * u.atoms };
        let j = BaHom { src_atoms: u.atoms, below: (0..b.atoms).map(|t| t / 2).collect() };
        vec![Problem { a: *u, b, j, chi: self.identity(u) }]
    }

    fn object_json(&self, a: &FiniteBa) -> Value {
        json!({ "atoms": a.atoms })
    }

    fn arrow_json(&self, f: &BaHom) -> Value {
        json!({ "src_atoms": f.src_atoms, "below": f.below })
    }
}

fn random_element<R: Rng>(atoms: usize, rng: &mut R) -> FixedBitSet {
    let mut x = FixedBitSet::with_capacity(atoms);
    for i in 0..atoms {
        x.set(i, rng.gen_bool(0.5));
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub stage: usize,
    pub sampled: usize,
    pub split: usize,
}

impl SplitReport {
    pub fn fraction(&self) -> f64 {
        if self.sampled == 0 {
            1.0
        } else {
            self.split as f64 / self.sampled as f64
        }
    }
}

/// Samples nonzero elements of the second-to-last stage and checks each has
/// a proper nonzero part in the last one.
pub fn split_report(chain: &Chain<BooleanAlgebras>, samples: usize, seed: u64) -> SplitReport {
    let last = chain.stages.len() - 1;
    let stage = last.saturating_sub(1);
    let atoms = chain.stages[stage].atoms;
    let link = chain.link(stage, last);
    let mut split = 0;
    let mut sampled = 0;
    let mut rng = task_rng(seed, 0);
    while sampled < samples && atoms > 0 {
        let x = random_element(atoms, &mut rng);
        if x.count_ones(..) == 0 {
            continue;
        }
        sampled += 1;
        if link.apply(&x).count_ones(..) >= 2 {
            split += 1;
        }
    }
    SplitReport { stage, sampled, split }
}

/// Boolean terms over a few variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaTerm {
    Var(usize),
    Zero,
    One,
    Not(Box<BaTerm>),
    Meet(Box<BaTerm>, Box<BaTerm>),
    Join(Box<BaTerm>, Box<BaTerm>),
}

impl BaTerm {
    fn random<R: Rng>(vars: usize, depth: usize, rng: &mut R) -> BaTerm {
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..6) {
                0 => BaTerm::Zero,
                1 => BaTerm::One,
                _ => BaTerm::Var(rng.gen_range(0..vars)),
            };
        }
        match rng.gen_range(0..3) {
            0 => BaTerm::Not(Box::new(BaTerm::random(vars, depth - 1, rng))),
            1 => BaTerm::Meet(Box::new(BaTerm::random(vars, depth - 1, rng)), Box::new(BaTerm::random(vars, depth - 1, rng))),
            _ => BaTerm::Join(Box::new(BaTerm::random(vars, depth - 1, rng)), Box::new(BaTerm::random(vars, depth - 1, rng))),
        }
    }

    /// Value at one atom, given which variables contain it.
    fn at(&self, bits: &[bool]) -> bool {
        match self {
            BaTerm::Var(i) => bits[*i],
            BaTerm::Zero => false,
            BaTerm::One => true,
            BaTerm::Not(t) => !t.at(bits),
            BaTerm::Meet(a, b) => a.at(bits) && b.at(bits),
            BaTerm::Join(a, b) => a.at(bits) || b.at(bits),
        }
    }

    fn eval(&self, atoms: usize, xs: &[FixedBitSet]) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(atoms);
        for a in 0..atoms {
            let bits: Vec<bool> = xs.iter().map(|x| x.contains(a)).collect();
            out.set(a, self.at(&bits));
        }
        out
    }

    pub fn display(&self) -> String {
        match self {
            BaTerm::Var(i) => format!("x{i}"),
            BaTerm::Zero => "0".into(),
            BaTerm::One => "1".into(),
            BaTerm::Not(t) => format!("¬{}", t.display()),
            BaTerm::Meet(a, b) => format!("({} ∧ {})", a.display(), b.display()),
            BaTerm::Join(a, b) => format!("({} ∨ {})", a.display(), b.display()),
        }
    }
}

/// `s1 = t1, ..., sk = tk ⊢ s = t` over Boolean terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaSequent {
    pub vars: usize,
    pub premises: Vec<(BaTerm, BaTerm)>,
    pub conclusion: (BaTerm, BaTerm),
}

impl BaSequent {
    pub fn random<R: Rng>(rng: &mut R) -> BaSequent {
        let vars = rng.gen_range(1..=3);
        let eq = |rng: &mut R| (BaTerm::random(vars, 2, rng), BaTerm::random(vars, 2, rng));
        let premises = (0..rng.gen_range(0..=2)).map(|_| eq(rng)).collect();
        BaSequent { vars, premises, conclusion: eq(rng) }
    }

    fn holds_pointwise(&self, bits: &[bool]) -> bool {
        let ok = |(s, t): &(BaTerm, BaTerm)| s.at(bits) == t.at(bits);
        !self.premises.iter().all(ok) || ok(&self.conclusion)
    }

    /// Validity in the algebra with `atoms` atoms. Equations are checked atom
    /// by atom and every pattern of variable memberships occurs at some atom
    /// for a suitable assignment, so a nontrivial algebra fails the sequent
    /// exactly when a single pattern does.
    pub fn holds_in(&self, a: &FiniteBa) -> bool {
        if a.atoms == 0 {
            return true;
        }
        (0..1usize << self.vars).all(|m| {
            let bits: Vec<bool> = (0..self.vars).map(|i| m >> i & 1 == 1).collect();
            self.holds_pointwise(&bits)
        })
    }

    /// Whether the sequent holds at one assignment.
    pub fn holds_at(&self, a: &FiniteBa, xs: &[FixedBitSet]) -> bool {
        let eq = |(s, t): &(BaTerm, BaTerm)| s.eval(a.atoms, xs) == t.eval(a.atoms, xs);
        !self.premises.iter().all(eq) || eq(&self.conclusion)
    }

    /// A random assignment in `a`.
    pub fn sample_assignment<R: Rng>(&self, a: &FiniteBa, rng: &mut R) -> Vec<FixedBitSet> {
        (0..self.vars).map(|_| random_element(a.atoms, rng)).collect()
    }

    pub fn display(&self) -> String {
        let eq = |(s, t): &(BaTerm, BaTerm)| format!("{} = {}", s.display(), t.display());
        let prem: Vec<String> = self.premises.iter().map(eq).collect();
        format!("{} ⊢ {}", if prem.is_empty() { "⊤".to_string() } else { prem.join(" ∧ ") }, eq(&self.conclusion))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub sequents: usize,
    pub agree: usize,
    pub valid: usize,
    pub disagreements: Vec<String>,
}

/// Evaluates `samples` random sequents on the last stages of two chains.
pub fn agreement(left: &FiniteBa, right: &FiniteBa, samples: usize, seed: u64) -> AgreementReport {
    let mut report = AgreementReport { sequents: samples, agree: 0, valid: 0, disagreements: Vec::new() };
    let mut rng = task_rng(seed, 0);
    for _ in 0..samples {
        let s = BaSequent::random(&mut rng);
        let (l, r) = (s.holds_in(left), s.holds_in(right));
        if l == r {
            report.agree += 1;
            report.valid += usize::from(l);
        } else {
            report.disagreements.push(s.display());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pushout_of_splittings() {
        let cat = BooleanAlgebras { injective: true };
        let a = FiniteBa { atoms: 1 };
        let f = BaHom { src_atoms: 1, below: vec![0, 0] };
        let g = BaHom { src_atoms: 1, below: vec![0, 0, 0] };
        let span = Span { a, b: FiniteBa { atoms: 2 }, f, c: FiniteBa { atoms: 3 }, g };
        let Amalgamation::Amalgamated { d, .. } = cat.amalgamate(&span) else { panic!() };
        assert_eq!(d.atoms, 6);
    }

    #[test]
    fn an_atom_cannot_be_split_inside_itself() {
        let cat = BooleanAlgebras { injective: true };
        let u = FiniteBa { atoms: 3 };
        let p = cat.growth_problems(&u).remove(0);
        assert!(matches!(cat.extend(&p, &u), Extension::Failed(_)));
        let plain = BooleanAlgebras { injective: false };
        assert!(matches!(plain.extend(&p, &u), Extension::Extended(_)));
    }

    #[test]
    fn excluded_middle_is_valid() {
        let s = BaSequent {
            vars: 1,
            premises: vec![],
            conclusion: (BaTerm::Join(Box::new(BaTerm::Var(0)), Box::new(BaTerm::Not(Box::new(BaTerm::Var(0))))), BaTerm::One),
        };
        assert!(s.holds_in(&FiniteBa { atoms: 5 }));
        let t = BaSequent { vars: 1, premises: vec![], conclusion: (BaTerm::Var(0), BaTerm::Zero) };
        assert!(!t.holds_in(&FiniteBa { atoms: 1 }));
        assert!(t.holds_in(&FiniteBa { atoms: 0 }));
    }
}

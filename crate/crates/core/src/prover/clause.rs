//! Clauses, literals, unification, and subsumption.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::Term;

/// Reserved predicate name for equality atoms inside clauses. The
/// surface syntax cannot produce it as an identifier.
pub const EQ: &str = "=";

/// Interpolation provenance of an input clause: which side of the split
/// the originating premise belongs to. `Shared` marks clauses (equality
/// axioms over shared vocabulary) available to both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Shared,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
            Side::Shared => write!(f, "shared"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.to_owned(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn apply(&self, subst: &BTreeMap<String, Term>) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|t| apply_term(t, subst)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pred == EQ {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal { positive: false, atom }
    }

    pub fn complement(&self) -> Literal {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }

    pub fn apply(&self, subst: &BTreeMap<String, Term>) -> Literal {
        Literal { positive: self.positive, atom: self.atom.apply(subst) }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A clause: a set of literals (kept sorted and deduplicated) with its
/// interpolation provenance. Variables are normalized to `__v0, __v1, ...`
/// in first-occurrence order, so equal clauses are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub side: Side,
}

impl Clause {
    /// Builds a normalized clause: sorted, deduplicated, variables renamed.
    pub fn new(mut literals: Vec<Literal>, side: Side) -> Clause {
        literals.sort();
        literals.dedup();
        let mut c = Clause { literals, side };
        c.normalize_vars();
        // renaming can change the sort order
        c.literals.sort();
        c.literals.dedup();
        c
    }

    pub fn empty(side: Side) -> Clause {
        Clause { literals: Vec::new(), side }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|l| l.atom.is_ground())
    }

    /// A clause with complementary syntactically-equal literals is valid
    /// and useless for refutation.
    pub fn is_tautology(&self) -> bool {
        self.literals
            .iter()
            .any(|l| l.positive && self.literals.contains(&l.complement()))
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for l in &self.literals {
            for t in &l.atom.args {
                for v in t.variables() {
                    if seen.insert(v.clone()) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    fn normalize_vars(&mut self) {
        let vars = self.variables();
        let map: BTreeMap<String, Term> = vars
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Term::Var(format!("__v{i}"))))
            .collect();
        self.literals = self.literals.iter().map(|l| l.apply(&map)).collect();
    }

    /// The clause with every variable `__vI` renamed to `__wI`, keeping
    /// it apart from a resolution partner.
    pub fn renamed_apart(&self) -> Clause {
        let map: BTreeMap<String, Term> = self
            .variables()
            .into_iter()
            .map(|v| {
                let renamed = format!("__w{}", v.trim_start_matches("__v"));
                (v, Term::Var(renamed))
            })
            .collect();
        Clause {
            literals: self.literals.iter().map(|l| l.apply(&map)).collect(),
            side: self.side,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

pub fn apply_term(t: &Term, subst: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => match subst.get(v) {
            Some(bound) => bound.clone(),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| apply_term(a, subst)).collect(),
        ),
    }
}

fn occurs(v: &str, t: &Term, subst: &BTreeMap<String, Term>) -> bool {
    match t {
        Term::Var(u) => {
            if u == v {
                true
            } else if let Some(bound) = subst.get(u) {
                occurs(v, &bound.clone(), subst)
            } else {
                false
            }
        }
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, subst)),
    }
}

fn unify_terms(a: &Term, b: &Term, subst: &mut BTreeMap<String, Term>) -> bool {
    match (a, b) {
        (Term::Var(v), _) => {
            if let Some(bound) = subst.get(v) {
                return unify_terms(&bound.clone(), b, subst);
            }
            let b_res = apply_term(b, subst);
            if b_res == Term::Var(v.clone()) {
                return true;
            }
            if occurs(v, &b_res, subst) {
                return false;
            }
            subst.insert(v.clone(), b_res);
            true
        }
        (_, Term::Var(_)) => unify_terms(b, a, subst),
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| unify_terms(x, y, subst))
        }
    }
}

/// Fully applies the accumulated bindings so ranges contain no domain
/// variables; the solved form is unique, which keeps recorded unifiers
/// checkable by recomputation.
fn solve(subst: BTreeMap<String, Term>) -> BTreeMap<String, Term> {
    let keys: Vec<String> = subst.keys().cloned().collect();
    let mut out = subst;
    loop {
        let mut changed = false;
        for k in &keys {
            let t = out[k].clone();
            let applied = apply_term(&t, &out);
            if applied != t {
                out.insert(k.clone(), applied);
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Most general unifier of two atoms, in solved form.
pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<BTreeMap<String, Term>> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut subst = BTreeMap::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_terms(x, y, &mut subst) {
            return None;
        }
    }
    Some(solve(subst))
}

fn match_term_onto(pat: &Term, target: &Term, subst: &mut BTreeMap<String, Term>) -> bool {
    match pat {
        Term::Var(v) => match subst.get(v) {
            Some(bound) => bound == target,
            None => {
                subst.insert(v.clone(), target.clone());
                true
            }
        },
        Term::App(f, fa) => match target {
            Term::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(x, y)| match_term_onto(x, y, subst))
            }
            _ => false,
        },
    }
}

fn match_literal_onto(pat: &Literal, target: &Literal, subst: &BTreeMap<String, Term>) -> Option<BTreeMap<String, Term>> {
    if pat.positive != target.positive
        || pat.atom.pred != target.atom.pred
        || pat.atom.args.len() != target.atom.args.len()
    {
        return None;
    }
    let mut out = subst.clone();
    for (x, y) in pat.atom.args.iter().zip(&target.atom.args) {
        if !match_term_onto(x, y, &mut out) {
            return None;
        }
    }
    Some(out)
}

/// Longest subsumer attempted and the backtracking budget: subsumption
/// is redundancy elimination only, so giving up early is sound.
const SUBSUMER_MAX_LITERALS: usize = 6;
const SUBSUMPTION_NODE_BUDGET: usize = 4_000;

/// Theta-subsumption: `c` subsumes `d` when some substitution sends every
/// literal of `c` to a literal of `d`. The subsumer is renamed apart
/// first so its variables never collide with the target's. Long clauses
/// and exhausted search budgets report "not subsumed".
pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    if c.literals.len() > d.literals.len() || c.literals.len() > SUBSUMER_MAX_LITERALS {
        return false;
    }
    let c = c.renamed_apart();
    fn go(
        lits: &[Literal],
        d: &Clause,
        subst: BTreeMap<String, Term>,
        nodes: &mut usize,
    ) -> bool {
        match lits.first() {
            None => true,
            Some(first) => d.literals.iter().any(|target| {
                if *nodes == 0 {
                    return false;
                }
                *nodes -= 1;
                match_literal_onto(first, target, &subst)
                    .map(|next| go(&lits[1..], d, next, nodes))
                    .unwrap_or(false)
            }),
        }
    }
    let mut nodes = SUBSUMPTION_NODE_BUDGET;
    go(&c.literals, d, BTreeMap::new(), &mut nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> Term {
        Term::var(n)
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn unify_basic() {
        // P(x, f(x)) with P(c, y) gives x -> c, y -> f(c)
        let a = Atom::new("P", vec![var("x"), Term::app("f", vec![var("x")])]);
        let b = Atom::new("P", vec![c("c"), var("y")]);
        let mgu = unify_atoms(&a, &b).unwrap();
        assert_eq!(mgu.get("x"), Some(&c("c")));
        assert_eq!(mgu.get("y"), Some(&Term::app("f", vec![c("c")])));
    }

    #[test]
    fn unify_occurs_check() {
        let a = Atom::new("P", vec![var("x")]);
        let b = Atom::new("P", vec![Term::app("f", vec![var("x")])]);
        assert!(unify_atoms(&a, &b).is_none());
    }

    #[test]
    fn clause_normalization_and_tautology() {
        let p = Atom::new("P", vec![var("zz")]);
        let cl = Clause::new(
            vec![Literal::pos(p.clone()), Literal::pos(p.clone())],
            Side::Left,
        );
        assert_eq!(cl.literals.len(), 1);
        assert_eq!(cl.variables(), vec!["__v0".to_string()]);
        let taut = Clause::new(vec![Literal::pos(p.clone()), Literal::neg(p)], Side::Left);
        assert!(taut.is_tautology());
    }

    #[test]
    fn subsumption() {
        // {P(x)} subsumes {P(c), Q}
        let general = Clause::new(
            vec![Literal::pos(Atom::new("P", vec![var("x")]))],
            Side::Left,
        );
        let specific = Clause::new(
            vec![
                Literal::pos(Atom::new("P", vec![c("c")])),
                Literal::pos(Atom::new("Q", vec![])),
            ],
            Side::Left,
        );
        assert!(subsumes(&general, &specific));
        assert!(!subsumes(&specific, &general));
    }
}

//! Craig interpolant extraction from ground resolution refutations.
//!
//! Partial interpolants are attached to every step of the refutation:
//! left inputs carry falsum, right inputs verum, and a resolution step
//! combines its parents' interpolants by disjunction, conjunction, or a
//! selector on the pivot, according to which side(s) the pivot atom
//! belongs to. The root interpolant is implied by the left clauses,
//! inconsistent with the right clauses, and built from atoms occurring
//! on both sides.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Formula, Term};

use super::clause::{Atom, Side, EQ};
use super::proof::{Proof, Rule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpolationError {
    #[error("proof contains non-ground clauses")]
    NonGround,
    #[error("proof does not end in the empty clause")]
    NotRefutation,
    #[error("pivot atom `{0}` does not occur in any input clause")]
    UnknownPivot(String),
    #[error("interpolant violates the shared-symbol condition on `{0}`")]
    SymbolCondition(String),
}

const LEFT: u8 = 1;
const RIGHT: u8 = 2;

fn atom_formula(atom: &Atom) -> Formula {
    if atom.pred == EQ {
        Formula::Eq(atom.args[0].clone(), atom.args[1].clone())
    } else {
        Formula::Pred(atom.pred.clone(), atom.args.clone())
    }
}

fn simp_and(l: Formula, r: Formula) -> Formula {
    match (&l, &r) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, _) => r,
        (_, Formula::True) => l,
        _ => Formula::and(l, r),
    }
}

fn simp_or(l: Formula, r: Formula) -> Formula {
    match (&l, &r) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, _) => r,
        (_, Formula::False) => l,
        _ => Formula::or(l, r),
    }
}

fn simp_not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        _ => Formula::not(f),
    }
}

/// Non-logical symbols of a ground formula: predicate names (equality
/// excluded) and function names.
fn nonlogical_symbols(f: &Formula) -> BTreeSet<String> {
    let mut out = f.predicate_symbols();
    out.extend(f.function_symbols());
    out
}

fn clause_nonlogical_symbols(
    clauses: impl Iterator<Item = (Atom, Side)>,
    keep: impl Fn(Side) -> bool,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (atom, side) in clauses {
        if !keep(side) {
            continue;
        }
        if atom.pred != EQ {
            out.insert(atom.pred.clone());
        }
        for t in &atom.args {
            let mut fns = BTreeSet::new();
            t.function_symbols(&mut fns);
            out.extend(fns);
        }
    }
    out
}

/// Extracts the interpolant of the split recorded on the refutation's
/// input clauses: `left |= interpolant` and `interpolant, right |= false`,
/// with every non-logical symbol of the interpolant occurring on both
/// sides (shared-tagged inputs count for both). The symbol condition is
/// checked before returning.
pub fn ground_interpolate(proof: &Proof) -> Result<Formula, InterpolationError> {
    if !proof.is_ground() {
        return Err(InterpolationError::NonGround);
    }
    match proof.root() {
        Some(root) if root.clause.is_empty() => {}
        _ => return Err(InterpolationError::NotRefutation),
    }

    let mut atom_sides: BTreeMap<Atom, u8> = BTreeMap::new();
    let mut input_atoms: Vec<(Atom, Side)> = Vec::new();
    for (clause, side) in proof.input_clauses() {
        let mask = match side {
            Side::Left => LEFT,
            Side::Right => RIGHT,
            Side::Shared => LEFT | RIGHT,
        };
        for lit in &clause.literals {
            *atom_sides.entry(lit.atom.clone()).or_insert(0) |= mask;
            input_atoms.push((lit.atom.clone(), side));
        }
    }

    let mut partial: Vec<Formula> = Vec::with_capacity(proof.steps.len());
    for step in &proof.steps {
        let interpolant = match &step.rule {
            Rule::Input { side } => match side {
                Side::Left | Side::Shared => Formula::False,
                Side::Right => Formula::True,
            },
            Rule::Factor { parent, .. } => partial[*parent].clone(),
            Rule::Resolve { pos_parent, neg_parent, pos_lit, .. } => {
                let pivot = &proof.steps[*pos_parent].clause.literals[*pos_lit].atom;
                let mask = *atom_sides
                    .get(pivot)
                    .ok_or_else(|| InterpolationError::UnknownPivot(pivot.to_string()))?;
                let i_pos = partial[*pos_parent].clone();
                let i_neg = partial[*neg_parent].clone();
                match mask {
                    LEFT => simp_or(i_pos, i_neg),
                    RIGHT => simp_and(i_pos, i_neg),
                    _ => {
                        let a = atom_formula(pivot);
                        simp_and(
                            simp_or(a.clone(), i_pos),
                            simp_or(simp_not(a), i_neg),
                        )
                    }
                }
            }
        };
        partial.push(interpolant);
    }
    let interpolant = partial.pop().expect("nonempty proof");

    let left_syms = clause_nonlogical_symbols(input_atoms.iter().cloned(), |s| {
        matches!(s, Side::Left | Side::Shared)
    });
    let right_syms = clause_nonlogical_symbols(input_atoms.iter().cloned(), |s| {
        matches!(s, Side::Right | Side::Shared)
    });
    for sym in nonlogical_symbols(&interpolant) {
        if !left_syms.contains(&sym) || !right_syms.contains(&sym) {
            return Err(InterpolationError::SymbolCondition(sym));
        }
    }
    Ok(interpolant)
}

/// Truth-table check of a propositional entailment `premises |= goal`
/// over ground quantifier-free formulas, every atom (equality included)
/// treated as an independent boolean. This matches the guarantee the
/// interpolant construction gives relative to the tagged input clauses.
/// Returns None when the table would be too large.
pub fn ground_entails(premises: &[Formula], goal: &Formula) -> Option<bool> {
    let mut atoms: BTreeSet<GroundAtom> = BTreeSet::new();
    for f in premises.iter().chain(std::iter::once(goal)) {
        collect_ground_atoms(f, &mut atoms);
    }
    let atoms: Vec<GroundAtom> = atoms.into_iter().collect();
    if atoms.len() > 22 {
        return None;
    }
    for mask in 0..(1u64 << atoms.len()) {
        let lookup = |a: &GroundAtom| -> bool {
            let idx = atoms.binary_search(a).expect("collected atom");
            mask & (1 << idx) != 0
        };
        if premises.iter().all(|p| eval_ground(p, &lookup)) && !eval_ground(goal, &lookup) {
            return Some(false);
        }
    }
    Some(true)
}

type GroundAtom = (String, Vec<Term>);

fn collect_ground_atoms(f: &Formula, out: &mut BTreeSet<GroundAtom>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Pred(p, args) => {
            out.insert((p.clone(), args.clone()));
        }
        Formula::Eq(l, r) => {
            out.insert((EQ.to_owned(), vec![l.clone(), r.clone()]));
        }
        Formula::Not(g) => collect_ground_atoms(g, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            collect_ground_atoms(l, out);
            collect_ground_atoms(r, out);
        }
        Formula::Forall(..) | Formula::Exists(..) => {
            panic!("ground_entails expects quantifier-free input")
        }
    }
}

fn eval_ground(f: &Formula, lookup: &impl Fn(&GroundAtom) -> bool) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Pred(p, args) => lookup(&(p.clone(), args.clone())),
        Formula::Eq(l, r) => lookup(&(EQ.to_owned(), vec![l.clone(), r.clone()])),
        Formula::Not(g) => !eval_ground(g, lookup),
        Formula::And(l, r) => eval_ground(l, lookup) && eval_ground(r, lookup),
        Formula::Or(l, r) => eval_ground(l, lookup) || eval_ground(r, lookup),
        Formula::Imp(l, r) => !eval_ground(l, lookup) || eval_ground(r, lookup),
        Formula::Iff(l, r) => eval_ground(l, lookup) == eval_ground(r, lookup),
        Formula::Forall(..) | Formula::Exists(..) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::clause::{Clause, Literal};
    use super::super::{saturate, SaturationOutcome};

    fn atom(p: &str) -> Atom {
        Atom::new(p, vec![])
    }

    fn refute(clauses: Vec<Clause>) -> Proof {
        match saturate(clauses, 10_000) {
            SaturationOutcome::Refuted(p) => p,
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn shared_unit_conflict() {
        // left {p}, right {~p}: interpolant p
        let proof = refute(vec![
            Clause::new(vec![Literal::pos(atom("p"))], Side::Left),
            Clause::new(vec![Literal::neg(atom("p"))], Side::Right),
        ]);
        assert_eq!(ground_interpolate(&proof).unwrap(), Formula::pred("p", vec![]));
    }

    #[test]
    fn chained_conflict() {
        // left {p, ~p|q}, right {~q}: interpolant q, verified by truth table
        let left1 = Clause::new(vec![Literal::pos(atom("p"))], Side::Left);
        let left2 = Clause::new(
            vec![Literal::neg(atom("p")), Literal::pos(atom("q"))],
            Side::Left,
        );
        let right = Clause::new(vec![Literal::neg(atom("q"))], Side::Right);
        let proof = refute(vec![left1, left2, right]);
        let theta = ground_interpolate(&proof).unwrap();
        assert_eq!(theta, Formula::pred("q", vec![]));
        let p = Formula::pred("p", vec![]);
        let q = Formula::pred("q", vec![]);
        assert_eq!(
            ground_entails(&[p.clone(), Formula::imp(p, q.clone())], &theta),
            Some(true)
        );
        assert_eq!(
            ground_entails(&[theta, Formula::not(q)], &Formula::False),
            Some(true)
        );
    }

    #[test]
    fn left_local_conflict_gives_falsum() {
        // contradiction entirely inside the left side
        let proof = refute(vec![
            Clause::new(vec![Literal::pos(atom("p"))], Side::Left),
            Clause::new(vec![Literal::neg(atom("p"))], Side::Left),
            Clause::new(vec![Literal::pos(atom("r"))], Side::Right),
        ]);
        assert_eq!(ground_interpolate(&proof).unwrap(), Formula::False);
    }

    #[test]
    fn right_local_conflict_gives_verum() {
        let proof = refute(vec![
            Clause::new(vec![Literal::pos(atom("p"))], Side::Left),
            Clause::new(vec![Literal::pos(atom("r"))], Side::Right),
            Clause::new(vec![Literal::neg(atom("r"))], Side::Right),
        ]);
        assert_eq!(ground_interpolate(&proof).unwrap(), Formula::True);
    }

    #[test]
    fn rejects_non_ground_proofs() {
        let open = Clause::new(
            vec![Literal::pos(Atom::new("P", vec![Term::var("x")]))],
            Side::Left,
        );
        let neg = Clause::new(
            vec![Literal::neg(Atom::new("P", vec![Term::var("x")]))],
            Side::Right,
        );
        let proof = refute(vec![open, neg]);
        assert_eq!(
            ground_interpolate(&proof).unwrap_err(),
            InterpolationError::NonGround
        );
    }
}

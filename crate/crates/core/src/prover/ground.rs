//! Herbrand grounding: instantiating quantifiers over a finite pool of
//! ground terms, reducing desk-scale sequents to propositional form.

use thiserror::Error;

use crate::signature::Signature;
use crate::syntax::{substitute_map, Formula, Term};

use super::clausify::SkolemGen;
use super::Sequent;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundingError {
    #[error("empty term pool with quantifiers present")]
    EmptyPool,
    #[error("grounding exceeded the instance cap of {0}")]
    CapExceeded(usize),
}

/// Default cap on formula nodes produced while grounding one sequent.
pub const DEFAULT_GROUNDING_CAP: usize = 2_000_000;

/// All ground rigid terms over `sig` built from the rigid constants and
/// the extra base terms, closed under rigid function application up to
/// the given nesting depth. Deterministic order: by depth, then by
/// printed form.
pub fn rigid_term_pool(sig: &Signature, base: &[Term], depth: usize) -> Vec<Term> {
    let mut pool: Vec<Term> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut initial: Vec<Term> = sig
        .rigid_constants()
        .iter()
        .map(|c| Term::constant(c))
        .collect();
    initial.extend(base.iter().filter(|t| t.is_ground()).cloned());
    initial.sort_by_key(|t| t.to_string());
    for t in initial {
        if seen.insert(t.clone()) {
            pool.push(t);
        }
    }
    for _ in 0..depth {
        let current = pool.clone();
        let mut next = Vec::new();
        for (fname, info) in sig.functions() {
            if !info.rigid || info.arity == 0 {
                continue;
            }
            for args in tuples(&current, info.arity) {
                next.push(Term::app(fname, args));
            }
        }
        next.sort_by_key(|t| t.to_string());
        for t in next {
            if seen.insert(t.clone()) {
                pool.push(t);
            }
        }
    }
    pool
}

fn tuples(pool: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for partial in &out {
            for t in pool {
                let mut grown = partial.clone();
                grown.push(t.clone());
                next.push(grown);
            }
        }
        out = next;
    }
    out
}

/// Polarity-directed grounding of one formula. Positive universals are
/// instantiated conjunctively over the universe; positive existentials
/// become fresh Skolem constants. Negative occurrences dualize.
/// Biconditionals containing quantifiers are expanded into implication
/// pairs first; quantifier-free subformulas keep their shape.
pub fn ground_formula(
    f: &Formula,
    positive: bool,
    universe: &[Term],
    skolem: &mut SkolemGen,
    budget: &mut usize,
) -> Result<Formula, GroundingError> {
    let spend = |budget: &mut usize, n: usize| -> Result<(), GroundingError> {
        if *budget < n {
            Err(GroundingError::CapExceeded(DEFAULT_GROUNDING_CAP))
        } else {
            *budget -= n;
            Ok(())
        }
    };
    spend(budget, 1)?;
    Ok(match f {
        Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => simp_not(ground_formula(g, !positive, universe, skolem, budget)?),
        Formula::And(l, r) => simp_and(
            ground_formula(l, positive, universe, skolem, budget)?,
            ground_formula(r, positive, universe, skolem, budget)?,
        ),
        Formula::Or(l, r) => simp_or(
            ground_formula(l, positive, universe, skolem, budget)?,
            ground_formula(r, positive, universe, skolem, budget)?,
        ),
        Formula::Imp(l, r) => simp_imp(
            ground_formula(l, !positive, universe, skolem, budget)?,
            ground_formula(r, positive, universe, skolem, budget)?,
        ),
        Formula::Iff(l, r) => {
            if has_quantifier(l) || has_quantifier(r) {
                let both = Formula::and(
                    Formula::imp((**l).clone(), (**r).clone()),
                    Formula::imp((**r).clone(), (**l).clone()),
                );
                ground_formula(&both, positive, universe, skolem, budget)?
            } else {
                f.clone()
            }
        }
        Formula::Forall(v, g) => {
            if positive {
                instantiate_over(v, g, positive, universe, skolem, budget, true)?
            } else {
                let named = skolem_constant(v, g, skolem);
                ground_formula(&named, positive, universe, skolem, budget)?
            }
        }
        Formula::Exists(v, g) => {
            if positive {
                let named = skolem_constant(v, g, skolem);
                ground_formula(&named, positive, universe, skolem, budget)?
            } else {
                instantiate_over(v, g, positive, universe, skolem, budget, false)?
            }
        }
    })
}

fn has_quantifier(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => false,
        Formula::Not(g) => has_quantifier(g),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            has_quantifier(l) || has_quantifier(r)
        }
        Formula::Forall(..) | Formula::Exists(..) => true,
    }
}

fn skolem_constant(v: &str, body: &Formula, skolem: &mut SkolemGen) -> Formula {
    let mut map = std::collections::BTreeMap::new();
    map.insert(v.to_owned(), Term::constant(&skolem.fresh()));
    substitute_map(body, &map)
}

fn instantiate_over(
    v: &str,
    body: &Formula,
    positive: bool,
    universe: &[Term],
    skolem: &mut SkolemGen,
    budget: &mut usize,
    conjunctive: bool,
) -> Result<Formula, GroundingError> {
    if universe.is_empty() {
        return Err(GroundingError::EmptyPool);
    }
    let mut parts = Vec::new();
    for t in universe {
        let mut map = std::collections::BTreeMap::new();
        map.insert(v.to_owned(), t.clone());
        let instance = substitute_map(body, &map);
        parts.push(ground_formula(&instance, positive, universe, skolem, budget)?);
    }
    let mut it = parts.into_iter();
    let first = it.next().unwrap();
    Ok(if conjunctive {
        it.fold(first, simp_and)
    } else {
        it.fold(first, simp_or)
    })
}

fn simp_not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        _ => Formula::not(f),
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

fn simp_imp(l: Formula, r: Formula) -> Formula {
    match (&l, &r) {
        (Formula::False, _) | (_, Formula::True) => Formula::True,
        (Formula::True, _) => r,
        (_, Formula::False) => simp_not(l),
        _ => Formula::imp(l, r),
    }
}

fn flatten_conjuncts(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(l, r) => {
            flatten_conjuncts(*l, out);
            flatten_conjuncts(*r, out);
        }
        Formula::True => {}
        other => out.push(other),
    }
}

/// Grounds a sequent over the rigid-closure of the pool: premises are
/// instantiated positively (universals expand over the universe,
/// existentials Skolemize), the conclusion negatively (universals become
/// fresh eigenconstants, existentials expand disjunctively). Top-level
/// conjunctions in ground premises are split. The ground sequent's
/// validity entails the original's whenever the pool covers a Herbrand
/// witness set.
pub fn herbrand_ground(
    s: &Sequent,
    pool: &[Term],
    depth: usize,
) -> Result<Sequent, GroundingError> {
    let universe = rigid_term_pool(&s.sig, pool, depth);
    let mut skolem = SkolemGen::new();
    let mut budget = DEFAULT_GROUNDING_CAP;
    let mut premises = Vec::new();
    for p in &s.premises {
        let g = ground_formula(p, true, &universe, &mut skolem, &mut budget)?;
        flatten_conjuncts(g, &mut premises);
    }
    let conclusion = ground_formula(&s.conclusion, false, &universe, &mut skolem, &mut budget)?;
    Ok(Sequent { premises, conclusion, sig: s.sig.clone() })
}

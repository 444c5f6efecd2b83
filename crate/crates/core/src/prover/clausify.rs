//! Clausification: negation normal form, standardizing apart,
//! Skolemization, and distribution to CNF.

use std::collections::BTreeMap;

use crate::syntax::{Formula, Term};

use super::clause::{Atom, Clause, Literal, Side, EQ};

/// Generator for reserved-namespace Skolem symbols, shared across one
/// sequent so names never collide.
#[derive(Debug, Default)]
pub struct SkolemGen {
    counter: usize,
}

impl SkolemGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> String {
        let name = format!("__sk{}", self.counter);
        self.counter += 1;
        name
    }
}

/// Negation normal form with biconditionals and implications expanded
/// and truth constants folded.
fn nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Pred(..) | Formula::Eq(..) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(l, r) => {
            if positive {
                mk_and(nnf(l, true), nnf(r, true))
            } else {
                mk_or(nnf(l, false), nnf(r, false))
            }
        }
        Formula::Or(l, r) => {
            if positive {
                mk_or(nnf(l, true), nnf(r, true))
            } else {
                mk_and(nnf(l, false), nnf(r, false))
            }
        }
        Formula::Imp(l, r) => {
            if positive {
                mk_or(nnf(l, false), nnf(r, true))
            } else {
                mk_and(nnf(l, true), nnf(r, false))
            }
        }
        Formula::Iff(l, r) => {
            if positive {
                // (~l | r) & (l | ~r)
                mk_and(
                    mk_or(nnf(l, false), nnf(r, true)),
                    mk_or(nnf(l, true), nnf(r, false)),
                )
            } else {
                // (l | r) & (~l | ~r)
                mk_and(
                    mk_or(nnf(l, true), nnf(r, true)),
                    mk_or(nnf(l, false), nnf(r, false)),
                )
            }
        }
        Formula::Forall(v, g) => {
            if positive {
                Formula::Forall(v.clone(), Box::new(nnf(g, true)))
            } else {
                Formula::Exists(v.clone(), Box::new(nnf(g, false)))
            }
        }
        Formula::Exists(v, g) => {
            if positive {
                Formula::Exists(v.clone(), Box::new(nnf(g, true)))
            } else {
                Formula::Forall(v.clone(), Box::new(nnf(g, false)))
            }
        }
    }
}

fn mk_and(l: Formula, r: Formula) -> Formula {
    match (&l, &r) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, _) => r,
        (_, Formula::True) => l,
        _ => Formula::and(l, r),
    }
}

fn mk_or(l: Formula, r: Formula) -> Formula {
    match (&l, &r) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, _) => r,
        (_, Formula::False) => l,
        _ => Formula::or(l, r),
    }
}

/// Skolemizes an NNF formula and drops its universal quantifiers.
/// Existential variables become Skolem applications of the enclosing
/// universal variables; all bound variables are standardized apart into
/// the `__q` namespace.
fn skolemize(
    f: &Formula,
    universals: &mut Vec<String>,
    env: &mut BTreeMap<String, Term>,
    counter: &mut usize,
    skolem: &mut SkolemGen,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Pred(p, args) => Formula::Pred(
            p.clone(),
            args.iter().map(|t| super::clause::apply_term(t, env)).collect(),
        ),
        Formula::Eq(l, r) => Formula::Eq(
            super::clause::apply_term(l, env),
            super::clause::apply_term(r, env),
        ),
        Formula::Not(g) => Formula::not(skolemize(g, universals, env, counter, skolem)),
        Formula::And(l, r) => mk_and(
            skolemize(l, universals, env, counter, skolem),
            skolemize(r, universals, env, counter, skolem),
        ),
        Formula::Or(l, r) => mk_or(
            skolemize(l, universals, env, counter, skolem),
            skolemize(r, universals, env, counter, skolem),
        ),
        Formula::Forall(v, g) => {
            let fresh = format!("__q{}", *counter);
            *counter += 1;
            env.insert(v.clone(), Term::Var(fresh.clone()));
            universals.push(fresh.clone());
            let body = skolemize(g, universals, env, counter, skolem);
            universals.pop();
            env.remove(v);
            body
        }
        Formula::Exists(v, g) => {
            let name = skolem.fresh();
            let args: Vec<Term> = universals.iter().map(|u| Term::Var(u.clone())).collect();
            env.insert(v.clone(), Term::App(name, args));
            let body = skolemize(g, universals, env, counter, skolem);
            env.remove(v);
            body
        }
        Formula::Imp(..) | Formula::Iff(..) => unreachable!("input is in NNF"),
    }
}

fn literal_of(f: &Formula, positive: bool) -> Literal {
    let atom = match f {
        Formula::Pred(p, args) => Atom::new(p, args.clone()),
        Formula::Eq(l, r) => Atom::new(EQ, vec![l.clone(), r.clone()]),
        _ => unreachable!("atoms only"),
    };
    Literal { positive, atom }
}

/// Distributes disjunction over conjunction.
fn cnf(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::True => vec![],
        Formula::False => vec![vec![]],
        Formula::Pred(..) | Formula::Eq(..) => vec![vec![literal_of(f, true)]],
        Formula::Not(g) => vec![vec![literal_of(g, false)]],
        Formula::And(l, r) => {
            let mut out = cnf(l);
            out.extend(cnf(r));
            out
        }
        Formula::Or(l, r) => {
            let left = cnf(l);
            let right = cnf(r);
            let mut out = Vec::new();
            for a in &left {
                for b in &right {
                    let mut clause = a.clone();
                    clause.extend(b.iter().cloned());
                    out.push(clause);
                }
            }
            out
        }
        _ => unreachable!("quantifier-free NNF only"),
    }
}

/// Clausifies a closed formula into an equisatisfiable clause set, each
/// clause tagged with the given provenance. Skolem symbols come from the
/// shared generator's reserved namespace.
pub fn clausify(f: &Formula, side: Side, skolem: &mut SkolemGen) -> Vec<Clause> {
    let normal = nnf(f, true);
    let mut counter = 0usize;
    let matrix = skolemize(
        &normal,
        &mut Vec::new(),
        &mut BTreeMap::new(),
        &mut counter,
        skolem,
    );
    let mut out = Vec::new();
    for lits in cnf(&matrix) {
        let clause = Clause::new(lits, side);
        if !clause.is_tautology() {
            out.push(clause);
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::signature::Signature;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_predicate("P", 1).unwrap();
        sig.add_function("j", 0, true).unwrap();
        sig
    }

    fn clausify_str(text: &str) -> Vec<Clause> {
        let f = parse_formula(text, &sig()).unwrap();
        clausify(&f, Side::Left, &mut SkolemGen::new())
    }

    #[test]
    fn universal_becomes_open_clause() {
        let cs = clausify_str("forall x. P(x)");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].to_string(), "{P(__v0)}");
    }

    #[test]
    fn existential_becomes_skolem_constant() {
        let cs = clausify_str("exists x. P(x)");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].to_string(), "{P(__sk0)}");
    }

    #[test]
    fn implication_to_disjunction() {
        let cs = clausify_str("forall x. (P(x) -> x = j)");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].to_string(), "{~P(__v0), __v0 = j}");
    }

    #[test]
    fn skolem_function_under_universal() {
        let mut sig2 = Signature::new();
        sig2.add_predicate("R", 2).unwrap();
        let f = parse_formula("forall x. exists y. R(x, y)", &sig2).unwrap();
        let cs = clausify(&f, Side::Left, &mut SkolemGen::new());
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].to_string(), "{R(__v0, __sk0(__v0))}");
    }

    #[test]
    fn tautologies_dropped_constants_folded() {
        let cs = clausify_str("P(j) | ~P(j)");
        assert!(cs.is_empty());
        let cs = clausify_str("true");
        assert!(cs.is_empty());
        let cs = clausify_str("false");
        assert_eq!(cs.len(), 1);
        assert!(cs[0].is_empty());
    }
}

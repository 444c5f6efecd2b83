//! Resolution proof objects: derivation DAGs whose steps can be
//! re-checked by recomputing each unifier.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::Term;

use super::clause::{unify_atoms, Clause, Literal, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Input {
        side: Side,
    },
    /// Binary resolution: the positive parent's literal `pos_lit` against
    /// the negative parent's literal `neg_lit`; the negative parent is
    /// renamed apart before unification.
    Resolve {
        pos_parent: usize,
        neg_parent: usize,
        pos_lit: usize,
        neg_lit: usize,
        mgu: BTreeMap<String, Term>,
    },
    /// Factoring: unifies two same-sign literals of one clause.
    Factor {
        parent: usize,
        lit_a: usize,
        lit_b: usize,
        mgu: BTreeMap<String, Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub id: usize,
    pub rule: Rule,
    pub clause: Clause,
}

/// A refutation: steps in derivation order, the last one the empty clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

/// Recomputes a resolution step from its parents: renames the negative
/// parent apart, unifies the selected literals, and returns the
/// normalized resolvent together with the unifier actually used.
pub fn replay_resolution(
    pos: &Clause,
    neg: &Clause,
    pos_lit: usize,
    neg_lit: usize,
) -> Option<(Clause, BTreeMap<String, Term>)> {
    let neg = neg.renamed_apart();
    let pl = pos.literals.get(pos_lit)?;
    let nl = neg.literals.get(neg_lit)?;
    if !pl.positive || nl.positive {
        return None;
    }
    let mgu = unify_atoms(&pl.atom, &nl.atom)?;
    let mut lits: Vec<Literal> = Vec::new();
    for (i, l) in pos.literals.iter().enumerate() {
        if i != pos_lit {
            lits.push(l.apply(&mgu));
        }
    }
    for (j, l) in neg.literals.iter().enumerate() {
        if j != neg_lit {
            lits.push(l.apply(&mgu));
        }
    }
    Some((Clause::new(lits, pos.side), mgu))
}

pub fn replay_factor(
    parent: &Clause,
    lit_a: usize,
    lit_b: usize,
) -> Option<(Clause, BTreeMap<String, Term>)> {
    if lit_a == lit_b {
        return None;
    }
    let a = parent.literals.get(lit_a)?;
    let b = parent.literals.get(lit_b)?;
    if a.positive != b.positive {
        return None;
    }
    let mgu = unify_atoms(&a.atom, &b.atom)?;
    let lits: Vec<Literal> = parent.literals.iter().map(|l| l.apply(&mgu)).collect();
    Some((Clause::new(lits, parent.side), mgu))
}

impl Proof {
    pub fn root(&self) -> Option<&ProofStep> {
        self.steps.last()
    }

    pub fn input_clauses(&self) -> impl Iterator<Item = (&Clause, Side)> {
        self.steps.iter().filter_map(|s| match s.rule {
            Rule::Input { side } => Some((&s.clause, side)),
            _ => None,
        })
    }

    pub fn is_ground(&self) -> bool {
        self.steps.iter().all(|s| s.clause.is_ground())
    }
}

/// Independently re-validates every step and the empty-clause root.
pub fn check_proof(p: &Proof) -> bool {
    match p.root() {
        Some(root) if root.clause.is_empty() => {}
        _ => return false,
    }
    for (idx, step) in p.steps.iter().enumerate() {
        if step.id != idx {
            return false;
        }
        match &step.rule {
            Rule::Input { .. } => {}
            Rule::Resolve { pos_parent, neg_parent, pos_lit, neg_lit, mgu } => {
                if *pos_parent >= idx || *neg_parent >= idx {
                    return false;
                }
                let pos = &p.steps[*pos_parent].clause;
                let neg = &p.steps[*neg_parent].clause;
                match replay_resolution(pos, neg, *pos_lit, *neg_lit) {
                    Some((clause, recomputed)) => {
                        if clause != step.clause || recomputed != *mgu {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
            Rule::Factor { parent, lit_a, lit_b, mgu } => {
                if *parent >= idx {
                    return false;
                }
                match replay_factor(&p.steps[*parent].clause, *lit_a, *lit_b) {
                    Some((clause, recomputed)) => {
                        if clause != step.clause || recomputed != *mgu {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
        }
    }
    true
}

fn write_mgu(f: &mut fmt::Formatter<'_>, mgu: &BTreeMap<String, Term>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, (v, t)) in mgu.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v} -> {t}")?;
    }
    write!(f, "}}")
}

/// Line-oriented text format, one step per line: id, rule, parent ids,
/// unifier, clause.
impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            match &step.rule {
                Rule::Input { side } => {
                    write!(f, "{} input {side} ", step.id)?;
                }
                Rule::Resolve { pos_parent, neg_parent, pos_lit, neg_lit, mgu } => {
                    write!(
                        f,
                        "{} resolve {pos_parent}.{pos_lit} {neg_parent}.{neg_lit} ",
                        step.id
                    )?;
                    write_mgu(f, mgu)?;
                    write!(f, " ")?;
                }
                Rule::Factor { parent, lit_a, lit_b, mgu } => {
                    write!(f, "{} factor {parent}.{lit_a}.{lit_b} ", step.id)?;
                    write_mgu(f, mgu)?;
                    write!(f, " ")?;
                }
            }
            writeln!(f, "{}", step.clause)?;
        }
        Ok(())
    }
}

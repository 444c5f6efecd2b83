//! Saturation-based resolution prover with proof objects, Herbrand
//! grounding, and Craig interpolant extraction from ground refutations.

pub mod clause;
pub mod clausify;
pub mod ground;
pub mod interpolate;
pub mod proof;
pub mod tptp;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::semantics::{
    enumerate_structures_capped, evaluate, Assignment, Bounds, ModalStructure,
};
use crate::signature::Signature;
use crate::syntax::{free_variables, Formula, Term};

pub use clause::{Atom, Clause, Literal, Side, EQ};
pub use clausify::{clausify, SkolemGen};
pub use ground::{herbrand_ground, rigid_term_pool, GroundingError};
pub use interpolate::{ground_interpolate, InterpolationError};
pub use proof::{check_proof, Proof, ProofStep, Rule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProverError {
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("premise {0} has free variables")]
    OpenPremise(usize),
    #[error("conclusion has free variables")]
    OpenConclusion,
}

/// A classical entailment problem: closed premises, closed conclusion,
/// and the signature (primed extensions allowed) they live over.
#[derive(Debug, Clone)]
pub struct Sequent {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub sig: Signature,
}

impl Sequent {
    pub fn new(
        premises: Vec<Formula>,
        conclusion: Formula,
        sig: Signature,
    ) -> Result<Self, ProverError> {
        for (i, p) in premises.iter().enumerate() {
            if !free_variables(p).is_empty() {
                return Err(ProverError::OpenPremise(i));
            }
        }
        if !free_variables(&conclusion).is_empty() {
            return Err(ProverError::OpenConclusion);
        }
        Ok(Sequent { premises, conclusion, sig })
    }
}

/// Outcome of a proof search.
#[derive(Debug, Clone)]
pub enum ProofResult {
    /// The empty clause was derived; the sequent is valid.
    Proved(Proof),
    /// Budget exhausted or clause set saturated without a refutation.
    NotProved { steps_used: usize, saturated: bool },
    /// A finite classical structure satisfying the premises and falsifying
    /// the conclusion; the sequent is invalid.
    CounterexampleFound(ModalStructure),
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }
}

/// Outcome of saturating a raw clause set.
#[derive(Debug, Clone)]
pub enum SaturationOutcome {
    Refuted(Proof),
    Saturated { steps_used: usize },
    BudgetExhausted { steps_used: usize },
}

struct Record {
    clause: Clause,
    rule: Rule,
}

/// Symbol-count weight used for given-clause selection: lightest first
/// keeps deep terms from starving the short refutations.
fn clause_weight(c: &Clause) -> usize {
    fn term_weight(t: &Term) -> usize {
        match t {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(term_weight).sum::<usize>(),
        }
    }
    c.literals
        .iter()
        .map(|l| 1 + l.atom.args.iter().map(term_weight).sum::<usize>())
        .sum()
}

/// Given-clause saturation by binary resolution and factoring. Smallest
/// clause first (symbol-count weight) with FIFO tiebreak; forward
/// subsumption against the active set; the budget counts generated
/// clauses.
pub fn saturate(clauses: Vec<Clause>, budget: usize) -> SaturationOutcome {
    let mut records: Vec<Record> = Vec::new();
    let mut passive: BinaryHeap<Reverse<(usize, usize, usize)>> = BinaryHeap::new();
    let mut active: Vec<usize> = Vec::new();
    let mut seen: BTreeSet<Vec<Literal>> = BTreeSet::new();
    let mut generated = 0usize;
    let mut fifo = 0usize;

    let insert = |clause: Clause,
                  rule: Rule,
                  records: &mut Vec<Record>,
                  passive: &mut BinaryHeap<Reverse<(usize, usize, usize)>>,
                  seen: &mut BTreeSet<Vec<Literal>>,
                  fifo: &mut usize|
     -> Option<usize> {
        if clause.is_tautology() || !seen.insert(clause.literals.clone()) {
            return None;
        }
        let id = records.len();
        let empty = clause.is_empty();
        passive.push(Reverse((clause_weight(&clause), *fifo, id)));
        *fifo += 1;
        records.push(Record { clause, rule });
        if empty {
            Some(id)
        } else {
            None
        }
    };

    for clause in clauses {
        let side = clause.side;
        if let Some(id) =
            insert(clause, Rule::Input { side }, &mut records, &mut passive, &mut seen, &mut fifo)
        {
            return SaturationOutcome::Refuted(extract_proof(&records, id));
        }
    }

    while let Some(Reverse((_, _, id))) = passive.pop() {
        let given = records[id].clause.clone();
        if active
            .iter()
            .any(|&a| clause::subsumes(&records[a].clause, &given))
        {
            continue;
        }
        active.push(id);

        // factors of the given clause
        let mut produced: Vec<(Clause, Rule)> = Vec::new();
        for a in 0..given.literals.len() {
            for b in (a + 1)..given.literals.len() {
                if given.literals[a].positive == given.literals[b].positive {
                    if let Some((clause, mgu)) = proof::replay_factor(&given, a, b) {
                        produced.push((
                            clause,
                            Rule::Factor { parent: id, lit_a: a, lit_b: b, mgu },
                        ));
                    }
                }
            }
        }
        // resolvents of the given clause against the active set
        for &other_id in &active {
            let other = &records[other_id].clause;
            for (i, li) in given.literals.iter().enumerate() {
                for (j, lj) in other.literals.iter().enumerate() {
                    if li.positive == lj.positive {
                        continue;
                    }
                    let (pos_parent, neg_parent, pos_lit, neg_lit) = if li.positive {
                        (id, other_id, i, j)
                    } else {
                        (other_id, id, j, i)
                    };
                    let pos = &records[pos_parent].clause;
                    let neg = &records[neg_parent].clause;
                    if let Some((clause, mgu)) =
                        proof::replay_resolution(pos, neg, pos_lit, neg_lit)
                    {
                        produced.push((
                            clause,
                            Rule::Resolve { pos_parent, neg_parent, pos_lit, neg_lit, mgu },
                        ));
                    }
                }
            }
        }

        for (clause, rule) in produced {
            generated += 1;
            if generated > budget {
                return SaturationOutcome::BudgetExhausted { steps_used: generated };
            }
            if let Some(root) =
                insert(clause, rule, &mut records, &mut passive, &mut seen, &mut fifo)
            {
                return SaturationOutcome::Refuted(extract_proof(&records, root));
            }
        }
    }
    SaturationOutcome::Saturated { steps_used: generated }
}

/// Extracts the derivation DAG rooted at `root`, reindexed compactly.
fn extract_proof(records: &[Record], root: usize) -> Proof {
    let mut needed = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if !needed.insert(id) {
            continue;
        }
        match &records[id].rule {
            Rule::Input { .. } => {}
            Rule::Resolve { pos_parent, neg_parent, .. } => {
                stack.push(*pos_parent);
                stack.push(*neg_parent);
            }
            Rule::Factor { parent, .. } => stack.push(*parent),
        }
    }
    let order: Vec<usize> = needed.into_iter().collect();
    let index: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let steps = order
        .iter()
        .map(|&id| {
            let rule = match &records[id].rule {
                Rule::Input { side } => Rule::Input { side: *side },
                Rule::Resolve { pos_parent, neg_parent, pos_lit, neg_lit, mgu } => Rule::Resolve {
                    pos_parent: index[pos_parent],
                    neg_parent: index[neg_parent],
                    pos_lit: *pos_lit,
                    neg_lit: *neg_lit,
                    mgu: mgu.clone(),
                },
                Rule::Factor { parent, lit_a, lit_b, mgu } => Rule::Factor {
                    parent: index[parent],
                    lit_a: *lit_a,
                    lit_b: *lit_b,
                    mgu: mgu.clone(),
                },
            };
            ProofStep { id: index[&id], rule, clause: records[id].clause.clone() }
        })
        .collect();
    Proof { steps }
}

/// Symbols occurring in a clause set: functions with arity, predicates
/// (except equality) with arity.
fn clause_symbols(clauses: &[Clause]) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
    let mut funcs = BTreeMap::new();
    let mut preds = BTreeMap::new();
    fn term_syms(t: &Term, funcs: &mut BTreeMap<String, usize>) {
        if let Term::App(f, args) = t {
            funcs.insert(f.clone(), args.len());
            args.iter().for_each(|a| term_syms(a, funcs));
        }
    }
    for c in clauses {
        for l in &c.literals {
            if l.atom.pred != EQ {
                preds.insert(l.atom.pred.clone(), l.atom.args.len());
            }
            l.atom.args.iter().for_each(|t| term_syms(t, &mut funcs));
        }
    }
    (funcs, preds)
}

fn has_equality(clauses: &[Clause]) -> bool {
    clauses
        .iter()
        .any(|c| c.literals.iter().any(|l| l.atom.pred == EQ))
}

fn vars(n: usize, prefix: &str) -> Vec<Term> {
    (0..n).map(|i| Term::var(&format!("{prefix}{i}"))).collect()
}

/// Reflexivity, symmetry, transitivity, and congruence axioms for exactly
/// the symbols occurring in the clause set.
pub fn equality_axioms(clauses: &[Clause]) -> Vec<Clause> {
    let (funcs, preds) = clause_symbols(clauses);
    let eq = |l: Term, r: Term| Atom::new(EQ, vec![l, r]);
    let mut out = Vec::new();
    let x = Term::var("x");
    let y = Term::var("y");
    let z = Term::var("z");
    out.push(Clause::new(vec![Literal::pos(eq(x.clone(), x.clone()))], Side::Shared));
    out.push(Clause::new(
        vec![
            Literal::neg(eq(x.clone(), y.clone())),
            Literal::pos(eq(y.clone(), x.clone())),
        ],
        Side::Shared,
    ));
    out.push(Clause::new(
        vec![
            Literal::neg(eq(x.clone(), y.clone())),
            Literal::neg(eq(y.clone(), z.clone())),
            Literal::pos(eq(x.clone(), z.clone())),
        ],
        Side::Shared,
    ));
    for (f, arity) in funcs {
        if arity == 0 {
            continue;
        }
        let xs = vars(arity, "x");
        let ys = vars(arity, "y");
        let mut lits: Vec<Literal> = xs
            .iter()
            .zip(&ys)
            .map(|(a, b)| Literal::neg(eq(a.clone(), b.clone())))
            .collect();
        lits.push(Literal::pos(eq(
            Term::App(f.clone(), xs.clone()),
            Term::App(f.clone(), ys.clone()),
        )));
        out.push(Clause::new(lits, Side::Shared));
    }
    for (p, arity) in preds {
        if arity == 0 {
            continue;
        }
        let xs = vars(arity, "x");
        let ys = vars(arity, "y");
        let mut lits: Vec<Literal> = xs
            .iter()
            .zip(&ys)
            .map(|(a, b)| Literal::neg(eq(a.clone(), b.clone())))
            .collect();
        lits.push(Literal::neg(Atom::new(&p, xs.clone())));
        lits.push(Literal::pos(Atom::new(&p, ys.clone())));
        out.push(Clause::new(lits, Side::Shared));
    }
    out
}

/// Domain cap for the bounded classical counterexample search run when
/// saturation fails to refute.
const COUNTEREXAMPLE_DOMAIN: usize = 2;
const COUNTEREXAMPLE_CAP: u128 = 200_000;

fn find_classical_counterexample(s: &Sequent) -> Option<ModalStructure> {
    let bounds = Bounds::new(1, COUNTEREXAMPLE_DOMAIN);
    let stream = enumerate_structures_capped(&s.sig, bounds, COUNTEREXAMPLE_CAP).ok()?;
    let empty = Assignment::empty();
    for m in stream {
        let world = m.worlds()[0].clone();
        let premises_hold = s
            .premises
            .iter()
            .all(|p| evaluate(&m, &world, &empty, p).unwrap_or(false));
        if !premises_hold {
            continue;
        }
        match evaluate(&m, &world, &empty, &s.conclusion) {
            Ok(false) => return Some(m),
            _ => continue,
        }
    }
    None
}

/// Proves `premises |= conclusion` by saturating the premises and the
/// negated conclusion. Equality is handled by axiom instantiation: the
/// usual equivalence axioms plus congruence for exactly the symbols in
/// the sequent. When no refutation is found, a bounded search for a
/// classical counterexample decides small invalid sequents.
pub fn prove(s: &Sequent, budget: usize) -> Result<ProofResult, ProverError> {
    if budget == 0 {
        return Err(ProverError::ZeroBudget);
    }
    let mut skolem = SkolemGen::new();
    let mut clauses = Vec::new();
    for (i, p) in s.premises.iter().enumerate() {
        if !free_variables(p).is_empty() {
            return Err(ProverError::OpenPremise(i));
        }
        clauses.extend(clausify(p, Side::Left, &mut skolem));
    }
    if !free_variables(&s.conclusion).is_empty() {
        return Err(ProverError::OpenConclusion);
    }
    clauses.extend(clausify(
        &Formula::not(s.conclusion.clone()),
        Side::Right,
        &mut skolem,
    ));
    if has_equality(&clauses) {
        clauses.extend(equality_axioms(&clauses));
    }
    Ok(match saturate(clauses, budget) {
        SaturationOutcome::Refuted(proof) => {
            debug_assert!(check_proof(&proof));
            ProofResult::Proved(proof)
        }
        SaturationOutcome::Saturated { steps_used } => match find_classical_counterexample(s) {
            Some(m) => ProofResult::CounterexampleFound(m),
            None => ProofResult::NotProved { steps_used, saturated: true },
        },
        SaturationOutcome::BudgetExhausted { steps_used } => {
            match find_classical_counterexample(s) {
                Some(m) => ProofResult::CounterexampleFound(m),
                None => ProofResult::NotProved { steps_used, saturated: false },
            }
        }
    })
}

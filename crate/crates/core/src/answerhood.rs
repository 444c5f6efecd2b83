//! Top-level question-answering API: translating question entailment to
//! classical sequents, three-valued entailment verdicts, and the
//! constructive extraction of a development equivalent to a given answer.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::development::{
    check_development, enumerate_developments_with_depth, DevelopmentTree, DevelopmentVariant,
};
use crate::prover::ground::{ground_formula, rigid_term_pool, GroundingError};
use crate::prover::interpolate::{ground_entails, ground_interpolate};
use crate::prover::{
    clausify, equality_axioms, prove, saturate, Clause, Proof, ProofResult, ProverError,
    Sequent, Side, SkolemGen,
};
use crate::semantics::{
    classical_to_two_world, find_countermodel, question_partition, questions_partition, Bounds,
    Countermodel, SemanticsError,
};
use crate::signature::{Signature, PRIME_MARK, RESERVED_PREFIX};
use crate::syntax::{
    agreement_formula, alpha_eq, free_variables, prime, substitute_map, unprime, Formula,
    PrimeError, Question, Term,
};

#[derive(Debug, Error)]
pub enum AnswerhoodError {
    #[error("context formula must be closed, found free {0:?}")]
    OpenContext(Vec<String>),
    #[error("answer must be closed, found free {0:?}")]
    OpenAnswer(Vec<String>),
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error("internal soundness violation: countermodel and proof for the same entailment")]
    SoundnessViolation,
}

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error(transparent)]
    Answerhood(#[from] AnswerhoodError),
    #[error("the formula is not an answer to the question: a countermodel exists")]
    NotAnAnswer(Box<Countermodel>),
    #[error("entailment could not be established at stage `{stage}` within budget")]
    NotProvable { stage: &'static str },
    #[error("extraction failed at stage `{stage}`: {detail}")]
    StageFailed { stage: &'static str, detail: String },
    #[error("internal extraction error: {0}")]
    Internal(String),
}

/// Knobs for the two engines: countermodel search radius, prover budget
/// in generated clauses, grounding pool depth, and the development
/// grammar variant used for produced trees.
#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub bounds: Bounds,
    pub prover_budget: usize,
    pub grounding_depth: usize,
    pub variant: DevelopmentVariant,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            bounds: Bounds::default(),
            prover_budget: 50_000,
            grounding_depth: 1,
            variant: DevelopmentVariant::default(),
        }
    }
}

/// Three-valued entailment verdict: a proof, a countermodel, or an
/// honest "unknown" carrying the bounds tried and the budget used.
#[derive(Debug, Clone)]
pub enum Verdict {
    Entailed(Proof),
    NotEntailed(Countermodel),
    Unknown { bounds: Bounds, budget: usize },
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Entailed(_) => "entailed",
            Verdict::NotEntailed(_) => "not-entailed",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// Reduces contextual question entailment to a classical sequent over
/// the primed-extended signature: the premises are the agreement
/// formulas of the premise questions plus the context and its primed
/// copy, the conclusion is the agreement formula of the target question.
pub fn translate_entailment(
    qs: &[Question],
    chi: &Formula,
    q: &Question,
    sig: &Signature,
) -> Result<Sequent, AnswerhoodError> {
    let fv = free_variables(chi);
    if !fv.is_empty() {
        return Err(AnswerhoodError::OpenContext(fv));
    }
    let mut premises = Vec::new();
    for question in qs {
        premises.push(agreement_formula(question, sig)?);
    }
    premises.push(chi.clone());
    premises.push(prime(chi, sig)?);
    let conclusion = agreement_formula(q, sig)?;
    let ext = sig.primed_extension();
    Ok(Sequent::new(premises, conclusion, ext)?)
}

/// Decides contextual entailment between questions by running the
/// bounded countermodel search and the prover on the translated sequent.
/// The two engines are cross-checked: a simultaneous proof and
/// countermodel is a soundness violation and aborts.
pub fn decide_entailment(
    qs: &[Question],
    chi: &Formula,
    q: &Question,
    sig: &Signature,
    cfg: &EngineConfig,
) -> Result<Verdict, AnswerhoodError> {
    let countermodel = find_countermodel(qs, chi, q, cfg.bounds, sig)?;
    let sequent = translate_entailment(qs, chi, q, sig)?;
    let proof_result = prove(&sequent, cfg.prover_budget)?;
    match (countermodel, proof_result) {
        (Some(_), ProofResult::Proved(_)) => Err(AnswerhoodError::SoundnessViolation),
        (Some(cm), _) => Ok(Verdict::NotEntailed(cm)),
        (None, ProofResult::Proved(proof)) => Ok(Verdict::Entailed(proof)),
        (None, ProofResult::CounterexampleFound(classical)) => {
            // the classical counterexample to the translated sequent is a
            // two-world modal countermodel to the question entailment
            let m = classical_to_two_world(&classical, sig)?;
            let (w, v) = ("w1".to_owned(), "w2".to_owned());
            let premise = questions_partition(&m, qs)?;
            let conclusion = question_partition(&m, q)?;
            if premise.relates(&w, &v) && !conclusion.relates(&w, &v) {
                Ok(Verdict::NotEntailed(Countermodel { structure: m, pair: (w, v) }))
            } else {
                Err(AnswerhoodError::SoundnessViolation)
            }
        }
        (None, ProofResult::NotProved { steps_used, .. }) => Ok(Verdict::Unknown {
            bounds: cfg.bounds,
            budget: steps_used,
        }),
    }
}

/// Answerhood: a closed formula answers a question when the question
/// entails the formula read as a (zero-alternative) question.
pub fn is_answer(
    psi: &Formula,
    q: &Question,
    chi: &Formula,
    sig: &Signature,
    cfg: &EngineConfig,
) -> Result<Verdict, AnswerhoodError> {
    let fv = free_variables(psi);
    if !fv.is_empty() {
        return Err(AnswerhoodError::OpenAnswer(fv));
    }
    decide_entailment(
        std::slice::from_ref(q),
        chi,
        &Question::new(psi.clone()),
        sig,
        cfg,
    )
}

/// Record of the pipeline stages an extraction went through.
#[derive(Debug, Clone, Default)]
pub struct PipelineTrace {
    pub steps: Vec<(String, String)>,
}

impl PipelineTrace {
    fn push(&mut self, label: &str, detail: impl Into<String>) {
        self.steps.push((label.to_owned(), detail.into()));
    }
}

/// A development equivalent to the given answer under the context,
/// together with its derivation tree, the checkable equivalence proof,
/// and the stage-by-stage trace.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub development: Formula,
    pub tree: DevelopmentTree,
    pub equivalence_proof: Proof,
    pub trace: PipelineTrace,
}

/// The question pattern the interpolation route works with: either the
/// question body itself (an atom over distinct variables) or a fresh
/// predicate defined to abbreviate it.
struct PatternInfo {
    /// the predicate whose atoms the interpolant may mention
    pred: String,
    /// argument variables, fixing the substitution positions
    vars: Vec<String>,
    /// the question pattern as a formula (`pred` applied to `vars`)
    atom: Formula,
    /// context extended with the defining axiom, when one was needed
    context: Formula,
    fresh: bool,
}

fn pattern_info(q: &Question, chi: &Formula) -> PatternInfo {
    let fv = free_variables(&q.body);
    if let Formula::Pred(p, args) = &q.body {
        let all_vars: Option<Vec<String>> = args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        if let Some(vars) = all_vars {
            let mut distinct = vars.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() == vars.len() {
                return PatternInfo {
                    pred: p.clone(),
                    vars,
                    atom: q.body.clone(),
                    context: chi.clone(),
                    fresh: false,
                };
            }
        }
    }
    let pred = format!("{RESERVED_PREFIX}Q");
    let atom = Formula::Pred(pred.clone(), fv.iter().map(|v| Term::var(v)).collect());
    let mut axiom = Formula::iff(atom.clone(), q.body.clone());
    for v in fv.iter().rev() {
        axiom = Formula::Forall(v.clone(), Box::new(axiom));
    }
    let context = if *chi == Formula::True {
        axiom
    } else {
        Formula::and(chi.clone(), axiom)
    };
    PatternInfo { pred, vars: fv, atom, context, fresh: true }
}

/// Ground subterms of a formula, deterministically ordered.
fn ground_subterms(f: &Formula, out: &mut Vec<Term>) {
    fn term(t: &Term, out: &mut Vec<Term>) {
        if t.is_ground() && !out.contains(t) {
            out.push(t.clone());
        }
        if let Term::App(_, args) = t {
            args.iter().for_each(|a| term(a, out));
        }
    }
    fn walk(f: &Formula, out: &mut Vec<Term>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => args.iter().for_each(|t| term(t, out)),
            Formula::Eq(l, r) => {
                term(l, out);
                term(r, out);
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => walk(g, out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                walk(l, out);
                walk(r, out);
            }
        }
    }
    walk(f, out);
    out.sort_by_key(|t| t.to_string());
    out.dedup();
}

/// Grounds one refutation side: every formula instantiated positively
/// over the shared pool extended with the side's own ground subterms.
fn ground_side(
    formulas: &[Formula],
    pool: &[Term],
    skolem: &mut SkolemGen,
) -> Result<Vec<Formula>, GroundingError> {
    let mut universe = pool.to_vec();
    for f in formulas {
        ground_subterms(f, &mut universe);
    }
    universe.sort_by_key(|t| t.to_string());
    universe.dedup();
    let mut budget = crate::prover::ground::DEFAULT_GROUNDING_CAP;
    let mut out = Vec::new();
    for f in formulas {
        let g = ground_formula(f, true, &universe, skolem, &mut budget)?;
        flatten_and(g, &mut out);
    }
    Ok(out)
}

fn flatten_and(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(l, r) => {
            flatten_and(*l, out);
            flatten_and(*r, out);
        }
        Formula::True => {}
        other => out.push(other),
    }
}

/// Ground equality-axiom instances over one side's ground terms: every
/// atom of every instance stays inside that side's vocabulary, which
/// keeps the refutation's atoms attributable to a side.
fn ground_equality_instances(clauses: &[Clause], side: Side) -> Vec<Clause> {
    use crate::prover::{Atom, Literal, EQ};
    let mut terms: Vec<Term> = Vec::new();
    let mut fn_apps: BTreeMap<String, Vec<Vec<Term>>> = BTreeMap::new();
    let mut pred_arities: BTreeMap<String, usize> = BTreeMap::new();
    let mut saw_eq = false;
    fn collect(t: &Term, terms: &mut Vec<Term>, apps: &mut BTreeMap<String, Vec<Vec<Term>>>) {
        if !terms.contains(t) {
            terms.push(t.clone());
        }
        if let Term::App(f, args) = t {
            if !args.is_empty() {
                apps.entry(f.clone()).or_default().push(args.clone());
            }
            args.iter().for_each(|a| collect(a, terms, apps));
        }
    }
    for c in clauses {
        for l in &c.literals {
            if l.atom.pred == EQ {
                saw_eq = true;
            } else {
                pred_arities.insert(l.atom.pred.clone(), l.atom.args.len());
            }
            l.atom.args.iter().for_each(|t| collect(t, &mut terms, &mut fn_apps));
        }
    }
    if !saw_eq {
        return Vec::new();
    }
    terms.sort_by_key(|t| t.to_string());
    terms.dedup();
    let eq = |l: &Term, r: &Term| Atom::new(EQ, vec![l.clone(), r.clone()]);
    let mut out = Vec::new();
    for t in &terms {
        out.push(Clause::new(vec![Literal::pos(eq(t, t))], side));
    }
    for a in &terms {
        for b in &terms {
            if a != b {
                out.push(Clause::new(
                    vec![Literal::neg(eq(a, b)), Literal::pos(eq(b, a))],
                    side,
                ));
            }
        }
    }
    for a in &terms {
        for b in &terms {
            for c in &terms {
                if a != b && b != c && a != c {
                    out.push(Clause::new(
                        vec![
                            Literal::neg(eq(a, b)),
                            Literal::neg(eq(b, c)),
                            Literal::pos(eq(a, c)),
                        ],
                        side,
                    ));
                }
            }
        }
    }
    for (fname, apps) in &fn_apps {
        let mut apps = apps.clone();
        apps.sort();
        apps.dedup();
        for x in &apps {
            for y in &apps {
                if x == y {
                    continue;
                }
                let mut lits: Vec<Literal> = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| Literal::neg(eq(a, b)))
                    .collect();
                lits.push(Literal::pos(eq(
                    &Term::App(fname.clone(), x.clone()),
                    &Term::App(fname.clone(), y.clone()),
                )));
                out.push(Clause::new(lits, side));
            }
        }
    }
    for (pname, arity) in &pred_arities {
        if *arity == 0 {
            continue;
        }
        for xs in tuples(&terms, *arity) {
            for ys in tuples(&terms, *arity) {
                if xs == ys {
                    continue;
                }
                let mut lits: Vec<Literal> = xs
                    .iter()
                    .zip(&ys)
                    .map(|(a, b)| Literal::neg(eq(a, b)))
                    .collect();
                lits.push(Literal::neg(Atom::new(pname, xs.clone())));
                lits.push(Literal::pos(Atom::new(pname, ys.clone())));
                out.push(Clause::new(lits, side));
            }
        }
    }
    out.sort();
    out.dedup();
    out
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

/// Replaces verum by `forall x... pattern | ~forall x... pattern` and
/// falsum by the conjunctive twin, re-expressing the truth constants
/// inside the development grammar.
fn eliminate_truth_constants(f: &Formula, pattern: &PatternInfo) -> Formula {
    let mut closed = pattern.atom.clone();
    for v in pattern.vars.iter().rev() {
        closed = Formula::Forall(v.clone(), Box::new(closed));
    }
    let taut = Formula::or(closed.clone(), Formula::not(closed.clone()));
    let contra = Formula::and(closed.clone(), Formula::not(closed));
    fn walk(f: &Formula, taut: &Formula, contra: &Formula) -> Formula {
        match f {
            Formula::True => taut.clone(),
            Formula::False => contra.clone(),
            Formula::Pred(..) | Formula::Eq(..) => f.clone(),
            Formula::Not(g) => Formula::not(walk(g, taut, contra)),
            Formula::And(l, r) => Formula::and(walk(l, taut, contra), walk(r, taut, contra)),
            Formula::Or(l, r) => Formula::or(walk(l, taut, contra), walk(r, taut, contra)),
            Formula::Imp(l, r) => Formula::imp(walk(l, taut, contra), walk(r, taut, contra)),
            Formula::Iff(l, r) => Formula::iff(walk(l, taut, contra), walk(r, taut, contra)),
            Formula::Forall(v, g) => {
                Formula::Forall(v.clone(), Box::new(walk(g, taut, contra)))
            }
            Formula::Exists(v, g) => {
                Formula::Exists(v.clone(), Box::new(walk(g, taut, contra)))
            }
        }
    }
    walk(f, &taut, &contra)
}

/// Replaces every atom of the pattern predicate by the question body
/// with the atom's arguments substituted for the pattern variables.
fn replace_pattern_atoms(f: &Formula, pattern: &PatternInfo, body: &Formula) -> Formula {
    match f {
        Formula::Pred(p, args) if *p == pattern.pred => {
            let map: BTreeMap<String, Term> = pattern
                .vars
                .iter()
                .cloned()
                .zip(args.iter().cloned())
                .collect();
            substitute_map(body, &map)
        }
        Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(replace_pattern_atoms(g, pattern, body)),
        Formula::And(l, r) => Formula::and(
            replace_pattern_atoms(l, pattern, body),
            replace_pattern_atoms(r, pattern, body),
        ),
        Formula::Or(l, r) => Formula::or(
            replace_pattern_atoms(l, pattern, body),
            replace_pattern_atoms(r, pattern, body),
        ),
        Formula::Imp(l, r) => Formula::imp(
            replace_pattern_atoms(l, pattern, body),
            replace_pattern_atoms(r, pattern, body),
        ),
        Formula::Iff(l, r) => Formula::iff(
            replace_pattern_atoms(l, pattern, body),
            replace_pattern_atoms(r, pattern, body),
        ),
        Formula::Forall(v, g) => {
            Formula::Forall(v.clone(), Box::new(replace_pattern_atoms(g, pattern, body)))
        }
        Formula::Exists(v, g) => {
            Formula::Exists(v.clone(), Box::new(replace_pattern_atoms(g, pattern, body)))
        }
    }
}

/// Replaces each fresh constant by its variable, capture-avoidingly: the
/// constants are first swapped for reserved temporaries, then
/// substituted as variables so binders rename when needed.
fn generalize_constants(f: &Formula, constants: &[(String, String)]) -> Formula {
    fn swap_term(t: &Term, table: &BTreeMap<String, String>) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(name, args) if args.is_empty() && table.contains_key(name) => {
                Term::Var(table[name].clone())
            }
            Term::App(name, args) => Term::App(
                name.clone(),
                args.iter().map(|a| swap_term(a, table)).collect(),
            ),
        }
    }
    fn swap(f: &Formula, table: &BTreeMap<String, String>) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Pred(p, args) => Formula::Pred(
                p.clone(),
                args.iter().map(|a| swap_term(a, table)).collect(),
            ),
            Formula::Eq(l, r) => Formula::Eq(swap_term(l, table), swap_term(r, table)),
            Formula::Not(g) => Formula::not(swap(g, table)),
            Formula::And(l, r) => Formula::and(swap(l, table), swap(r, table)),
            Formula::Or(l, r) => Formula::or(swap(l, table), swap(r, table)),
            Formula::Imp(l, r) => Formula::imp(swap(l, table), swap(r, table)),
            Formula::Iff(l, r) => Formula::iff(swap(l, table), swap(r, table)),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(swap(g, table))),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(swap(g, table))),
        }
    }
    let temp_table: BTreeMap<String, String> = constants
        .iter()
        .enumerate()
        .map(|(i, (c, _))| (c.clone(), format!("__tmp{i}")))
        .collect();
    let swapped = swap(f, &temp_table);
    let final_map: BTreeMap<String, Term> = constants
        .iter()
        .enumerate()
        .map(|(i, (_, var))| (format!("__tmp{i}"), Term::var(var)))
        .collect();
    substitute_map(&swapped, &final_map)
}

/// Double-negation elimination; preserves the development property and
/// is re-checked after application.
fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Not(inner) => simplify(inner),
            _ => Formula::not(simplify(g)),
        },
        Formula::And(l, r) => Formula::and(simplify(l), simplify(r)),
        Formula::Or(l, r) => Formula::or(simplify(l), simplify(r)),
        Formula::Imp(l, r) => Formula::imp(simplify(l), simplify(r)),
        Formula::Iff(l, r) => Formula::iff(simplify(l), simplify(r)),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(simplify(g))),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(simplify(g))),
        _ => f.clone(),
    }
}

fn universal_closure_over(f: &Formula, vars: &[String]) -> Formula {
    let mut out = f.clone();
    for v in vars.iter().rev() {
        out = Formula::Forall(v.clone(), Box::new(out));
    }
    out
}

fn contains_reserved_or_primed(f: &Formula) -> Option<String> {
    f.predicate_symbols()
        .into_iter()
        .chain(f.function_symbols())
        .find(|s| s.ends_with(PRIME_MARK) || s.starts_with(RESERVED_PREFIX))
}

/// Constructively extracts a development of the question equivalent to
/// the answer under the context. The interpolation route mirrors the
/// constructive proof stage by stage: abbreviate a non-atomic question
/// by a fresh predicate, translate to a classical sequent, replace the
/// conclusion's universals by fresh constants, rearrange into an
/// interpolation split, ground, refute, interpolate, unprime, eliminate
/// truth constants, substitute the question body back, and re-generalize
/// the constants. When grounding cannot reach a refutation (the
/// quantified-interpolant cases), the answer's own development reading
/// and bounded enumeration serve as fallbacks. Every produced artifact
/// is verified before being returned.
pub fn extract_development(
    psi: &Formula,
    q: &Question,
    chi: &Formula,
    sig: &Signature,
    cfg: &EngineConfig,
) -> Result<ExtractionResult, ExtractionError> {
    let chifv = free_variables(chi);
    if !chifv.is_empty() {
        return Err(AnswerhoodError::OpenContext(chifv).into());
    }
    // the entailment precondition is re-checked internally: a countermodel
    // means no equivalent development can exist
    match find_countermodel(
        std::slice::from_ref(q),
        chi,
        &Question::new(psi.clone()),
        cfg.bounds,
        sig,
    ) {
        Ok(Some(cm)) => return Err(ExtractionError::NotAnAnswer(Box::new(cm))),
        Ok(None) => {}
        // an oracle too large to run is no reason to refuse extraction
        Err(SemanticsError::EnumerationTooLarge { .. }) => {}
        Err(other) => return Err(AnswerhoodError::from(other).into()),
    }
    let mut trace = PipelineTrace::default();

    match interpolation_route(psi, q, chi, sig, cfg, &mut trace) {
        Ok(result) => return Ok(result),
        Err(ExtractionError::Internal(detail)) => {
            return Err(ExtractionError::Internal(detail))
        }
        Err(err) => trace.push("interpolation-route", format!("failed: {err}")),
    }

    if let Some(tree) = check_development(psi, std::slice::from_ref(&q.body), sig, cfg.variant) {
        trace.push("route", "answer is its own development");
        let ys = free_variables(psi);
        let goal = universal_closure_over(&Formula::iff(psi.clone(), psi.clone()), &ys);
        let sequent = Sequent::new(vec![chi.clone()], goal, sig.clone())
            .map_err(AnswerhoodError::from)?;
        match prove(&sequent, cfg.prover_budget).map_err(AnswerhoodError::from)? {
            ProofResult::Proved(proof) => {
                return Ok(ExtractionResult {
                    development: psi.clone(),
                    tree,
                    equivalence_proof: proof,
                    trace,
                })
            }
            _ => {
                return Err(ExtractionError::NotProvable { stage: "self-development-equivalence" })
            }
        }
    }

    trace.push("route", "bounded enumeration with prover verification");
    enumeration_route(psi, q, chi, sig, cfg, trace)
}

const ENUMERATION_SIZE_CAP: usize = 7;
const ENUMERATION_CANDIDATE_CAP: usize = 600;

fn enumeration_route(
    psi: &Formula,
    q: &Question,
    chi: &Formula,
    sig: &Signature,
    cfg: &EngineConfig,
    mut trace: PipelineTrace,
) -> Result<ExtractionResult, ExtractionError> {
    let ys = free_variables(psi);
    let per_candidate = (cfg.prover_budget / 25).max(2_000);
    let stream = enumerate_developments_with_depth(
        std::slice::from_ref(&q.body),
        sig,
        ENUMERATION_SIZE_CAP,
        cfg.variant,
        cfg.grounding_depth,
    );
    let mut tried = 0usize;
    for candidate in stream {
        if tried >= ENUMERATION_CANDIDATE_CAP {
            break;
        }
        if !free_variables(&candidate).iter().all(|v| ys.contains(v)) {
            continue;
        }
        tried += 1;
        let goal =
            universal_closure_over(&Formula::iff(psi.clone(), candidate.clone()), &ys);
        let sequent = Sequent::new(vec![chi.clone()], goal, sig.clone())
            .map_err(AnswerhoodError::from)?;
        if let ProofResult::Proved(proof) =
            prove(&sequent, per_candidate).map_err(AnswerhoodError::from)?
        {
            let tree = check_development(&candidate, std::slice::from_ref(&q.body), sig, cfg.variant)
                .ok_or_else(|| {
                    ExtractionError::Internal(
                        "enumerated candidate fails its own development check".into(),
                    )
                })?;
            trace.push("enumeration", format!("verified candidate after {tried} tries"));
            return Ok(ExtractionResult {
                development: candidate,
                tree,
                equivalence_proof: proof,
                trace,
            });
        }
    }
    Err(ExtractionError::StageFailed {
        stage: "enumeration",
        detail: format!("no equivalent development among {tried} candidates"),
    })
}

fn interpolation_route(
    psi: &Formula,
    q: &Question,
    chi: &Formula,
    sig: &Signature,
    cfg: &EngineConfig,
    trace: &mut PipelineTrace,
) -> Result<ExtractionResult, ExtractionError> {
    // stage 1: question pattern, fresh predicate if the body is not an
    // atom over distinct variables
    let pattern = pattern_info(q, chi);
    let mut work_sig = sig.clone();
    if pattern.fresh {
        work_sig
            .add_predicate(&pattern.pred, pattern.vars.len())
            .map_err(|e| ExtractionError::Internal(e.to_string()))?;
        trace.push(
            "fresh-predicate",
            format!("{} abbreviates {}", pattern.atom, q.body),
        );
    } else {
        trace.push("pattern", format!("question body {} used directly", q.body));
    }

    // stage 2: fresh rigid constants for the answer's free variables
    let ys = free_variables(psi);
    let constants: Vec<(String, String)> = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (format!("{RESERVED_PREFIX}c{i}"), y.clone()))
        .collect();
    for (c, _) in &constants {
        work_sig
            .add_function(c, 0, true)
            .map_err(|e| ExtractionError::Internal(e.to_string()))?;
    }
    if !constants.is_empty() {
        trace.push(
            "fresh-constants",
            constants
                .iter()
                .map(|(c, y)| format!("{c} for {y}"))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }

    // stage 3: translate and instantiate the conclusion at the constants
    let pattern_q = Question::new(pattern.atom.clone());
    let sequent =
        translate_entailment(&[pattern_q], &pattern.context, &Question::new(psi.clone()), &work_sig)
            .map_err(ExtractionError::from)?;
    let const_map: BTreeMap<String, Term> = constants
        .iter()
        .map(|(c, y)| (y.clone(), Term::constant(c)))
        .collect();
    let psi_c = substitute_map(psi, &const_map);
    let psi_star_c = substitute_map(
        &prime(psi, &work_sig).map_err(AnswerhoodError::from)?,
        &const_map,
    );
    trace.push("translate", sequent.conclusion.to_string());

    // stage 4: the interpolation split
    let agreement = sequent.premises[0].clone();
    let context_plain = sequent.premises[1].clone();
    let context_primed = sequent.premises[2].clone();
    let left = vec![agreement, context_primed, psi_star_c];
    let right = vec![context_plain, Formula::not(psi_c)];

    // stage 5: ground and refute, retrying with a deeper pool
    let mut last_failure = String::new();
    for depth in cfg.grounding_depth..=(cfg.grounding_depth + 2) {
        let pool = rigid_term_pool(&work_sig, &[], depth);
        trace.push(
            "grounding-pool",
            format!(
                "depth {depth}: {}",
                pool.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
            ),
        );
        let mut skolem = SkolemGen::new();
        let (left_ground, right_ground) =
            match (ground_side(&left, &pool, &mut skolem), ground_side(&right, &pool, &mut skolem))
            {
                (Ok(l), Ok(r)) => (l, r),
                (Err(e), _) | (_, Err(e)) => {
                    last_failure = e.to_string();
                    continue;
                }
            };
        let mut clauses: Vec<Clause> = Vec::new();
        let mut skolem2 = SkolemGen::new();
        for f in &left_ground {
            clauses.extend(clausify(f, Side::Left, &mut skolem2));
        }
        for f in &right_ground {
            clauses.extend(clausify(f, Side::Right, &mut skolem2));
        }
        let left_clauses: Vec<Clause> =
            clauses.iter().filter(|c| c.side == Side::Left).cloned().collect();
        let right_clauses: Vec<Clause> =
            clauses.iter().filter(|c| c.side == Side::Right).cloned().collect();
        let mut all = clauses.clone();
        all.extend(ground_equality_instances(&left_clauses, Side::Left));
        all.extend(ground_equality_instances(&right_clauses, Side::Right));

        let proof = match saturate(all.clone(), cfg.prover_budget) {
            crate::prover::SaturationOutcome::Refuted(proof) => proof,
            other => {
                last_failure = format!("ground refutation not found ({other:?})");
                continue;
            }
        };
        trace.push("refutation", format!("{} steps", proof.steps.len()));

        // stage 6: interpolate and re-verify both conditions
        let raw = match ground_interpolate(&proof) {
            Ok(raw) => raw,
            Err(e) => {
                last_failure = format!("interpolation failed: {e}");
                continue;
            }
        };
        trace.push("interpolant-raw", raw.to_string());
        verify_interpolant_conditions(&proof, &raw)?;

        // stages 7-10: unprime, eliminate truth constants, substitute the
        // body back, generalize the constants
        let unprimed = unprime(&raw);
        if unprimed != raw {
            return Err(ExtractionError::Internal(
                "interpolant contained primed symbols".into(),
            ));
        }
        let no_constants = eliminate_truth_constants(&unprimed, &pattern);
        let substituted = replace_pattern_atoms(&no_constants, &pattern, &q.body);
        let generalized = generalize_constants(&substituted, &constants);
        let development = simplify(&generalized);
        trace.push("development", development.to_string());
        if let Some(sym) = contains_reserved_or_primed(&development) {
            return Err(ExtractionError::Internal(format!(
                "development leaked machinery symbol `{sym}`"
            )));
        }

        let tree = match check_development(&development, std::slice::from_ref(&q.body), sig, cfg.variant) {
            Some(tree) => tree,
            None => {
                last_failure = format!("interpolant {development} is not a development under the variant");
                continue;
            }
        };

        // final verification: two-way equivalence under the original context
        let goal = universal_closure_over(
            &Formula::iff(psi.clone(), development.clone()),
            &ys,
        );
        let sequent = Sequent::new(vec![chi.clone()], goal, sig.clone())
            .map_err(AnswerhoodError::from)?;
        match prove(&sequent, cfg.prover_budget).map_err(AnswerhoodError::from)? {
            ProofResult::Proved(equivalence_proof) => {
                trace.push("route", "interpolation");
                return Ok(ExtractionResult {
                    development,
                    tree,
                    equivalence_proof,
                    trace: trace.clone(),
                });
            }
            ProofResult::CounterexampleFound(_) => {
                return Err(ExtractionError::Internal(
                    "extracted development is not equivalent to the answer".into(),
                ));
            }
            ProofResult::NotProved { .. } => {
                last_failure = "equivalence not provable within budget".into();
                continue;
            }
        }
    }
    Err(ExtractionError::StageFailed {
        stage: "ground-interpolation",
        detail: last_failure,
    })
}

/// Re-proves `left |= interpolant` and `interpolant, right |= false`
/// propositionally against the refutation's tagged inputs.
fn verify_interpolant_conditions(proof: &Proof, theta: &Formula) -> Result<(), ExtractionError> {
    let clause_formula = |c: &Clause| -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        for l in &c.literals {
            let atom = if l.atom.pred == crate::prover::EQ {
                Formula::Eq(l.atom.args[0].clone(), l.atom.args[1].clone())
            } else {
                Formula::Pred(l.atom.pred.clone(), l.atom.args.clone())
            };
            parts.push(if l.positive { atom } else { Formula::not(atom) });
        }
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    };
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for (clause, side) in proof.input_clauses() {
        match side {
            Side::Left | Side::Shared => lefts.push(clause_formula(clause)),
            Side::Right => rights.push(clause_formula(clause)),
        }
    }
    let condition_one = ground_entails(&lefts, theta);
    let mut with_theta = rights;
    with_theta.push(theta.clone());
    let condition_two = ground_entails(&with_theta, &Formula::False);
    match (condition_one, condition_two) {
        (Some(true), Some(true)) => Ok(()),
        (Some(false), _) => Err(ExtractionError::Internal(
            "interpolant not entailed by the left side".into(),
        )),
        (_, Some(false)) => Err(ExtractionError::Internal(
            "interpolant consistent with the right side".into(),
        )),
        _ => {
            // table too large: fall back to the prover on both conditions
            verify_by_prover(&lefts, theta)?;
            let mut rights_again: Vec<Formula> = Vec::new();
            for (clause, side) in proof.input_clauses() {
                if side == Side::Right {
                    rights_again.push(clause_formula(clause));
                }
            }
            rights_again.push(theta.clone());
            verify_by_prover(&rights_again, &Formula::False)
        }
    }
}

fn verify_by_prover(premises: &[Formula], goal: &Formula) -> Result<(), ExtractionError> {
    let mut clauses = Vec::new();
    let mut skolem = SkolemGen::new();
    for p in premises {
        clauses.extend(clausify(p, Side::Left, &mut skolem));
    }
    clauses.extend(clausify(&Formula::not(goal.clone()), Side::Right, &mut skolem));
    let axioms = equality_axioms(&clauses);
    clauses.extend(axioms);
    match saturate(clauses, 50_000) {
        crate::prover::SaturationOutcome::Refuted(_) => Ok(()),
        _ => Err(ExtractionError::Internal(
            "interpolant condition not re-provable".into(),
        )),
    }
}

/// True iff the claimed extraction result stands: the development
/// derives from the question under the variant and the prover
/// establishes both directions of the equivalence under the context.
pub fn verify_extraction(
    r: &ExtractionResult,
    psi: &Formula,
    q: &Question,
    chi: &Formula,
    sig: &Signature,
    cfg: &EngineConfig,
) -> Result<bool, AnswerhoodError> {
    let tree = match check_development(&r.development, std::slice::from_ref(&q.body), sig, cfg.variant) {
        Some(tree) => tree,
        None => return Ok(false),
    };
    if !alpha_eq(&tree.replay(), &r.development)
        || !alpha_eq(&r.tree.replay(), &r.development)
    {
        return Ok(false);
    }
    let ys = free_variables(psi);
    for direction in [
        Formula::imp(psi.clone(), r.development.clone()),
        Formula::imp(r.development.clone(), psi.clone()),
    ] {
        let goal = universal_closure_over(&direction, &ys);
        let sequent = Sequent::new(vec![chi.clone()], goal, sig.clone())?;
        if !prove(&sequent, cfg.prover_budget)?.is_proved() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::prover::check_proof;

    fn sig_invited() -> Signature {
        let mut sig = Signature::new();
        sig.add_predicate("I", 1).unwrap();
        sig.add_predicate("P", 1).unwrap();
        sig.add_function("j", 0, true).unwrap();
        sig
    }

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn question(text: &str, sig: &Signature) -> Question {
        Question::new(parse_formula(text, sig).unwrap())
    }

    #[test]
    fn translation_shape() {
        let sig = sig_invited();
        let qs = [question("I(x)", &sig)];
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        let target = question("P(x)", &sig);
        let seq = translate_entailment(&qs, &chi, &target, &sig).unwrap();
        assert_eq!(seq.premises.len(), 3);
        assert_eq!(
            seq.premises[0].to_string(),
            "forall x. (I(x) <-> I'(x))"
        );
        assert_eq!(seq.premises[1], chi);
        assert_eq!(
            seq.premises[2].to_string(),
            "forall x. (I'(x) <-> P'(x))"
        );
        assert_eq!(seq.conclusion.to_string(), "forall x. (P(x) <-> P'(x))");
    }

    #[test]
    fn translation_keeps_trivial_context_premises() {
        let sig = sig_invited();
        let qs = [question("P(x)", &sig)];
        let target = question("forall x. P(x)", &sig);
        let seq = translate_entailment(&qs, &Formula::True, &target, &sig).unwrap();
        assert_eq!(seq.premises[0].to_string(), "forall x. (P(x) <-> P'(x))");
        assert_eq!(seq.premises[1], Formula::True);
        assert_eq!(seq.premises[2], Formula::True);
    }

    #[test]
    fn translation_with_nonrigid_function_context() {
        let mut sig = Signature::new();
        sig.add_predicate("L", 1).unwrap();
        sig.add_function("j", 0, true).unwrap();
        sig.add_function("s", 0, true).unwrap();
        sig.add_function("m", 1, false).unwrap();
        let qs = [question("L(m(j))", &sig)];
        let chi = parse_formula("s = m(j)", &sig).unwrap();
        let target = question("L(s)", &sig);
        let seq = translate_entailment(&qs, &chi, &target, &sig).unwrap();
        assert_eq!(seq.premises[1].to_string(), "s = m(j)");
        assert_eq!(seq.premises[2].to_string(), "s = m'(j)");
        assert_eq!(seq.conclusion.to_string(), "L(s) <-> L'(s)");
    }

    #[test]
    fn universal_closure_is_entailed() {
        let sig = sig_invited();
        let verdict = decide_entailment(
            &[question("P(x)", &sig)],
            &Formula::True,
            &question("forall x. P(x)", &sig),
            &sig,
            &cfg(),
        )
        .unwrap();
        assert!(verdict.is_entailed(), "expected entailed, got {}", verdict.label());
    }

    #[test]
    fn invited_going_entail_each_other() {
        let sig = sig_invited();
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        for (from, to) in [("I(x)", "P(x)"), ("P(x)", "I(x)")] {
            let verdict = decide_entailment(
                &[question(from, &sig)],
                &chi,
                &question(to, &sig),
                &sig,
                &cfg(),
            )
            .unwrap();
            assert!(verdict.is_entailed(), "{from} should entail {to} given the context");
        }
    }

    #[test]
    fn unrelated_question_not_entailed() {
        let mut sig = Signature::new();
        sig.add_predicate("F", 1).unwrap();
        sig.add_predicate("R", 0).unwrap();
        sig.add_function("j", 0, true).unwrap();
        let verdict = decide_entailment(
            &[question("F(j)", &sig)],
            &Formula::True,
            &question("R", &sig),
            &sig,
            &cfg(),
        )
        .unwrap();
        match verdict {
            Verdict::NotEntailed(cm) => {
                assert_eq!(cm.structure.worlds().len(), 2);
            }
            other => panic!("expected a countermodel, got {}", other.label()),
        }
    }

    #[test]
    fn answers_must_be_closed() {
        let sig = sig_invited();
        let open = parse_formula("P(x)", &sig).unwrap();
        assert!(matches!(
            is_answer(&open, &question("P(x)", &sig), &Formula::True, &sig, &cfg()),
            Err(AnswerhoodError::OpenAnswer(_))
        ));
    }

    #[test]
    fn tautology_and_contradiction_are_answers() {
        let mut sig = Signature::new();
        sig.add_predicate("p", 0).unwrap();
        sig.add_predicate("q", 0).unwrap();
        let q = question("q", &sig);
        for text in ["p | ~p", "p & ~p"] {
            let psi = parse_formula(text, &sig).unwrap();
            let verdict = is_answer(&psi, &q, &Formula::True, &sig, &cfg()).unwrap();
            assert!(verdict.is_entailed(), "{text} should answer any question");
        }
    }

    #[test]
    fn extraction_of_invited_answer_gives_pj() {
        // answer I(j) to ?P(x) under forall x (I(x)<->P(x)) extracts P(j)
        let sig = sig_invited();
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        let psi = parse_formula("I(j)", &sig).unwrap();
        let q = question("P(x)", &sig);
        let r = extract_development(&psi, &q, &chi, &sig, &cfg()).unwrap();
        assert_eq!(r.development.to_string(), "P(j)");
        assert!(check_proof(&r.equivalence_proof));
        assert!(verify_extraction(&r, &psi, &q, &chi, &sig, &cfg()).unwrap());
    }

    #[test]
    fn extraction_through_fresh_predicate() {
        // answer L(s) to ?L(m(j)) given s = m(j) extracts L(m(j))
        let mut sig = Signature::new();
        sig.add_predicate("L", 1).unwrap();
        sig.add_function("j", 0, true).unwrap();
        sig.add_function("s", 0, true).unwrap();
        sig.add_function("m", 1, false).unwrap();
        let chi = parse_formula("s = m(j)", &sig).unwrap();
        let psi = parse_formula("L(s)", &sig).unwrap();
        let q = question("L(m(j))", &sig);
        let r = extract_development(&psi, &q, &chi, &sig, &cfg()).unwrap();
        assert_eq!(r.development.to_string(), "L(m(j))");
        assert!(verify_extraction(&r, &psi, &q, &chi, &sig, &cfg()).unwrap());
    }

    #[test]
    fn extraction_with_open_answer_regeneralizes_constants() {
        // the open answer I(y) to ?P(x) under the matching context: the
        // answer's free variable goes through a fresh rigid constant and
        // comes back re-generalized, giving the development P(y)
        let sig = sig_invited();
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        let psi = parse_formula("I(y)", &sig).unwrap();
        let q = question("P(x)", &sig);
        let r = extract_development(&psi, &q, &chi, &sig, &cfg()).unwrap();
        assert_eq!(r.development.to_string(), "P(y)");
        assert!(r
            .trace
            .steps
            .iter()
            .any(|(label, _)| label == "fresh-constants"));
        assert!(verify_extraction(&r, &psi, &q, &chi, &sig, &cfg()).unwrap());
    }

    #[test]
    fn extraction_of_universal_answer_is_itself() {
        let sig = sig_invited();
        let psi = parse_formula("forall x. P(x)", &sig).unwrap();
        let q = question("P(x)", &sig);
        let r = extract_development(&psi, &q, &Formula::True, &sig, &cfg()).unwrap();
        assert!(alpha_eq(&r.development, &psi));
        assert!(verify_extraction(&r, &psi, &q, &Formula::True, &sig, &cfg()).unwrap());
    }

    #[test]
    fn extraction_of_tautology_builds_question_tautology() {
        let mut sig = Signature::new();
        sig.add_predicate("p", 0).unwrap();
        sig.add_predicate("q", 0).unwrap();
        let psi = parse_formula("p | ~p", &sig).unwrap();
        let q = question("q", &sig);
        let r = extract_development(&psi, &q, &Formula::True, &sig, &cfg()).unwrap();
        assert_eq!(r.development.to_string(), "q | ~q");
        assert!(verify_extraction(&r, &psi, &q, &Formula::True, &sig, &cfg()).unwrap());
    }

    #[test]
    fn prover_counterexample_becomes_modal_countermodel() {
        // with the oracle restricted to one world, the refutation comes
        // from the prover's classical search and is read back as a
        // two-world countermodel through the model correspondence
        let mut sig = Signature::new();
        sig.add_predicate("F", 1).unwrap();
        sig.add_predicate("R", 0).unwrap();
        sig.add_function("j", 0, true).unwrap();
        let narrow = EngineConfig { bounds: Bounds::new(1, 1), ..cfg() };
        let verdict = decide_entailment(
            &[question("F(j)", &sig)],
            &Formula::True,
            &question("R", &sig),
            &sig,
            &narrow,
        )
        .unwrap();
        match verdict {
            Verdict::NotEntailed(cm) => {
                assert_eq!(cm.structure.worlds().len(), 2);
                let premise = question_partition(&cm.structure, &question("F(j)", &sig)).unwrap();
                let target = question_partition(&cm.structure, &question("R", &sig)).unwrap();
                assert!(premise.relates(&cm.pair.0, &cm.pair.1));
                assert!(!target.relates(&cm.pair.0, &cm.pair.1));
            }
            other => panic!("expected a converted countermodel, got {}", other.label()),
        }
    }

    #[test]
    fn entailment_is_reflexive_on_corpus() {
        let sig = sig_invited();
        for text in [
            "P(x)",
            "I(j)",
            "forall x. P(x)",
            "exists x. (P(x) & ~(x = j))",
            "P(x) & I(x)",
        ] {
            let question = question(text, &sig);
            let verdict =
                decide_entailment(std::slice::from_ref(&question), &Formula::True, &question, &sig, &cfg())
                    .unwrap();
            assert!(verdict.is_entailed(), "?{text} must entail itself");
        }
    }

    #[test]
    fn entailment_survives_context_strengthening() {
        // strengthening the common ground conjunctively preserves verdicts
        let sig = sig_invited();
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        let stronger = Formula::and(chi.clone(), parse_formula("I(j)", &sig).unwrap());
        for context in [chi, stronger] {
            let verdict = decide_entailment(
                &[question("I(x)", &sig)],
                &context,
                &question("P(x)", &sig),
                &sig,
                &cfg(),
            )
            .unwrap();
            assert!(verdict.is_entailed());
        }
    }

    #[test]
    fn failed_development_detected_by_verification() {
        // P(d) with d non-rigid is equivalent to itself but not a
        // development of P(x)
        let mut sig = sig_invited();
        sig.add_function("d", 0, false).unwrap();
        let psi = parse_formula("P(d)", &sig).unwrap();
        let q = question("P(x)", &sig);
        let fake = ExtractionResult {
            development: psi.clone(),
            tree: DevelopmentTree::Identity {
                left: Term::constant("d"),
                right: Term::constant("d"),
            },
            equivalence_proof: Proof { steps: vec![] },
            trace: PipelineTrace::default(),
        };
        assert!(!verify_extraction(&fake, &psi, &q, &Formula::True, &sig, &cfg()).unwrap());
    }
}

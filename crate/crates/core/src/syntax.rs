//! Terms, formulas, questions, capture-avoiding substitution, rigidity,
//! rigid-instance matching, and the priming / agreement translations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::signature::{is_primed, Signature, PRIME_MARK};

/// A first-order term: a variable or a function application.
/// Constants are arity-0 applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_owned())
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_owned(), vec![])
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_owned(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Nesting depth: variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => {
                1 + args.iter().map(Term::depth).max().unwrap_or(0)
            }
        }
    }

    fn collect_vars(&self, order: &mut Vec<String>, seen: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v.clone()) {
                    order.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(order, seen)),
        }
    }

    /// Variables of the term in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut order = Vec::new();
        self.collect_vars(&mut order, &mut BTreeSet::new());
        order
    }

    pub fn function_symbols(&self, out: &mut BTreeSet<String>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|t| t.function_symbols(out));
        }
    }

    fn apply(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|t| t.apply(map)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
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
    }
}

/// A first-order formula with equality. Verum and falsum are first-class
/// nodes; the extraction pipeline rewrites them explicitly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(name.to_owned(), args)
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_owned(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_owned(), Box::new(f))
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conjoin(fs: Vec<Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn is_closed(&self) -> bool {
        free_variables(self).is_empty()
    }

    /// Number of AST nodes. Atoms (including verum/falsum and identities)
    /// count 1 regardless of term size.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// All predicate symbols occurring in the formula.
    pub fn predicate_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_atoms(&mut |f| {
            if let Formula::Pred(p, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// All function symbols occurring in the formula.
    pub fn function_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_atoms(&mut |f| match f {
            Formula::Pred(_, args) => args.iter().for_each(|t| t.function_symbols(&mut out)),
            Formula::Eq(l, r) => {
                l.function_symbols(&mut out);
                r.function_symbols(&mut out);
            }
            _ => {}
        });
        out
    }

    fn walk_atoms(&self, f: &mut impl FnMut(&Formula)) {
        match self {
            Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => f(self),
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.walk_atoms(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                l.walk_atoms(f);
                r.walk_atoms(f);
            }
        }
    }
}

/// A question wraps a formula; its free variables are the question's
/// abstracted positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Question {
    pub body: Formula,
}

impl Question {
    pub fn new(body: Formula) -> Self {
        Question { body }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.body)
    }
}

/// A finite map from variable names to terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: &str, term: Term) -> Self {
        self.map.insert(var.to_owned(), term);
        self
    }

    pub fn is_rigid(&self, sig: &Signature) -> bool {
        self.map.values().all(|t| is_rigid_term(t, sig))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        write!(f, "}}")
    }
}

/// Free variables in first-occurrence order of a left-to-right traversal.
/// The order fixes the quantifier prefix of [`agreement_formula`].
pub fn free_variables(f: &Formula) -> Vec<String> {
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut order, &mut seen);
    order
}

fn collect_free(
    f: &Formula,
    bound: &mut Vec<String>,
    order: &mut Vec<String>,
    seen: &mut BTreeSet<String>,
) {
    let mut term = |t: &Term| {
        for v in t.variables() {
            if !bound.contains(&v) && seen.insert(v.clone()) {
                order.push(v);
            }
        }
    };
    match f {
        Formula::True | Formula::False => {}
        Formula::Pred(_, args) => args.iter().for_each(term),
        Formula::Eq(l, r) => {
            term(l);
            term(r);
        }
        Formula::Not(g) => collect_free(g, bound, order, seen),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            collect_free(l, bound, order, seen);
            collect_free(r, bound, order, seen);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            bound.push(v.clone());
            collect_free(g, bound, order, seen);
            bound.pop();
        }
    }
}

/// Smallest `base`, `base0`, `base1`, ... not in `avoid`.
fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_owned();
    }
    let mut k = 0usize;
    loop {
        let cand = format!("{base}{k}");
        if !avoid.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// Capture-avoiding simultaneous substitution. A bound variable is
/// renamed (base name plus minimal numeric suffix) exactly when a term
/// being substituted under it would have a variable captured.
pub fn substitute(f: &Formula, subst: &Substitution) -> Formula {
    substitute_map(f, &subst.map)
}

pub fn substitute_map(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Pred(p, args) => {
            Formula::Pred(p.clone(), args.iter().map(|t| t.apply(map)).collect())
        }
        Formula::Eq(l, r) => Formula::Eq(l.apply(map), r.apply(map)),
        Formula::Not(g) => Formula::not(substitute_map(g, map)),
        Formula::And(l, r) => Formula::and(substitute_map(l, map), substitute_map(r, map)),
        Formula::Or(l, r) => Formula::or(substitute_map(l, map), substitute_map(r, map)),
        Formula::Imp(l, r) => Formula::imp(substitute_map(l, map), substitute_map(r, map)),
        Formula::Iff(l, r) => Formula::iff(substitute_map(l, map), substitute_map(r, map)),
        Formula::Forall(v, g) => {
            let (v2, g2, inner) = subst_under_binder(v, g, map);
            Formula::Forall(v2, Box::new(substitute_map(&g2, &inner)))
        }
        Formula::Exists(v, g) => {
            let (v2, g2, inner) = subst_under_binder(v, g, map);
            Formula::Exists(v2, Box::new(substitute_map(&g2, &inner)))
        }
    }
}

fn subst_under_binder(
    v: &str,
    body: &Formula,
    map: &BTreeMap<String, Term>,
) -> (String, Formula, BTreeMap<String, Term>) {
    let body_free: BTreeSet<String> = free_variables(body).into_iter().collect();
    let inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| *k != v && body_free.contains(*k))
        .map(|(k, t)| (k.clone(), t.clone()))
        .collect();
    let applied_vars: BTreeSet<String> =
        inner.values().flat_map(|t| t.variables()).collect();
    if applied_vars.contains(v) {
        let mut avoid: BTreeSet<String> = body_free;
        avoid.extend(applied_vars.iter().cloned());
        avoid.extend(inner.keys().cloned());
        avoid.insert(v.to_owned());
        let v2 = fresh_name(v, &avoid);
        let mut rename = BTreeMap::new();
        rename.insert(v.to_owned(), Term::Var(v2.clone()));
        (v2, substitute_map(body, &rename), inner)
    } else {
        (v.to_owned(), body.clone(), inner)
    }
}

/// A term is rigid when every function symbol in it is flagged rigid;
/// variables are rigid constituents.
pub fn is_rigid_term(t: &Term, sig: &Signature) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            sig.is_rigid_function(f) && args.iter().all(|a| is_rigid_term(a, sig))
        }
    }
}

/// Renames every binder to `%0`, `%1`, ... in traversal order. The `%`
/// names are outside the surface identifier class, so the result is only
/// used as a canonical key for alpha-equivalence checks and deduplication.
pub fn alpha_normalize(f: &Formula) -> Formula {
    fn go(f: &Formula, env: &mut Vec<(String, String)>, counter: &mut usize) -> Formula {
        let rename_term = |t: &Term, env: &Vec<(String, String)>| -> Term {
            fn tr(t: &Term, env: &Vec<(String, String)>) -> Term {
                match t {
                    Term::Var(v) => {
                        for (orig, new) in env.iter().rev() {
                            if orig == v {
                                return Term::Var(new.clone());
                            }
                        }
                        t.clone()
                    }
                    Term::App(f, args) => {
                        Term::App(f.clone(), args.iter().map(|a| tr(a, env)).collect())
                    }
                }
            }
            tr(t, env)
        };
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|t| rename_term(t, env)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(rename_term(l, env), rename_term(r, env)),
            Formula::Not(g) => Formula::not(go(g, env, counter)),
            Formula::And(l, r) => Formula::and(go(l, env, counter), go(r, env, counter)),
            Formula::Or(l, r) => Formula::or(go(l, env, counter), go(r, env, counter)),
            Formula::Imp(l, r) => Formula::imp(go(l, env, counter), go(r, env, counter)),
            Formula::Iff(l, r) => Formula::iff(go(l, env, counter), go(r, env, counter)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let fresh = format!("%{counter}");
                *counter += 1;
                env.push((v.clone(), fresh.clone()));
                let body = go(g, env, counter);
                env.pop();
                match f {
                    Formula::Forall(..) => Formula::Forall(fresh, Box::new(body)),
                    _ => Formula::Exists(fresh, Box::new(body)),
                }
            }
        }
    }
    go(f, &mut Vec::new(), &mut 0)
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_normalize(a) == alpha_normalize(b)
}

/// Matches `candidate` against `pattern`: returns the substitution with
/// rigid range terms whose capture-avoiding application to `pattern`
/// yields `candidate` up to bound-variable renaming, if one exists.
/// Variables bound inside `pattern` never enter the domain.
pub fn match_rigid_instance(
    candidate: &Formula,
    pattern: &Formula,
    sig: &Signature,
) -> Option<Substitution> {
    let mut subst = BTreeMap::new();
    let mut binders: Vec<(String, String)> = Vec::new();
    if match_formula(pattern, candidate, &mut binders, &mut subst, sig) {
        let out = Substitution { map: subst };
        debug_assert!(alpha_eq(&substitute(pattern, &out), candidate));
        Some(out)
    } else {
        None
    }
}

fn match_formula(
    pat: &Formula,
    cand: &Formula,
    binders: &mut Vec<(String, String)>,
    subst: &mut BTreeMap<String, Term>,
    sig: &Signature,
) -> bool {
    match (pat, cand) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (Formula::Pred(p, pa), Formula::Pred(q, ca)) => {
            p == q
                && pa.len() == ca.len()
                && pa
                    .iter()
                    .zip(ca)
                    .all(|(x, y)| match_term(x, y, binders, subst, sig))
        }
        (Formula::Eq(pl, pr), Formula::Eq(cl, cr)) => {
            match_term(pl, cl, binders, subst, sig) && match_term(pr, cr, binders, subst, sig)
        }
        (Formula::Not(p), Formula::Not(c)) => match_formula(p, c, binders, subst, sig),
        (Formula::And(pl, pr), Formula::And(cl, cr))
        | (Formula::Or(pl, pr), Formula::Or(cl, cr))
        | (Formula::Imp(pl, pr), Formula::Imp(cl, cr))
        | (Formula::Iff(pl, pr), Formula::Iff(cl, cr)) => {
            match_formula(pl, cl, binders, subst, sig)
                && match_formula(pr, cr, binders, subst, sig)
        }
        (Formula::Forall(pv, pb), Formula::Forall(cv, cb))
        | (Formula::Exists(pv, pb), Formula::Exists(cv, cb)) => {
            binders.push((pv.clone(), cv.clone()));
            let ok = match_formula(pb, cb, binders, subst, sig);
            binders.pop();
            ok
        }
        _ => false,
    }
}

fn match_term(
    pat: &Term,
    cand: &Term,
    binders: &mut Vec<(String, String)>,
    subst: &mut BTreeMap<String, Term>,
    sig: &Signature,
) -> bool {
    match pat {
        Term::Var(x) => {
            // innermost pattern binder for x, if any
            let p_idx = binders.iter().rposition(|(pv, _)| pv == x);
            if let Some(i) = p_idx {
                // bound occurrence: the candidate must be the variable
                // paired at the same binder
                match cand {
                    Term::Var(cv) => {
                        binders.iter().rposition(|(_, c)| c == cv) == Some(i)
                    }
                    _ => false,
                }
            } else {
                // free occurrence: the candidate term must be rigid, free
                // of candidate-bound variables, and uniform across uses
                let cand_bound_ok = cand
                    .variables()
                    .iter()
                    .all(|v| !binders.iter().any(|(_, cv)| cv == v));
                if !cand_bound_ok || !is_rigid_term(cand, sig) {
                    return false;
                }
                match subst.get(x) {
                    Some(prev) => prev == cand,
                    None => {
                        subst.insert(x.clone(), cand.clone());
                        true
                    }
                }
            }
        }
        Term::App(f, pa) => match cand {
            Term::App(g, ca) if f == g && pa.len() == ca.len() => pa
                .iter()
                .zip(ca)
                .all(|(x, y)| match_term(x, y, binders, subst, sig)),
            _ => false,
        },
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("formula already contains the primed symbol `{0}`")]
    AlreadyPrimed(String),
}

/// Replaces every predicate symbol and every non-rigid function symbol by
/// its primed copy. Rigid function symbols, variables, and the logical
/// structure are unchanged. Rejects input that already uses primed names.
pub fn prime(f: &Formula, sig: &Signature) -> Result<Formula, PrimeError> {
    for p in f.predicate_symbols() {
        if is_primed(&p) {
            return Err(PrimeError::AlreadyPrimed(p));
        }
    }
    for g in f.function_symbols() {
        if is_primed(&g) {
            return Err(PrimeError::AlreadyPrimed(g));
        }
    }
    Ok(prime_unchecked(f, sig))
}

fn prime_term(t: &Term, sig: &Signature) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let name = if sig.is_rigid_function(f) {
                f.clone()
            } else {
                format!("{f}{PRIME_MARK}")
            };
            Term::App(name, args.iter().map(|a| prime_term(a, sig)).collect())
        }
    }
}

fn prime_unchecked(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Pred(p, args) => Formula::Pred(
            format!("{p}{PRIME_MARK}"),
            args.iter().map(|t| prime_term(t, sig)).collect(),
        ),
        Formula::Eq(l, r) => Formula::Eq(prime_term(l, sig), prime_term(r, sig)),
        Formula::Not(g) => Formula::not(prime_unchecked(g, sig)),
        Formula::And(l, r) => Formula::and(prime_unchecked(l, sig), prime_unchecked(r, sig)),
        Formula::Or(l, r) => Formula::or(prime_unchecked(l, sig), prime_unchecked(r, sig)),
        Formula::Imp(l, r) => Formula::imp(prime_unchecked(l, sig), prime_unchecked(r, sig)),
        Formula::Iff(l, r) => Formula::iff(prime_unchecked(l, sig), prime_unchecked(r, sig)),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(prime_unchecked(g, sig))),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(prime_unchecked(g, sig))),
    }
}

/// Strips one prime mark from every symbol that carries one. Left inverse
/// of [`prime`].
pub fn unprime(f: &Formula) -> Formula {
    fn strip(name: &str) -> String {
        name.strip_suffix(PRIME_MARK).unwrap_or(name).to_owned()
    }
    fn term(t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => Term::App(strip(f), args.iter().map(term).collect()),
        }
    }
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Pred(p, args) => Formula::Pred(strip(p), args.iter().map(term).collect()),
        Formula::Eq(l, r) => Formula::Eq(term(l), term(r)),
        Formula::Not(g) => Formula::not(unprime(g)),
        Formula::And(l, r) => Formula::and(unprime(l), unprime(r)),
        Formula::Or(l, r) => Formula::or(unprime(l), unprime(r)),
        Formula::Imp(l, r) => Formula::imp(unprime(l), unprime(r)),
        Formula::Iff(l, r) => Formula::iff(unprime(l), unprime(r)),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(unprime(g))),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(unprime(g))),
    }
}

/// The closed formula stating that a question's extension agrees between
/// the plain and primed vocabularies: for `?phi` with free variables
/// `x1..xn`, this is `forall x1..xn (phi <-> phi*)`.
pub fn agreement_formula(q: &Question, sig: &Signature) -> Result<Formula, PrimeError> {
    let primed = prime(&q.body, sig)?;
    let mut out = Formula::iff(q.body.clone(), primed);
    for v in free_variables(&q.body).into_iter().rev() {
        out = Formula::Forall(v, Box::new(out));
    }
    Ok(out)
}

// Pretty printer. Precedence: <-> is weakest, then ->, |, &, then the
// prefix operators. <->, | and & chain to the left, -> to the right;
// quantifier and negation bodies sit at prefix level, so composite
// bodies are parenthesized.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 1, f)
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Imp(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) | Formula::Forall(..) | Formula::Exists(..) => 5,
        Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => 6,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = precedence(f);
    let parens = prec < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Pred(p, args) => {
            write!(out, "{p}")?;
            if !args.is_empty() {
                write!(out, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")?;
            }
        }
        Formula::Eq(l, r) => write!(out, "{l} = {r}")?,
        Formula::Not(g) => {
            write!(out, "~")?;
            // parenthesize identities under negation for readability
            if matches!(**g, Formula::Eq(..)) {
                write!(out, "(")?;
                write_formula(g, 1, out)?;
                write!(out, ")")?;
            } else {
                write_formula(g, 5, out)?;
            }
        }
        Formula::And(l, r) => {
            write_formula(l, 4, out)?;
            write!(out, " & ")?;
            write_formula(r, 5, out)?;
        }
        Formula::Or(l, r) => {
            write_formula(l, 3, out)?;
            write!(out, " | ")?;
            write_formula(r, 4, out)?;
        }
        Formula::Imp(l, r) => {
            write_formula(l, 3, out)?;
            write!(out, " -> ")?;
            write_formula(r, 2, out)?;
        }
        Formula::Iff(l, r) => {
            write_formula(l, 1, out)?;
            write!(out, " <-> ")?;
            write_formula(r, 2, out)?;
        }
        Formula::Forall(v, g) => {
            write!(out, "forall {v}. ")?;
            write_formula(g, 5, out)?;
        }
        Formula::Exists(v, g) => {
            write!(out, "exists {v}. ")?;
            write_formula(g, 5, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

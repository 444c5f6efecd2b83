//! Developments: deciding, enumerating, and classifying the formulas
//! built from rigid instances of a question and rigid identity
//! statements using connectives and quantifiers.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use crate::prover::ground::rigid_term_pool;
use crate::prover::{prove, ProofResult, Sequent};
use crate::semantics::{find_countermodel, Bounds, Countermodel, SemanticsError};
use crate::signature::Signature;
use crate::syntax::{
    alpha_eq, alpha_normalize, free_variables, is_rigid_term, match_rigid_instance, substitute,
    Formula, Question, Substitution, Term,
};

/// Which grammar productions are admitted. The default grammar allows
/// identities, variable-variable identities, and existential
/// quantification; the restricted variants drop them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DevelopmentVariant {
    pub allow_var_var_identity: bool,
    pub allow_existential: bool,
    pub allow_equality: bool,
}

impl Default for DevelopmentVariant {
    fn default() -> Self {
        DevelopmentVariant {
            allow_var_var_identity: true,
            allow_existential: true,
            allow_equality: true,
        }
    }
}

impl DevelopmentVariant {
    pub fn no_existential() -> Self {
        DevelopmentVariant { allow_existential: false, ..Default::default() }
    }

    pub fn no_var_var_identity() -> Self {
        DevelopmentVariant { allow_var_var_identity: false, ..Default::default() }
    }

    pub fn no_equality() -> Self {
        DevelopmentVariant { allow_equality: false, ..Default::default() }
    }
}

/// A derivation witnessing that a formula is a development: leaves are
/// rigid instances of pool formulas or rigid identities, inner nodes the
/// connective and quantifier constructors used. Implication and
/// biconditional nodes are admitted as boolean sugar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DevelopmentTree {
    Instance { pattern: Formula, subst: Substitution },
    Identity { left: Term, right: Term },
    Not(Box<DevelopmentTree>),
    And(Box<DevelopmentTree>, Box<DevelopmentTree>),
    Or(Box<DevelopmentTree>, Box<DevelopmentTree>),
    Imp(Box<DevelopmentTree>, Box<DevelopmentTree>),
    Iff(Box<DevelopmentTree>, Box<DevelopmentTree>),
    Forall(String, Box<DevelopmentTree>),
    Exists(String, Box<DevelopmentTree>),
}

impl DevelopmentTree {
    /// Rebuilds the derived formula; equal to the checked candidate up to
    /// bound-variable renaming.
    pub fn replay(&self) -> Formula {
        match self {
            DevelopmentTree::Instance { pattern, subst } => substitute(pattern, subst),
            DevelopmentTree::Identity { left, right } => {
                Formula::Eq(left.clone(), right.clone())
            }
            DevelopmentTree::Not(t) => Formula::not(t.replay()),
            DevelopmentTree::And(l, r) => Formula::and(l.replay(), r.replay()),
            DevelopmentTree::Or(l, r) => Formula::or(l.replay(), r.replay()),
            DevelopmentTree::Imp(l, r) => Formula::imp(l.replay(), r.replay()),
            DevelopmentTree::Iff(l, r) => Formula::iff(l.replay(), r.replay()),
            DevelopmentTree::Forall(v, t) => Formula::Forall(v.clone(), Box::new(t.replay())),
            DevelopmentTree::Exists(v, t) => Formula::Exists(v.clone(), Box::new(t.replay())),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            DevelopmentTree::Instance { .. } | DevelopmentTree::Identity { .. }
        )
    }

    fn render(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            DevelopmentTree::Instance { pattern, subst } => {
                out.push_str(&format!("{pad}instance {pattern} {subst}\n"));
            }
            DevelopmentTree::Identity { left, right } => {
                out.push_str(&format!("{pad}identity {left} = {right}\n"));
            }
            DevelopmentTree::Not(t) => {
                out.push_str(&format!("{pad}not\n"));
                t.render(indent + 1, out);
            }
            DevelopmentTree::And(l, r)
            | DevelopmentTree::Or(l, r)
            | DevelopmentTree::Imp(l, r)
            | DevelopmentTree::Iff(l, r) => {
                let label = match self {
                    DevelopmentTree::And(..) => "and",
                    DevelopmentTree::Or(..) => "or",
                    DevelopmentTree::Imp(..) => "imp",
                    _ => "iff",
                };
                out.push_str(&format!("{pad}{label}\n"));
                l.render(indent + 1, out);
                r.render(indent + 1, out);
            }
            DevelopmentTree::Forall(v, t) => {
                out.push_str(&format!("{pad}forall {v}\n"));
                t.render(indent + 1, out);
            }
            DevelopmentTree::Exists(v, t) => {
                out.push_str(&format!("{pad}exists {v}\n"));
                t.render(indent + 1, out);
            }
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render(0, &mut out);
        out
    }
}

/// Decides whether `psi` is generated by the development grammar over
/// the pool formulas, restricted by the variant, returning a derivation
/// if so. At every subformula a leaf reading is tried before the
/// composite decomposition; results are memoized per subformula.
pub fn check_development(
    psi: &Formula,
    phis: &[Formula],
    sig: &Signature,
    variant: DevelopmentVariant,
) -> Option<DevelopmentTree> {
    let mut memo: HashMap<Formula, Option<DevelopmentTree>> = HashMap::new();
    let tree = check_rec(psi, phis, sig, variant, &mut memo)?;
    debug_assert!(alpha_eq(&tree.replay(), psi));
    Some(tree)
}

fn check_rec(
    f: &Formula,
    phis: &[Formula],
    sig: &Signature,
    variant: DevelopmentVariant,
    memo: &mut HashMap<Formula, Option<DevelopmentTree>>,
) -> Option<DevelopmentTree> {
    if let Some(cached) = memo.get(f) {
        return cached.clone();
    }
    let result = leaf_reading(f, phis, sig, variant)
        .or_else(|| composite_reading(f, phis, sig, variant, memo));
    memo.insert(f.clone(), result.clone());
    result
}

fn leaf_reading(
    f: &Formula,
    phis: &[Formula],
    sig: &Signature,
    variant: DevelopmentVariant,
) -> Option<DevelopmentTree> {
    for pattern in phis {
        if let Some(subst) = match_rigid_instance(f, pattern, sig) {
            return Some(DevelopmentTree::Instance { pattern: pattern.clone(), subst });
        }
    }
    if variant.allow_equality {
        if let Formula::Eq(l, r) = f {
            let var_var = matches!(l, Term::Var(_)) && matches!(r, Term::Var(_));
            if is_rigid_term(l, sig)
                && is_rigid_term(r, sig)
                && (variant.allow_var_var_identity || !var_var)
            {
                return Some(DevelopmentTree::Identity { left: l.clone(), right: r.clone() });
            }
        }
    }
    None
}

fn composite_reading(
    f: &Formula,
    phis: &[Formula],
    sig: &Signature,
    variant: DevelopmentVariant,
    memo: &mut HashMap<Formula, Option<DevelopmentTree>>,
) -> Option<DevelopmentTree> {
    match f {
        Formula::Not(g) => Some(DevelopmentTree::Not(Box::new(check_rec(
            g, phis, sig, variant, memo,
        )?))),
        Formula::And(l, r) => Some(DevelopmentTree::And(
            Box::new(check_rec(l, phis, sig, variant, memo)?),
            Box::new(check_rec(r, phis, sig, variant, memo)?),
        )),
        Formula::Or(l, r) => Some(DevelopmentTree::Or(
            Box::new(check_rec(l, phis, sig, variant, memo)?),
            Box::new(check_rec(r, phis, sig, variant, memo)?),
        )),
        Formula::Imp(l, r) => Some(DevelopmentTree::Imp(
            Box::new(check_rec(l, phis, sig, variant, memo)?),
            Box::new(check_rec(r, phis, sig, variant, memo)?),
        )),
        Formula::Iff(l, r) => Some(DevelopmentTree::Iff(
            Box::new(check_rec(l, phis, sig, variant, memo)?),
            Box::new(check_rec(r, phis, sig, variant, memo)?),
        )),
        Formula::Forall(v, g) => Some(DevelopmentTree::Forall(
            v.clone(),
            Box::new(check_rec(g, phis, sig, variant, memo)?),
        )),
        Formula::Exists(v, g) => {
            if !variant.allow_existential {
                return None;
            }
            Some(DevelopmentTree::Exists(
                v.clone(),
                Box::new(check_rec(g, phis, sig, variant, memo)?),
            ))
        }
        // verum and falsum are not grammar productions; a bare atom that
        // failed the leaf readings has no decomposition either
        _ => None,
    }
}

/// Stream of developments of the pool formulas in nondecreasing formula
/// size (AST node count), lexicographic by printed form within a size,
/// deduplicated up to bound-variable renaming. The leaf substitution
/// ranges draw on the rigid ground terms over the signature up to
/// `pool_depth` nesting, the patterns' own free variables, and the
/// binders in scope.
pub fn enumerate_developments(
    phis: &[Formula],
    sig: &Signature,
    max_size: usize,
    variant: DevelopmentVariant,
) -> DevelopmentStream {
    enumerate_developments_with_depth(phis, sig, max_size, variant, 1)
}

pub fn enumerate_developments_with_depth(
    phis: &[Formula],
    sig: &Signature,
    max_size: usize,
    variant: DevelopmentVariant,
    pool_depth: usize,
) -> DevelopmentStream {
    let mut patterns = phis.to_vec();
    patterns.sort_by_key(|f| f.to_string());
    patterns.dedup();
    let ground_pool = rigid_term_pool(sig, &[], pool_depth);
    let mut pattern_vars: Vec<String> = Vec::new();
    for p in &patterns {
        for v in free_variables(p) {
            if !pattern_vars.contains(&v) {
                pattern_vars.push(v);
            }
        }
    }
    let banned: BTreeSet<String> = patterns
        .iter()
        .flat_map(all_variable_names)
        .chain(pattern_vars.iter().cloned())
        .collect();
    let binders = binder_names(&banned, max_size);
    DevelopmentStream {
        patterns,
        variant,
        ground_pool,
        pattern_vars,
        binders,
        max_size,
        next_size: 1,
        buffer: VecDeque::new(),
        seen: HashSet::new(),
        memo: HashMap::new(),
    }
}

fn all_variable_names(f: &Formula) -> Vec<String> {
    let mut out = Vec::new();
    fn term_vars(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(v) => out.push(v.clone()),
            Term::App(_, args) => args.iter().for_each(|a| term_vars(a, out)),
        }
    }
    fn walk(f: &Formula, out: &mut Vec<String>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => args.iter().for_each(|t| term_vars(t, out)),
            Formula::Eq(l, r) => {
                term_vars(l, out);
                term_vars(r, out);
            }
            Formula::Not(g) => walk(g, out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                out.push(v.clone());
                walk(g, out);
            }
        }
    }
    walk(f, &mut out);
    out
}

/// Deterministic bound-variable names per quantifier depth, avoiding
/// everything in `banned`.
fn binder_names(banned: &BTreeSet<String>, count: usize) -> Vec<String> {
    let mut out = Vec::new();
    let seed = ["x", "y", "z", "u", "v", "w"];
    let mut k = 0usize;
    let mut i = 0usize;
    while out.len() < count {
        let cand = if i < seed.len() {
            seed[i].to_owned()
        } else {
            let name = format!("x{k}");
            k += 1;
            name
        };
        i += 1;
        if !banned.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

pub struct DevelopmentStream {
    patterns: Vec<Formula>,
    variant: DevelopmentVariant,
    ground_pool: Vec<Term>,
    pattern_vars: Vec<String>,
    binders: Vec<String>,
    max_size: usize,
    next_size: usize,
    buffer: VecDeque<Formula>,
    seen: HashSet<Formula>,
    memo: HashMap<(usize, usize), Rc<Vec<Formula>>>,
}

impl DevelopmentStream {
    fn term_pool(&self, depth: usize) -> Vec<Term> {
        let mut pool = self.ground_pool.clone();
        pool.extend(self.pattern_vars.iter().map(|v| Term::var(v)));
        pool.extend(self.binders[..depth].iter().map(|v| Term::var(v)));
        pool
    }

    fn leaves(&self, depth: usize) -> Vec<Formula> {
        let pool = self.term_pool(depth);
        let mut out = Vec::new();
        for pattern in &self.patterns {
            let fvs = free_variables(pattern);
            for combo in tuples(&pool, fvs.len()) {
                let subst = Substitution {
                    map: fvs.iter().cloned().zip(combo).collect(),
                };
                out.push(substitute(pattern, &subst));
            }
        }
        if self.variant.allow_equality {
            for l in &pool {
                for r in &pool {
                    let var_var = matches!(l, Term::Var(_)) && matches!(r, Term::Var(_));
                    if self.variant.allow_var_var_identity || !var_var {
                        out.push(Formula::Eq(l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }

    fn generate(&mut self, size: usize, depth: usize) -> Rc<Vec<Formula>> {
        if let Some(cached) = self.memo.get(&(size, depth)) {
            return Rc::clone(cached);
        }
        let mut out: Vec<Formula> = Vec::new();
        let mut seen_local: HashSet<Formula> = HashSet::new();
        let push = |f: Formula, out: &mut Vec<Formula>, seen: &mut HashSet<Formula>| {
            if seen.insert(f.clone()) {
                out.push(f);
            }
        };
        for leaf in self.leaves(depth) {
            if leaf.size() == size {
                push(leaf, &mut out, &mut seen_local);
            }
        }
        if size >= 2 {
            let inner = self.generate(size - 1, depth);
            for f in inner.iter() {
                push(Formula::not(f.clone()), &mut out, &mut seen_local);
            }
            let deeper = self.generate(size - 1, depth + 1);
            let binder = self.binders[depth].clone();
            for f in deeper.iter() {
                push(
                    Formula::Forall(binder.clone(), Box::new(f.clone())),
                    &mut out,
                    &mut seen_local,
                );
                if self.variant.allow_existential {
                    push(
                        Formula::Exists(binder.clone(), Box::new(f.clone())),
                        &mut out,
                        &mut seen_local,
                    );
                }
            }
        }
        if size >= 3 {
            for left_size in 1..=(size - 2) {
                let right_size = size - 1 - left_size;
                let lefts = self.generate(left_size, depth);
                let rights = self.generate(right_size, depth);
                for l in lefts.iter() {
                    for r in rights.iter() {
                        push(Formula::and(l.clone(), r.clone()), &mut out, &mut seen_local);
                        push(Formula::or(l.clone(), r.clone()), &mut out, &mut seen_local);
                        push(Formula::imp(l.clone(), r.clone()), &mut out, &mut seen_local);
                        push(Formula::iff(l.clone(), r.clone()), &mut out, &mut seen_local);
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert((size, depth), Rc::clone(&rc));
        rc
    }

    fn fill_next_size(&mut self) {
        while self.buffer.is_empty() && self.next_size <= self.max_size {
            let size = self.next_size;
            self.next_size += 1;
            let class = self.generate(size, 0);
            let mut fresh: Vec<Formula> = Vec::new();
            for f in class.iter() {
                let key = alpha_normalize(f);
                if self.seen.insert(key) {
                    fresh.push(f.clone());
                }
            }
            fresh.sort_by_key(|f| f.to_string());
            self.buffer.extend(fresh);
        }
    }
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

impl Iterator for DevelopmentStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        if self.buffer.is_empty() {
            self.fill_next_size();
        }
        self.buffer.pop_front()
    }
}

/// How an answer sits in the development grammar. The tautology and
/// contradiction flags are three-valued: None when the prover budget
/// cannot settle them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerClassification {
    pub is_tautology: Option<bool>,
    pub is_contradiction: Option<bool>,
    pub is_atomic: bool,
    pub existential_free: bool,
}

const CLASSIFY_BUDGET: usize = 4_000;

/// Classifies a derived answer. `existential_free` is the syntactic
/// criterion on the derivation: no existential node, and every negation
/// (or implication antecedent) applies directly to a leaf.
pub fn classify_answer(
    psi: &Formula,
    tree: &DevelopmentTree,
    sig: &Signature,
) -> AnswerClassification {
    let is_atomic = match tree {
        DevelopmentTree::Instance { .. } => true,
        DevelopmentTree::Not(inner) => matches!(**inner, DevelopmentTree::Instance { .. }),
        _ => false,
    };
    let closed = universal_closure(psi);
    let is_tautology = validity_status(&closed, sig);
    let is_contradiction = validity_status(&Formula::not(closed), sig);
    debug_assert!(!(is_tautology == Some(true) && is_contradiction == Some(true)));
    AnswerClassification {
        is_tautology,
        is_contradiction,
        is_atomic,
        existential_free: existential_free(tree),
    }
}

fn universal_closure(f: &Formula) -> Formula {
    let mut out = f.clone();
    for v in free_variables(f).into_iter().rev() {
        out = Formula::Forall(v, Box::new(out));
    }
    out
}

fn validity_status(f: &Formula, sig: &Signature) -> Option<bool> {
    let sequent = Sequent::new(vec![], f.clone(), sig.clone()).ok()?;
    match prove(&sequent, CLASSIFY_BUDGET).ok()? {
        ProofResult::Proved(_) => Some(true),
        ProofResult::CounterexampleFound(_) => Some(false),
        ProofResult::NotProved { .. } => None,
    }
}

fn existential_free(tree: &DevelopmentTree) -> bool {
    match tree {
        DevelopmentTree::Instance { .. } | DevelopmentTree::Identity { .. } => true,
        DevelopmentTree::Not(inner) => inner.is_leaf(),
        DevelopmentTree::And(l, r) | DevelopmentTree::Or(l, r) => {
            existential_free(l) && existential_free(r)
        }
        // an implication negates its antecedent, a biconditional both sides
        DevelopmentTree::Imp(l, r) => l.is_leaf() && existential_free(r),
        DevelopmentTree::Iff(l, r) => l.is_leaf() && r.is_leaf(),
        DevelopmentTree::Forall(_, inner) => existential_free(inner),
        DevelopmentTree::Exists(..) => false,
    }
}

/// Developments are entailed by their question: searches for a
/// countermodel to `?phi |= ?psi`, which must not exist when `psi`
/// develops `phi`. A hit flags an implementation bug.
pub fn development_entailment_check(
    phi: &Formula,
    psi: &Formula,
    sig: &Signature,
    bounds: Bounds,
) -> Result<Option<Countermodel>, SemanticsError> {
    find_countermodel(
        &[Question::new(phi.clone())],
        &Formula::True,
        &Question::new(psi.clone()),
        bounds,
        sig,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_predicate("P", 1).unwrap();
        sig.add_function("c", 0, true).unwrap();
        sig.add_function("d", 0, true).unwrap();
        sig.add_function("e", 0, false).unwrap();
        sig
    }

    fn px(s: &Signature) -> Formula {
        parse_formula("P(x)", s).unwrap()
    }

    #[test]
    fn conjunction_of_instances() {
        let s = sig();
        let psi = parse_formula("P(c) & P(d)", &s).unwrap();
        let tree = check_development(&psi, &[px(&s)], &s, Default::default()).unwrap();
        match &tree {
            DevelopmentTree::And(l, r) => {
                assert!(l.is_leaf());
                assert!(r.is_leaf());
            }
            other => panic!("expected conjunction, got {other:?}"),
        }
        assert!(alpha_eq(&tree.replay(), &psi));
    }

    #[test]
    fn existential_with_identity() {
        let s = sig();
        let psi = parse_formula("exists x. (P(x) & ~(x = c))", &s).unwrap();
        assert!(check_development(&psi, &[px(&s)], &s, Default::default()).is_some());
        assert!(
            check_development(&psi, &[px(&s)], &s, DevelopmentVariant::no_existential())
                .is_none()
        );
    }

    #[test]
    fn var_var_identity_variant() {
        let s = sig();
        let psi = parse_formula("exists x. exists y. ~(x = y)", &s).unwrap();
        assert!(check_development(&psi, &[px(&s)], &s, Default::default()).is_some());
        assert!(check_development(
            &psi,
            &[px(&s)],
            &s,
            DevelopmentVariant::no_var_var_identity()
        )
        .is_none());
    }

    #[test]
    fn non_rigid_instance_rejected() {
        let s = sig();
        let psi = parse_formula("P(e)", &s).unwrap();
        assert!(check_development(&psi, &[px(&s)], &s, Default::default()).is_none());
    }

    #[test]
    fn truth_constants_rejected() {
        let s = sig();
        assert!(check_development(&Formula::True, &[px(&s)], &s, Default::default()).is_none());
        assert!(check_development(&Formula::False, &[px(&s)], &s, Default::default()).is_none());
    }

    #[test]
    fn no_equality_variant_drops_identities() {
        let s = sig();
        let psi = parse_formula("c = c", &s).unwrap();
        assert!(check_development(&psi, &[px(&s)], &s, Default::default()).is_some());
        assert!(
            check_development(&psi, &[px(&s)], &s, DevelopmentVariant::no_equality()).is_none()
        );
    }

    #[test]
    fn enumeration_contains_expected_small_developments() {
        let s = sig();
        let got: Vec<Formula> =
            enumerate_developments(&[px(&s)], &s, 2, Default::default()).collect();
        let want = [
            parse_formula("P(c)", &s).unwrap(),
            parse_formula("P(x)", &s).unwrap(),
            parse_formula("c = c", &s).unwrap(),
            parse_formula("~P(c)", &s).unwrap(),
            parse_formula("forall x. P(x)", &s).unwrap(),
        ];
        for w in &want {
            assert!(
                got.iter().any(|g| alpha_eq(g, w)),
                "missing {w} in {}",
                got.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
            );
        }
    }

    #[test]
    fn enumeration_contains_only_john_identity_answer() {
        let mut s = Signature::new();
        s.add_predicate("L", 1).unwrap();
        s.add_function("j", 0, true).unwrap();
        let pattern = parse_formula("L(x)", &s).unwrap();
        let want = parse_formula("forall x. (L(x) -> x = j)", &s).unwrap();
        let got: Vec<Formula> =
            enumerate_developments(&[pattern], &s, 4, Default::default()).collect();
        assert!(got.iter().any(|g| alpha_eq(g, &want)));
    }

    #[test]
    fn enumeration_yields_pass_checker_in_size_order() {
        let s = sig();
        let phis = [px(&s)];
        let mut last_size = 0;
        for f in enumerate_developments(&phis, &s, 3, Default::default()) {
            assert!(f.size() >= last_size);
            last_size = f.size();
            assert!(
                check_development(&f, &phis, &s, Default::default()).is_some(),
                "enumerated formula fails the checker: {f}"
            );
        }
    }

    #[test]
    fn enumeration_deduplicates_across_sizes() {
        // with both P(x) and ~P(x) in the pool, ~P(c) arises as a size-1
        // leaf and again as a size-2 negation; the stream yields it once
        let s = sig();
        let pool = [
            parse_formula("P(x)", &s).unwrap(),
            parse_formula("~P(x)", &s).unwrap(),
        ];
        let target = parse_formula("~P(c)", &s).unwrap();
        let hits = enumerate_developments(&pool, &s, 3, Default::default())
            .filter(|f| alpha_eq(f, &target))
            .count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn enumeration_variant_monotonicity() {
        let s = sig();
        let phis = [px(&s)];
        let default: Vec<Formula> =
            enumerate_developments(&phis, &s, 3, Default::default()).collect();
        for variant in [
            DevelopmentVariant::no_existential(),
            DevelopmentVariant::no_var_var_identity(),
            DevelopmentVariant::no_equality(),
        ] {
            for f in enumerate_developments(&phis, &s, 3, variant) {
                assert!(
                    default.iter().any(|g| alpha_eq(g, &f)),
                    "restricted variant produced a formula outside the default set: {f}"
                );
            }
        }
    }

    #[test]
    fn classification_examples() {
        let mut s = Signature::new();
        s.add_predicate("L", 1).unwrap();
        s.add_function("j", 0, true).unwrap();
        s.add_function("m", 0, true).unwrap();
        let lx = parse_formula("L(x)", &s).unwrap();
        let phis = [lx];

        let lj = parse_formula("L(j)", &s).unwrap();
        let tree = check_development(&lj, &phis, &s, Default::default()).unwrap();
        let cls = classify_answer(&lj, &tree, &s);
        assert!(cls.is_atomic);
        assert!(cls.existential_free);
        assert_eq!(cls.is_tautology, Some(false));

        let somebody = parse_formula("exists x. L(x)", &s).unwrap();
        let tree = check_development(&somebody, &phis, &s, Default::default()).unwrap();
        let cls = classify_answer(&somebody, &tree, &s);
        assert!(!cls.existential_free);
        assert!(!cls.is_atomic);

        let either = parse_formula("L(j) | L(m)", &s).unwrap();
        let tree = check_development(&either, &phis, &s, Default::default()).unwrap();
        let cls = classify_answer(&either, &tree, &s);
        assert!(!cls.is_atomic);
        assert!(cls.existential_free);

        let taut = parse_formula("L(j) | ~L(j)", &s).unwrap();
        let tree = check_development(&taut, &phis, &s, Default::default()).unwrap();
        let cls = classify_answer(&taut, &tree, &s);
        assert_eq!(cls.is_tautology, Some(true));
        assert_eq!(cls.is_contradiction, Some(false));
    }

    #[test]
    fn development_pairs_have_no_countermodels() {
        let s = sig();
        let phi = px(&s);
        for psi in [
            parse_formula("P(c) & P(d)", &s).unwrap(),
            parse_formula("forall x. P(x)", &s).unwrap(),
            parse_formula("exists x. (P(x) & ~(x = c))", &s).unwrap(),
        ] {
            assert!(check_development(&psi, std::slice::from_ref(&phi), &s, Default::default()).is_some());
            let hit =
                development_entailment_check(&phi, &psi, &s, Bounds::default()).unwrap();
            assert!(hit.is_none(), "countermodel found for development {psi}");
        }
    }
}

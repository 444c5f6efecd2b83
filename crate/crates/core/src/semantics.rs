//! Finite first-order modal structures with constant domain, formula
//! evaluation, question partitions, and bounded countermodel search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signature::{Signature, PRIME_MARK};
use crate::syntax::{agreement_formula, free_variables, Formula, Question, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("free variable `{0}` has no assignment")]
    UnassignedVariable(String),
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
    #[error("formula has free variables: {0:?}")]
    NotClosed(Vec<String>),
    #[error("partitions are over different world sets")]
    WorldSetMismatch,
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("function `{0}` is not total over the domain")]
    NotTotal(String),
    #[error("rigid function `{0}` varies across worlds")]
    RigidViolation(String),
    #[error("structure enumeration needs {needed} structures, over the cap of {cap}")]
    EnumerationTooLarge { needed: u128, cap: u128 },
    #[error("invalid model file: {0}")]
    Format(String),
    #[error("empty `{0}` list: worlds and domain must be nonempty")]
    Empty(&'static str),
}

/// Search radius for the bounded countermodel oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_worlds: usize,
    pub max_domain_size: usize,
}

impl Bounds {
    pub fn new(max_worlds: usize, max_domain_size: usize) -> Self {
        assert!(max_worlds >= 1 && max_domain_size >= 1);
        Bounds { max_worlds, max_domain_size }
    }
}

/// Two worlds suffice for any countermodel to a question entailment;
/// domain three catches quantifier errors the smaller domains miss.
impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_worlds: 2, max_domain_size: 3 }
    }
}

/// Default cap on the number of structures an enumeration may visit.
pub const DEFAULT_STRUCTURE_CAP: u128 = 5_000_000;

/// Symbol layout shared between structures over the same signature:
/// fixes the index order of predicates and functions.
#[derive(Debug, PartialEq, Eq)]
struct Layout {
    /// (name, arity) in name order
    preds: Vec<(String, usize)>,
    /// (name, arity, rigid) in name order
    funcs: Vec<(String, usize, bool)>,
    pred_index: BTreeMap<String, usize>,
    func_index: BTreeMap<String, usize>,
}

impl Layout {
    fn from_signature(sig: &Signature) -> Rc<Layout> {
        let preds: Vec<(String, usize)> =
            sig.predicates().map(|(n, a)| (n.to_owned(), a)).collect();
        let funcs: Vec<(String, usize, bool)> = sig
            .functions()
            .map(|(n, i)| (n.to_owned(), i.arity, i.rigid))
            .collect();
        let pred_index = preds
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        let func_index = funcs
            .iter()
            .enumerate()
            .map(|(i, (n, _, _))| (n.clone(), i))
            .collect();
        Rc::new(Layout { preds, funcs, pred_index, func_index })
    }
}

/// A finite first-order modal structure (W, D, I) with constant domain.
/// Predicate extensions are tuple-index bitmasks, function tables map
/// tuple indices to entity indices; both are per world.
#[derive(Debug, Clone)]
pub struct ModalStructure {
    layout: Rc<Layout>,
    worlds: Vec<String>,
    domain: Vec<String>,
    /// [world][pred] bitmask over tuple indices
    pred_ext: Vec<Vec<u128>>,
    /// [world][func][tuple index] -> entity index
    func_tab: Vec<Vec<Vec<usize>>>,
}

fn tuple_count(domain: usize, arity: usize) -> u128 {
    (domain as u128).pow(arity as u32)
}

/// Mixed-radix index of an entity tuple, most significant digit first.
fn tuple_index(tuple: &[usize], domain: usize) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * domain + e)
}

fn index_tuple(mut index: usize, domain: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % domain;
        index /= domain;
    }
    out
}

impl ModalStructure {
    /// An empty-interpretation structure: all predicate extensions empty,
    /// all functions mapping every tuple to the first entity.
    pub fn new(
        sig: &Signature,
        worlds: Vec<String>,
        domain: Vec<String>,
    ) -> Result<Self, SemanticsError> {
        Self::with_layout(Layout::from_signature(sig), worlds, domain)
    }

    fn with_layout(
        layout: Rc<Layout>,
        worlds: Vec<String>,
        domain: Vec<String>,
    ) -> Result<Self, SemanticsError> {
        if worlds.is_empty() {
            return Err(SemanticsError::Empty("worlds"));
        }
        if domain.is_empty() {
            return Err(SemanticsError::Empty("domain"));
        }
        let n = domain.len();
        for (name, arity) in &layout.preds {
            if tuple_count(n, *arity) > 127 {
                return Err(SemanticsError::Format(format!(
                    "predicate `{name}` has too many tuples over this domain"
                )));
            }
        }
        let pred_ext = vec![vec![0u128; layout.preds.len()]; worlds.len()];
        let func_tab = worlds
            .iter()
            .map(|_| {
                layout
                    .funcs
                    .iter()
                    .map(|(_, arity, _)| vec![0usize; tuple_count(n, *arity) as usize])
                    .collect()
            })
            .collect();
        Ok(ModalStructure { layout, worlds, domain, pred_ext, func_tab })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn world_index(&self, world: &str) -> Result<usize, SemanticsError> {
        self.worlds
            .iter()
            .position(|w| w == world)
            .ok_or_else(|| SemanticsError::UnknownWorld(world.to_owned()))
    }

    pub fn entity_index(&self, entity: &str) -> Result<usize, SemanticsError> {
        self.domain
            .iter()
            .position(|e| e == entity)
            .ok_or_else(|| SemanticsError::UnknownEntity(entity.to_owned()))
    }

    /// Inserts a tuple (of entity names) into a predicate's extension at
    /// one world.
    pub fn add_pred_tuple(
        &mut self,
        world: &str,
        pred: &str,
        tuple: &[&str],
    ) -> Result<(), SemanticsError> {
        let w = self.world_index(world)?;
        let p = *self
            .layout
            .pred_index
            .get(pred)
            .ok_or_else(|| SemanticsError::Uninterpreted(pred.to_owned()))?;
        let arity = self.layout.preds[p].1;
        if tuple.len() != arity {
            return Err(SemanticsError::Arity {
                symbol: pred.to_owned(),
                expected: arity,
                got: tuple.len(),
            });
        }
        let idx: Result<Vec<usize>, _> = tuple.iter().map(|e| self.entity_index(e)).collect();
        let bit = tuple_index(&idx?, self.domain.len());
        self.pred_ext[w][p] |= 1u128 << bit;
        Ok(())
    }

    /// Sets a function value at one world: `func(args) = value`.
    pub fn set_func_value(
        &mut self,
        world: &str,
        func: &str,
        args: &[&str],
        value: &str,
    ) -> Result<(), SemanticsError> {
        let w = self.world_index(world)?;
        let fidx = *self
            .layout
            .func_index
            .get(func)
            .ok_or_else(|| SemanticsError::Uninterpreted(func.to_owned()))?;
        let arity = self.layout.funcs[fidx].1;
        if args.len() != arity {
            return Err(SemanticsError::Arity {
                symbol: func.to_owned(),
                expected: arity,
                got: args.len(),
            });
        }
        let idx: Result<Vec<usize>, _> = args.iter().map(|e| self.entity_index(e)).collect();
        let slot = tuple_index(&idx?, self.domain.len());
        let val = self.entity_index(value)?;
        self.func_tab[w][fidx][slot] = val;
        Ok(())
    }

    /// Sets a rigid function value in every world at once.
    pub fn set_rigid_func_value(
        &mut self,
        func: &str,
        args: &[&str],
        value: &str,
    ) -> Result<(), SemanticsError> {
        for world in self.worlds.clone() {
            self.set_func_value(&world, func, args, value)?;
        }
        Ok(())
    }

    /// Checks the rigid-symbol invariant: every rigid function has the
    /// same table in all worlds.
    pub fn check_rigid_invariant(&self) -> Result<(), SemanticsError> {
        for (fidx, (name, _, rigid)) in self.layout.funcs.iter().enumerate() {
            if !rigid {
                continue;
            }
            for w in 1..self.worlds.len() {
                if self.func_tab[w][fidx] != self.func_tab[0][fidx] {
                    return Err(SemanticsError::RigidViolation(name.clone()));
                }
            }
        }
        Ok(())
    }

    /// The substructure on a subset of worlds, interpretations unchanged.
    pub fn restrict_worlds(&self, keep: &[&str]) -> Result<ModalStructure, SemanticsError> {
        let idx: Result<Vec<usize>, _> = keep.iter().map(|w| self.world_index(w)).collect();
        let idx = idx?;
        if idx.is_empty() {
            return Err(SemanticsError::Empty("worlds"));
        }
        Ok(ModalStructure {
            layout: Rc::clone(&self.layout),
            worlds: idx.iter().map(|&i| self.worlds[i].clone()).collect(),
            domain: self.domain.clone(),
            pred_ext: idx.iter().map(|&i| self.pred_ext[i].clone()).collect(),
            func_tab: idx.iter().map(|&i| self.func_tab[i].clone()).collect(),
        })
    }

    /// The classical single-world structure over the primed-extended
    /// signature reading plain symbols at `w`, primed copies at `v`,
    /// and rigid functions from either (they agree).
    pub fn doubled_structure(
        &self,
        w: &str,
        v: &str,
        sig: &Signature,
    ) -> Result<ModalStructure, SemanticsError> {
        let wi = self.world_index(w)?;
        let vi = self.world_index(v)?;
        let ext = sig.primed_extension();
        let mut out = ModalStructure::new(&ext, vec!["w".to_owned()], self.domain.clone())?;
        for (name, _) in self.layout.preds.iter() {
            let src = *self.layout.pred_index.get(name).unwrap();
            let plain = *out.layout.pred_index.get(name).unwrap();
            out.pred_ext[0][plain] = self.pred_ext[wi][src];
            let primed = *out
                .layout
                .pred_index
                .get(&format!("{name}'"))
                .expect("primed predicate in extension");
            out.pred_ext[0][primed] = self.pred_ext[vi][src];
        }
        for (fidx, (name, _, rigid)) in self.layout.funcs.iter().enumerate() {
            let plain = *out.layout.func_index.get(name).unwrap();
            out.func_tab[0][plain] = self.func_tab[wi][fidx].clone();
            if !rigid {
                let primed = *out
                    .layout
                    .func_index
                    .get(&format!("{name}'"))
                    .expect("primed function in extension");
                out.func_tab[0][primed] = self.func_tab[vi][fidx].clone();
            }
        }
        Ok(out)
    }
}

/// A total map from variable names to entities of a structure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<String, usize>,
}

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn bind(
        mut self,
        m: &ModalStructure,
        var: &str,
        entity: &str,
    ) -> Result<Self, SemanticsError> {
        let e = m.entity_index(entity)?;
        self.map.insert(var.to_owned(), e);
        Ok(self)
    }
}

// Compiled formulas: symbols resolved to layout indices and variables to
// slots, so evaluation over large structure streams is pure index math.
#[derive(Debug, Clone)]
enum CTerm {
    Var(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
enum CFormula {
    True,
    False,
    Pred(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Or(Box<CFormula>, Box<CFormula>),
    Imp(Box<CFormula>, Box<CFormula>),
    Iff(Box<CFormula>, Box<CFormula>),
    Forall(Box<CFormula>),
    Exists(Box<CFormula>),
}

struct Compiler<'a> {
    layout: &'a Layout,
    /// variable name -> slot; quantifiers push and pop
    scope: Vec<String>,
}

impl<'a> Compiler<'a> {
    fn term(&self, t: &Term) -> Result<CTerm, SemanticsError> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rposition(|s| s == v)
                .map(CTerm::Var)
                .ok_or_else(|| SemanticsError::UnassignedVariable(v.clone())),
            Term::App(f, args) => {
                let fidx = *self
                    .layout
                    .func_index
                    .get(f)
                    .ok_or_else(|| SemanticsError::Uninterpreted(f.clone()))?;
                let expected = self.layout.funcs[fidx].1;
                if args.len() != expected {
                    return Err(SemanticsError::Arity {
                        symbol: f.clone(),
                        expected,
                        got: args.len(),
                    });
                }
                let args: Result<Vec<CTerm>, _> = args.iter().map(|a| self.term(a)).collect();
                Ok(CTerm::App(fidx, args?))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, SemanticsError> {
        Ok(match f {
            Formula::True => CFormula::True,
            Formula::False => CFormula::False,
            Formula::Pred(p, args) => {
                let pidx = *self
                    .layout
                    .pred_index
                    .get(p)
                    .ok_or_else(|| SemanticsError::Uninterpreted(p.clone()))?;
                let expected = self.layout.preds[pidx].1;
                if args.len() != expected {
                    return Err(SemanticsError::Arity {
                        symbol: p.clone(),
                        expected,
                        got: args.len(),
                    });
                }
                let args: Result<Vec<CTerm>, _> = args.iter().map(|a| self.term(a)).collect();
                CFormula::Pred(pidx, args?)
            }
            Formula::Eq(l, r) => CFormula::Eq(self.term(l)?, self.term(r)?),
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(l, r) => {
                CFormula::And(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Or(l, r) => {
                CFormula::Or(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Imp(l, r) => {
                CFormula::Imp(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Iff(l, r) => {
                CFormula::Iff(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Forall(v, g) => {
                self.scope.push(v.clone());
                let body = self.formula(g)?;
                self.scope.pop();
                CFormula::Forall(Box::new(body))
            }
            Formula::Exists(v, g) => {
                self.scope.push(v.clone());
                let body = self.formula(g)?;
                self.scope.pop();
                CFormula::Exists(Box::new(body))
            }
        })
    }
}

fn eval_cterm(m: &ModalStructure, w: usize, env: &mut Vec<usize>, t: &CTerm) -> usize {
    match t {
        CTerm::Var(slot) => env[*slot],
        CTerm::App(f, args) => {
            let idx: Vec<usize> = args.iter().map(|a| eval_cterm(m, w, env, a)).collect();
            m.func_tab[w][*f][tuple_index(&idx, m.domain.len())]
        }
    }
}

fn eval_cformula(m: &ModalStructure, w: usize, env: &mut Vec<usize>, f: &CFormula) -> bool {
    match f {
        CFormula::True => true,
        CFormula::False => false,
        CFormula::Pred(p, args) => {
            let idx: Vec<usize> = args.iter().map(|a| eval_cterm(m, w, env, a)).collect();
            let bit = tuple_index(&idx, m.domain.len());
            m.pred_ext[w][*p] & (1u128 << bit) != 0
        }
        CFormula::Eq(l, r) => eval_cterm(m, w, env, l) == eval_cterm(m, w, env, r),
        CFormula::Not(g) => !eval_cformula(m, w, env, g),
        CFormula::And(l, r) => eval_cformula(m, w, env, l) && eval_cformula(m, w, env, r),
        CFormula::Or(l, r) => eval_cformula(m, w, env, l) || eval_cformula(m, w, env, r),
        CFormula::Imp(l, r) => !eval_cformula(m, w, env, l) || eval_cformula(m, w, env, r),
        CFormula::Iff(l, r) => eval_cformula(m, w, env, l) == eval_cformula(m, w, env, r),
        CFormula::Forall(g) => {
            for e in 0..m.domain.len() {
                env.push(e);
                let ok = eval_cformula(m, w, env, g);
                env.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        CFormula::Exists(g) => {
            for e in 0..m.domain.len() {
                env.push(e);
                let ok = eval_cformula(m, w, env, g);
                env.pop();
                if ok {
                    return true;
                }
            }
            false
        }
    }
}

/// A formula compiled against a structure's layout, with an initial
/// slot per listed free variable.
struct Compiled {
    free: Vec<String>,
    body: CFormula,
}

fn compile(
    m: &ModalStructure,
    f: &Formula,
    free: Vec<String>,
) -> Result<Compiled, SemanticsError> {
    let mut c = Compiler { layout: &m.layout, scope: free.clone() };
    let body = c.formula(f)?;
    Ok(Compiled { free, body })
}

/// Tarskian satisfaction at one world; quantifiers range over the
/// structure's domain and `=` is identity of denotations.
pub fn evaluate(
    m: &ModalStructure,
    world: &str,
    g: &Assignment,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    let w = m.world_index(world)?;
    let free: Vec<String> = g.map.keys().cloned().collect();
    let compiled = compile(m, f, free)?;
    let mut env: Vec<usize> = compiled.free.iter().map(|v| g.map[v]).collect();
    Ok(eval_cformula(m, w, &mut env, &compiled.body))
}

/// True iff the closed formula holds at every world.
pub fn holds_globally(m: &ModalStructure, chi: &Formula) -> Result<bool, SemanticsError> {
    let fv = free_variables(chi);
    if !fv.is_empty() {
        return Err(SemanticsError::NotClosed(fv));
    }
    let compiled = compile(m, chi, Vec::new())?;
    let mut env = Vec::new();
    for w in 0..m.worlds.len() {
        if !eval_cformula(m, w, &mut env, &compiled.body) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An equivalence relation on a structure's worlds in canonical form:
/// blocks sorted internally and by first element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<String>>,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Vec<String>>) -> Partition {
        for b in &mut blocks {
            b.sort();
            b.dedup();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    pub fn world_set(&self) -> BTreeSet<&str> {
        self.blocks.iter().flatten().map(String::as_str).collect()
    }

    pub fn relates(&self, w: &str, v: &str) -> bool {
        self.blocks
            .iter()
            .any(|b| b.iter().any(|x| x == w) && b.iter().any(|x| x == v))
    }

    /// The common refinement: blocks are the nonempty pairwise
    /// intersections.
    pub fn meet(&self, other: &Partition) -> Result<Partition, SemanticsError> {
        if self.world_set() != other.world_set() {
            return Err(SemanticsError::WorldSetMismatch);
        }
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &other.blocks {
                let inter: Vec<String> = a.iter().filter(|w| b.contains(w)).cloned().collect();
                if !inter.is_empty() {
                    blocks.push(inter);
                }
            }
        }
        Ok(Partition::from_blocks(blocks))
    }

    /// True iff every block of `self` is contained in a block of `other`,
    /// i.e. the relation of `self` is a subset of the relation of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool, SemanticsError> {
        if self.world_set() != other.world_set() {
            return Err(SemanticsError::WorldSetMismatch);
        }
        Ok(self
            .blocks
            .iter()
            .all(|a| other.blocks.iter().any(|b| a.iter().all(|w| b.contains(w)))))
    }

    /// Single-block partition over the given worlds.
    pub fn total(worlds: &[String]) -> Partition {
        Partition::from_blocks(vec![worlds.to_vec()])
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{{{}}}", b.join(", "))?;
        }
        Ok(())
    }
}

/// Enumerates assignments to `vars` slots over a domain of size `n`,
/// calling `f` with each environment. Returns early when `f` does.
fn for_each_env(n: usize, slots: usize, env: &mut Vec<usize>, f: &mut impl FnMut(&mut Vec<usize>)) {
    if slots == 0 {
        f(env);
        return;
    }
    for e in 0..n {
        env.push(e);
        for_each_env(n, slots - 1, env, f);
        env.pop();
    }
}

/// The partition a question expresses: worlds are equivalent when the
/// body's truth value agrees under every assignment to its free variables.
pub fn question_partition(
    m: &ModalStructure,
    q: &Question,
) -> Result<Partition, SemanticsError> {
    let free = free_variables(&q.body);
    let compiled = compile(m, &q.body, free.clone())?;
    let mut keys: BTreeMap<Vec<bool>, Vec<String>> = BTreeMap::new();
    for w in 0..m.worlds.len() {
        let mut key = Vec::new();
        let mut env = Vec::new();
        for_each_env(m.domain.len(), free.len(), &mut env, &mut |env| {
            key.push(eval_cformula(m, w, env, &compiled.body));
        });
        keys.entry(key).or_default().push(m.worlds[w].clone());
    }
    Ok(Partition::from_blocks(keys.into_values().collect()))
}

/// The partition a set of questions expresses: the meet of the members'
/// partitions; the empty set yields the single-block partition.
pub fn questions_partition(
    m: &ModalStructure,
    qs: &[Question],
) -> Result<Partition, SemanticsError> {
    let mut out = Partition::total(&m.worlds);
    for q in qs {
        out = out.meet(&question_partition(m, q)?)?;
    }
    Ok(out)
}

/// Deterministic exhaustive stream of structures over `sig` within the
/// bounds, every one satisfying the rigid-symbol invariant. World and
/// entity identifiers are fixed as `w1..wk` and `e1..en`; interpretations
/// are enumerated in lexicographic slot order. One structure is patched
/// in place as the odometer advances; the iterator clones it per item,
/// while the internal visitor below evaluates without cloning.
#[derive(Debug)]
pub struct StructureEnumerator {
    layout: Rc<Layout>,
    bounds: Bounds,
    /// current (world count, domain size); None when exhausted
    shape: Option<(usize, usize)>,
    slots: Vec<Slot>,
    digits: Vec<u128>,
    started: bool,
    current: ModalStructure,
}

#[derive(Debug, Clone)]
struct Slot {
    kind: SlotKind,
    radix: u128,
}

#[derive(Debug, Clone)]
enum SlotKind {
    /// rigid function, one table across all worlds
    RigidFunc(usize),
    /// (world, func index)
    Func(usize, usize),
    /// (world, pred index)
    Pred(usize, usize),
}

fn shape_slots(layout: &Layout, k: usize, n: usize) -> Option<Vec<Slot>> {
    let mut slots = Vec::new();
    for (fidx, (_, arity, rigid)) in layout.funcs.iter().enumerate() {
        if *rigid {
            let tuples = tuple_count(n, *arity);
            let radix = (n as u128).checked_pow(u32::try_from(tuples).ok()?)?;
            slots.push(Slot { kind: SlotKind::RigidFunc(fidx), radix });
        }
    }
    for w in 0..k {
        for (fidx, (_, arity, rigid)) in layout.funcs.iter().enumerate() {
            if !*rigid {
                let tuples = tuple_count(n, *arity);
                let radix = (n as u128).checked_pow(u32::try_from(tuples).ok()?)?;
                slots.push(Slot { kind: SlotKind::Func(w, fidx), radix });
            }
        }
        for (pidx, (_, arity)) in layout.preds.iter().enumerate() {
            let tuples = tuple_count(n, *arity);
            if tuples > 127 {
                return None;
            }
            let radix = 1u128.checked_shl(tuples as u32)?;
            slots.push(Slot { kind: SlotKind::Pred(w, pidx), radix });
        }
    }
    Some(slots)
}

fn shape_count(slots: &[Slot]) -> Option<u128> {
    slots.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.radix))
}

/// Total number of structures within the bounds, or None on overflow.
pub fn count_structures(sig: &Signature, bounds: &Bounds) -> Option<u128> {
    let layout = Layout::from_signature(sig);
    let mut total = 0u128;
    for k in 1..=bounds.max_worlds {
        for n in 1..=bounds.max_domain_size {
            let slots = shape_slots(&layout, k, n)?;
            total = total.checked_add(shape_count(&slots)?)?;
        }
    }
    Some(total)
}

/// Builds the enumerator, refusing signatures whose enumeration exceeds
/// `cap` structures.
pub fn enumerate_structures_capped(
    sig: &Signature,
    bounds: Bounds,
    cap: u128,
) -> Result<StructureEnumerator, SemanticsError> {
    let needed = count_structures(sig, &bounds)
        .ok_or(SemanticsError::EnumerationTooLarge { needed: u128::MAX, cap })?;
    if needed > cap {
        return Err(SemanticsError::EnumerationTooLarge { needed, cap });
    }
    let layout = Layout::from_signature(sig);
    let slots = shape_slots(&layout, 1, 1).expect("counted above");
    let current = fresh_structure(&layout, 1, 1);
    let mut out = StructureEnumerator {
        layout,
        bounds,
        shape: Some((1, 1)),
        digits: vec![0; slots.len()],
        slots,
        started: false,
        current,
    };
    out.apply_all_slots();
    Ok(out)
}

pub fn enumerate_structures(
    sig: &Signature,
    bounds: Bounds,
) -> Result<StructureEnumerator, SemanticsError> {
    enumerate_structures_capped(sig, bounds, DEFAULT_STRUCTURE_CAP)
}

fn fresh_structure(layout: &Rc<Layout>, k: usize, n: usize) -> ModalStructure {
    let worlds: Vec<String> = (1..=k).map(|i| format!("w{i}")).collect();
    let domain: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    ModalStructure::with_layout(Rc::clone(layout), worlds, domain).expect("nonempty")
}

impl StructureEnumerator {
    /// Positions the odometer on the next structure; false when exhausted.
    fn advance(&mut self) -> bool {
        loop {
            if self.shape.is_none() {
                return false;
            }
            if !self.started {
                self.started = true;
                return true;
            }
            if self.increment_and_patch() {
                return true;
            }
            self.next_shape();
            if self.shape.is_some() {
                return true;
            }
        }
    }

    fn current(&self) -> &ModalStructure {
        &self.current
    }

    fn next_shape(&mut self) {
        let (k, n) = self.shape.unwrap();
        let next = if n < self.bounds.max_domain_size {
            Some((k, n + 1))
        } else if k < self.bounds.max_worlds {
            Some((k + 1, 1))
        } else {
            None
        };
        self.shape = next;
        if let Some((k, n)) = next {
            self.slots = shape_slots(&self.layout, k, n).expect("counted at construction");
            self.digits = vec![0; self.slots.len()];
            self.current = fresh_structure(&self.layout, k, n);
            self.apply_all_slots();
        }
    }

    fn apply_all_slots(&mut self) {
        for i in 0..self.slots.len() {
            self.apply_slot(i);
        }
    }

    fn apply_slot(&mut self, i: usize) {
        let (k, n) = self.shape.unwrap();
        let digit = self.digits[i];
        match self.slots[i].kind {
            SlotKind::RigidFunc(fidx) => {
                decode_func(digit, n, &mut self.current.func_tab[0][fidx]);
                for w in 1..k {
                    let table = self.current.func_tab[0][fidx].clone();
                    self.current.func_tab[w][fidx] = table;
                }
            }
            SlotKind::Func(w, fidx) => {
                decode_func(digit, n, &mut self.current.func_tab[w][fidx]);
            }
            SlotKind::Pred(w, pidx) => {
                self.current.pred_ext[w][pidx] = digit;
            }
        }
    }

    /// Advances the least-significant slot that can move, resets the
    /// later ones, and patches exactly the changed slots in place.
    fn increment_and_patch(&mut self) -> bool {
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.slots[i].radix {
                for j in i..self.digits.len() {
                    self.apply_slot(j);
                }
                return true;
            }
            self.digits[i] = 0;
        }
    }
}

fn decode_func(mut digit: u128, domain: usize, table: &mut [usize]) {
    for slot in table.iter_mut().rev() {
        *slot = (digit % domain as u128) as usize;
        digit /= domain as u128;
    }
}

impl Iterator for StructureEnumerator {
    type Item = ModalStructure;

    fn next(&mut self) -> Option<ModalStructure> {
        if self.advance() {
            Some(self.current().clone())
        } else {
            None
        }
    }
}

/// Runs `f` over every structure in the bounds without cloning; stops
/// early when `f` returns true and reports whether it ever did.
fn visit_structures(
    sig: &Signature,
    bounds: Bounds,
    cap: u128,
    mut f: impl FnMut(&ModalStructure) -> bool,
) -> Result<bool, SemanticsError> {
    let mut e = enumerate_structures_capped(sig, bounds, cap)?;
    while e.advance() {
        if f(e.current()) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A countermodel to a contextual question entailment: a structure
/// globally satisfying the context together with a world pair related by
/// the premise questions' partition but not the conclusion's.
#[derive(Debug, Clone)]
pub struct Countermodel {
    pub structure: ModalStructure,
    pub pair: (String, String),
}

/// Bounded refutation search: returns a countermodel within the bounds,
/// or None — which means "no countermodel up to the bounds", never a
/// proof of entailment. Any hit is re-checked on its two-world
/// restriction before being returned.
pub fn find_countermodel(
    qs: &[Question],
    chi: &Formula,
    q: &Question,
    bounds: Bounds,
    sig: &Signature,
) -> Result<Option<Countermodel>, SemanticsError> {
    find_countermodel_capped(qs, chi, q, bounds, sig, DEFAULT_STRUCTURE_CAP)
}

pub fn find_countermodel_capped(
    qs: &[Question],
    chi: &Formula,
    q: &Question,
    bounds: Bounds,
    sig: &Signature,
    cap: u128,
) -> Result<Option<Countermodel>, SemanticsError> {
    let fv = free_variables(chi);
    if !fv.is_empty() {
        return Err(SemanticsError::NotClosed(fv));
    }
    // compile everything once against the shared layout
    let layout = Layout::from_signature(sig);
    let probe = ModalStructure::with_layout(Rc::clone(&layout), vec!["w".into()], vec!["e".into()])?;
    let chi_c = compile(&probe, chi, Vec::new())?;
    let premise_c: Vec<Compiled> = qs
        .iter()
        .map(|question| {
            compile(&probe, &question.body, free_variables(&question.body))
        })
        .collect::<Result<_, _>>()?;
    let target_c = compile(&probe, &q.body, free_variables(&q.body))?;

    // per-world truth vector of a compiled question body over all
    // assignments to its free variables
    fn truth_vector(m: &ModalStructure, w: usize, c: &Compiled, out: &mut Vec<bool>) {
        let mut env = Vec::with_capacity(c.free.len());
        for_each_env(m.domain.len(), c.free.len(), &mut env, &mut |env| {
            out.push(eval_cformula(m, w, env, &c.body));
        });
    }

    let mut hit: Option<(ModalStructure, usize, usize)> = None;
    visit_structures(sig, bounds, cap, |m| {
        let mut scratch = Vec::new();
        for w in 0..m.worlds.len() {
            scratch.clear();
            if !eval_cformula(m, w, &mut scratch, &chi_c.body) {
                return false;
            }
        }
        // combined premise vector and target vector per world
        let mut premise_vecs: Vec<Vec<bool>> = Vec::with_capacity(m.worlds.len());
        let mut target_vecs: Vec<Vec<bool>> = Vec::with_capacity(m.worlds.len());
        for w in 0..m.worlds.len() {
            let mut pv = Vec::new();
            for c in &premise_c {
                truth_vector(m, w, c, &mut pv);
            }
            premise_vecs.push(pv);
            let mut tv = Vec::new();
            truth_vector(m, w, &target_c, &mut tv);
            target_vecs.push(tv);
        }
        for i in 0..m.worlds.len() {
            for j in (i + 1)..m.worlds.len() {
                if premise_vecs[i] == premise_vecs[j] && target_vecs[i] != target_vecs[j] {
                    hit = Some((m.clone(), i, j));
                    return true;
                }
            }
        }
        false
    })?;

    match hit {
        None => Ok(None),
        Some((m, i, j)) => {
            let (w, v) = (m.worlds[i].clone(), m.worlds[j].clone());
            // double-check through the public path and assert the
            // two-world restriction is again a countermodel
            let premise = questions_partition(&m, qs)?;
            let conclusion = question_partition(&m, q)?;
            assert!(premise.relates(&w, &v) && !conclusion.relates(&w, &v));
            let restricted = m.restrict_worlds(&[&w, &v])?;
            let rp = questions_partition(&restricted, qs)?;
            let rq = question_partition(&restricted, q)?;
            assert!(
                holds_globally(&restricted, chi)? && rp.relates(&w, &v) && !rq.relates(&w, &v),
                "two-world restriction of a countermodel must stay a countermodel"
            );
            Ok(Some(Countermodel { structure: m, pair: (w, v) }))
        }
    }
}

/// Inverse of [`ModalStructure::doubled_structure`]: reads a classical
/// single-world structure over the primed-extended signature back as a
/// two-world modal structure over `sig`, with the plain symbols
/// interpreting the first world and the primed copies the second.
pub fn classical_to_two_world(
    classical: &ModalStructure,
    sig: &Signature,
) -> Result<ModalStructure, SemanticsError> {
    let mut m = ModalStructure::new(
        sig,
        vec!["w1".to_owned(), "w2".to_owned()],
        classical.domain.clone(),
    )?;
    let src_pred = |name: &str| -> Result<u128, SemanticsError> {
        classical
            .layout
            .pred_index
            .get(name)
            .map(|&i| classical.pred_ext[0][i])
            .ok_or_else(|| SemanticsError::Uninterpreted(name.to_owned()))
    };
    let src_func = |name: &str| -> Result<Vec<usize>, SemanticsError> {
        classical
            .layout
            .func_index
            .get(name)
            .map(|&i| classical.func_tab[0][i].clone())
            .ok_or_else(|| SemanticsError::Uninterpreted(name.to_owned()))
    };
    for (name, _) in sig.predicates() {
        let dst = m.layout.pred_index[name];
        m.pred_ext[0][dst] = src_pred(name)?;
        m.pred_ext[1][dst] = src_pred(&format!("{name}{PRIME_MARK}"))?;
    }
    for (name, info) in sig.functions() {
        let dst = m.layout.func_index[name];
        m.func_tab[0][dst] = src_func(name)?;
        m.func_tab[1][dst] = if info.rigid {
            src_func(name)?
        } else {
            src_func(&format!("{name}{PRIME_MARK}"))?
        };
    }
    m.check_rigid_invariant()?;
    Ok(m)
}

/// True iff the doubled single-world structure for (w, v) satisfies the
/// question's agreement formula. By the two-world correspondence this
/// matches membership of (w, v) in the question's partition.
pub fn doubled_satisfies_agreement(
    m: &ModalStructure,
    w: &str,
    v: &str,
    q: &Question,
    sig: &Signature,
) -> Result<bool, SemanticsError> {
    let doubled = m.doubled_structure(w, v, sig)?;
    let agreement = agreement_formula(q, sig)
        .map_err(|e| SemanticsError::Format(e.to_string()))?;
    evaluate(&doubled, "w", &Assignment::empty(), &agreement)
}

// JSON model file format.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    worlds: Vec<String>,
    domain: Vec<String>,
    interpretation: BTreeMap<String, WorldInterp>,
    #[serde(default)]
    rigid_functions: BTreeMap<String, Vec<(Vec<String>, String)>>,
}

#[derive(Serialize, Deserialize, Default)]
struct WorldInterp {
    #[serde(default)]
    predicates: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<(Vec<String>, String)>>,
}

impl ModalStructure {
    /// Loads the JSON model format, validating arities, totality of
    /// functions, and the rigid-symbol invariant: rigid functions are
    /// given once under `rigid_functions`, non-rigid ones per world.
    pub fn from_json_str(text: &str, sig: &Signature) -> Result<Self, SemanticsError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| SemanticsError::Format(e.to_string()))?;
        let mut m = ModalStructure::new(sig, file.worlds.clone(), file.domain.clone())?;
        for (name, entries) in &file.rigid_functions {
            let info = sig
                .function(name)
                .ok_or_else(|| SemanticsError::Uninterpreted(name.clone()))?;
            if !info.rigid {
                return Err(SemanticsError::Format(format!(
                    "non-rigid function `{name}` listed under rigid_functions"
                )));
            }
            check_total(name, entries, info.arity, file.domain.len())?;
            for (args, value) in entries {
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                m.set_rigid_func_value(name, &args, value)?;
            }
        }
        for (world, interp) in &file.interpretation {
            for (pred, tuples) in &interp.predicates {
                for tuple in tuples {
                    let tuple: Vec<&str> = tuple.iter().map(String::as_str).collect();
                    m.add_pred_tuple(world, pred, &tuple)?;
                }
            }
            for (func, entries) in &interp.functions {
                let info = sig
                    .function(func)
                    .ok_or_else(|| SemanticsError::Uninterpreted(func.clone()))?;
                if info.rigid {
                    return Err(SemanticsError::RigidViolation(func.clone()));
                }
                check_total(func, entries, info.arity, file.domain.len())?;
                for (args, value) in entries {
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    m.set_func_value(world, func, &args, value)?;
                }
            }
        }
        // every declared function must be interpreted somewhere
        for (name, info) in sig.functions() {
            let covered = if info.rigid {
                file.rigid_functions.contains_key(name)
            } else {
                file.interpretation
                    .values()
                    .all(|wi| wi.functions.contains_key(name))
                    && !file.interpretation.is_empty()
            };
            if !covered {
                return Err(SemanticsError::NotTotal(name.to_owned()));
            }
        }
        m.check_rigid_invariant()?;
        Ok(m)
    }

    pub fn to_json_string(&self, sig: &Signature) -> String {
        let mut rigid_functions: BTreeMap<String, Vec<(Vec<String>, String)>> = BTreeMap::new();
        let mut interpretation: BTreeMap<String, WorldInterp> = BTreeMap::new();
        for (w, world) in self.worlds.iter().enumerate() {
            let mut interp = WorldInterp::default();
            for (pidx, (name, arity)) in self.layout.preds.iter().enumerate() {
                let mut tuples = Vec::new();
                for bit in 0..tuple_count(self.domain.len(), *arity) as usize {
                    if self.pred_ext[w][pidx] & (1u128 << bit) != 0 {
                        let tuple = index_tuple(bit, self.domain.len(), *arity);
                        tuples.push(tuple.iter().map(|&e| self.domain[e].clone()).collect());
                    }
                }
                interp.predicates.insert(name.clone(), tuples);
            }
            for (fidx, (name, arity, rigid)) in self.layout.funcs.iter().enumerate() {
                let entries: Vec<(Vec<String>, String)> = self.func_tab[w][fidx]
                    .iter()
                    .enumerate()
                    .map(|(slot, &val)| {
                        let tuple = index_tuple(slot, self.domain.len(), *arity);
                        (
                            tuple.iter().map(|&e| self.domain[e].clone()).collect(),
                            self.domain[val].clone(),
                        )
                    })
                    .collect();
                if *rigid {
                    rigid_functions.entry(name.clone()).or_insert(entries);
                } else {
                    interp.functions.insert(name.clone(), entries);
                }
            }
            interpretation.insert(world.clone(), interp);
        }
        let file = ModelFile {
            worlds: self.worlds.clone(),
            domain: self.domain.clone(),
            interpretation,
            rigid_functions,
        };
        let _ = sig;
        serde_json::to_string_pretty(&file).expect("model serialization")
    }
}

fn check_total(
    name: &str,
    entries: &[(Vec<String>, String)],
    arity: usize,
    domain: usize,
) -> Result<(), SemanticsError> {
    let mut seen: BTreeSet<&Vec<String>> = BTreeSet::new();
    for (args, _) in entries {
        if args.len() != arity {
            return Err(SemanticsError::Arity {
                symbol: name.to_owned(),
                expected: arity,
                got: args.len(),
            });
        }
        if !seen.insert(args) {
            return Err(SemanticsError::Format(format!(
                "duplicate entry for `{name}` at arguments {args:?}"
            )));
        }
    }
    if seen.len() as u128 != tuple_count(domain, arity) {
        return Err(SemanticsError::NotTotal(name.to_owned()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn sig_p() -> Signature {
        let mut sig = Signature::new();
        sig.add_predicate("P", 1).unwrap();
        sig.add_function("j", 0, true).unwrap();
        sig
    }

    fn structure_two_worlds() -> (Signature, ModalStructure) {
        // W = {w1, w2}, D = {a, b}; P = {a} at w1, {a, b} at w2; j -> a rigid
        let sig = sig_p();
        let mut m = ModalStructure::new(
            &sig,
            vec!["w1".into(), "w2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        m.add_pred_tuple("w1", "P", &["a"]).unwrap();
        m.add_pred_tuple("w2", "P", &["a"]).unwrap();
        m.add_pred_tuple("w2", "P", &["b"]).unwrap();
        m.set_rigid_func_value("j", &[], "a").unwrap();
        (sig, m)
    }

    #[test]
    fn evaluate_truth_constants_and_quantifiers() {
        let (sig, m) = structure_two_worlds();
        let g = Assignment::empty();
        assert!(evaluate(&m, "w1", &g, &Formula::True).unwrap());
        let all = parse_formula("forall x. P(x)", &sig).unwrap();
        assert!(!evaluate(&m, "w1", &g, &all).unwrap());
        assert!(evaluate(&m, "w2", &g, &all).unwrap());
    }

    #[test]
    fn evaluate_only_john() {
        // D={a,b}, P={a}, j->a: forall x. (P(x) -> x = j) holds; checked
        // against explicit enumeration of both assignments
        let (sig, m) = structure_two_worlds();
        let f = parse_formula("forall x. (P(x) -> x = j)", &sig).unwrap();
        let by_eval = evaluate(&m, "w1", &Assignment::empty(), &f).unwrap();
        let body = parse_formula("P(x) -> x = j", &sig).unwrap();
        let mut brute = true;
        for e in ["a", "b"] {
            let g = Assignment::empty().bind(&m, "x", e).unwrap();
            brute &= evaluate(&m, "w1", &g, &body).unwrap();
        }
        assert_eq!(by_eval, brute);
        assert!(by_eval);
    }

    #[test]
    fn evaluate_errors() {
        let (sig, m) = structure_two_worlds();
        let open = parse_formula("P(x)", &sig).unwrap();
        assert_eq!(
            evaluate(&m, "w1", &Assignment::empty(), &open),
            Err(SemanticsError::UnassignedVariable("x".into()))
        );
        let foreign = Formula::pred("Q", vec![Term::var("x")]);
        let g = Assignment::empty().bind(&m, "x", "a").unwrap();
        assert_eq!(
            evaluate(&m, "w1", &g, &foreign),
            Err(SemanticsError::Uninterpreted("Q".into()))
        );
        assert!(matches!(
            holds_globally(&m, &open),
            Err(SemanticsError::NotClosed(_))
        ));
    }

    #[test]
    fn partition_of_tautology_is_total() {
        let (_, m) = structure_two_worlds();
        let p = question_partition(&m, &Question::new(Formula::True)).unwrap();
        assert_eq!(p.blocks().len(), 1);
    }

    #[test]
    fn partition_separates_disagreeing_worlds() {
        let (sig, m) = structure_two_worlds();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        let p = question_partition(&m, &q).unwrap();
        assert_eq!(p.blocks().len(), 2);
        assert!(!p.relates("w1", "w2"));
    }

    #[test]
    fn partition_three_worlds_grouped_by_extension() {
        // P-extensions {a}, {a}, {a,b} partition into {{w1,w2},{w3}}
        let sig = sig_p();
        let mut m = ModalStructure::new(
            &sig,
            vec!["w1".into(), "w2".into(), "w3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        for w in ["w1", "w2", "w3"] {
            m.add_pred_tuple(w, "P", &["a"]).unwrap();
        }
        m.add_pred_tuple("w3", "P", &["b"]).unwrap();
        m.set_rigid_func_value("j", &[], "a").unwrap();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        let p = question_partition(&m, &q).unwrap();
        assert_eq!(
            p.blocks(),
            &[
                vec!["w1".to_string(), "w2".to_string()],
                vec!["w3".to_string()]
            ]
        );
    }

    #[test]
    fn holds_globally_tracks_matching_extensions() {
        // "everyone invited is going, and vice versa" holds exactly when
        // the two predicates have the same extension at every world
        let mut sig = Signature::new();
        sig.add_predicate("I", 1).unwrap();
        sig.add_predicate("P", 1).unwrap();
        let mut m = ModalStructure::new(
            &sig,
            vec!["w1".into(), "w2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        for w in ["w1", "w2"] {
            m.add_pred_tuple(w, "I", &["a"]).unwrap();
            m.add_pred_tuple(w, "P", &["a"]).unwrap();
        }
        let chi = parse_formula("forall x. (I(x) <-> P(x))", &sig).unwrap();
        assert!(holds_globally(&m, &chi).unwrap());
        m.add_pred_tuple("w2", "P", &["b"]).unwrap();
        assert!(!holds_globally(&m, &chi).unwrap());
    }

    #[test]
    fn two_propositional_questions_split_four_worlds() {
        // p, q realizing all truth combinations: {?p, ?q} has 4 singletons
        let mut sig = Signature::new();
        sig.add_predicate("p", 0).unwrap();
        sig.add_predicate("q", 0).unwrap();
        let mut m = ModalStructure::new(
            &sig,
            vec!["w1".into(), "w2".into(), "w3".into(), "w4".into()],
            vec!["a".into()],
        )
        .unwrap();
        m.add_pred_tuple("w1", "p", &[]).unwrap();
        m.add_pred_tuple("w1", "q", &[]).unwrap();
        m.add_pred_tuple("w2", "p", &[]).unwrap();
        m.add_pred_tuple("w3", "q", &[]).unwrap();
        let qs = [
            Question::new(parse_formula("p", &sig).unwrap()),
            Question::new(parse_formula("q", &sig).unwrap()),
        ];
        let partition = questions_partition(&m, &qs).unwrap();
        assert_eq!(partition.blocks().len(), 4);
    }

    #[test]
    fn questions_partition_meet_and_empty() {
        let (sig, m) = structure_two_worlds();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        let single = questions_partition(&m, std::slice::from_ref(&q)).unwrap();
        assert_eq!(single, question_partition(&m, &q).unwrap());
        let empty = questions_partition(&m, &[]).unwrap();
        assert_eq!(empty.blocks().len(), 1);
    }

    #[test]
    fn refinement_basics() {
        let worlds = vec!["w1".to_string(), "w2".to_string(), "w3".to_string()];
        let identity = Partition::from_blocks(worlds.iter().map(|w| vec![w.clone()]).collect());
        let total = Partition::total(&worlds);
        let mid = Partition::from_blocks(vec![
            vec!["w1".into(), "w2".into()],
            vec!["w3".into()],
        ]);
        assert!(identity.refines(&total).unwrap());
        assert!(identity.refines(&mid).unwrap());
        assert!(mid.refines(&total).unwrap());
        assert!(!mid.refines(&identity).unwrap());
        let other = Partition::total(&["w1".to_string()]);
        assert!(mid.refines(&other).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // one 0-ary non-rigid predicate: 2 structures at (1,1)
        let mut sig = Signature::new();
        sig.add_predicate("p", 0).unwrap();
        let b = Bounds::new(1, 1);
        let got: Vec<_> = enumerate_structures(&sig, b).unwrap().collect();
        assert_eq!(got.len(), 2);
        // at (2,1): one- and two-world structures, all truth combinations
        let b2 = Bounds::new(2, 1);
        let got2: Vec<_> = enumerate_structures(&sig, b2).unwrap().collect();
        assert_eq!(got2.len(), 2 + 4);
    }

    #[test]
    fn enumeration_count_matches_closed_form() {
        // one unary predicate and one rigid constant at Bounds(2,2):
        // sum over k worlds, n entities of n * (2^n)^k
        let sig = sig_p();
        let mut expected = 0u128;
        for k in 1..=2u32 {
            for n in 1..=2u128 {
                expected += n * (1u128 << n).pow(k);
            }
        }
        let got = enumerate_structures(&sig, Bounds::new(2, 2)).unwrap().count();
        assert_eq!(got as u128, expected);
        assert_eq!(count_structures(&sig, &Bounds::new(2, 2)), Some(expected));
    }

    #[test]
    fn enumeration_respects_rigid_invariant() {
        let sig = sig_p();
        for m in enumerate_structures(&sig, Bounds::new(2, 2)).unwrap() {
            m.check_rigid_invariant().unwrap();
        }
    }

    #[test]
    fn enumeration_cap_reported() {
        let mut sig = Signature::new();
        sig.add_predicate("R", 2).unwrap();
        sig.add_function("f", 2, false).unwrap();
        let err = enumerate_structures_capped(&sig, Bounds::new(2, 3), 1000).unwrap_err();
        assert!(matches!(err, SemanticsError::EnumerationTooLarge { .. }));
    }

    #[test]
    fn no_countermodel_for_universal_closure() {
        // ?P(x) entails ?forall x. P(x)
        let sig = sig_p();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        let target = Question::new(parse_formula("forall x. P(x)", &sig).unwrap());
        let hit = find_countermodel(
            &[q],
            &Formula::True,
            &target,
            Bounds::default(),
            &sig,
        )
        .unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn countermodel_for_unrelated_question() {
        // "is it raining" is not settled by ?F(j)
        let mut sig = Signature::new();
        sig.add_predicate("F", 1).unwrap();
        sig.add_predicate("R", 0).unwrap();
        sig.add_function("j", 0, true).unwrap();
        let q = Question::new(parse_formula("F(j)", &sig).unwrap());
        let target = Question::new(parse_formula("R", &sig).unwrap());
        let hit = find_countermodel(
            std::slice::from_ref(&q),
            &Formula::True,
            &target,
            Bounds::new(2, 1),
            &sig,
        )
        .unwrap()
        .expect("two worlds agreeing on F(j) but differing on R");
        let m = &hit.structure;
        let (w, v) = (&hit.pair.0, &hit.pair.1);
        assert!(question_partition(m, &q).unwrap().relates(w, v));
        assert!(!question_partition(m, &target).unwrap().relates(w, v));
    }

    #[test]
    fn countermodel_for_nonrigid_instance() {
        // ?P(x) does not entail ?P(d) when d is non-rigid: equal P-extensions
        // with diverging d-denotations
        let mut sig = sig_p();
        sig.add_function("d", 0, false).unwrap();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        let target = Question::new(parse_formula("P(d)", &sig).unwrap());
        let hit = find_countermodel(&[q], &Formula::True, &target, Bounds::default(), &sig)
            .unwrap()
            .expect("countermodel with varying d");
        let m = &hit.structure;
        let (w, v) = hit.pair.clone();
        let f = parse_formula("P(d)", &sig).unwrap();
        let at_w = evaluate(m, &w, &Assignment::empty(), &f).unwrap();
        let at_v = evaluate(m, &v, &Assignment::empty(), &f).unwrap();
        assert_ne!(at_w, at_v);
    }

    #[test]
    fn doubled_structure_tracks_partition() {
        let (sig, m) = structure_two_worlds();
        let q = Question::new(parse_formula("P(x)", &sig).unwrap());
        // reflexive pair: agreement formula satisfied
        assert!(doubled_satisfies_agreement(&m, "w1", "w1", &q, &sig).unwrap());
        // w1, w2 differ on P: agreement fails, partition does not relate
        assert!(!doubled_satisfies_agreement(&m, "w1", "w2", &q, &sig).unwrap());
        assert!(!question_partition(&m, &q).unwrap().relates("w1", "w2"));
    }

    #[test]
    fn model_json_round_trip_and_validation() {
        let (sig, m) = structure_two_worlds();
        let text = m.to_json_string(&sig);
        let again = ModalStructure::from_json_str(&text, &sig).unwrap();
        assert_eq!(again.to_json_string(&sig), text);
        // a rigid function listed in a per-world section is rejected
        let bad = r#"{
            "worlds": ["w1"], "domain": ["a"],
            "interpretation": {"w1": {"predicates": {"P": []},
                                      "functions": {"j": [[[], "a"]]}}},
            "rigid_functions": {}
        }"#;
        assert!(matches!(
            ModalStructure::from_json_str(bad, &sig),
            Err(SemanticsError::RigidViolation(_))
        ));
    }
}

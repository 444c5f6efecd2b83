//! Property tests for the structural invariants: substitution and
//! matching, parser round trips, priming, partition algebra, the
//! two-world correspondence, proof checking, and interpolant contracts.

use std::collections::BTreeSet;

use proptest::prelude::*;

use qa_core::parse::parse_formula;
use qa_core::prover::interpolate::ground_entails;
use qa_core::prover::{
    check_proof, ground_interpolate, prove, saturate, Atom, Clause, Literal, ProofResult,
    SaturationOutcome, Sequent, Side,
};
use qa_core::semantics::{
    doubled_satisfies_agreement, enumerate_structures, evaluate, holds_globally,
    question_partition, questions_partition, Assignment, Bounds, ModalStructure, Partition,
};
use qa_core::signature::Signature;
use qa_core::syntax::{
    agreement_formula, alpha_eq, free_variables, is_rigid_term, match_rigid_instance, prime,
    substitute, unprime, Formula, Question, Substitution, Term,
};

fn full_sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_predicate("P", 1).unwrap();
    sig.add_predicate("R", 2).unwrap();
    sig.add_predicate("q", 0).unwrap();
    sig.add_function("c", 0, true).unwrap();
    sig.add_function("d", 0, false).unwrap();
    sig.add_function("f", 1, true).unwrap();
    sig.add_function("m", 1, false).unwrap();
    sig
}

fn monadic_sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_predicate("P", 1).unwrap();
    sig.add_function("c", 0, true).unwrap();
    sig.add_function("d", 0, false).unwrap();
    sig
}

fn var_name() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_owned()), Just("y".to_owned()), Just("z".to_owned())]
}

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        var_name().prop_map(|v| Term::var(&v)),
        Just(Term::constant("c")),
        Just(Term::constant("d")),
    ];
    leaf.prop_recursive(2, 8, 1, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            inner.prop_map(|t| Term::app("m", vec![t])),
        ]
    })
}

fn rigid_term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        var_name().prop_map(|v| Term::var(&v)),
        Just(Term::constant("c")),
    ];
    leaf.prop_recursive(2, 8, 1, |inner| inner.prop_map(|t| Term::app("f", vec![t])))
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::pred("q", vec![])),
        term_strategy().prop_map(|t| Formula::pred("P", vec![t])),
        (term_strategy(), term_strategy())
            .prop_map(|(a, b)| Formula::pred("R", vec![a, b])),
        (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::eq(a, b)),
    ];
    atom.prop_recursive(3, 20, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (var_name(), inner.clone()).prop_map(|(v, b)| Formula::forall(&v, b)),
            (var_name(), inner).prop_map(|(v, b)| Formula::exists(&v, b)),
        ]
    })
}

/// Formulas over the monadic signature only (P, c, d), used by the
/// correspondence property.
fn monadic_formula_strategy() -> impl Strategy<Value = Formula> {
    let term = prop_oneof![
        var_name().prop_map(|v| Term::var(&v)),
        Just(Term::constant("c")),
        Just(Term::constant("d")),
    ];
    let atom = prop_oneof![
        term.clone().prop_map(|t| Formula::pred("P", vec![t])),
        (term.clone(), term).prop_map(|(a, b)| Formula::eq(a, b)),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (var_name(), inner.clone()).prop_map(|(v, b)| Formula::forall(&v, b)),
            (var_name(), inner).prop_map(|(v, b)| Formula::exists(&v, b)),
        ]
    })
}

fn substitution_strategy() -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(var_name(), term_strategy(), 0..3)
        .prop_map(|map| Substitution { map })
}

fn rigid_substitution_strategy() -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(var_name(), rigid_term_strategy(), 0..3)
        .prop_map(|map| Substitution { map })
}

proptest! {
    #[test]
    fn printer_parser_round_trip(f in formula_strategy()) {
        let sig = full_sig();
        let printed = f.to_string();
        let parsed = parse_formula(&printed, &sig).expect("printed formula parses");
        prop_assert_eq!(parsed, f);
    }

    #[test]
    fn substitution_free_variable_equation(
        f in formula_strategy(),
        s in substitution_strategy(),
    ) {
        let before: BTreeSet<String> = free_variables(&f).into_iter().collect();
        let after: BTreeSet<String> =
            free_variables(&substitute(&f, &s)).into_iter().collect();
        let mut expected: BTreeSet<String> = before
            .iter()
            .filter(|v| !s.map.contains_key(*v))
            .cloned()
            .collect();
        for (v, t) in &s.map {
            if before.contains(v) {
                expected.extend(t.variables());
            }
        }
        prop_assert_eq!(after, expected);
    }

    #[test]
    fn matching_recovers_rigid_instances(
        f in formula_strategy(),
        s in rigid_substitution_strategy(),
    ) {
        let sig = full_sig();
        let candidate = substitute(&f, &s);
        if let Some(recovered) = match_rigid_instance(&candidate, &f, &sig) {
            prop_assert!(recovered.is_rigid(&sig));
            prop_assert!(alpha_eq(&substitute(&f, &recovered), &candidate));
            for t in recovered.map.values() {
                prop_assert!(is_rigid_term(t, &sig));
            }
        } else {
            // matching may fail only when the instance is reachable by no
            // rigid substitution at all; applying the original must then
            // disagree with the candidate up to renaming
            prop_assert!(
                !alpha_eq(&substitute(&f, &s), &candidate),
                "match failed although {s:?} produces the candidate from {f}"
            );
        }
    }

    #[test]
    fn priming_round_trip_and_freshness(f in formula_strategy()) {
        let sig = full_sig();
        let primed = prime(&f, &sig).expect("unprimed input");
        prop_assert_eq!(unprime(&primed), f.clone());
        // every predicate symbol is primed, every non-rigid function is
        // primed, nothing else changes
        for p in primed.predicate_symbols() {
            prop_assert!(p.ends_with('\''));
        }
        for g in primed.function_symbols() {
            let base = g.trim_end_matches('\'');
            if !sig.is_rigid_function(base) {
                prop_assert!(g.ends_with('\''), "non-rigid `{g}` left unprimed");
            } else {
                prop_assert!(!g.ends_with('\''), "rigid `{g}` was primed");
            }
        }
    }

    #[test]
    fn agreement_formula_is_closed(f in formula_strategy()) {
        let sig = full_sig();
        let q = Question::new(f);
        let agreement = agreement_formula(&q, &sig).expect("unprimed input");
        prop_assert!(agreement.is_closed());
    }
}

// Partition algebra over a fixed four-world set.

fn partition_strategy() -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0usize..4, 4).prop_map(|assignment| {
        let worlds = ["w1", "w2", "w3", "w4"];
        let mut blocks: Vec<Vec<String>> = vec![Vec::new(); 4];
        for (w, b) in worlds.iter().zip(&assignment) {
            blocks[*b].push((*w).to_owned());
        }
        Partition::from_blocks(blocks)
    })
}

proptest! {
    #[test]
    fn refinement_is_a_partial_order(
        a in partition_strategy(),
        b in partition_strategy(),
        c in partition_strategy(),
    ) {
        prop_assert!(a.refines(&a).unwrap());
        if a.refines(&b).unwrap() && b.refines(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if a.refines(&b).unwrap() && b.refines(&c).unwrap() {
            prop_assert!(a.refines(&c).unwrap());
        }
    }

    #[test]
    fn meet_is_the_coarsest_common_refinement(
        a in partition_strategy(),
        b in partition_strategy(),
    ) {
        let meet = a.meet(&b).unwrap();
        prop_assert!(meet.refines(&a).unwrap());
        prop_assert!(meet.refines(&b).unwrap());
    }
}

fn monadic_questions() -> Vec<Question> {
    let sig = monadic_sig();
    ["P(x)", "P(c)", "P(d)", "forall x. P(x)", "exists x. (P(x) & ~(x = c))"]
        .iter()
        .map(|t| Question::new(parse_formula(t, &sig).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn question_partition_is_well_formed(
        structure_index in 0usize..150,
        question_index in 0usize..5,
    ) {
        let sig = monadic_sig();
        let m = enumerate_structures(&sig, Bounds::new(2, 2))
            .unwrap()
            .nth(structure_index)
            .unwrap();
        let q = &monadic_questions()[question_index];
        let p = question_partition(&m, q).unwrap();
        // blocks are nonempty, disjoint, and cover the world set
        let mut seen = BTreeSet::new();
        for block in p.blocks() {
            prop_assert!(!block.is_empty());
            for w in block {
                prop_assert!(seen.insert(w.clone()), "world {w} in two blocks");
            }
        }
        let worlds: BTreeSet<String> = m.worlds().iter().cloned().collect();
        prop_assert_eq!(seen, worlds);
    }

    #[test]
    fn question_sets_meet_and_are_monotone(
        structure_index in 0usize..150,
        pick in proptest::collection::vec(proptest::bool::ANY, 5),
    ) {
        let sig = monadic_sig();
        let m = enumerate_structures(&sig, Bounds::new(2, 2))
            .unwrap()
            .nth(structure_index)
            .unwrap();
        let pool = monadic_questions();
        let subset: Vec<Question> = pool
            .iter()
            .zip(&pick)
            .filter(|(_, keep)| **keep)
            .map(|(q, _)| q.clone())
            .collect();
        // union semantics: partition of A ∪ B equals the meet
        let union = questions_partition(&m, &pool).unwrap();
        let meet = questions_partition(&m, &subset)
            .unwrap()
            .meet(&questions_partition(&m, &pool).unwrap())
            .unwrap();
        prop_assert_eq!(&union, &meet);
        // more questions refine
        prop_assert!(union
            .refines(&questions_partition(&m, &subset).unwrap())
            .unwrap());
    }

    #[test]
    fn two_world_correspondence(
        structure_index in 0usize..150,
        body in monadic_formula_strategy(),
    ) {
        let sig = monadic_sig();
        let m = enumerate_structures(&sig, Bounds::new(2, 2))
            .unwrap()
            .nth(structure_index)
            .unwrap();
        let q = Question::new(body);
        let partition = question_partition(&m, &q).unwrap();
        for w in m.worlds() {
            for v in m.worlds() {
                let in_partition = partition.relates(w, v);
                let doubled = doubled_satisfies_agreement(&m, w, v, &q, &sig).unwrap();
                prop_assert_eq!(
                    in_partition, doubled,
                    "partition and doubled structure disagree on ({}, {}) for {}",
                    w, v, q
                );
            }
        }
    }
}

// Prover invariants.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn emitted_proofs_pass_the_checker(f in monadic_formula_strategy()) {
        let sig = monadic_sig();
        let mut closed = f;
        for v in free_variables(&closed).into_iter().rev() {
            closed = Formula::Forall(v, Box::new(closed));
        }
        // known-valid schemata over a random core
        let sequents = [
            Sequent::new(vec![closed.clone()], closed.clone(), sig.clone()).unwrap(),
            Sequent::new(
                vec![Formula::and(closed.clone(), Formula::pred("P", vec![Term::constant("c")]))],
                closed.clone(),
                sig.clone(),
            )
            .unwrap(),
            Sequent::new(
                vec![closed.clone()],
                Formula::or(closed.clone(), Formula::False),
                sig.clone(),
            )
            .unwrap(),
        ];
        for s in sequents {
            if let ProofResult::Proved(proof) = prove(&s, 20_000).unwrap() {
                prop_assert!(check_proof(&proof));
            }
        }
    }
}

// Random colorable ground problems: whenever saturation refutes, the
// interpolant satisfies both implication conditions and the
// shared-symbol condition.

#[derive(Debug, Clone)]
struct GroundProblem {
    clauses: Vec<Clause>,
}

fn ground_problem_strategy() -> impl Strategy<Value = GroundProblem> {
    const LEFT_ATOMS: [&str; 4] = ["a1", "a2", "s1", "s2"];
    const RIGHT_ATOMS: [&str; 4] = ["b1", "b2", "s1", "s2"];
    let literal = |atoms: &'static [&'static str; 4]| {
        (0usize..4, proptest::bool::ANY).prop_map(move |(i, positive)| Literal {
            positive,
            atom: Atom::new(atoms[i], vec![]),
        })
    };
    let left_clause = proptest::collection::vec(literal(&LEFT_ATOMS), 1..3)
        .prop_map(|lits| Clause::new(lits, Side::Left));
    let right_clause = proptest::collection::vec(literal(&RIGHT_ATOMS), 1..3)
        .prop_map(|lits| Clause::new(lits, Side::Right));
    (
        proptest::collection::vec(left_clause, 1..5),
        proptest::collection::vec(right_clause, 1..5),
    )
        .prop_map(|(mut l, r)| {
            l.extend(r);
            GroundProblem { clauses: l }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn interpolants_satisfy_their_contract(problem in ground_problem_strategy()) {
        let outcome = saturate(problem.clauses.clone(), 4_000);
        let proof = match outcome {
            SaturationOutcome::Refuted(p) => p,
            _ => return Ok(()),
        };
        prop_assert!(check_proof(&proof));
        let theta = ground_interpolate(&proof).expect("interpolation succeeds");
        let clause_formula = |c: &Clause| {
            let mut parts: Vec<Formula> = Vec::new();
            for l in &c.literals {
                let atom = Formula::pred(&l.atom.pred, vec![]);
                parts.push(if l.positive { atom } else { Formula::not(atom) });
            }
            parts
                .into_iter()
                .reduce(Formula::or)
                .unwrap_or(Formula::False)
        };
        let lefts: Vec<Formula> = problem
            .clauses
            .iter()
            .filter(|c| c.side == Side::Left)
            .map(clause_formula)
            .collect();
        let rights: Vec<Formula> = problem
            .clauses
            .iter()
            .filter(|c| c.side == Side::Right)
            .map(clause_formula)
            .collect();
        prop_assert_eq!(ground_entails(&lefts, &theta), Some(true));
        let mut with_theta = rights;
        with_theta.push(theta.clone());
        prop_assert_eq!(ground_entails(&with_theta, &Formula::False), Some(true));
        // the shared-symbol condition: only s1, s2 may appear
        for p in theta.predicate_symbols() {
            prop_assert!(p.starts_with('s'), "local atom `{p}` leaked into the interpolant");
        }
    }
}

// End-to-end: the finite oracle and the prover must agree on
// answerhood for arbitrary propositional formulas, and extraction must
// succeed on arbitrary generated developments.

fn prop_formula_strategy() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        Just(Formula::pred("p", vec![])),
        Just(Formula::pred("q", vec![])),
        Just(Formula::True),
        Just(Formula::False),
    ];
    atom.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn prop_sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_predicate("p", 0).unwrap();
    sig.add_predicate("q", 0).unwrap();
    sig
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_and_prover_agree_on_propositional_answerhood(psi in prop_formula_strategy()) {
        let sig = prop_sig();
        let question = Question::new(Formula::pred("p", vec![]));
        let target = Question::new(psi.clone());
        let oracle = qa_core::semantics::find_countermodel(
            std::slice::from_ref(&question),
            &Formula::True,
            &target,
            Bounds::new(2, 1),
            &sig,
        )
        .unwrap()
        .is_none();
        let sequent = qa_core::answerhood::translate_entailment(
            &[question],
            &Formula::True,
            &target,
            &sig,
        )
        .unwrap();
        let prover = prove(&sequent, 50_000).unwrap().is_proved();
        prop_assert_eq!(oracle, prover, "disagreement on {}", psi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_developments_extract_and_verify(index in 0usize..300) {
        let sig = monadic_sig();
        let phi = parse_formula("P(x)", &sig).unwrap();
        let question = Question::new(phi.clone());
        let cfg = qa_core::answerhood::EngineConfig::default();
        let candidate = qa_core::development::enumerate_developments(
            &[phi],
            &sig,
            5,
            Default::default(),
        )
        .filter(|f| free_variables(f).is_empty())
        .nth(index);
        let psi = match candidate {
            Some(psi) => psi,
            None => return Ok(()),
        };
        let result = qa_core::answerhood::extract_development(
            &psi,
            &question,
            &Formula::True,
            &sig,
            &cfg,
        )
        .unwrap_or_else(|e| panic!("extraction failed for development {psi}: {e}"));
        prop_assert!(qa_core::answerhood::verify_extraction(
            &result,
            &psi,
            &question,
            &Formula::True,
            &sig,
            &cfg
        )
        .unwrap());
    }
}

// The oracle evaluating a countermodel is itself checked against a
// direct satisfaction computation on a handmade structure.

#[test]
fn oracle_agrees_with_direct_evaluation() {
    let sig = monadic_sig();
    let mut m = ModalStructure::new(
        &sig,
        vec!["w1".into(), "w2".into()],
        vec!["e1".into(), "e2".into()],
    )
    .unwrap();
    m.add_pred_tuple("w1", "P", &["e1"]).unwrap();
    m.add_pred_tuple("w2", "P", &["e1"]).unwrap();
    m.set_rigid_func_value("c", &[], "e1").unwrap();
    m.set_func_value("w1", "d", &[], "e1").unwrap();
    m.set_func_value("w2", "d", &[], "e2").unwrap();
    let f = parse_formula("P(d)", &sig).unwrap();
    let g = Assignment::empty();
    assert!(evaluate(&m, "w1", &g, &f).unwrap());
    assert!(!evaluate(&m, "w2", &g, &f).unwrap());
    assert!(holds_globally(&m, &parse_formula("P(c)", &sig).unwrap()).unwrap());
    let q = Question::new(parse_formula("P(x)", &sig).unwrap());
    assert!(question_partition(&m, &q).unwrap().relates("w1", "w2"));
    let qd = Question::new(f);
    assert!(!question_partition(&m, &qd).unwrap().relates("w1", "w2"));
}

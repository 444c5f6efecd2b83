//! Extraction on inputs that violate its precondition must fail
//! honestly (no artifact, informative stage) in reasonable time.

use std::time::{Duration, Instant};

use qa_core::answerhood::{extract_development, EngineConfig, ExtractionError};
use qa_core::parse::parse_formula;
use qa_core::signature::Signature;
use qa_core::syntax::Question;

#[test]
fn extraction_of_a_non_answer_fails_honestly() {
    let mut sig = Signature::new();
    sig.add_predicate("F", 1).unwrap();
    sig.add_predicate("R", 0).unwrap();
    sig.add_function("j", 0, true).unwrap();
    let psi = parse_formula("R", &sig).unwrap();
    let q = Question::new(parse_formula("F(j)", &sig).unwrap());
    let chi = qa_core::syntax::Formula::True;
    let start = Instant::now();
    let out = extract_development(&psi, &q, &chi, &sig, &EngineConfig::default());
    match out {
        Err(ExtractionError::NotAnAnswer(cm)) => {
            assert_eq!(cm.structure.worlds().len(), 2);
        }
        Err(other) => panic!("unexpected failure kind: {other}"),
        Ok(r) => panic!("extracted {} for a non-answer", r.development),
    }
    assert!(
        start.elapsed() < Duration::from_secs(5),
        "misuse path took {:?}",
        start.elapsed()
    );
}

//! A question-answering logic engine for the partition semantics of
//! questions.
//!
//! Questions denote partitions of the worlds of a finite first-order
//! modal structure; entailment between questions is refinement between
//! partitions. The crate decides contextual question entailment (bounded
//! countermodel search refuting, resolution proving), decides and
//! enumerates developments — the formulas built from rigid instances of
//! a question and rigid identities — and constructively extracts a
//! development equivalent to any given answer via translation to
//! classical first-order logic and Craig interpolation over ground
//! refutations.

pub mod answerhood;
pub mod development;
pub mod parse;
pub mod prover;
pub mod semantics;
pub mod signature;
pub mod syntax;

pub use answerhood::{
    decide_entailment, extract_development, is_answer, translate_entailment, verify_extraction,
    AnswerhoodError, EngineConfig, ExtractionError, ExtractionResult, PipelineTrace, Verdict,
};
pub use development::{
    check_development, classify_answer, development_entailment_check, enumerate_developments,
    enumerate_developments_with_depth, AnswerClassification, DevelopmentTree, DevelopmentVariant,
};
pub use parse::{parse_formula, parse_term, ParseError};
pub use semantics::{
    enumerate_structures, evaluate, find_countermodel, holds_globally, question_partition,
    questions_partition, Assignment, Bounds, Countermodel, ModalStructure, Partition,
    SemanticsError,
};
pub use signature::{Signature, SignatureError};
pub use syntax::{
    agreement_formula, alpha_eq, free_variables, is_rigid_term, match_rigid_instance, prime,
    substitute, unprime, Formula, Question, Substitution, Term,
};

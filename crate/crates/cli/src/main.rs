//! `qa`: command-line front end for the question-answering engine.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qa_core::answerhood::{
    decide_entailment, extract_development, is_answer, translate_entailment, verify_extraction,
    EngineConfig, Verdict,
};
use qa_core::development::{
    check_development, classify_answer, enumerate_developments_with_depth, DevelopmentVariant,
};
use qa_core::parse::parse_formula;
use qa_core::prover::tptp::sequent_to_tptp;
use qa_core::semantics::{question_partition, Bounds, Countermodel, ModalStructure};
use qa_core::signature::Signature;
use qa_core::syntax::{free_variables, Formula, Question};

/// Decision procedures for questions under partition semantics: check
/// entailment and answerhood, decide and enumerate developments, and
/// extract a development equivalent to a given answer.
#[derive(Parser)]
#[command(name = "qa", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether premise questions entail a target question.
    CheckEntailment(CheckEntailmentArgs),
    /// Decide whether a closed formula answers a question.
    CheckAnswer(CheckAnswerArgs),
    /// Decide whether a formula is a development of the given formulas.
    CheckDevelopment(CheckDevelopmentArgs),
    /// Extract a development equivalent to an answer.
    Extract(ExtractArgs),
    /// Print the partition a question induces on a model.
    Partition(PartitionArgs),
    /// Enumerate closed developments of a question, smallest first.
    EnumerateAnswers(EnumerateArgs),
    /// Print the classical sequent a question entailment translates to.
    Translate(TranslateArgs),
}

#[derive(Args)]
struct EngineOpts {
    /// Signature file (JSON).
    #[arg(long, value_name = "PATH")]
    sig: PathBuf,
    /// Context formula, inline or @file; the common-ground assertion.
    #[arg(long, default_value = "true", value_name = "FORMULA")]
    context: String,
    /// Countermodel search: maximum number of worlds.
    #[arg(long, default_value_t = 2)]
    max_worlds: usize,
    /// Countermodel search: maximum domain size.
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
    /// Prover budget in generated clauses.
    #[arg(long, default_value_t = 50_000)]
    budget: usize,
    /// Rigid term pool nesting depth for grounding.
    #[arg(long, default_value_t = 1)]
    grounding_depth: usize,
    /// Development grammar restrictions: no-existential,
    /// no-varvar-identity, no-equality (repeatable).
    #[arg(long = "variant", value_name = "NAME")]
    variants: Vec<String>,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
    /// Canonical sequential engine order for byte-stable output (the
    /// engine runs this way regardless; the flag pins it for harnesses).
    #[arg(long)]
    deterministic: bool,
}

impl EngineOpts {
    fn signature(&self) -> Result<Signature> {
        let text = fs::read_to_string(&self.sig)
            .with_context(|| format!("reading signature file {}", self.sig.display()))?;
        Signature::from_json_str(&text).map_err(|e| anyhow!("{e}"))
    }

    fn variant(&self) -> Result<DevelopmentVariant> {
        let mut v = DevelopmentVariant::default();
        for name in &self.variants {
            match name.as_str() {
                "no-existential" => v.allow_existential = false,
                "no-varvar-identity" => v.allow_var_var_identity = false,
                "no-equality" => v.allow_equality = false,
                other => return Err(anyhow!("unknown variant `{other}`")),
            }
        }
        Ok(v)
    }

    fn config(&self) -> Result<EngineConfig> {
        Ok(EngineConfig {
            bounds: Bounds::new(self.max_worlds.max(1), self.max_domain.max(1)),
            prover_budget: self.budget.max(1),
            grounding_depth: self.grounding_depth,
            variant: self.variant()?,
        })
    }

    fn context_formula(&self, sig: &Signature) -> Result<Formula> {
        let text = resolve_arg(&self.context)?;
        parse_formula(&text, sig).map_err(|e| anyhow!("in context formula: {e}"))
    }
}

#[derive(Args)]
struct CheckEntailmentArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Premise question body (repeatable), inline or @file.
    #[arg(long = "question", required = true, value_name = "FORMULA")]
    questions: Vec<String>,
    /// Target question body.
    #[arg(long, value_name = "FORMULA")]
    target: String,
    /// Print the resolution refutation when the verdict is entailed.
    #[arg(long)]
    show_proof: bool,
}

#[derive(Args)]
struct CheckAnswerArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Question body.
    #[arg(long, value_name = "FORMULA")]
    question: String,
    /// Candidate answer (closed formula).
    #[arg(long, value_name = "FORMULA")]
    answer: String,
}

#[derive(Args)]
struct CheckDevelopmentArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Pool formula the development may instantiate (repeatable).
    #[arg(long = "of", required = true, value_name = "FORMULA")]
    of: Vec<String>,
    /// Candidate development.
    #[arg(long, value_name = "FORMULA")]
    candidate: String,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Question body.
    #[arg(long, value_name = "FORMULA")]
    question: String,
    /// Answer to re-express as a development.
    #[arg(long, value_name = "FORMULA")]
    answer: String,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Model file (JSON).
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Question body.
    #[arg(long, value_name = "FORMULA")]
    question: String,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Question body (repeatable).
    #[arg(long = "question", required = true, value_name = "FORMULA")]
    questions: Vec<String>,
    /// Maximum development size (AST nodes).
    #[arg(long)]
    size: usize,
    /// Rigid term pool nesting depth.
    #[arg(long, default_value_t = 1)]
    pool_depth: usize,
    /// Check each enumerated answer for entailment and mark the verdict.
    #[arg(long)]
    verify: bool,
    /// Cap on the number of printed answers.
    #[arg(long, default_value_t = 1000)]
    limit: usize,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    engine: EngineOpts,
    /// Premise question body (repeatable).
    #[arg(long = "question", required = true, value_name = "FORMULA")]
    questions: Vec<String>,
    /// Target question body.
    #[arg(long, value_name = "FORMULA")]
    target: String,
    /// Emit TPTP FOF problem text instead of the plain listing.
    #[arg(long)]
    tptp: bool,
}

/// `@path` reads the formula from a file; anything else is inline text.
fn resolve_arg(text: &str) -> Result<String> {
    if let Some(path) = text.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading formula file {path}"))
    } else {
        Ok(text.to_owned())
    }
}

fn parse_arg(text: &str, sig: &Signature, what: &str) -> Result<Formula> {
    let resolved = resolve_arg(text)?;
    parse_formula(&resolved, sig).map_err(|e| anyhow!("in {what}: {e}"))
}

fn questions_from(args: &[String], sig: &Signature) -> Result<Vec<Question>> {
    args.iter()
        .map(|t| Ok(Question::new(parse_arg(t, sig, "question")?)))
        .collect()
}

fn countermodel_json(cm: &Countermodel, sig: &Signature) -> Value {
    let model: Value = serde_json::from_str(&cm.structure.to_json_string(sig))
        .expect("model serialization is valid JSON");
    json!({ "model": model, "pair": [cm.pair.0, cm.pair.1] })
}

fn print_output(json_mode: bool, value: Value, text: String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        print!("{text}");
    }
}

fn verdict_output(
    verdict: &Verdict,
    sig: &Signature,
    cfg: &EngineConfig,
    command: &str,
) -> (u8, Value, String) {
    match verdict {
        Verdict::Entailed(proof) => (
            0,
            json!({
                "command": command,
                "verdict": "entailed",
                "proof_steps": proof.steps.len(),
            }),
            "ENTAILED\n".to_owned(),
        ),
        Verdict::NotEntailed(cm) => (
            1,
            json!({
                "command": command,
                "verdict": "not-entailed",
                "countermodel": countermodel_json(cm, sig),
            }),
            format!(
                "NOT ENTAILED\ncountermodel pair: ({}, {})\n{}\n",
                cm.pair.0,
                cm.pair.1,
                cm.structure.to_json_string(sig)
            ),
        ),
        Verdict::Unknown { bounds, budget } => (
            2,
            json!({
                "command": command,
                "verdict": "unknown",
                "bounds": { "max_worlds": bounds.max_worlds, "max_domain_size": bounds.max_domain_size },
                "budget": budget,
            }),
            format!(
                "UNKNOWN (no countermodel within {} worlds / domain {}; no proof within {} clauses)\n",
                cfg.bounds.max_worlds, cfg.bounds.max_domain_size, cfg.prover_budget
            ),
        ),
    }
}

fn cmd_check_entailment(args: &CheckEntailmentArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let cfg = args.engine.config()?;
    let chi = args.engine.context_formula(&sig)?;
    let qs = questions_from(&args.questions, &sig)?;
    let target = Question::new(parse_arg(&args.target, &sig, "target question")?);
    let verdict = decide_entailment(&qs, &chi, &target, &sig, &cfg)?;
    let (code, mut value, mut text) = verdict_output(&verdict, &sig, &cfg, "check-entailment");
    if args.show_proof {
        if let Verdict::Entailed(proof) = &verdict {
            text.push_str(&proof.to_string());
            if let Some(obj) = value.as_object_mut() {
                obj.insert("proof".into(), json!(proof.to_string()));
            }
        }
    }
    print_output(args.engine.json, value, text);
    Ok(code)
}

fn cmd_check_answer(args: &CheckAnswerArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let cfg = args.engine.config()?;
    let chi = args.engine.context_formula(&sig)?;
    let q = Question::new(parse_arg(&args.question, &sig, "question")?);
    let psi = parse_arg(&args.answer, &sig, "answer")?;
    let verdict = is_answer(&psi, &q, &chi, &sig, &cfg)?;
    let (code, mut value, mut text) = verdict_output(&verdict, &sig, &cfg, "check-answer");
    if let Some(obj) = value.as_object_mut() {
        obj.insert(
            "verdict".into(),
            json!(match verdict {
                Verdict::Entailed(_) => "answer",
                Verdict::NotEntailed(_) => "not-an-answer",
                Verdict::Unknown { .. } => "unknown",
            }),
        );
    }
    text = text
        .replacen("ENTAILED", "ANSWER", 1)
        .replacen("NOT ANSWER", "NOT AN ANSWER", 1);
    print_output(args.engine.json, value, text);
    Ok(code)
}

fn cmd_check_development(args: &CheckDevelopmentArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let variant = args.engine.variant()?;
    let pool: Vec<Formula> = args
        .of
        .iter()
        .map(|t| parse_arg(t, &sig, "pool formula"))
        .collect::<Result<_>>()?;
    let candidate = parse_arg(&args.candidate, &sig, "candidate")?;
    match check_development(&candidate, &pool, &sig, variant) {
        Some(tree) => {
            let class = classify_answer(&candidate, &tree, &sig);
            let tri = |v: Option<bool>| match v {
                Some(true) => "yes",
                Some(false) => "no",
                None => "unknown",
            };
            print_output(
                args.engine.json,
                json!({
                    "command": "check-development",
                    "verdict": "development",
                    "tree": tree.render_text(),
                    "classification": {
                        "atomic": class.is_atomic,
                        "existential_free": class.existential_free,
                        "tautology": tri(class.is_tautology),
                        "contradiction": tri(class.is_contradiction),
                    },
                }),
                format!(
                    "DEVELOPMENT\n{}classification: atomic={}, existential-free={}, tautology={}, contradiction={}\n",
                    tree.render_text(),
                    class.is_atomic,
                    class.existential_free,
                    tri(class.is_tautology),
                    tri(class.is_contradiction),
                ),
            );
            Ok(0)
        }
        None => {
            print_output(
                args.engine.json,
                json!({ "command": "check-development", "verdict": "not-a-development" }),
                "NOT A DEVELOPMENT\n".to_owned(),
            );
            Ok(1)
        }
    }
}

fn cmd_extract(args: &ExtractArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let cfg = args.engine.config()?;
    let chi = args.engine.context_formula(&sig)?;
    let q = Question::new(parse_arg(&args.question, &sig, "question")?);
    let psi = parse_arg(&args.answer, &sig, "answer")?;

    let verdict = is_answer(&psi, &q, &chi, &sig, &cfg)?;
    match &verdict {
        Verdict::Entailed(_) => {}
        Verdict::NotEntailed(_) | Verdict::Unknown { .. } => {
            let (code, mut value, text) = verdict_output(&verdict, &sig, &cfg, "extract");
            if let Some(obj) = value.as_object_mut() {
                if matches!(verdict, Verdict::NotEntailed(_)) {
                    obj.insert("verdict".into(), json!("not-an-answer"));
                }
            }
            print_output(
                args.engine.json,
                value,
                text.replacen("NOT ENTAILED", "NOT AN ANSWER", 1),
            );
            return Ok(code);
        }
    }

    match extract_development(&psi, &q, &chi, &sig, &cfg) {
        Ok(result) => {
            let verified = verify_extraction(&result, &psi, &q, &chi, &sig, &cfg)?;
            if !verified {
                return Err(anyhow!("internal error: extraction failed verification"));
            }
            let trace: Vec<Value> = result
                .trace
                .steps
                .iter()
                .map(|(label, detail)| json!({ "label": label, "detail": detail }))
                .collect();
            let mut text = format!("DEVELOPMENT: {}\n", result.development);
            for (label, detail) in &result.trace.steps {
                text.push_str(&format!("  {label}: {detail}\n"));
            }
            text.push_str(&format!("tree:\n{}", result.tree.render_text()));
            text.push_str("verified: true\n");
            print_output(
                args.engine.json,
                json!({
                    "command": "extract",
                    "verdict": "extracted",
                    "development": result.development.to_string(),
                    "tree": result.tree.render_text(),
                    "trace": trace,
                    "equivalence_proof_steps": result.equivalence_proof.steps.len(),
                    "verified": verified,
                }),
                text,
            );
            Ok(0)
        }
        Err(err) => {
            print_output(
                args.engine.json,
                json!({ "command": "extract", "verdict": "failed", "reason": err.to_string() }),
                format!("EXTRACTION FAILED: {err}\n"),
            );
            Ok(2)
        }
    }
}

fn cmd_partition(args: &PartitionArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let model_text = fs::read_to_string(&args.model)
        .with_context(|| format!("reading model file {}", args.model.display()))?;
    let m = ModalStructure::from_json_str(&model_text, &sig).map_err(|e| anyhow!("{e}"))?;
    let q = Question::new(parse_arg(&args.question, &sig, "question")?);
    let p = question_partition(&m, &q).map_err(|e| anyhow!("{e}"))?;
    let mut text = String::new();
    for block in p.blocks() {
        text.push_str(&format!("{{{}}}\n", block.join(", ")));
    }
    print_output(
        args.engine.json,
        json!({ "command": "partition", "blocks": p.blocks() }),
        text,
    );
    Ok(0)
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let cfg = args.engine.config()?;
    let chi = args.engine.context_formula(&sig)?;
    let qs = questions_from(&args.questions, &sig)?;
    let pool: Vec<Formula> = qs.iter().map(|q| q.body.clone()).collect();
    let stream = enumerate_developments_with_depth(
        &pool,
        &sig,
        args.size,
        cfg.variant,
        args.pool_depth,
    );
    let mut rows: Vec<Value> = Vec::new();
    let mut text = String::new();
    for formula in stream {
        if rows.len() >= args.limit {
            break;
        }
        if !free_variables(&formula).is_empty() {
            continue;
        }
        if args.verify {
            let verdict = is_answer(&formula, &qs[0], &chi, &sig, &cfg)?;
            text.push_str(&format!("{formula}  [{}]\n", verdict.label()));
            rows.push(json!({ "formula": formula.to_string(), "verdict": verdict.label() }));
        } else {
            text.push_str(&format!("{formula}\n"));
            rows.push(json!({ "formula": formula.to_string() }));
        }
    }
    print_output(
        args.engine.json,
        json!({ "command": "enumerate-answers", "answers": rows }),
        text,
    );
    Ok(0)
}

fn cmd_translate(args: &TranslateArgs) -> Result<u8> {
    let sig = args.engine.signature()?;
    let chi = args.engine.context_formula(&sig)?;
    let qs = questions_from(&args.questions, &sig)?;
    let target = Question::new(parse_arg(&args.target, &sig, "target question")?);
    let sequent = translate_entailment(&qs, &chi, &target, &sig).map_err(|e| anyhow!("{e}"))?;
    if args.tptp {
        let text = sequent_to_tptp(&sequent);
        print_output(
            args.engine.json,
            json!({ "command": "translate", "tptp": text }),
            text.clone(),
        );
        return Ok(0);
    }
    let premises: Vec<String> = sequent.premises.iter().map(|p| p.to_string()).collect();
    let mut text = String::new();
    for p in &premises {
        text.push_str(&format!("premise: {p}\n"));
    }
    text.push_str(&format!("conclusion: {}\n", sequent.conclusion));
    print_output(
        args.engine.json,
        json!({
            "command": "translate",
            "premises": premises,
            "conclusion": sequent.conclusion.to_string(),
        }),
        text,
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::CheckEntailment(args) => cmd_check_entailment(args),
        Command::CheckAnswer(args) => cmd_check_answer(args),
        Command::CheckDevelopment(args) => cmd_check_development(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Partition(args) => cmd_partition(args),
        Command::EnumerateAnswers(args) => cmd_enumerate(args),
        Command::Translate(args) => cmd_translate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(4)
        }
    }
}

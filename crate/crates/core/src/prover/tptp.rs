//! TPTP FOF export of sequents, for cross-checks against external provers.

use crate::syntax::{Formula, Term};

use super::Sequent;

/// Variables get an `X` prefix (TPTP variables are capitalized words);
/// predicate and function symbols get an `s_` prefix with prime marks
/// spelled out, keeping everything inside the unquoted lexeme class.
fn var_name(v: &str) -> String {
    format!("X{v}")
}

fn symbol_name(s: &str) -> String {
    format!("s_{}", s.replace('\'', "_prime"))
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&var_name(v)),
        Term::App(f, args) => {
            out.push_str(&symbol_name(f));
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    term(a, out);
                }
                out.push(')');
            }
        }
    }
}

fn formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("$true"),
        Formula::False => out.push_str("$false"),
        Formula::Pred(p, args) => {
            out.push_str(&symbol_name(p));
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    term(a, out);
                }
                out.push(')');
            }
        }
        Formula::Eq(l, r) => {
            out.push('(');
            term(l, out);
            out.push_str(" = ");
            term(r, out);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("~(");
            formula(g, out);
            out.push(')');
        }
        Formula::And(l, r) => binary(l, "&", r, out),
        Formula::Or(l, r) => binary(l, "|", r, out),
        Formula::Imp(l, r) => binary(l, "=>", r, out),
        Formula::Iff(l, r) => binary(l, "<=>", r, out),
        Formula::Forall(v, g) => quant("!", v, g, out),
        Formula::Exists(v, g) => quant("?", v, g, out),
    }
}

fn binary(l: &Formula, op: &str, r: &Formula, out: &mut String) {
    out.push('(');
    formula(l, out);
    out.push_str(&format!(" {op} "));
    formula(r, out);
    out.push(')');
}

fn quant(mark: &str, v: &str, body: &Formula, out: &mut String) {
    out.push_str(&format!("{mark}[{}]: (", var_name(v)));
    formula(body, out);
    out.push(')');
}

/// Renders `fof(...)` lines: one axiom per premise, one conjecture.
pub fn sequent_to_tptp(s: &Sequent) -> String {
    let mut out = String::new();
    for (i, p) in s.premises.iter().enumerate() {
        out.push_str(&format!("fof(premise_{}, axiom, ", i + 1));
        formula(p, &mut out);
        out.push_str(").\n");
    }
    out.push_str("fof(goal, conjecture, ");
    formula(&s.conclusion, &mut out);
    out.push_str(").\n");
    out
}

//! Signatures: predicate and function symbols with arities, plus the
//! rigid/non-rigid distinction on function symbols.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Marker suffix for primed symbol copies produced by [`crate::syntax::prime`].
pub const PRIME_MARK: char = '\'';

/// Namespace prefix reserved for machinery symbols (fresh predicates,
/// fresh constants, Skolem symbols). Rejected in user input.
pub const RESERVED_PREFIX: &str = "__";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` is declared both as a predicate and as a function")]
    DuplicateSymbol(String),
    #[error("symbol name `{0}` is not a valid identifier")]
    BadName(String),
    #[error("symbol name `{0}` uses the reserved primed form")]
    PrimedName(String),
    #[error("symbol name `{0}` uses the reserved `__` namespace")]
    ReservedName(String),
    #[error("invalid signature file: {0}")]
    Format(String),
}

/// Arity and rigidity of a declared function symbol. Constants are
/// arity-0 functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionInfo {
    pub arity: usize,
    pub rigid: bool,
}

/// A first-order signature with equality. Predicates carry an arity;
/// functions carry an arity and a rigidity flag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    predicates: BTreeMap<String, usize>,
    functions: BTreeMap<String, FunctionInfo>,
}

/// `[A-Za-z_][A-Za-z0-9_]*` with optional trailing apostrophes.
/// The apostrophes mark primed copies and never appear in user input.
pub fn is_identifier(name: &str) -> bool {
    let base = name.trim_end_matches(PRIME_MARK);
    if base.is_empty() || name[base.len()..].chars().any(|c| c != PRIME_MARK) {
        return false;
    }
    let mut chars = base.chars();
    let first = chars.next().unwrap();
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_primed(name: &str) -> bool {
    name.ends_with(PRIME_MARK)
}

pub fn is_reserved(name: &str) -> bool {
    name.starts_with(RESERVED_PREFIX)
}

/// A plain identifier: valid, unprimed, outside the reserved namespace.
/// Variables and user-declared symbols must be plain.
pub fn is_plain_identifier(name: &str) -> bool {
    is_identifier(name) && !is_primed(name) && !is_reserved(name)
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a predicate. Internal code may declare primed or reserved
    /// names; user-facing loaders go through [`Signature::from_json_str`],
    /// which rejects them.
    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::BadName(name.to_owned()));
        }
        if self.functions.contains_key(name) {
            return Err(SignatureError::DuplicateSymbol(name.to_owned()));
        }
        self.predicates.insert(name.to_owned(), arity);
        Ok(())
    }

    pub fn add_function(
        &mut self,
        name: &str,
        arity: usize,
        rigid: bool,
    ) -> Result<(), SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::BadName(name.to_owned()));
        }
        if self.predicates.contains_key(name) {
            return Err(SignatureError::DuplicateSymbol(name.to_owned()));
        }
        self.functions.insert(name.to_owned(), FunctionInfo { arity, rigid });
        Ok(())
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn function(&self, name: &str) -> Option<FunctionInfo> {
        self.functions.get(name).copied()
    }

    pub fn is_rigid_function(&self, name: &str) -> bool {
        self.functions.get(name).map(|f| f.rigid).unwrap_or(false)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, FunctionInfo)> {
        self.functions.iter().map(|(n, i)| (n.as_str(), *i))
    }

    /// Rigid constants (arity-0 rigid functions), in name order.
    pub fn rigid_constants(&self) -> Vec<String> {
        self.functions
            .iter()
            .filter(|(_, i)| i.rigid && i.arity == 0)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// The signature extended with a primed copy of every predicate and
    /// every non-rigid function. Rigid functions are shared between the
    /// plain and primed vocabularies and get no copy.
    pub fn primed_extension(&self) -> Signature {
        let mut out = self.clone();
        for (name, arity) in &self.predicates {
            out.predicates.insert(format!("{name}{PRIME_MARK}"), *arity);
        }
        for (name, info) in &self.functions {
            if !info.rigid {
                out.functions.insert(format!("{name}{PRIME_MARK}"), *info);
            }
        }
        out
    }

    /// True if any declared symbol is a primed copy.
    pub fn has_primed_symbols(&self) -> bool {
        self.predicates.keys().chain(self.functions.keys()).any(|n| is_primed(n))
    }

    /// Parses the JSON signature file format:
    /// `{"predicates": {name: arity}, "functions": {name: {"arity": n, "rigid": bool}}}`.
    /// Primed and `__`-prefixed names are rejected: those namespaces are
    /// reserved for the translation machinery.
    pub fn from_json_str(text: &str) -> Result<Self, SignatureError> {
        let file: SignatureFile =
            serde_json::from_str(text).map_err(|e| SignatureError::Format(e.to_string()))?;
        let mut sig = Signature::new();
        for (name, arity) in file.predicates {
            check_user_name(&name)?;
            sig.add_predicate(&name, arity)?;
        }
        for (name, info) in file.functions {
            check_user_name(&name)?;
            sig.add_function(&name, info.arity, info.rigid)?;
        }
        Ok(sig)
    }

    pub fn to_json_string(&self) -> String {
        let file = SignatureFile {
            predicates: self.predicates.clone(),
            functions: self.functions.clone(),
        };
        serde_json::to_string_pretty(&file).expect("signature serialization")
    }
}

fn check_user_name(name: &str) -> Result<(), SignatureError> {
    if !is_identifier(name) {
        Err(SignatureError::BadName(name.to_owned()))
    } else if is_primed(name) {
        Err(SignatureError::PrimedName(name.to_owned()))
    } else if is_reserved(name) {
        Err(SignatureError::ReservedName(name.to_owned()))
    } else {
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SignatureFile {
    #[serde(default)]
    predicates: BTreeMap<String, usize>,
    #[serde(default)]
    functions: BTreeMap<String, FunctionInfo>,
}

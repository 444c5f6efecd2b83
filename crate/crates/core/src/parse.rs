//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" or)* (right-assoc) ;
//! or := and ("|" and)* ; and := unary ("&" unary)* ;
//! unary := "~" unary | "forall" IDENT "." unary | "exists" IDENT "." unary | atom ;
//! atom := "true" | "false" | "(" formula ")" | term "=" term | IDENT [ "(" term ("," term)* ")" ] ;
//! term := IDENT [ "(" term ("," term)* ")" ] .
//! ```
//!
//! An identifier that is not declared in the signature and is used without
//! arguments is a variable; declared arity-0 functions are constants.

use std::fmt;

use thiserror::Error;

use crate::signature::{is_plain_identifier, is_primed, is_reserved, Signature};
use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{position}: {message}")]
pub struct ParseError {
    pub position: Position,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Forall,
    Exists,
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "`{name}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Equals => "`=`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::DoubleArrow => "`<->`",
            Tok::End => "end of input",
        };
        write!(f, "{s}")
    }
}

fn offset_to_position(text: &str, offset: usize) -> Position {
    let mut line = 1;
    let mut column = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    Position { line, column }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: String| ParseError {
        position: offset_to_position(text, offset),
        message,
    };
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, i));
                i += 1;
            }
            '~' => {
                toks.push((Tok::Tilde, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(err(i, "expected `->`".into()));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::DoubleArrow, i));
                    i += 3;
                } else {
                    return Err(err(i, "expected `<->`".into()));
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let b = bytes[i] as char;
                    if b.is_ascii_alphanumeric() || b == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                // trailing apostrophes belong to the identifier (primed names)
                while i < bytes.len() && bytes[i] == b'\'' {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word.to_owned()),
                };
                toks.push((tok, start));
            }
            _ => return Err(err(i, format!("unexpected character `{c}`"))),
        }
    }
    toks.push((Tok::End, bytes.len()));
    Ok(toks)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, offset: usize, message: String) -> ParseError {
        ParseError {
            position: offset_to_position(self.text, offset),
            message,
        }
    }

    fn error_here(&self, message: String) -> ParseError {
        self.error(self.offset(), message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.advance();
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let right = self.imp()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let quant = self.advance();
                let offset = self.offset();
                let var = match self.advance() {
                    Tok::Ident(name) => name,
                    other => {
                        return Err(
                            self.error(offset, format!("expected a variable, found {other}"))
                        )
                    }
                };
                if !is_plain_identifier(&var) {
                    return Err(self.error(
                        offset,
                        format!("quantified variable `{var}` must be a plain identifier"),
                    ));
                }
                if self.sig.predicate_arity(&var).is_some() || self.sig.function(&var).is_some() {
                    return Err(self.error(
                        offset,
                        format!("cannot quantify over declared symbol `{var}`"),
                    ));
                }
                self.expect(Tok::Dot)?;
                let body = self.unary()?;
                Ok(match quant {
                    Tok::Forall => Formula::forall(&var, body),
                    _ => Formula::exists(&var, body),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let offset = self.offset();
                let (name, args) = self.applied_ident()?;
                if *self.peek() == Tok::Equals {
                    self.advance();
                    let left = self.reinterpret_as_term(&name, args, offset)?;
                    let right = self.term()?;
                    Ok(Formula::Eq(left, right))
                } else {
                    match self.sig.predicate_arity(&name) {
                        Some(arity) => {
                            let args = args.unwrap_or_default();
                            if args.len() != arity {
                                return Err(self.error(
                                    offset,
                                    format!(
                                        "predicate `{name}` expects {arity} argument(s), got {}",
                                        args.len()
                                    ),
                                ));
                            }
                            Ok(Formula::Pred(name, args))
                        }
                        None => {
                            if args.is_some() {
                                Err(self.error(
                                    offset,
                                    format!("undeclared symbol `{name}` used with arguments"),
                                ))
                            } else if self.sig.function(&name).is_some() {
                                Err(self.error(
                                    offset,
                                    format!("function symbol `{name}` is not a formula"),
                                ))
                            } else {
                                Err(self.error(
                                    offset,
                                    format!("`{name}` is not a declared predicate"),
                                ))
                            }
                        }
                    }
                }
            }
            other => Err(self.error_here(format!("expected a formula, found {other}"))),
        }
    }

    /// IDENT with an optional argument list, not yet resolved to a
    /// predicate application or a term.
    fn applied_ident(&mut self) -> Result<(String, Option<Vec<Term>>), ParseError> {
        let name = match self.advance() {
            Tok::Ident(name) => name,
            other => return Err(self.error_here(format!("expected an identifier, found {other}"))),
        };
        if *self.peek() == Tok::LParen {
            self.advance();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.advance();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            Ok((name, Some(args)))
        } else {
            Ok((name, None))
        }
    }

    fn reinterpret_as_term(
        &self,
        name: &str,
        args: Option<Vec<Term>>,
        offset: usize,
    ) -> Result<Term, ParseError> {
        self.make_term(name, args, offset)
    }

    fn make_term(
        &self,
        name: &str,
        args: Option<Vec<Term>>,
        offset: usize,
    ) -> Result<Term, ParseError> {
        if self.sig.predicate_arity(name).is_some() {
            return Err(self.error(offset, format!("predicate `{name}` used as a term")));
        }
        match (self.sig.function(name), args) {
            (Some(info), Some(args)) => {
                if args.len() != info.arity {
                    Err(self.error(
                        offset,
                        format!(
                            "function `{name}` expects {} argument(s), got {}",
                            info.arity,
                            args.len()
                        ),
                    ))
                } else {
                    Ok(Term::App(name.to_owned(), args))
                }
            }
            (Some(info), None) => {
                if info.arity != 0 {
                    Err(self.error(
                        offset,
                        format!("function `{name}` expects {} argument(s), got 0", info.arity),
                    ))
                } else {
                    Ok(Term::constant(name))
                }
            }
            (None, Some(_)) => Err(self.error(
                offset,
                format!("undeclared symbol `{name}` used with arguments"),
            )),
            (None, None) => {
                // an undeclared bare identifier is a variable
                if is_primed(name) {
                    Err(self.error(
                        offset,
                        format!("primed identifier `{name}` is reserved and not declared"),
                    ))
                } else if is_reserved(name) {
                    Err(self.error(
                        offset,
                        format!("identifier `{name}` uses the reserved `__` namespace"),
                    ))
                } else {
                    Ok(Term::var(name))
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        let (name, args) = self.applied_ident()?;
        self.make_term(&name, args, offset)
    }
}

/// Parses `text` as a formula over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { text, toks, pos: 0, sig };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here(format!("unexpected {} after formula", p.peek())));
    }
    Ok(f)
}

/// Parses `text` as a term over `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { text, toks, pos: 0, sig };
    let t = p.term()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here(format!("unexpected {} after term", p.peek())));
    }
    Ok(t)
}

//! Terms, geometric formulas and sequents: AST, concrete grammar, printer,
//! free-variable analysis and substitution.
//!
//! Concrete syntax, whitespace insensitive:
//!
//! ```text
//! term    ::= VAR | CONST | FNAME "(" term ("," term)* ")"
//! VAR     ::= "x" [1-9][0-9]*        CONST ::= "c" [1-9][0-9]*
//! FNAME   ::= "f." ident             PNAME ::= ident (not reserved)
//! atom    ::= "top" | "bot" | PNAME "(" term ("," term)* ")" | term "=" term
//! formula ::= atom | "(" formula "/\" formula ")" | "(" formula "\/" formula ")"
//!           | "\/[" (formula ("," formula)*)? "]" | "exists" VAR "." formula
//! sequent ::= formula "|-" formula
//! ```
//!
//! Binary `\/` is sugar for a two-member finite join, so the printer always
//! emits the bracketed form.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Variable index `i` of `x_i`; always at least 1.
pub type Var = u32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(Var),
    /// Function application; the name is stored without its `f.` prefix.
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bot,
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    /// Finite join; `Join(vec![])` behaves as `Bot`.
    Join(Vec<Formula>),
    Exists(Var, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        Sequent {
            antecedent,
            consequent,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut vars = self.antecedent.free_vars();
        vars.extend(self.consequent.free_vars());
        vars
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        pos: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid signature declaration: {0}")]
    BadDeclaration(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substitution would capture x{var} under `exists x{quantifier}`")]
    Capture { quantifier: Var, var: Var },
    #[error("variable x{0} is targeted more than once")]
    DuplicateTarget(Var),
}

const RESERVED: [&str; 3] = ["top", "bot", "exists"];

fn indexed_name(s: &str, prefix: char) -> Option<u32> {
    let rest = s.strip_prefix(prefix)?;
    let first = rest.chars().next()?;
    if !('1'..='9').contains(&first) || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Constant, function and predicate symbols. Equality is built in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constants: BTreeSet<String>,
    functions: BTreeMap<String, usize>,
    predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), SyntaxError> {
        if indexed_name(name, 'c').is_none() {
            return Err(SyntaxError::BadDeclaration(format!(
                "constant `{name}` must look like c1, c2, ..."
            )));
        }
        self.constants.insert(name.to_string());
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if !is_ident(name) {
            return Err(SyntaxError::BadDeclaration(format!(
                "function name `{name}` is not an identifier"
            )));
        }
        if arity == 0 {
            return Err(SyntaxError::BadDeclaration(format!(
                "function `{name}` needs arity >= 1; use a constant instead"
            )));
        }
        if self.predicates.contains_key(name) {
            return Err(SyntaxError::BadDeclaration(format!(
                "`{name}` is already a predicate"
            )));
        }
        self.functions.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if !is_ident(name)
            || RESERVED.contains(&name)
            || indexed_name(name, 'x').is_some()
            || indexed_name(name, 'c').is_some()
        {
            return Err(SyntaxError::BadDeclaration(format!(
                "`{name}` cannot be a predicate name"
            )));
        }
        if arity == 0 {
            return Err(SyntaxError::BadDeclaration(format!(
                "predicate `{name}` needs arity >= 1"
            )));
        }
        if self.functions.contains_key(name) {
            return Err(SyntaxError::BadDeclaration(format!(
                "`{name}` is already a function"
            )));
        }
        self.predicates.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self, SyntaxError> {
        self.add_constant(name)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self, SyntaxError> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Result<Self, SyntaxError> {
        self.add_predicate(name, arity)?;
        Ok(self)
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(String::as_str)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn check_term(&self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) if self.has_constant(c) => Ok(()),
            Term::Const(c) => Err(SyntaxError::UnknownSymbol(c.clone())),
            Term::App(f, args) => {
                let arity = self
                    .function_arity(f)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(format!("f.{f}")))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: format!("f.{f}"),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn check_formula(&self, phi: &Formula) -> Result<(), SyntaxError> {
        match phi {
            Formula::Top | Formula::Bot => Ok(()),
            Formula::Pred(p, args) => {
                let arity = self
                    .predicate_arity(p)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(p.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: p.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Formula::Eq(l, r) => {
                self.check_term(l)?;
                self.check_term(r)
            }
            Formula::And(l, r) => {
                self.check_formula(l)?;
                self.check_formula(r)
            }
            Formula::Join(members) => members.iter().try_for_each(|m| self.check_formula(m)),
            Formula::Exists(_, body) => self.check_formula(body),
        }
    }
}

impl Term {
    pub fn var(i: Var) -> Self {
        Term::Var(i)
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(name.to_string(), args)
    }

    /// All variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// `self[replacement / x_var]`: every occurrence of the variable replaced.
    pub fn substitute(&self, var: Var, replacement: &Term) -> Term {
        match self {
            Term::Var(v) if *v == var => replacement.clone(),
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter()
                    .map(|a| a.substitute(var, replacement))
                    .collect(),
            ),
        }
    }

    fn rename_vars(&self, map: &BTreeMap<Var, Var>) -> Term {
        match self {
            Term::Var(v) => Term::Var(*map.get(v).unwrap_or(v)),
            Term::Const(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.rename_vars(map)).collect())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

impl Formula {
    pub fn pred(name: &str, args: Vec<Term>) -> Self {
        Formula::Pred(name.to_string(), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::Eq(lhs, rhs)
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    /// Binary join, i.e. a two-member [`Formula::Join`].
    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Join(vec![lhs, rhs])
    }

    pub fn exists(var: Var, body: Formula) -> Self {
        Formula::Exists(var, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Pred(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::And(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Formula::Join(ms) => ms.iter().for_each(|m| m.collect_free(out)),
            Formula::Exists(v, body) => {
                let mut inner = body.free_vars();
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Every variable index appearing anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Pred(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::And(l, r) => {
                l.collect_all(out);
                r.collect_all(out);
            }
            Formula::Join(ms) => ms.iter().for_each(|m| m.collect_all(out)),
            Formula::Exists(v, body) => {
                out.insert(*v);
                body.collect_all(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Pred(..) | Formula::Eq(..) => 0,
            Formula::And(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Join(ms) => 1 + ms.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Exists(_, body) => 1 + body.depth(),
        }
    }

    /// `self[replacement / x_var]`, replacing free occurrences only.
    ///
    /// Substituting for a variable bound at the top of an `exists` leaves that
    /// subformula unchanged. A replacement variable that would fall under a
    /// quantifier binding it is a [`SubstError::Capture`]; nothing is renamed.
    pub fn substitute(&self, var: Var, replacement: &Term) -> Result<Formula, SubstError> {
        let repl_vars = replacement.vars();
        self.subst_inner(var, replacement, &repl_vars)
    }

    fn subst_inner(
        &self,
        var: Var,
        replacement: &Term,
        repl_vars: &BTreeSet<Var>,
    ) -> Result<Formula, SubstError> {
        Ok(match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Pred(p, args) => Formula::Pred(
                p.clone(),
                args.iter()
                    .map(|a| a.substitute(var, replacement))
                    .collect(),
            ),
            Formula::Eq(l, r) => Formula::Eq(
                l.substitute(var, replacement),
                r.substitute(var, replacement),
            ),
            Formula::And(l, r) => Formula::and(
                l.subst_inner(var, replacement, repl_vars)?,
                r.subst_inner(var, replacement, repl_vars)?,
            ),
            Formula::Join(ms) => Formula::Join(
                ms.iter()
                    .map(|m| m.subst_inner(var, replacement, repl_vars))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Exists(v, _) if *v == var => self.clone(),
            Formula::Exists(v, body) => {
                if repl_vars.contains(v) && body.free_vars().contains(&var) {
                    return Err(SubstError::Capture {
                        quantifier: *v,
                        var: *v,
                    });
                }
                Formula::exists(*v, body.subst_inner(var, replacement, repl_vars)?)
            }
        })
    }

    /// Simultaneous variable-for-variable substitution: each `(target,
    /// replacement)` pair replaces free occurrences of `x_target` with
    /// `x_replacement`, all at once.
    pub fn substitute_vars(&self, pairs: &[(Var, Var)]) -> Result<Formula, SubstError> {
        let mut map = BTreeMap::new();
        for &(target, repl) in pairs {
            if map.insert(target, repl).is_some() {
                return Err(SubstError::DuplicateTarget(target));
            }
        }
        self.rename_free(&map)
    }

    fn rename_free(&self, map: &BTreeMap<Var, Var>) -> Result<Formula, SubstError> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        Ok(match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|a| a.rename_vars(map)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(l.rename_vars(map), r.rename_vars(map)),
            Formula::And(l, r) => Formula::and(l.rename_free(map)?, r.rename_free(map)?),
            Formula::Join(ms) => Formula::Join(
                ms.iter()
                    .map(|m| m.rename_free(map))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Exists(v, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let free = body.free_vars();
                for (target, repl) in &inner {
                    if repl == v && free.contains(target) {
                        return Err(SubstError::Capture {
                            quantifier: *v,
                            var: *repl,
                        });
                    }
                }
                Formula::exists(*v, body.rename_free(&inner)?)
            }
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => write!(f, "x{v}"),
            Term::App(name, args) => {
                write!(f, "f.{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::Pred(p, args) => {
                write!(f, "{p}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::And(l, r) => write!(f, "({l} /\\ {r})"),
            Formula::Join(ms) => {
                f.write_str("\\/[")?;
                write_list(f, ms)?;
                f.write_str("]")
            }
            Formula::Exists(v, body) => write!(f, "exists x{v} . {body}"),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.antecedent, self.consequent)
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    FName(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Equals,
    Wedge,
    Vee,
    Turnstile,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::FName(s) => format!("`f.{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Wedge => "`/\\`".into(),
            Tok::Vee => "`\\/`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_start = |b: u8| b.is_ascii_alphabetic() || b == b'_';
    let ident_cont = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = bytes.get(i..i + 2);
        let tok = match (b, two) {
            (_, Some(b"/\\")) => {
                i += 2;
                Tok::Wedge
            }
            (_, Some(b"\\/")) => {
                i += 2;
                Tok::Vee
            }
            (_, Some(b"|-")) => {
                i += 2;
                Tok::Turnstile
            }
            (b'(', _) => {
                i += 1;
                Tok::LParen
            }
            (b')', _) => {
                i += 1;
                Tok::RParen
            }
            (b'[', _) => {
                i += 1;
                Tok::LBrack
            }
            (b']', _) => {
                i += 1;
                Tok::RBrack
            }
            (b',', _) => {
                i += 1;
                Tok::Comma
            }
            (b'.', _) => {
                i += 1;
                Tok::Dot
            }
            (b'=', _) => {
                i += 1;
                Tok::Equals
            }
            (b, _) if ident_start(b) => {
                while i < bytes.len() && ident_cont(bytes[i]) {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "f"
                    && bytes.get(i) == Some(&b'.')
                    && bytes.get(i + 1).copied().is_some_and(ident_start)
                {
                    i += 1;
                    let name_start = i;
                    while i < bytes.len() && ident_cont(bytes[i]) {
                        i += 1;
                    }
                    Tok::FName(text[name_start..i].to_string())
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Parse {
                    pos: i,
                    expected: vec!["a token"],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

pub(crate) struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, sig: &'a Signature) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: Vec<&'static str>) -> SyntaxError {
        let (pos, tok) = &self.toks[self.pos];
        SyntaxError::Parse {
            pos: *pos,
            expected,
            found: tok.describe(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![name]))
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(vec!["end of input"]))
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(word) => {
                if let Some(v) = indexed_name(&word, 'x') {
                    self.bump();
                    Ok(Term::Var(v))
                } else if indexed_name(&word, 'c').is_some() {
                    self.bump();
                    if !self.sig.has_constant(&word) {
                        return Err(SyntaxError::UnknownSymbol(word));
                    }
                    Ok(Term::Const(word))
                } else {
                    Err(self.error(vec!["variable", "constant", "function application"]))
                }
            }
            Tok::FName(name) => {
                self.bump();
                let args = self.term_args()?;
                let arity = self
                    .sig
                    .function_arity(&name)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(format!("f.{name}")))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: format!("f.{name}"),
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Term::App(name, args))
            }
            _ => Err(self.error(vec!["variable", "constant", "function application"])),
        }
    }

    fn term_args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(word) if word == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(word) if word == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(word) if word == "exists" => {
                self.bump();
                let var = match self.peek().clone() {
                    Tok::Ident(v) => match indexed_name(&v, 'x') {
                        Some(i) => {
                            self.bump();
                            i
                        }
                        None => return Err(self.error(vec!["variable"])),
                    },
                    _ => return Err(self.error(vec!["variable"])),
                };
                self.expect(Tok::Dot, "`.`")?;
                Ok(Formula::exists(var, self.formula()?))
            }
            Tok::Vee => {
                self.bump();
                self.expect(Tok::LBrack, "`[`")?;
                let mut members = Vec::new();
                if *self.peek() != Tok::RBrack {
                    members.push(self.formula()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        members.push(self.formula()?);
                    }
                }
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Formula::Join(members))
            }
            Tok::LParen => {
                self.bump();
                let lhs = self.formula()?;
                let op = match self.peek() {
                    Tok::Wedge | Tok::Vee => self.bump(),
                    _ => return Err(self.error(vec!["`/\\`", "`\\/`"])),
                };
                let rhs = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if op == Tok::Wedge {
                    Formula::and(lhs, rhs)
                } else {
                    Formula::or(lhs, rhs)
                })
            }
            Tok::Ident(word)
                if indexed_name(&word, 'x').is_none()
                    && indexed_name(&word, 'c').is_none()
                    && *self.peek2() == Tok::LParen =>
            {
                self.bump();
                let args = self.term_args()?;
                let arity = self
                    .sig
                    .predicate_arity(&word)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(word.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: word,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Formula::Pred(word, args))
            }
            Tok::Ident(_) | Tok::FName(_) => {
                let lhs = self.term()?;
                self.expect(Tok::Equals, "`=`")?;
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            _ => Err(self.error(vec!["formula"])),
        }
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text, sig)?;
    let phi = p.formula()?;
    p.finish()?;
    Ok(phi)
}

pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, SyntaxError> {
    let mut p = Parser::new(text, sig)?;
    let antecedent = p.formula()?;
    p.expect(Tok::Turnstile, "`|-`")?;
    let consequent = p.formula()?;
    p.finish()?;
    Ok(Sequent::new(antecedent, consequent))
}

/// Component-wise equalities `(x1 = y1) /\ ... /\ (xn = yn)`, folded to the
/// left, used as the tuple-equality antecedent of the equality rule.
/// `None` for an empty list.
pub fn tuple_equality(pairs: &[(Var, Var)]) -> Option<Formula> {
    let mut eqs = pairs
        .iter()
        .map(|&(x, y)| Formula::Eq(Term::Var(x), Term::Var(y)));
    let first = eqs.next()?;
    Some(eqs.fold(first, Formula::and))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_constant("c1")
            .unwrap()
            .with_constant("c2")
            .unwrap()
            .with_function("pair", 2)
            .unwrap()
            .with_function("s", 1)
            .unwrap()
            .with_predicate("p", 1)
            .unwrap()
            .with_predicate("q", 1)
            .unwrap()
            .with_predicate("r", 2)
            .unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &sig()).unwrap()
    }

    #[test]
    fn parses_terms() {
        let s = sig();
        assert_eq!(parse_term("x1", &s).unwrap(), Term::Var(1));
        assert_eq!(parse_term("c2", &s).unwrap(), Term::constant("c2"));
        assert_eq!(
            parse_term("f.pair(x1, c1)", &s).unwrap(),
            Term::app("pair", vec![Term::Var(1), Term::constant("c1")])
        );
        assert_eq!(
            parse_term("f.pair(x1)", &s),
            Err(SyntaxError::ArityMismatch {
                name: "f.pair".into(),
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            parse_term("c9", &s),
            Err(SyntaxError::UnknownSymbol("c9".into()))
        );
        assert_eq!(
            parse_term("f.nope(x1)", &s),
            Err(SyntaxError::UnknownSymbol("f.nope".into()))
        );
        assert!(matches!(
            parse_term("x0", &s),
            Err(SyntaxError::Parse { .. })
        ));
    }

    #[test]
    fn parses_formulas() {
        assert_eq!(f("top"), Formula::Top);
        assert_eq!(
            f("(p(x1) /\\ q(x1))"),
            Formula::and(
                Formula::pred("p", vec![Term::Var(1)]),
                Formula::pred("q", vec![Term::Var(1)])
            )
        );
        assert_eq!(
            f("exists x2 . \\/[ p(x2), x1 = x2 ]"),
            Formula::exists(
                2,
                Formula::Join(vec![
                    Formula::pred("p", vec![Term::Var(2)]),
                    Formula::Eq(Term::Var(1), Term::Var(2)),
                ])
            )
        );
        assert_eq!(f("\\/[]"), Formula::Join(vec![]));
        assert_eq!(
            f("(p(x1) \\/ bot)"),
            Formula::or(Formula::pred("p", vec![Term::Var(1)]), Formula::Bot)
        );
        // exists extends to the right but binary connectives need parentheses
        assert_eq!(
            f("(exists x1 . p(x1) /\\ q(x1))"),
            Formula::and(
                Formula::exists(1, Formula::pred("p", vec![Term::Var(1)])),
                Formula::pred("q", vec![Term::Var(1)])
            )
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_formula("(p(x1) q(x1))", &sig()).unwrap_err();
        match err {
            SyntaxError::Parse { pos, expected, .. } => {
                assert_eq!(pos, 7);
                assert!(expected.contains(&"`/\\`"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("p(x1) /\\ q(x1)", &sig()).is_err());
        assert!(parse_formula("p(x1, x2)", &sig()).is_err());
        assert!(parse_formula("zz(x1)", &sig()).is_err());
        assert!(parse_formula("p(x1) $", &sig()).is_err());
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("top |- x1 = x1", &sig()).unwrap();
        assert_eq!(s.antecedent, Formula::Top);
        assert_eq!(s.to_string(), "top |- x1 = x1");
    }

    #[test]
    fn signature_rules() {
        let mut s = Signature::new();
        assert!(s.add_constant("k").is_err());
        assert!(s.add_predicate("top", 1).is_err());
        assert!(s.add_predicate("x3", 1).is_err());
        assert!(s.add_function("g", 0).is_err());
        s.add_function("g", 1).unwrap();
        assert!(s.add_predicate("g", 1).is_err());
    }

    #[test]
    fn free_variables() {
        assert_eq!(f("r(x1, x2)").free_vars(), BTreeSet::from([1, 2]));
        assert_eq!(f("exists x1 . r(x1, x2)").free_vars(), BTreeSet::from([2]));
        assert!(Formula::Top.free_vars().is_empty());
    }

    #[test]
    fn term_substitution() {
        let c1 = Term::constant("c1");
        assert_eq!(Term::Var(1).substitute(1, &c1), c1);
        assert_eq!(Term::Var(2).substitute(1, &c1), Term::Var(2));
        let t = Term::app(
            "s",
            vec![Term::app("pair", vec![Term::Var(1), Term::Var(1)])],
        );
        assert_eq!(
            t.substitute(1, &c1),
            Term::app("s", vec![Term::app("pair", vec![c1.clone(), c1])])
        );
    }

    #[test]
    fn formula_substitution() {
        let c1 = Term::constant("c1");
        assert_eq!(
            f("(p(x1) /\\ q(x1))").substitute(1, &c1).unwrap(),
            f("(p(c1) /\\ q(c1))")
        );
        let bound = f("exists x1 . p(x1)");
        assert_eq!(bound.substitute(1, &c1).unwrap(), bound);
        assert_eq!(
            f("exists x2 . r(x1, x2)").substitute(1, &Term::Var(2)),
            Err(SubstError::Capture {
                quantifier: 2,
                var: 2
            })
        );
        // no free x1 under the quantifier: nothing to capture
        assert_eq!(
            f("exists x2 . p(x2)").substitute(1, &Term::Var(2)).unwrap(),
            f("exists x2 . p(x2)")
        );
    }

    /// Renames through fresh intermediates, one pair at a time.
    fn sequential_via_fresh(phi: &Formula, pairs: &[(Var, Var)]) -> Formula {
        let mut used = phi.all_vars();
        for &(a, b) in pairs {
            used.insert(a);
            used.insert(b);
        }
        let base = used.iter().max().copied().unwrap_or(0) + 1;
        let mut out = phi.clone();
        for (i, &(target, _)) in pairs.iter().enumerate() {
            out = out.substitute(target, &Term::Var(base + i as Var)).unwrap();
        }
        for (i, &(_, repl)) in pairs.iter().enumerate() {
            out = out.substitute(base + i as Var, &Term::Var(repl)).unwrap();
        }
        out
    }

    #[test]
    fn simultaneous_substitution() {
        let phi = f("r(x1, x2)");
        let swapped = phi.substitute_vars(&[(1, 2), (2, 1)]).unwrap();
        assert_eq!(swapped, f("r(x2, x1)"));
        assert_eq!(swapped, sequential_via_fresh(&phi, &[(1, 2), (2, 1)]));
        // sequential application differs
        let seq = phi
            .substitute(1, &Term::Var(2))
            .unwrap()
            .substitute(2, &Term::Var(1))
            .unwrap();
        assert_eq!(seq, f("r(x1, x1)"));
        assert_eq!(f("p(x1)").substitute_vars(&[]).unwrap(), f("p(x1)"));
        assert_eq!(
            f("x1 = x2").substitute_vars(&[(1, 3)]).unwrap(),
            f("x3 = x2")
        );
        assert_eq!(
            phi.substitute_vars(&[(1, 2), (1, 3)]),
            Err(SubstError::DuplicateTarget(1))
        );
        assert_eq!(
            f("exists x2 . r(x1, x2)").substitute_vars(&[(1, 2)]),
            Err(SubstError::Capture {
                quantifier: 2,
                var: 2
            })
        );
    }

    #[test]
    fn tuple_equalities() {
        assert_eq!(tuple_equality(&[]), None);
        assert_eq!(tuple_equality(&[(1, 2)]).unwrap(), f("x1 = x2"));
        assert_eq!(
            tuple_equality(&[(1, 2), (3, 4)]).unwrap(),
            f("(x1 = x2 /\\ x3 = x4)")
        );
    }
}

//! Finite interpretations and graded satisfaction.
//!
//! A formula is not simply true or false under an assignment: it receives a
//! grade in the interpretation's frame. Conjunction is frame meet, joins and
//! the existential quantifier are frame joins, and equality is crisp.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::frame::{Elem, FiniteFrame};
use crate::syntax::{Formula, Sequent, Signature, SyntaxError, Term, Var};

/// A grade of satisfaction: an element of the interpretation's frame.
pub type Grade = Elem;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown domain element `{0}`")]
    UnknownDomainElement(String),
    #[error("unknown frame element `{0}`")]
    UnknownFrameElement(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("table for `{name}` is not total: missing {missing}")]
    PartialTable { name: String, missing: String },
    #[error("{0}")]
    Declaration(#[from] SyntaxError),
    #[error("domain must be nonempty with distinct elements")]
    BadDomain,
}

/// Table over `D^arity`, stored row-major with the first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Table<T> {
    arity: usize,
    cells: Vec<T>,
}

impl<T: Copy> Table<T> {
    fn get(&self, domain_size: usize, args: &[usize]) -> T {
        let idx = args.iter().fold(0, |acc, &a| acc * domain_size + a);
        self.cells[idx]
    }
}

/// The sequence `s = (s1, s2, ...)`: `s_i` is the override for `i` if one
/// exists, otherwise the default element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    default: usize,
    overrides: BTreeMap<Var, usize>,
}

impl Assignment {
    pub fn constant(default: usize) -> Self {
        Assignment {
            default,
            overrides: BTreeMap::new(),
        }
    }

    pub fn get(&self, var: Var) -> usize {
        self.overrides.get(&var).copied().unwrap_or(self.default)
    }

    pub fn default_element(&self) -> usize {
        self.default
    }

    pub fn overrides(&self) -> &BTreeMap<Var, usize> {
        &self.overrides
    }

    /// `s(d / x_var)` without a domain check.
    pub fn with(&self, var: Var, d: usize) -> Assignment {
        let mut out = self.clone();
        out.overrides.insert(var, d);
        out
    }

    fn set(&mut self, var: Var, d: usize) {
        self.overrides.insert(var, d);
    }
}

/// Interpretation of a signature over a finite domain, grading predicates in
/// a frame.
#[derive(Clone, Debug)]
pub struct Interpretation {
    frame: FiniteFrame,
    domain: Vec<String>,
    domain_index: BTreeMap<String, usize>,
    signature: Signature,
    constants: BTreeMap<String, usize>,
    functions: BTreeMap<String, Table<usize>>,
    predicates: BTreeMap<String, Table<Elem>>,
}

impl Interpretation {
    pub fn new<S: AsRef<str>>(frame: FiniteFrame, domain: &[S]) -> Result<Self, SemanticsError> {
        if domain.is_empty() {
            return Err(SemanticsError::BadDomain);
        }
        let mut domain_index = BTreeMap::new();
        let mut names = Vec::new();
        for (i, d) in domain.iter().enumerate() {
            let d = d.as_ref().to_string();
            if domain_index.insert(d.clone(), i).is_some() {
                return Err(SemanticsError::BadDomain);
            }
            names.push(d);
        }
        Ok(Interpretation {
            frame,
            domain: names,
            domain_index,
            signature: Signature::new(),
            constants: BTreeMap::new(),
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
        })
    }

    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain_element(&self, name: &str) -> Result<usize, SemanticsError> {
        self.domain_index
            .get(name)
            .copied()
            .ok_or_else(|| SemanticsError::UnknownDomainElement(name.to_string()))
    }

    pub fn set_constant(&mut self, name: &str, value: usize) -> Result<(), SemanticsError> {
        if value >= self.domain.len() {
            return Err(SemanticsError::UnknownDomainElement(format!("#{value}")));
        }
        self.signature.add_constant(name)?;
        self.constants.insert(name.to_string(), value);
        Ok(())
    }

    /// Defines a function by evaluating `f` on every tuple of `D^arity`.
    pub fn set_function_with<F>(
        &mut self,
        name: &str,
        arity: usize,
        f: F,
    ) -> Result<(), SemanticsError>
    where
        F: Fn(&[usize]) -> usize,
    {
        let n = self.domain.len();
        let mut cells = Vec::new();
        for args in tuples(n, arity) {
            let v = f(&args);
            if v >= n {
                return Err(SemanticsError::UnknownDomainElement(format!("#{v}")));
            }
            cells.push(v);
        }
        self.signature.add_function(name, arity)?;
        self.functions
            .insert(name.to_string(), Table { arity, cells });
        Ok(())
    }

    /// Defines a predicate by evaluating `f` on every tuple of `D^arity`.
    pub fn set_predicate_with<F>(
        &mut self,
        name: &str,
        arity: usize,
        f: F,
    ) -> Result<(), SemanticsError>
    where
        F: Fn(&[usize]) -> Elem,
    {
        let mut cells = Vec::new();
        for args in tuples(self.domain.len(), arity) {
            let v = f(&args);
            if v.index() >= self.frame.len() {
                return Err(SemanticsError::UnknownFrameElement(format!(
                    "#{}",
                    v.index()
                )));
            }
            cells.push(v);
        }
        self.signature.add_predicate(name, arity)?;
        self.predicates
            .insert(name.to_string(), Table { arity, cells });
        Ok(())
    }

    /// Defines a function from explicit entries keyed by argument tuples,
    /// with an optional value for every unlisted tuple.
    pub fn set_function_entries(
        &mut self,
        name: &str,
        arity: usize,
        entries: &BTreeMap<Vec<usize>, usize>,
        fallback: Option<usize>,
    ) -> Result<(), SemanticsError> {
        let table = self.total_table(name, arity, entries, fallback)?;
        self.set_function_with(name, arity, |args| table[&args.to_vec()])
    }

    /// Predicate counterpart of [`set_function_entries`](Self::set_function_entries).
    pub fn set_predicate_entries(
        &mut self,
        name: &str,
        arity: usize,
        entries: &BTreeMap<Vec<usize>, Elem>,
        fallback: Option<Elem>,
    ) -> Result<(), SemanticsError> {
        let table = self.total_table(name, arity, entries, fallback)?;
        self.set_predicate_with(name, arity, |args| table[&args.to_vec()])
    }

    fn total_table<T: Copy>(
        &self,
        name: &str,
        arity: usize,
        entries: &BTreeMap<Vec<usize>, T>,
        fallback: Option<T>,
    ) -> Result<BTreeMap<Vec<usize>, T>, SemanticsError> {
        let mut out = BTreeMap::new();
        for args in tuples(self.domain.len(), arity) {
            let v = match entries.get(&args).copied().or(fallback) {
                Some(v) => v,
                None => {
                    let shown: Vec<&str> = args.iter().map(|&a| self.domain[a].as_str()).collect();
                    return Err(SemanticsError::PartialTable {
                        name: name.to_string(),
                        missing: shown.join(","),
                    });
                }
            };
            out.insert(args, v);
        }
        if let Some(bad) = entries.keys().find(|k| k.len() != arity) {
            return Err(SemanticsError::ArityMismatch {
                name: name.to_string(),
                expected: arity,
                found: bad.len(),
            });
        }
        Ok(out)
    }

    pub fn constant_value(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn function_value(&self, name: &str, args: &[usize]) -> Option<usize> {
        let t = self.functions.get(name)?;
        (t.arity == args.len()).then(|| t.get(self.domain.len(), args))
    }

    pub fn predicate_value(&self, name: &str, args: &[usize]) -> Option<Elem> {
        let t = self.predicates.get(name)?;
        (t.arity == args.len()).then(|| t.get(self.domain.len(), args))
    }

    /// The constant-default assignment at the first domain element.
    pub fn base_assignment(&self) -> Assignment {
        Assignment::constant(0)
    }

    /// `s(d / x_var)`, checking that `d` is in the domain.
    pub fn assign_update(
        &self,
        s: &Assignment,
        d: usize,
        var: Var,
    ) -> Result<Assignment, SemanticsError> {
        if d >= self.domain.len() {
            return Err(SemanticsError::UnknownDomainElement(format!("#{d}")));
        }
        Ok(s.with(var, d))
    }

    pub fn eval_term(&self, s: &Assignment, t: &Term) -> Result<usize, SemanticsError> {
        match t {
            Term::Const(c) => self
                .constant_value(c)
                .ok_or_else(|| SemanticsError::UnknownSymbol(c.clone())),
            Term::Var(v) => Ok(s.get(*v)),
            Term::App(f, args) => {
                let table = self
                    .functions
                    .get(f)
                    .ok_or_else(|| SemanticsError::UnknownSymbol(format!("f.{f}")))?;
                if table.arity != args.len() {
                    return Err(SemanticsError::ArityMismatch {
                        name: format!("f.{f}"),
                        expected: table.arity,
                        found: args.len(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(s, a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(table.get(self.domain.len(), &vals))
            }
        }
    }

    /// `gr(s sat phi)`.
    pub fn eval(&self, s: &Assignment, phi: &Formula) -> Result<Grade, SemanticsError> {
        let mut scratch = s.clone();
        self.eval_in(&mut scratch, phi)
    }

    // Evaluates with `s` mutated in place for quantifiers and restored after.
    fn eval_in(&self, s: &mut Assignment, phi: &Formula) -> Result<Grade, SemanticsError> {
        let frame = &self.frame;
        match phi {
            Formula::Top => Ok(frame.top()),
            Formula::Bot => Ok(frame.bot()),
            Formula::Pred(p, args) => {
                let table = self
                    .predicates
                    .get(p)
                    .ok_or_else(|| SemanticsError::UnknownSymbol(p.clone()))?;
                if table.arity != args.len() {
                    return Err(SemanticsError::ArityMismatch {
                        name: p.clone(),
                        expected: table.arity,
                        found: args.len(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(s, a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(table.get(self.domain.len(), &vals))
            }
            Formula::Eq(l, r) => {
                let same = self.eval_term(s, l)? == self.eval_term(s, r)?;
                Ok(if same { frame.top() } else { frame.bot() })
            }
            Formula::And(l, r) => {
                let a = self.eval_in(s, l)?;
                let b = self.eval_in(s, r)?;
                Ok(frame.meet(a, b))
            }
            Formula::Join(ms) => {
                let mut acc = frame.bot();
                for m in ms {
                    acc = frame.join(acc, self.eval_in(s, m)?);
                }
                Ok(acc)
            }
            Formula::Exists(v, body) => {
                let saved = s.overrides.get(v).copied();
                let mut acc = frame.bot();
                let mut result = Ok(());
                for d in 0..self.domain.len() {
                    s.set(*v, d);
                    match self.eval_in(s, body) {
                        Ok(g) => acc = frame.join(acc, g),
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                match saved {
                    Some(d) => s.set(*v, d),
                    None => {
                        s.overrides.remove(v);
                    }
                }
                result.map(|_| acc)
            }
        }
    }

    /// `s sat (phi |- psi)`: the antecedent's grade is below the consequent's.
    pub fn sat_sequent(&self, s: &Assignment, seq: &Sequent) -> Result<bool, SemanticsError> {
        let a = self.eval(s, &seq.antecedent)?;
        let c = self.eval(s, &seq.consequent)?;
        Ok(self.frame.leq(a, c))
    }

    /// Checks the sequent at every assignment that matters: the default is
    /// fixed to the first domain element and the free variables range over
    /// all of `D`. Grades depend only on free variables, so this covers
    /// every sequence. Assignments are visited in lexicographic order (lowest
    /// variable index most significant), so the witness is the least one.
    pub fn valid_in(&self, seq: &Sequent) -> Result<ValidityReport, SemanticsError> {
        let vars: Vec<Var> = seq.free_vars().into_iter().collect();
        let mut checked = 0;
        for values in tuples(self.domain.len(), vars.len()) {
            let mut s = self.base_assignment();
            for (v, d) in vars.iter().zip(&values) {
                s.set(*v, *d);
            }
            let a = self.eval(&s, &seq.antecedent)?;
            let c = self.eval(&s, &seq.consequent)?;
            checked += 1;
            if !self.frame.leq(a, c) {
                return Ok(ValidityReport {
                    valid: false,
                    checked,
                    witness: Some(Witness {
                        assignment: s,
                        antecedent: a,
                        consequent: c,
                    }),
                });
            }
        }
        Ok(ValidityReport {
            valid: true,
            checked,
            witness: None,
        })
    }

    /// Renders an assignment as `x1=a,x2=b`, or `default=a` when nothing is
    /// overridden.
    pub fn render_assignment(&self, s: &Assignment) -> String {
        if s.overrides.is_empty() {
            return format!("default={}", self.domain[s.default]);
        }
        let parts: Vec<String> = s
            .overrides
            .iter()
            .map(|(v, d)| format!("x{v}={}", self.domain[*d]))
            .collect();
        parts.join(",")
    }

    /// Parses `default=a,x1=b`. The default is optional and falls back to the
    /// first domain element.
    pub fn parse_assignment(&self, text: &str) -> Result<Assignment, AssignmentParseError> {
        let mut s = self.base_assignment();
        let mut seen = BTreeSet::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| AssignmentParseError::Malformed(part.to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let d = self
                .domain_element(value)
                .map_err(|_| AssignmentParseError::UnknownDomainElement(value.to_string()))?;
            if !seen.insert(key.to_string()) {
                return Err(AssignmentParseError::Malformed(part.to_string()));
            }
            if key == "default" {
                s.default = d;
            } else {
                let var = key
                    .strip_prefix('x')
                    .and_then(|n| n.parse::<Var>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| AssignmentParseError::Malformed(part.to_string()))?;
                s.set(var, d);
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AssignmentParseError {
    #[error("malformed assignment entry `{0}`")]
    Malformed(String),
    #[error("unknown domain element `{0}`")]
    UnknownDomainElement(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: Assignment,
    pub antecedent: Grade,
    pub consequent: Grade,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Assignments examined before stopping.
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            write!(f, "VALID ({} assignments)", self.checked)
        } else {
            f.write_str("INVALID")
        }
    }
}

/// All tuples of `D^arity` in lexicographic order.
pub(crate) fn tuples(domain_size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if arity == 0 {
        1
    } else if domain_size == 0 {
        0
    } else {
        domain_size.checked_pow(arity as u32).unwrap_or(usize::MAX)
    };
    (0..total).map(move |mut k| {
        let mut out = vec![0; arity];
        for slot in out.iter_mut().rev() {
            *slot = k % domain_size;
            k /= domain_size;
        }
        out
    })
}

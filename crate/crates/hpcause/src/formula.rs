//! Propositional formulas over named binary variables.
//!
//! Everything downstream (structural equations, the causality encodings, the
//! CNF layer) is built from [`BooleanFormula`]. Variables are identified by
//! name; an [`Assignment`] maps names to truth values and must be total over
//! the variables of a formula to evaluate it.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid variable name {0:?}: names must be nonempty and contain no whitespace")]
    InvalidName(String),
    #[error("assignment does not cover variable {0}")]
    MissingVariable(VarId),
}

/// Identifier of a model variable. Equality, ordering and hashing are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

impl VarId {
    /// Creates a variable id. Names must be nonempty and free of whitespace.
    pub fn new(name: impl AsRef<str>) -> Result<Self, FormulaError> {
        let name = name.as_ref();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(FormulaError::InvalidName(name.to_string()));
        }
        Ok(VarId(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for VarId {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VarId::new(s)
    }
}

/// A total or partial map from variables to truth values.
///
/// Iteration order is lexicographic by variable name, which keeps every
/// derived artifact (display, witness sets, CNF variable numbering)
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<VarId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Self {
        Assignment {
            values: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: &VarId) -> Option<bool> {
        self.values.get(var).copied()
    }

    pub fn contains(&self, var: &VarId) -> bool {
        self.values.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, bool)> {
        self.values.iter().map(|(v, b)| (v, *b))
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.values.keys()
    }

    /// The sub-assignment over `vars`, silently dropping absent variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a VarId>) -> Assignment {
        Assignment {
            values: vars
                .into_iter()
                .filter_map(|v| self.get(v).map(|b| (v.clone(), b)))
                .collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (var, value)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", var, value as u8)?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (VarId, bool)>>(iter: T) -> Self {
        Assignment::from_pairs(iter)
    }
}

/// Propositional formula over [`VarId`]s.
///
/// `And`/`Or` are n-ary and always carry at least one child; the
/// constructors normalize empty child lists to the neutral constant and
/// unwrap single children. `Iff` is binary and, in concrete syntax,
/// left-associative.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BooleanFormula {
    Const(bool),
    Var(VarId),
    Not(Box<BooleanFormula>),
    And(Vec<BooleanFormula>),
    Or(Vec<BooleanFormula>),
    Iff(Box<BooleanFormula>, Box<BooleanFormula>),
}

impl BooleanFormula {
    pub const TRUE: BooleanFormula = BooleanFormula::Const(true);
    pub const FALSE: BooleanFormula = BooleanFormula::Const(false);

    pub fn var(id: VarId) -> Self {
        BooleanFormula::Var(id)
    }

    pub fn not(f: Self) -> Self {
        BooleanFormula::Not(Box::new(f))
    }

    /// N-ary conjunction. An empty list yields `TRUE`, a singleton unwraps.
    pub fn and(children: impl IntoIterator<Item = Self>) -> Self {
        let mut children: Vec<_> = children.into_iter().collect();
        match children.len() {
            0 => Self::TRUE,
            1 => children.pop().unwrap(),
            _ => BooleanFormula::And(children),
        }
    }

    /// N-ary disjunction. An empty list yields `FALSE`, a singleton unwraps.
    pub fn or(children: impl IntoIterator<Item = Self>) -> Self {
        let mut children: Vec<_> = children.into_iter().collect();
        match children.len() {
            0 => Self::FALSE,
            1 => children.pop().unwrap(),
            _ => BooleanFormula::Or(children),
        }
    }

    pub fn iff(lhs: Self, rhs: Self) -> Self {
        BooleanFormula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// All variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            BooleanFormula::Const(_) => {}
            BooleanFormula::Var(v) => {
                out.insert(v.clone());
            }
            BooleanFormula::Not(f) => f.collect_vars(out),
            BooleanFormula::And(cs) | BooleanFormula::Or(cs) => {
                for c in cs {
                    c.collect_vars(out);
                }
            }
            BooleanFormula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluates under `assignment`, which must cover every variable of the
    /// formula. The check is strict: a missing variable is an error even in
    /// branches a lazy evaluator would skip.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, FormulaError> {
        match self {
            BooleanFormula::Const(b) => Ok(*b),
            BooleanFormula::Var(v) => assignment
                .get(v)
                .ok_or_else(|| FormulaError::MissingVariable(v.clone())),
            BooleanFormula::Not(f) => Ok(!f.evaluate(assignment)?),
            BooleanFormula::And(cs) => {
                let mut acc = true;
                for c in cs {
                    acc &= c.evaluate(assignment)?;
                }
                Ok(acc)
            }
            BooleanFormula::Or(cs) => {
                let mut acc = false;
                for c in cs {
                    acc |= c.evaluate(assignment)?;
                }
                Ok(acc)
            }
            BooleanFormula::Iff(a, b) => Ok(a.evaluate(assignment)? == b.evaluate(assignment)?),
        }
    }

    /// Constant folding. The result contains no `Const` node except possibly
    /// at the root, and is logically equivalent to the input.
    pub fn simplify(&self) -> Self {
        match self {
            BooleanFormula::Const(_) | BooleanFormula::Var(_) => self.clone(),
            BooleanFormula::Not(f) => match f.simplify() {
                BooleanFormula::Const(b) => BooleanFormula::Const(!b),
                g => BooleanFormula::not(g),
            },
            BooleanFormula::And(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.simplify() {
                        BooleanFormula::Const(false) => return Self::FALSE,
                        BooleanFormula::Const(true) => {}
                        g => kept.push(g),
                    }
                }
                BooleanFormula::and(kept)
            }
            BooleanFormula::Or(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.simplify() {
                        BooleanFormula::Const(true) => return Self::TRUE,
                        BooleanFormula::Const(false) => {}
                        g => kept.push(g),
                    }
                }
                BooleanFormula::or(kept)
            }
            BooleanFormula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (BooleanFormula::Const(x), BooleanFormula::Const(y)) => BooleanFormula::Const(x == y),
                (BooleanFormula::Const(true), g) | (g, BooleanFormula::Const(true)) => g,
                (BooleanFormula::Const(false), g) | (g, BooleanFormula::Const(false)) => {
                    BooleanFormula::not(g)
                }
                (ga, gb) => BooleanFormula::iff(ga, gb),
            },
        }
    }
}

/// The literal for "variable `var` has value `value`": the positive literal
/// when `value` is true, the negated one otherwise.
pub fn literal_of(var: VarId, value: bool) -> BooleanFormula {
    if value {
        BooleanFormula::Var(var)
    } else {
        BooleanFormula::not(BooleanFormula::Var(var))
    }
}

/// Boolean combination of primitive events `variable = value`.
///
/// This is the input shape for effect propositions: leaves name an observed
/// or hypothesized value of a single variable, and connectives combine them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventExpr {
    Event(VarId, bool),
    Not(Box<EventExpr>),
    And(Vec<EventExpr>),
    Or(Vec<EventExpr>),
    Iff(Box<EventExpr>, Box<EventExpr>),
}

impl EventExpr {
    pub fn event(var: VarId, value: bool) -> Self {
        EventExpr::Event(var, value)
    }

    pub fn not(e: Self) -> Self {
        EventExpr::Not(Box::new(e))
    }

    pub fn and(children: impl IntoIterator<Item = Self>) -> Self {
        EventExpr::And(children.into_iter().collect())
    }

    pub fn or(children: impl IntoIterator<Item = Self>) -> Self {
        EventExpr::Or(children.into_iter().collect())
    }

    pub fn iff(lhs: Self, rhs: Self) -> Self {
        EventExpr::Iff(Box::new(lhs), Box::new(rhs))
    }
}

/// Translates an event expression into a plain formula: each primitive event
/// `X = v` becomes [`literal_of`]`(X, v)`, connectives carry over.
pub fn phi_to_formula(events: &EventExpr) -> BooleanFormula {
    match events {
        EventExpr::Event(var, value) => literal_of(var.clone(), *value),
        EventExpr::Not(e) => BooleanFormula::not(phi_to_formula(e)),
        EventExpr::And(es) => BooleanFormula::and(es.iter().map(phi_to_formula)),
        EventExpr::Or(es) => BooleanFormula::or(es.iter().map(phi_to_formula)),
        EventExpr::Iff(a, b) => BooleanFormula::iff(phi_to_formula(a), phi_to_formula(b)),
    }
}

// Concrete syntax: `!` binds tighter than `&`, then `|`, then `<->`.
// Children at the same level get parenthesized exactly where reparsing
// would otherwise change the tree shape (see `dsl` round-trip tests).
const PREC_IFF: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_ATOM: u8 = 5;

impl BooleanFormula {
    fn precedence(&self) -> u8 {
        match self {
            BooleanFormula::Const(_) | BooleanFormula::Var(_) => PREC_ATOM,
            BooleanFormula::Not(_) => PREC_NOT,
            BooleanFormula::And(_) => PREC_AND,
            BooleanFormula::Or(_) => PREC_OR,
            BooleanFormula::Iff(_, _) => PREC_IFF,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let needs_parens = self.precedence() < min_prec;
        if needs_parens {
            write!(f, "(")?;
        }
        match self {
            BooleanFormula::Const(b) => write!(f, "{}", *b as u8)?,
            BooleanFormula::Var(v) => write!(f, "{}", v)?,
            BooleanFormula::Not(g) => {
                write!(f, "!")?;
                g.fmt_prec(f, PREC_NOT)?;
            }
            BooleanFormula::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    c.fmt_prec(f, PREC_AND + 1)?;
                }
            }
            BooleanFormula::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    c.fmt_prec(f, PREC_OR + 1)?;
                }
            }
            BooleanFormula::Iff(a, b) => {
                a.fmt_prec(f, PREC_IFF)?;
                write!(f, " <-> ")?;
                b.fmt_prec(f, PREC_IFF + 1)?;
            }
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for BooleanFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for BooleanFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

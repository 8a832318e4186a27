//! A small text format for models and queries.
//!
//! Models live in `.hpm` files:
//!
//! ```text
//! # Suzy throws first.
//! model RockThrowing
//! exo ST_exo, BT_exo
//! ST = ST_exo
//! BT = BT_exo
//! SH = ST
//! BH = BT & !SH
//! BS = SH | BH
//! ```
//!
//! One declaration per line: a `model` header first, then any number of
//! `exo` lines (they accumulate) and equations. `#` starts a comment.
//! Expressions use `!`, `&`, `|`, `<->` (tightest first, `<->` binds
//! loosest and associates left), parentheses, the constants `0` and
//! `1`, and variable names. `model` and `exo` are reserved words.
//!
//! Queries live in `.hpq` files of `key = value` lines:
//!
//! ```text
//! model = models/rock_throwing.hpm
//! context = ST_exo=1, BT_exo=1
//! cause = ST=1
//! phi = BS
//! strategy = SAT
//! ```
//!
//! `context`, `cause`, and `phi` are required; `model` names a model
//! file for the caller to load (callers may supply the model some
//! other way); `strategy` defaults to `SAT`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::checker::{CausalQuery, ParseStrategyError, QueryError, Strategy};
use crate::formula::{BooleanFormula, FormulaError, VarId};
use crate::model::{context_from_unique_pairs, CausalModel, DuplicateBinding, ValidationFinding};

#[derive(Debug, thiserror::Error)]
pub enum DslError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error(transparent)]
    Name(#[from] FormulaError),
    #[error(transparent)]
    Strategy(#[from] ParseStrategyError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Binding(#[from] DuplicateBinding),
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> DslError {
    DslError::Syntax { line, col, message: message.into() }
}

fn semantic(line: usize, message: impl Into<String>) -> DslError {
    DslError::Semantic { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Equals,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Const(b) => format!("`{}`", *b as u8),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    col: usize,
}

/// Strips the comment and tokenizes one line. Columns are 1-based.
fn tokenize(line: usize, text: &str) -> Result<Vec<Spanned>, DslError> {
    let text = text.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '!' => {
                out.push(Spanned { tok: Tok::Bang, col });
                i += 1;
            }
            '&' => {
                out.push(Spanned { tok: Tok::Amp, col });
                i += 1;
            }
            '|' => {
                out.push(Spanned { tok: Tok::Pipe, col });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, col });
                i += 1;
            }
            '=' => {
                out.push(Spanned { tok: Tok::Equals, col });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, col });
                i += 1;
            }
            '<' => {
                if chars[i..].starts_with(&['<', '-', '>']) {
                    out.push(Spanned { tok: Tok::Arrow, col });
                    i += 3;
                } else {
                    return Err(syntax(line, col, "expected `<->`"));
                }
            }
            '0' | '1' => {
                // Identifiers cannot begin with a digit, so `0`/`1`
                // followed by more word characters is malformed.
                if chars.get(i + 1).is_some_and(|&d| ident_continue(d)) {
                    return Err(syntax(line, col, "names must not start with a digit"));
                }
                out.push(Spanned { tok: Tok::Const(c == '1'), col });
                i += 1;
            }
            c if ident_start(c) => {
                let start = i;
                while i < chars.len() && ident_continue(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(word), col });
            }
            c if c.is_ascii_digit() => {
                return Err(syntax(line, col, "only the constants `0` and `1` are allowed"));
            }
            other => {
                return Err(syntax(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Recursive-descent expression parser over one line's tokens.
struct ExprParser<'t> {
    line: usize,
    toks: &'t [Spanned],
    pos: usize,
}

impl<'t> ExprParser<'t> {
    fn new(line: usize, toks: &'t [Spanned]) -> Self {
        ExprParser { line, toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .or_else(|| self.toks.last().map(|s| s.col + 1))
            .unwrap_or(1)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), DslError> {
        let (line, col) = (self.line, self.col());
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(line, col, format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(syntax(line, col, format!("expected {}", want.describe()))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// `iff := or (`<->` or)*`, associating left.
    fn iff(&mut self) -> Result<BooleanFormula, DslError> {
        let mut lhs = self.or()?;
        while self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.or()?;
            lhs = BooleanFormula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    /// `or := and (`|` and)*`, collected n-ary.
    fn or(&mut self) -> Result<BooleanFormula, DslError> {
        let mut children = vec![self.and()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            children.push(self.and()?);
        }
        Ok(BooleanFormula::or(children))
    }

    /// `and := not (`&` not)*`, collected n-ary.
    fn and(&mut self) -> Result<BooleanFormula, DslError> {
        let mut children = vec![self.not()?];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            children.push(self.not()?);
        }
        Ok(BooleanFormula::and(children))
    }

    fn not(&mut self) -> Result<BooleanFormula, DslError> {
        if self.peek() == Some(&Tok::Bang) {
            self.bump();
            Ok(BooleanFormula::not(self.not()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<BooleanFormula, DslError> {
        let (line, col) = (self.line, self.col());
        match self.bump().cloned() {
            Some(Tok::Ident(name)) => Ok(BooleanFormula::var(VarId::new(&name)?)),
            Some(Tok::Const(b)) => Ok(BooleanFormula::Const(b)),
            Some(Tok::LParen) => {
                let inner = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(syntax(line, col, format!("expected a variable, constant, or `(`, found {}", t.describe()))),
            None => Err(syntax(line, col, "expression ends unexpectedly")),
        }
    }
}

/// Parses a single boolean expression, e.g. an effect formula given on
/// the command line.
pub fn parse_expression(text: &str) -> Result<BooleanFormula, DslError> {
    let toks = tokenize(1, text)?;
    let mut p = ExprParser::new(1, &toks);
    if p.at_end() {
        return Err(syntax(1, 1, "empty expression"));
    }
    let expr = p.iff()?;
    if !p.at_end() {
        return Err(syntax(1, p.col(), format!("unexpected {} after expression", p.peek().unwrap().describe())));
    }
    Ok(expr)
}

/// Parses `a=1, b=0` lists, as used for contexts and causes.
pub fn parse_assignment_pairs(text: &str) -> Result<Vec<(VarId, bool)>, DslError> {
    parse_pairs_line(1, &tokenize(1, text)?)
}

fn parse_pairs_line(line: usize, toks: &[Spanned]) -> Result<Vec<(VarId, bool)>, DslError> {
    let mut p = ExprParser::new(line, toks);
    let mut pairs = Vec::new();
    if p.at_end() {
        return Err(syntax(line, 1, "expected `name=0|1` pairs"));
    }
    loop {
        let (l, c) = (p.line, p.col());
        let name = match p.bump().cloned() {
            Some(Tok::Ident(name)) => VarId::new(&name)?,
            Some(t) => return Err(syntax(l, c, format!("expected a variable name, found {}", t.describe()))),
            None => return Err(syntax(l, c, "expected a variable name")),
        };
        p.expect(&Tok::Equals)?;
        let (l, c) = (p.line, p.col());
        let value = match p.bump() {
            Some(Tok::Const(b)) => *b,
            Some(t) => return Err(syntax(l, c, format!("expected `0` or `1`, found {}", t.describe()))),
            None => return Err(syntax(l, c, "expected `0` or `1`")),
        };
        pairs.push((name, value));
        if p.at_end() {
            return Ok(pairs);
        }
        p.expect(&Tok::Comma)?;
    }
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<CausalModel, DslError> {
    let mut name: Option<String> = None;
    let mut exogenous: Vec<VarId> = Vec::new();
    let mut equations: Vec<(VarId, BooleanFormula)> = Vec::new();
    let mut declared_at: BTreeMap<VarId, usize> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokenize(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        if name.is_none() {
            match toks.first().map(|s| &s.tok) {
                Some(Tok::Ident(kw)) if kw == "model" => {}
                _ => return Err(syntax(line, toks[0].col, "expected `model <name>` first")),
            }
            match (toks.get(1), toks.len()) {
                (Some(Spanned { tok: Tok::Ident(n), .. }), 2) => name = Some(n.clone()),
                _ => {
                    return Err(syntax(
                        line,
                        toks.get(1).map_or(toks[0].col + 5, |s| s.col),
                        "expected exactly one model name",
                    ))
                }
            }
            continue;
        }

        match &toks[0].tok {
            Tok::Ident(kw) if kw == "model" => {
                return Err(semantic(line, "duplicate `model` declaration".to_string()));
            }
            Tok::Ident(kw) if kw == "exo" => {
                let names = parse_name_list(line, &toks[1..])?;
                for v in names {
                    if let Some(&first) = declared_at.get(&v) {
                        return Err(semantic(
                            line,
                            format!("{v} already declared on line {first}"),
                        ));
                    }
                    declared_at.insert(v.clone(), line);
                    exogenous.push(v);
                }
            }
            Tok::Ident(lhs_name) => {
                if toks.get(1).map(|s| &s.tok) != Some(&Tok::Equals) {
                    return Err(syntax(
                        line,
                        toks.get(1).map_or(toks[0].col, |s| s.col),
                        "expected `=` after the variable name",
                    ));
                }
                let lhs = VarId::new(lhs_name)?;
                if let Some(&first) = declared_at.get(&lhs) {
                    return Err(semantic(
                        line,
                        format!("{lhs} already declared on line {first}"),
                    ));
                }
                let mut p = ExprParser::new(line, &toks[2..]);
                if p.at_end() {
                    return Err(syntax(line, toks[1].col + 1, "missing right-hand side"));
                }
                let rhs = p.iff()?;
                if !p.at_end() {
                    return Err(syntax(
                        line,
                        p.col(),
                        format!("unexpected {} after expression", p.peek().unwrap().describe()),
                    ));
                }
                declared_at.insert(lhs.clone(), line);
                equations.push((lhs, rhs));
            }
            other => {
                return Err(syntax(
                    line,
                    toks[0].col,
                    format!("expected `exo` or an equation, found {}", other.describe()),
                ));
            }
        }
    }

    let Some(name) = name else {
        return Err(syntax(1, 1, "expected `model <name>` first"));
    };
    let model = CausalModel::new(name, exogenous, equations);
    let report = model.validate();
    if let Some(finding) = report.findings().first() {
        let line = finding_line(finding, &declared_at);
        return Err(semantic(line, finding.to_string()));
    }
    Ok(model)
}

/// Best-effort line attribution for a validation finding.
fn finding_line(finding: &ValidationFinding, declared_at: &BTreeMap<VarId, usize>) -> usize {
    let var = match finding {
        ValidationFinding::DuplicateExogenous(v)
        | ValidationFinding::DuplicateEquation(v)
        | ValidationFinding::ExogenousWithEquation(v) => v,
        ValidationFinding::UndeclaredVariable { equation, .. } => equation,
        ValidationFinding::Cycle(walk) => match walk.first() {
            Some(v) => v,
            None => return 0,
        },
    };
    declared_at.get(var).copied().unwrap_or(0)
}

fn parse_name_list(line: usize, toks: &[Spanned]) -> Result<Vec<VarId>, DslError> {
    let mut p = ExprParser::new(line, toks);
    let mut names = Vec::new();
    if p.at_end() {
        return Err(syntax(line, 1, "expected at least one name after `exo`"));
    }
    loop {
        let (l, c) = (p.line, p.col());
        match p.bump().cloned() {
            Some(Tok::Ident(n)) => names.push(VarId::new(&n)?),
            Some(t) => return Err(syntax(l, c, format!("expected a name, found {}", t.describe()))),
            None => return Err(syntax(l, c, "expected a name")),
        }
        if p.at_end() {
            return Ok(names);
        }
        p.expect(&Tok::Comma)?;
    }
}

/// Renders a model in the canonical layout [`parse_model`] accepts:
/// one `model` line, one `exo` line (if any), one equation per line in
/// declaration order. `parse_model(&serialize_model(&m))` reproduces
/// `m` exactly.
pub fn serialize_model(model: &CausalModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", model.name());
    if !model.exogenous().is_empty() {
        let names: Vec<&str> = model.exogenous().iter().map(VarId::name).collect();
        let _ = writeln!(out, "exo {}", names.join(", "));
    }
    for (v, eq) in model.equations() {
        let _ = writeln!(out, "{v} = {eq}");
    }
    out
}

/// The parts of a query file. `model` is a path for the caller to
/// resolve; the document does not load it.
#[derive(Debug, Clone)]
pub struct QueryDocument {
    pub model_path: Option<String>,
    pub context: Vec<(VarId, bool)>,
    pub cause: Vec<(VarId, bool)>,
    pub phi: BooleanFormula,
    pub strategy: Option<Strategy>,
}

/// Parses a query file.
pub fn parse_query_document(text: &str) -> Result<QueryDocument, DslError> {
    let mut model_path: Option<String> = None;
    let mut context: Option<Vec<(VarId, bool)>> = None;
    let mut cause: Option<Vec<(VarId, bool)>> = None;
    let mut phi: Option<BooleanFormula> = None;
    let mut strategy: Option<Strategy> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(syntax(line, 1, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        let duplicate = |set| {
            if set {
                Err(semantic(line, format!("duplicate key `{key}`")))
            } else {
                Ok(())
            }
        };
        match key {
            "model" => {
                duplicate(model_path.is_some())?;
                if value.is_empty() {
                    return Err(syntax(line, 1, "empty model path"));
                }
                model_path = Some(value.to_string());
            }
            "context" => {
                duplicate(context.is_some())?;
                context = Some(relocate(parse_assignment_pairs(value), line)?);
            }
            "cause" => {
                duplicate(cause.is_some())?;
                cause = Some(relocate(parse_assignment_pairs(value), line)?);
            }
            "phi" => {
                duplicate(phi.is_some())?;
                phi = Some(relocate(parse_expression(value), line)?);
            }
            "strategy" => {
                duplicate(strategy.is_some())?;
                strategy = Some(value.parse::<Strategy>()?);
            }
            other => {
                return Err(semantic(
                    line,
                    format!("unknown key `{other}`; expected model, context, cause, phi, or strategy"),
                ));
            }
        }
    }

    let require = |what: &str| semantic(text.lines().count().max(1), format!("missing `{what}` line"));
    Ok(QueryDocument {
        model_path,
        context: context.ok_or_else(|| require("context"))?,
        cause: cause.ok_or_else(|| require("cause"))?,
        phi: phi.ok_or_else(|| require("phi"))?,
        strategy,
    })
}

/// Value parsers report line 1 (they see one line); put the real one in.
fn relocate<T>(res: Result<T, DslError>, line: usize) -> Result<T, DslError> {
    res.map_err(|e| match e {
        DslError::Syntax { col, message, .. } => DslError::Syntax { line, col, message },
        DslError::Semantic { message, .. } => DslError::Semantic { line, message },
        other => other,
    })
}

/// Builds a checkable query from a document and the model it refers to.
/// The document's strategy applies when present, `SAT` otherwise.
pub fn resolve_query<'m>(
    doc: &QueryDocument,
    model: &'m CausalModel,
) -> Result<CausalQuery<'m>, DslError> {
    let context = context_from_unique_pairs(doc.context.iter().cloned())?;
    Ok(CausalQuery::new(
        model,
        context,
        doc.cause.clone(),
        doc.phi.clone(),
        doc.strategy.unwrap_or(Strategy::Sat),
    )?)
}

/// Parses a query file and binds it to `model` in one step.
pub fn parse_query<'m>(text: &str, model: &'m CausalModel) -> Result<CausalQuery<'m>, DslError> {
    resolve_query(&parse_query_document(text)?, model)
}

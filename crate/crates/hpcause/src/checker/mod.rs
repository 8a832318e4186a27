//! Actual-causality checking.
//!
//! A [`CausalQuery`] bundles a model, a context, a candidate cause
//! `X = x`, and an effect formula φ. [`check_cause`] tests the three
//! conditions of (modified) actual causality:
//!
//! * **AC1**: `X = x` and φ both hold under the context.
//! * **AC2**: there is a set `W` of endogenous variables, frozen at the
//!   values they take under the context, such that flipping `X` to the
//!   complementary values makes φ false.
//! * **AC3**: no nonempty strict subset of `X` already satisfies AC1
//!   and AC2.
//!
//! Each condition can be decided by explicit enumeration
//! ([`Strategy::BruteForce`]) or through SAT encodings of the model's
//! equations ([`Strategy::Sat`] and friends). All strategies agree on
//! the verdicts; they differ in cost and in which witness `W` they
//! report.

mod brute;
mod diagnose;
mod encode;
mod sat;

pub use brute::{check_ac1, check_ac2_brute, check_ac3_brute};
pub use diagnose::{diagnose_non_minimal, NmcCondition, NonMinimalOffender, NonMinimalityReport};
pub use encode::{build_f, build_g};
pub use sat::{check_ac2_sat, check_ac2_sat_minimal, check_ac3_sat, check_combined};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::formula::{Assignment, BooleanFormula, FormulaError, VarId};
use crate::model::{CausalModel, Context, Evaluation, ModelError};

/// How a query should be decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Enumerate candidate witness sets explicitly.
    BruteForce,
    /// One SAT call for AC2, model enumeration for AC3.
    Sat,
    /// Like [`Strategy::Sat`], but enumerates all AC2 models to report
    /// a minimum-cardinality witness.
    SatMinimal,
    /// A single model enumeration answering AC2 and AC3 together.
    SatCombined,
}

impl Strategy {
    /// All strategies, in canonical order.
    pub const ALL: [Strategy; 4] = [
        Strategy::BruteForce,
        Strategy::Sat,
        Strategy::SatMinimal,
        Strategy::SatCombined,
    ];

    /// The canonical spelling used in CLI arguments and benchmark CSV.
    pub fn canonical_name(self) -> &'static str {
        match self {
            Strategy::BruteForce => "BRUTE_FORCE",
            Strategy::Sat => "SAT",
            Strategy::SatMinimal => "SAT_MINIMAL",
            Strategy::SatCombined => "SAT_COMBINED",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// Error for an unrecognized strategy name.
#[derive(Debug, Clone, thiserror::Error)]
#[error("unknown strategy `{0}`; expected one of BRUTE_FORCE, SAT, SAT_MINIMAL, SAT_COMBINED")]
pub struct ParseStrategyError(String);

impl FromStr for Strategy {
    type Err = ParseStrategyError;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let canon = s.trim().to_ascii_uppercase().replace('-', "_");
        match canon.as_str() {
            "BRUTE_FORCE" | "BRUTEFORCE" => Ok(Strategy::BruteForce),
            "SAT" => Ok(Strategy::Sat),
            "SAT_MINIMAL" | "SATMINIMAL" => Ok(Strategy::SatMinimal),
            "SAT_COMBINED" | "SATCOMBINED" => Ok(Strategy::SatCombined),
            _ => Err(ParseStrategyError(s.to_string())),
        }
    }
}

/// Why a query could not be built.
#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("the candidate cause must name at least one variable")]
    EmptyCause,
    #[error("variable {0} appears more than once in the candidate cause")]
    DuplicateCauseVariable(VarId),
    #[error("cause variable {0} is not endogenous in model {1}")]
    CauseNotEndogenous(VarId, String),
    #[error("effect formula mentions {0}, which is not declared in model {1}")]
    UnknownEffectVariable(VarId, String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A fully validated causality question against one model.
#[derive(Debug, Clone)]
pub struct CausalQuery<'m> {
    model: &'m CausalModel,
    context: Context,
    cause: Vec<(VarId, bool)>,
    phi: BooleanFormula,
    strategy: Strategy,
}

impl<'m> CausalQuery<'m> {
    /// Builds a query, validating it eagerly: the model must be valid,
    /// the context complete, the cause nonempty, duplicate-free, and
    /// endogenous, and every variable of `phi` declared in the model.
    ///
    /// An effect formula that mentions exogenous variables is unusual
    /// but legal; it is accepted with a logged warning.
    pub fn new(
        model: &'m CausalModel,
        context: Context,
        cause: Vec<(VarId, bool)>,
        phi: BooleanFormula,
        strategy: Strategy,
    ) -> Result<Self, QueryError> {
        if !model.validate().is_valid() {
            return Err(QueryError::Model(model.invalid_error()));
        }
        model.check_context(&context)?;
        if cause.is_empty() {
            return Err(QueryError::EmptyCause);
        }
        for (i, (v, _)) in cause.iter().enumerate() {
            if cause[..i].iter().any(|(u, _)| u == v) {
                return Err(QueryError::DuplicateCauseVariable(v.clone()));
            }
            if !model.is_endogenous(v) {
                return Err(QueryError::CauseNotEndogenous(v.clone(), model.name().to_string()));
            }
        }
        for v in phi.vars() {
            if model.is_exogenous(&v) {
                log::warn!(
                    "effect formula for model {} mentions exogenous variable {v}; \
                     its value is fixed by the context",
                    model.name()
                );
            } else if !model.is_endogenous(&v) {
                return Err(QueryError::UnknownEffectVariable(v, model.name().to_string()));
            }
        }
        Ok(CausalQuery { model, context, cause, phi, strategy })
    }

    pub fn model(&self) -> &'m CausalModel {
        self.model
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    /// The candidate cause `X = x`, in the order given at construction.
    pub fn cause(&self) -> &[(VarId, bool)] {
        &self.cause
    }

    pub fn phi(&self) -> &BooleanFormula {
        &self.phi
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Same query, different strategy.
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// The cause with every value complemented.
    pub(crate) fn negated_cause(&self) -> Vec<(VarId, bool)> {
        self.cause.iter().map(|(v, x)| (v.clone(), !x)).collect()
    }

    pub(crate) fn cause_value(&self, v: &VarId) -> Option<bool> {
        self.cause.iter().find(|(u, _)| u == v).map(|&(_, x)| x)
    }
}

/// Tunables for a single check.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Cap on the number of candidate sets a brute-force search may
    /// try. `None` removes the cap. Also guards the diagnosis probes.
    pub brute_budget: Option<u64>,
    /// Wall-clock limit for the whole check.
    pub timeout: Option<Duration>,
    /// When AC3 fails, classify each cause variable (see
    /// [`diagnose_non_minimal`]).
    pub diagnose: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            brute_budget: Some(1 << 22),
            timeout: None,
            diagnose: false,
        }
    }
}

/// Why a check stopped without a verdict.
#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("brute-force budget of {0} candidate sets exhausted")]
    BudgetExceeded(u64),
    #[error("check timed out after {0:?}")]
    Timeout(Duration),
    #[error("AC3 holds for this query; there is no non-minimality to diagnose")]
    Ac3Holds,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Shared effort accounting: a trial budget and a wall-clock deadline.
///
/// `tick` charges one brute-force trial; `check_deadline` only probes
/// the clock. Both are cheap enough to call in inner loops.
pub(crate) struct Effort {
    remaining: Option<u64>,
    budget: u64,
    deadline: Option<Instant>,
    timeout: Duration,
}

impl Effort {
    pub(crate) fn new(opts: &CheckOptions) -> Self {
        Effort {
            remaining: opts.brute_budget,
            budget: opts.brute_budget.unwrap_or(0),
            deadline: opts.timeout.map(|t| Instant::now() + t),
            timeout: opts.timeout.unwrap_or_default(),
        }
    }

    pub(crate) fn tick(&mut self) -> Result<(), CheckError> {
        if let Some(remaining) = &mut self.remaining {
            if *remaining == 0 {
                return Err(CheckError::BudgetExceeded(self.budget));
            }
            *remaining -= 1;
        }
        self.check_deadline()
    }

    pub(crate) fn check_deadline(&self) -> Result<(), CheckError> {
        match self.deadline {
            Some(deadline) if Instant::now() >= deadline => {
                Err(CheckError::Timeout(self.timeout))
            }
            _ => Ok(()),
        }
    }
}

/// Wall-clock time spent deciding each condition.
///
/// [`Strategy::SatCombined`] answers AC2 and AC3 in one enumeration;
/// its whole pass is attributed to `ac2` and `ac3` is reported as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConditionTimings {
    pub ac1: Duration,
    pub ac2: Duration,
    pub ac3: Duration,
}

/// The verdict on one query.
#[derive(Debug, Clone)]
pub struct CausalityResult {
    /// Strategy that produced this result.
    pub strategy: Strategy,
    pub ac1: bool,
    pub ac2: bool,
    /// A witness set for AC2 with the (contextual) values its
    /// variables are frozen at, sorted by name. `None` when AC2 fails.
    pub w: Option<Vec<(VarId, bool)>>,
    /// Whether `w` is guaranteed to have minimum cardinality among all
    /// witness sets. Brute force searches smallest-first, so yes;
    /// plain SAT reports whatever witness its first model yields.
    pub w_minimal: bool,
    pub ac3: bool,
    /// `ac1 && ac2 && ac3`.
    pub is_cause: bool,
    /// Present when diagnosis was requested and AC3 failed.
    pub diagnosis: Option<NonMinimalityReport>,
    pub timings: ConditionTimings,
}

/// Evaluates the model once and shares the result across conditions.
pub(crate) struct Prepared<'q, 'm> {
    pub(crate) query: &'q CausalQuery<'m>,
    pub(crate) evaluation: Evaluation,
    /// φ's value under the actual evaluation.
    pub(crate) occurred: bool,
}

impl<'q, 'm> Prepared<'q, 'm> {
    pub(crate) fn new(query: &'q CausalQuery<'m>) -> Result<Self, CheckError> {
        let evaluation = query.model().evaluate(query.context())?;
        let occurred = query.phi().evaluate(evaluation.as_assignment())?;
        Ok(Prepared { query, evaluation, occurred })
    }

    pub(crate) fn actual_value(&self, v: &VarId) -> bool {
        self.evaluation
            .get(v)
            .expect("evaluation is total over the model's variables")
    }

    pub(crate) fn ac1(&self) -> bool {
        self.occurred
            && self
                .query
                .cause()
                .iter()
                .all(|(v, x)| self.evaluation.get(v) == Some(*x))
    }
}

/// Decides AC1, AC2, and AC3 for `query` using its strategy.
///
/// All strategies return the same three verdicts; the reported witness
/// `w` may differ (see [`CausalityResult::w_minimal`]). Fails with
/// [`CheckError::BudgetExceeded`] or [`CheckError::Timeout`] when the
/// limits in `opts` are hit before a verdict is reached.
pub fn check_cause(query: &CausalQuery, opts: &CheckOptions) -> Result<CausalityResult, CheckError> {
    let mut effort = Effort::new(opts);
    let start = Instant::now();
    let prep = Prepared::new(query)?;
    let ac1 = prep.ac1();
    let ac1_time = start.elapsed();

    let (w, ac2_time, ac3, ac3_time) = match query.strategy() {
        Strategy::BruteForce => {
            let start = Instant::now();
            let w = brute::ac2_search(&prep, &mut effort)?;
            let ac2_time = start.elapsed();
            let start = Instant::now();
            let ac3 = brute::ac3_search(&prep, &mut effort)?;
            (w, ac2_time, ac3, start.elapsed())
        }
        Strategy::Sat => {
            let start = Instant::now();
            let w = sat::ac2_first_model(&prep, &mut effort)?;
            let ac2_time = start.elapsed();
            let start = Instant::now();
            let ac3 = sat::ac3_enumerate(&prep, &mut effort)?;
            (w, ac2_time, ac3, start.elapsed())
        }
        Strategy::SatMinimal => {
            let start = Instant::now();
            let w = sat::ac2_minimal(&prep, &mut effort)?;
            let ac2_time = start.elapsed();
            let start = Instant::now();
            let ac3 = sat::ac3_enumerate(&prep, &mut effort)?;
            (w, ac2_time, ac3, start.elapsed())
        }
        Strategy::SatCombined => {
            let start = Instant::now();
            let (w, ac3) = sat::combined(&prep, &mut effort)?;
            (w, start.elapsed(), ac3, Duration::ZERO)
        }
    };

    let ac2 = w.is_some();
    let diagnosis = if opts.diagnose && !ac3 {
        Some(diagnose::diagnose(&prep, &mut effort)?)
    } else {
        None
    };

    Ok(CausalityResult {
        strategy: query.strategy(),
        ac1,
        ac2,
        w,
        w_minimal: matches!(query.strategy(), Strategy::BruteForce | Strategy::SatMinimal),
        ac3,
        is_cause: ac1 && ac2 && ac3,
        diagnosis,
        timings: ConditionTimings { ac1: ac1_time, ac2: ac2_time, ac3: ac3_time },
    })
}

/// Sorts a witness set by variable name.
pub(crate) fn sort_witness(mut w: Vec<(VarId, bool)>) -> Vec<(VarId, bool)> {
    w.sort_by(|(a, _), (b, _)| a.cmp(b));
    w
}

/// `(cardinality, names)` order on witness sets: fewer variables wins,
/// lexicographically earlier names break ties.
pub(crate) fn witness_precedes(a: &[(VarId, bool)], b: &[(VarId, bool)]) -> bool {
    let names = |w: &[(VarId, bool)]| w.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>();
    (a.len(), names(a)) < (b.len(), names(b))
}

/// Restricts an assignment produced by a solver to a plain map.
pub(crate) fn assignment_value(assignment: &Assignment, v: &VarId) -> bool {
    assignment
        .get(v)
        .expect("solver assignments cover every original variable")
}

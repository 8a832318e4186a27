//! SAT-backed decision procedures over the `F` and `G` encodings.
//!
//! AC2 needs one satisfiability call: any model of `F` is a
//! counterfactual world defeating φ, and the variables that kept their
//! actual value in it form a witness set. Before encoding anything we
//! try the cheapest candidate, the empty witness, by evaluating the
//! flipped model directly.
//!
//! AC3 enumerates the models of `G` and counts, per model, how many
//! cause variables were actually flipped by intervention rather than
//! by their own equations. A model needing fewer flips than the full
//! cause exhibits a smaller cause, refuting minimality.

use crate::cnf::to_cnf;
use crate::formula::{Assignment, VarId};
use crate::solver;

use super::encode::{deviates, f_formula, g_formula};
use super::{
    assignment_value, sort_witness, witness_precedes, CausalQuery, CheckError, CheckOptions,
    Effort, Prepared,
};

/// Does flipping the whole cause, with no witness at all, defeat φ?
fn flip_alone_defeats_phi(prep: &Prepared) -> Result<bool, CheckError> {
    let intervened = prep.query.model().intervene(prep.query.negated_cause())?;
    let outcome = intervened.evaluate(prep.query.context())?;
    Ok(!prep.query.phi().evaluate(outcome.as_assignment())?)
}

/// The witness a model of `F` encodes: every endogenous variable
/// outside the cause that kept its actual value, frozen at it.
fn witness_of_model(prep: &Prepared, model: &Assignment) -> Vec<(VarId, bool)> {
    let witness = prep
        .query
        .model()
        .endogenous()
        .filter(|v| prep.query.cause_value(v).is_none())
        .filter(|v| assignment_value(model, v) == prep.actual_value(v))
        .map(|v| (v.clone(), prep.actual_value(v)))
        .collect();
    sort_witness(witness)
}

/// Like [`witness_of_model`], but keeps only variables whose value the
/// equations cannot explain. Freezing those suffices: every other kept
/// variable re-derives its value on its own.
fn minimal_witness_of_model(
    prep: &Prepared,
    model: &Assignment,
) -> Result<Vec<(VarId, bool)>, CheckError> {
    let mut witness = Vec::new();
    for (v, equation) in prep.query.model().equations() {
        if prep.query.cause_value(v).is_some() {
            continue;
        }
        if assignment_value(model, v) == prep.actual_value(v) && deviates(v, equation, model)? {
            witness.push((v.clone(), prep.actual_value(v)));
        }
    }
    Ok(sort_witness(witness))
}

/// How many cause variables this `G` model flips by intervention: their
/// value differs from the actual one and their equation does not
/// produce it. That many variables, flipped, defeat φ on their own.
fn intervened_flip_count(prep: &Prepared, model: &Assignment) -> Result<usize, CheckError> {
    let mut count = 0;
    for (x, _) in prep.query.cause() {
        let value = assignment_value(model, x);
        if value == prep.actual_value(x) {
            continue;
        }
        let equation = prep
            .query
            .model()
            .equation(x)
            .expect("cause variables are endogenous");
        if value != equation.evaluate(model)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Decides AC2 with a single SAT call on `F`. The reported witness is
/// valid but not necessarily smallest.
pub fn check_ac2_sat(
    query: &CausalQuery,
    opts: &CheckOptions,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    ac2_first_model(&Prepared::new(query)?, &mut Effort::new(opts))
}

pub(crate) fn ac2_first_model(
    prep: &Prepared,
    effort: &mut Effort,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    if flip_alone_defeats_phi(prep)? {
        return Ok(Some(Vec::new()));
    }
    effort.check_deadline()?;
    let cnf = to_cnf(&f_formula(prep));
    Ok(solver::solve(&cnf).map(|model| witness_of_model(prep, &model)))
}

/// Decides AC2 and reports a minimum-cardinality witness, enumerating
/// every model of `F`. Ties go to the lexicographically least set.
pub fn check_ac2_sat_minimal(
    query: &CausalQuery,
    opts: &CheckOptions,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    ac2_minimal(&Prepared::new(query)?, &mut Effort::new(opts))
}

pub(crate) fn ac2_minimal(
    prep: &Prepared,
    effort: &mut Effort,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    if flip_alone_defeats_phi(prep)? {
        return Ok(Some(Vec::new()));
    }
    minimal_over_f_models(prep, effort)
}

/// The enumeration behind [`check_ac2_sat_minimal`], without the
/// empty-witness shortcut. Exposed for tests: it must agree with the
/// shortcut whenever both apply.
pub(crate) fn minimal_over_f_models(
    prep: &Prepared,
    effort: &mut Effort,
) -> Result<Option<Vec<(VarId, bool)>>, CheckError> {
    let cnf = to_cnf(&f_formula(prep));
    let mut best: Option<Vec<(VarId, bool)>> = None;
    for model in solver::all_sat(&cnf) {
        effort.check_deadline()?;
        let witness = minimal_witness_of_model(prep, &model)?;
        if best.as_deref().is_none_or(|b| witness_precedes(&witness, b)) {
            let found_empty = witness.is_empty();
            best = Some(witness);
            if found_empty {
                break;
            }
        }
    }
    Ok(best)
}

/// Decides AC3 by enumerating the models of `G` lazily; the first
/// model that flips fewer variables than the full cause refutes it.
pub fn check_ac3_sat(query: &CausalQuery, opts: &CheckOptions) -> Result<bool, CheckError> {
    ac3_enumerate(&Prepared::new(query)?, &mut Effort::new(opts))
}

pub(crate) fn ac3_enumerate(prep: &Prepared, effort: &mut Effort) -> Result<bool, CheckError> {
    let cause = prep.query.cause();
    // A singleton has no nonempty strict subset; and when φ never
    // occurred, no subset can satisfy AC1.
    if cause.len() == 1 || !prep.occurred {
        return Ok(true);
    }
    let cnf = to_cnf(&g_formula(prep));
    for model in solver::all_sat(&cnf) {
        effort.check_deadline()?;
        if intervened_flip_count(prep, &model)? < cause.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Answers AC2 and AC3 in one enumeration of `G`'s models.
///
/// Every model of `F` is a model of `G` whose cause variables all
/// carry flipped values, so AC2 is read off the first such model; AC3
/// uses the flip counts as in [`check_ac3_sat`]. The loop stops as
/// soon as both questions are settled. Queries the enumeration cannot
/// help with (singleton causes, φ never occurred) fall back to the
/// single-call AC2 check.
pub fn check_combined(
    query: &CausalQuery,
    opts: &CheckOptions,
) -> Result<(Option<Vec<(VarId, bool)>>, bool), CheckError> {
    combined(&Prepared::new(query)?, &mut Effort::new(opts))
}

pub(crate) fn combined(
    prep: &Prepared,
    effort: &mut Effort,
) -> Result<(Option<Vec<(VarId, bool)>>, bool), CheckError> {
    let cause = prep.query.cause();
    if cause.len() == 1 || !prep.occurred {
        return Ok((ac2_first_model(prep, effort)?, true));
    }
    let cnf = to_cnf(&g_formula(prep));
    let mut witness: Option<Vec<(VarId, bool)>> = None;
    let mut ac3 = true;
    for model in solver::all_sat(&cnf) {
        effort.check_deadline()?;
        if witness.is_none()
            && cause
                .iter()
                .all(|(x, claimed)| assignment_value(&model, x) == !claimed)
        {
            witness = Some(witness_of_model(prep, &model));
        }
        if ac3 && intervened_flip_count(prep, &model)? < cause.len() {
            ac3 = false;
        }
        if witness.is_some() && !ac3 {
            break;
        }
    }
    Ok((witness, ac3))
}

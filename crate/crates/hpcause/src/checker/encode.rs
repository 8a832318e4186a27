//! Propositional encodings of AC2 and AC3.
//!
//! Both encodings describe the intervened model's behaviour in one
//! formula whose models are exactly the outcomes of interest:
//!
//! * `F` (for AC2) conjoins ¬φ, the context, the flipped cause
//!   literals, and for every other endogenous variable the disjunction
//!   *follow your equation or keep your actual value*. A model of `F`
//!   is a counterfactual world in which the effect fails; the
//!   variables that kept their actual value form the witness set.
//! * `G` (for AC3) is `F` with the cause literals relaxed to
//!   tautologies, so cause variables may also keep their actual value
//!   or follow their equation. Its models cover every way any subset
//!   of the cause could be flipped, which is what minimality asks
//!   about.

use crate::formula::{literal_of, BooleanFormula, VarId};

use super::{CausalQuery, CheckError, Prepared};

/// How a cause variable is constrained in the encoding.
enum CauseShape {
    /// Pinned to the complement of its claimed value (`F`).
    Flipped,
    /// Unconstrained via `X ∨ ¬X` (`G`).
    Free,
}

fn build(prep: &Prepared, shape: CauseShape) -> BooleanFormula {
    let model = prep.query.model();
    let mut conjuncts = Vec::with_capacity(1 + model.num_exogenous() + model.num_endogenous());
    conjuncts.push(BooleanFormula::not(prep.query.phi().clone()));
    for u in model.exogenous() {
        let value = prep
            .query
            .context()
            .get(u)
            .expect("query contexts are validated to be total");
        conjuncts.push(literal_of(u.clone(), value));
    }
    for (v, equation) in model.equations() {
        let conjunct = match prep.query.cause_value(v) {
            Some(claimed) => match shape {
                CauseShape::Flipped => literal_of(v.clone(), !claimed),
                CauseShape::Free => BooleanFormula::or([
                    BooleanFormula::var(v.clone()),
                    BooleanFormula::not(BooleanFormula::var(v.clone())),
                ]),
            },
            None => BooleanFormula::or([
                BooleanFormula::iff(BooleanFormula::var(v.clone()), equation.clone()),
                literal_of(v.clone(), prep.actual_value(v)),
            ]),
        };
        conjuncts.push(conjunct);
    }
    BooleanFormula::and(conjuncts)
}

/// The AC2 encoding for `query`. Satisfiable iff some witness set
/// makes the flipped cause defeat φ (including the empty set).
pub fn build_f(query: &CausalQuery) -> Result<BooleanFormula, CheckError> {
    Ok(build(&Prepared::new(query)?, CauseShape::Flipped))
}

/// The AC3 encoding for `query`: like [`build_f`] but cause variables
/// are left free.
pub fn build_g(query: &CausalQuery) -> Result<BooleanFormula, CheckError> {
    Ok(build(&Prepared::new(query)?, CauseShape::Free))
}

pub(crate) fn f_formula(prep: &Prepared) -> BooleanFormula {
    build(prep, CauseShape::Flipped)
}

pub(crate) fn g_formula(prep: &Prepared) -> BooleanFormula {
    build(prep, CauseShape::Free)
}

/// `true` iff `v` deviates from its equation under `assignment`, i.e.
/// its value can only be explained by an intervention.
pub(crate) fn deviates(
    v: &VarId,
    equation: &BooleanFormula,
    assignment: &crate::formula::Assignment,
) -> Result<bool, CheckError> {
    let value = super::assignment_value(assignment, v);
    Ok(value != equation.evaluate(assignment)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::tests::bottle_shatters;
    use crate::checker::Strategy;
    use crate::model::tests::{both_throw, rock_throwing, v};
    use crate::model::CausalModel;

    fn suzy_query(model: &CausalModel) -> CausalQuery<'_> {
        CausalQuery::new(
            model,
            both_throw(),
            vec![(v("ST"), true)],
            bottle_shatters(),
            Strategy::Sat,
        )
        .unwrap()
    }

    fn pair_query(model: &CausalModel) -> CausalQuery<'_> {
        CausalQuery::new(
            model,
            both_throw(),
            vec![(v("ST"), true), (v("BT"), true)],
            bottle_shatters(),
            Strategy::Sat,
        )
        .unwrap()
    }

    fn conjunct_strings(f: &BooleanFormula) -> Vec<String> {
        match f {
            BooleanFormula::And(cs) => cs.iter().map(|c| c.to_string()).collect(),
            other => vec![other.to_string()],
        }
    }

    #[test]
    fn f_conjuncts_for_suzy_match_the_construction() {
        let m = rock_throwing();
        let f = build_f(&suzy_query(&m)).unwrap();
        assert_eq!(
            conjunct_strings(&f),
            [
                "!BS",
                "ST_exo",
                "BT_exo",
                "!ST",
                "(BT <-> BT_exo) | BT",
                "(SH <-> ST) | SH",
                "(BH <-> BT & !SH) | !BH",
                "(BS <-> SH | BH) | BS",
            ]
        );
    }

    #[test]
    fn g_relaxes_exactly_the_cause_conjuncts() {
        let m = rock_throwing();
        let g = build_g(&pair_query(&m)).unwrap();
        let conjuncts = conjunct_strings(&g);
        assert_eq!(conjuncts[3], "ST | !ST");
        assert_eq!(conjuncts[4], "BT | !BT");
        let suzy_f = conjunct_strings(&build_f(&suzy_query(&m)).unwrap());
        for i in [0, 1, 2, 5, 6, 7] {
            assert_eq!(conjuncts[i], suzy_f[i], "conjunct {i}");
        }
    }

    /// F's only model for Suzy's throw: everything off except BT.
    #[test]
    fn f_for_suzy_has_exactly_one_model() {
        let m = rock_throwing();
        let f = build_f(&suzy_query(&m)).unwrap();
        let cnf = crate::cnf::to_cnf(&f);
        let models: Vec<_> = crate::solver::all_sat(&cnf).collect();
        assert_eq!(models.len(), 1);
        assert_eq!(
            models[0].to_string(),
            "{BH=0, BS=0, BT=1, BT_exo=1, SH=0, ST=0, ST_exo=1}"
        );
    }

    /// G for the pair {ST=1, BT=1} admits exactly the two no-hit worlds.
    #[test]
    fn g_for_the_pair_has_exactly_two_models() {
        let m = rock_throwing();
        let g = build_g(&pair_query(&m)).unwrap();
        let cnf = crate::cnf::to_cnf(&g);
        let mut models: Vec<String> =
            crate::solver::all_sat(&cnf).map(|m| m.to_string()).collect();
        models.sort();
        assert_eq!(
            models,
            [
                "{BH=0, BS=0, BT=0, BT_exo=1, SH=0, ST=0, ST_exo=1}",
                "{BH=0, BS=0, BT=1, BT_exo=1, SH=0, ST=0, ST_exo=1}",
            ]
        );
    }

    #[test]
    fn deviation_is_judged_against_the_equation() {
        let m = rock_throwing();
        let eval = m.evaluate(&both_throw()).unwrap();
        let asg = eval.as_assignment();
        // BH = BT & !SH evaluates to 0 and BH is 0: no deviation.
        assert!(!deviates(&v("BH"), m.equation(&v("BH")).unwrap(), asg).unwrap());
        let mut forced = asg.clone();
        forced.set(v("BH"), true);
        assert!(deviates(&v("BH"), m.equation(&v("BH")).unwrap(), &forced).unwrap());
    }
}

//! Randomized invariants. Formulas and models are generated from index
//! shapes so that equations only ever reference earlier variables; every
//! generated model is valid by construction and shrinks cleanly.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::strategy::Strategy as _;

use hpcause::checker::{build_f, build_g};
use hpcause::cnf::to_cnf;
use hpcause::dsl::{parse_expression, parse_model, serialize_model};
use hpcause::solver::all_sat;
use hpcause::{
    check_cause, Assignment, BooleanFormula, CausalModel, CausalQuery, CheckOptions, Context,
    Strategy, VarId,
};

fn v(name: &str) -> VarId {
    VarId::new(name).unwrap()
}

fn unlimited() -> CheckOptions {
    CheckOptions {
        brute_budget: None,
        timeout: None,
        diagnose: false,
    }
}

/// A formula tree whose leaves are raw indices, resolved against a
/// variable pool only when materialized.
#[derive(Debug, Clone)]
enum Shape {
    Leaf(u32, bool),
    And(Vec<Shape>),
    Or(Vec<Shape>),
    Not(Box<Shape>),
    Iff(Box<Shape>, Box<Shape>),
}

fn shapes() -> impl proptest::strategy::Strategy<Value = Shape> {
    let leaf = (any::<u32>(), any::<bool>()).prop_map(|(i, neg)| Shape::Leaf(i, neg));
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Shape::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Shape::Or),
            inner.clone().prop_map(|s| Shape::Not(Box::new(s))),
            (inner.clone(), inner).prop_map(|(a, b)| Shape::Iff(Box::new(a), Box::new(b))),
        ]
    })
}

fn materialize(shape: &Shape, pool: &[VarId]) -> BooleanFormula {
    match shape {
        Shape::Leaf(i, negated) => {
            let atom = BooleanFormula::var(pool[*i as usize % pool.len()].clone());
            if *negated {
                BooleanFormula::not(atom)
            } else {
                atom
            }
        }
        Shape::And(children) => {
            BooleanFormula::and(children.iter().map(|c| materialize(c, pool)))
        }
        Shape::Or(children) => BooleanFormula::or(children.iter().map(|c| materialize(c, pool))),
        Shape::Not(inner) => BooleanFormula::not(materialize(inner, pool)),
        Shape::Iff(lhs, rhs) => {
            BooleanFormula::iff(materialize(lhs, pool), materialize(rhs, pool))
        }
    }
}

/// All satisfying assignments of `f` over exactly its own variables,
/// found by trying every combination.
fn truth_table_models(f: &BooleanFormula) -> BTreeSet<String> {
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let mut rows = BTreeSet::new();
    for bits in 0u32..1 << vars.len() {
        let assignment = Assignment::from_pairs(
            vars.iter().enumerate().map(|(k, var)| (var.clone(), bits & (1 << k) != 0)),
        );
        if f.evaluate(&assignment).unwrap() {
            rows.insert(assignment.to_string());
        }
    }
    rows
}

/// A full random query: model, context, an occurred cause, an effect.
#[derive(Debug)]
struct Scenario {
    model: CausalModel,
    context: Context,
    cause: Vec<(VarId, bool)>,
    phi: BooleanFormula,
}

fn scenarios(max_endo: usize, max_cause: usize) -> impl proptest::strategy::Strategy<Value = Scenario> {
    (1usize..=3, 2usize..=max_endo).prop_flat_map(move |(n_exo, n_endo)| {
        let parts = (
            prop::collection::vec(shapes(), n_endo),
            prop::collection::vec(any::<bool>(), n_exo),
            prop::collection::vec(any::<u32>(), 1..=max_cause),
            shapes(),
        );
        parts.prop_map(move |(equations, bits, picks, phi)| {
            let exo: Vec<VarId> = (0..n_exo).map(|i| v(&format!("U{i}"))).collect();
            let mut pool = exo.clone();
            let mut eqs = Vec::new();
            for (i, shape) in equations.iter().enumerate() {
                let var = v(&format!("V{i}"));
                eqs.push((var.clone(), materialize(shape, &pool)));
                pool.push(var);
            }
            let model = CausalModel::new("P", exo.clone(), eqs);

            let context =
                Context::from_pairs(exo.iter().cloned().zip(bits.iter().copied()));
            let evaluation = model.evaluate(&context).unwrap();

            let chosen: BTreeSet<usize> =
                picks.iter().map(|p| *p as usize % n_endo).collect();
            let cause: Vec<(VarId, bool)> = chosen
                .into_iter()
                .map(|i| {
                    let var = v(&format!("V{i}"));
                    let value = evaluation.get(&var).unwrap();
                    (var, value)
                })
                .collect();

            let endo: Vec<VarId> = model.endogenous().cloned().collect();
            let phi = materialize(&phi, &endo);
            Scenario { model, context, cause, phi }
        })
    })
}

fn query_of(s: &Scenario, strategy: Strategy) -> CausalQuery<'_> {
    CausalQuery::new(&s.model, s.context.clone(), s.cause.clone(), s.phi.clone(), strategy)
        .unwrap()
}

proptest! {
    /// Printing and reparsing reproduces the identical tree.
    #[test]
    fn expression_display_reparses(shape in shapes()) {
        let pool: Vec<VarId> = ["a", "b", "c", "d"].iter().map(|n| v(n)).collect();
        let formula = materialize(&shape, &pool);
        let reparsed = parse_expression(&formula.to_string()).unwrap();
        prop_assert_eq!(reparsed, formula);
    }

    /// Tseitin conversion plus projected enumeration yields exactly the
    /// truth-table models, each once.
    #[test]
    fn enumeration_matches_truth_table(shape in shapes()) {
        let pool: Vec<VarId> = (0..8).map(|i| v(&format!("x{i}"))).collect();
        let formula = materialize(&shape, &pool);
        let found: Vec<String> =
            all_sat(&to_cnf(&formula)).map(|a| a.to_string()).collect();
        let distinct: BTreeSet<String> = found.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), found.len(), "duplicate model");
        prop_assert_eq!(distinct, truth_table_models(&formula));
    }

    /// The evaluation is a solution of the equations: every endogenous
    /// variable agrees with its equation, every exogenous one with the
    /// context.
    #[test]
    fn evaluation_solves_the_equations(s in scenarios(8, 2)) {
        let values = s.model.evaluate(&s.context).unwrap();
        for (var, equation) in s.model.equations() {
            prop_assert_eq!(
                values.get(var),
                Some(equation.evaluate(values.as_assignment()).unwrap())
            );
        }
        for var in s.model.exogenous() {
            prop_assert_eq!(values.get(var), s.context.get(var));
        }
    }

    /// Models and the text format agree: serializing and reparsing is
    /// structural identity.
    #[test]
    fn model_serialization_reparses(s in scenarios(8, 1)) {
        let reparsed = parse_model(&serialize_model(&s.model)).unwrap();
        prop_assert_eq!(reparsed, s.model);
    }

    /// Any witness returned with an AC2 verdict defeats the effect when
    /// frozen, stays off the cause, and freezes only actual values.
    #[test]
    fn witnesses_defeat_the_effect(s in scenarios(7, 2)) {
        let evaluation = s.model.evaluate(&s.context).unwrap();
        for strategy in Strategy::ALL {
            let result = check_cause(&query_of(&s, strategy), &unlimited()).unwrap();
            let Some(w) = &result.w else { continue };

            for (var, frozen) in w {
                prop_assert!(s.cause.iter().all(|(x, _)| x != var));
                prop_assert_eq!(Some(*frozen), evaluation.get(var));
            }
            let flips = s.cause.iter().map(|(x, c)| (x.clone(), !c));
            let intervened =
                s.model.intervene(flips.chain(w.iter().cloned())).unwrap();
            prop_assert!(!intervened.satisfies(&s.context, &s.phi).unwrap());
        }
    }

    /// All four strategies return the same three verdicts.
    #[test]
    fn strategies_agree(s in scenarios(6, 3)) {
        let oracle = check_cause(&query_of(&s, Strategy::BruteForce), &unlimited()).unwrap();
        for strategy in [Strategy::Sat, Strategy::SatMinimal, Strategy::SatCombined] {
            let r = check_cause(&query_of(&s, strategy), &unlimited()).unwrap();
            prop_assert_eq!(
                (r.ac1, r.ac2, r.ac3),
                (oracle.ac1, oracle.ac2, oracle.ac3),
                "strategy {} disagrees on {}",
                strategy,
                serialize_model(&s.model)
            );
        }
    }

    /// Every model of the AC2 encoding satisfies the AC3 encoding.
    #[test]
    fn f_models_satisfy_g(s in scenarios(6, 3)) {
        let f = build_f(&query_of(&s, Strategy::Sat)).unwrap();
        let g = build_g(&query_of(&s, Strategy::Sat)).unwrap();
        for assignment in all_sat(&to_cnf(&f)) {
            prop_assert!(g.evaluate(&assignment).unwrap());
        }
    }
}

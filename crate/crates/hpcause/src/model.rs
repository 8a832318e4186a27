//! Causal models: binary variables split into exogenous inputs and
//! endogenous variables defined by structural equations.
//!
//! A model is just data; [`CausalModel::validate`] reports structural
//! problems (cycles, undeclared variables, duplicate declarations) as
//! findings instead of failing construction, so tooling can show all of them
//! at once. Evaluation requires a structurally valid model and a context
//! that fixes every exogenous variable; it then has exactly one solution
//! because equations are acyclic.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::formula::{Assignment, BooleanFormula, FormulaError, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model {name} is invalid: {report}")]
    Invalid { name: String, report: ValidationReport },
    #[error("context does not assign exogenous variable(s) {}", DisplayVars(.0))]
    IncompleteContext(Vec<VarId>),
    #[error("context assigns {0}, which is not an exogenous variable of the model")]
    ForeignContextVariable(VarId),
    #[error("cannot intervene on {0}: not a variable of the model")]
    UnknownInterventionTarget(VarId),
    #[error("cannot intervene on exogenous variable {0}; use the context instead")]
    ExogenousInterventionTarget(VarId),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

struct DisplayVars<'a>(&'a [VarId]);

impl fmt::Display for DisplayVars<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// One structural defect found by validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationFinding {
    DuplicateExogenous(VarId),
    DuplicateEquation(VarId),
    /// Declared exogenous and also given an equation.
    ExogenousWithEquation(VarId),
    /// `variable` occurs in the equation of `equation` but is declared nowhere.
    UndeclaredVariable { equation: VarId, variable: VarId },
    /// One representative dependency cycle, as a closed walk of variables.
    Cycle(Vec<VarId>),
}

impl fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFinding::DuplicateExogenous(v) => {
                write!(f, "exogenous variable {} declared more than once", v)
            }
            ValidationFinding::DuplicateEquation(v) => {
                write!(f, "variable {} has more than one equation", v)
            }
            ValidationFinding::ExogenousWithEquation(v) => {
                write!(f, "exogenous variable {} must not have an equation", v)
            }
            ValidationFinding::UndeclaredVariable { equation, variable } => {
                write!(f, "equation of {} uses undeclared variable {}", equation, variable)
            }
            ValidationFinding::Cycle(walk) => {
                write!(f, "dependency cycle: ")?;
                for (i, v) in walk.iter().enumerate() {
                    if i > 0 {
                        write!(f, " -> ")?;
                    }
                    write!(f, "{}", v)?;
                }
                Ok(())
            }
        }
    }
}

/// All findings for one model. Empty means structurally valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    findings: Vec<ValidationFinding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn findings(&self) -> &[ValidationFinding] {
        &self.findings
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "no findings");
        }
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", finding)?;
        }
        Ok(())
    }
}

/// Values for the exogenous variables. Must be total over them (and mention
/// nothing else) to evaluate a model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context(Assignment);

impl Context {
    pub fn new(assignment: Assignment) -> Self {
        Context(assignment)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Self {
        Context(Assignment::from_pairs(pairs))
    }

    pub fn get(&self, var: &VarId) -> Option<bool> {
        self.0.get(var)
    }

    pub fn as_assignment(&self) -> &Assignment {
        &self.0
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The unique solution of a model under a context: a total assignment over
/// exogenous and endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation(Assignment);

impl Evaluation {
    pub fn get(&self, var: &VarId) -> Option<bool> {
        self.0.get(var)
    }

    pub fn as_assignment(&self) -> &Assignment {
        &self.0
    }

    pub fn into_assignment(self) -> Assignment {
        self.0
    }
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An acyclic structural causal model over binary variables.
///
/// Endogenous variables are exactly the ones carrying an equation;
/// declaration order is preserved and breaks ties wherever an order is
/// needed (topological evaluation, serialization).
#[derive(Debug, Clone)]
pub struct CausalModel {
    name: String,
    exogenous: Vec<VarId>,
    equations: Vec<(VarId, BooleanFormula)>,
    // evaluation order over equation indices; None when the model is invalid
    topo: OnceLock<Option<Vec<usize>>>,
}

/// Structural equality: name, exogenous declarations, and equations in
/// declaration order. The cached evaluation order is ignored.
impl PartialEq for CausalModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.exogenous == other.exogenous
            && self.equations == other.equations
    }
}

impl Eq for CausalModel {}

impl CausalModel {
    pub fn new(
        name: impl Into<String>,
        exogenous: Vec<VarId>,
        equations: Vec<(VarId, BooleanFormula)>,
    ) -> Self {
        CausalModel {
            name: name.into(),
            exogenous,
            equations,
            topo: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exogenous(&self) -> &[VarId] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> impl Iterator<Item = &VarId> {
        self.equations.iter().map(|(v, _)| v)
    }

    pub fn equations(&self) -> &[(VarId, BooleanFormula)] {
        &self.equations
    }

    pub fn equation(&self, var: &VarId) -> Option<&BooleanFormula> {
        self.equations
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, eq)| eq)
    }

    pub fn is_exogenous(&self, var: &VarId) -> bool {
        self.exogenous.contains(var)
    }

    pub fn is_endogenous(&self, var: &VarId) -> bool {
        self.equations.iter().any(|(v, _)| v == var)
    }

    pub fn num_exogenous(&self) -> usize {
        self.exogenous.len()
    }

    pub fn num_endogenous(&self) -> usize {
        self.equations.len()
    }

    /// Structural validation: duplicate declarations, equations on exogenous
    /// variables, undeclared variables, dependency cycles. Returns all
    /// findings rather than failing on the first.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();

        let mut exo_seen = BTreeSet::new();
        for v in &self.exogenous {
            if !exo_seen.insert(v.clone()) {
                findings.push(ValidationFinding::DuplicateExogenous(v.clone()));
            }
        }

        let mut endo_seen = BTreeSet::new();
        for (v, _) in &self.equations {
            if !endo_seen.insert(v.clone()) {
                findings.push(ValidationFinding::DuplicateEquation(v.clone()));
            }
            if exo_seen.contains(v) {
                findings.push(ValidationFinding::ExogenousWithEquation(v.clone()));
            }
        }

        for (v, eq) in &self.equations {
            for used in eq.vars() {
                if !exo_seen.contains(&used) && !endo_seen.contains(&used) {
                    findings.push(ValidationFinding::UndeclaredVariable {
                        equation: v.clone(),
                        variable: used,
                    });
                }
            }
        }

        if let Some(walk) = self.find_cycle() {
            findings.push(ValidationFinding::Cycle(walk));
        }

        ValidationReport { findings }
    }

    /// DFS over endogenous dependencies; returns one closed walk if any.
    /// Works on variables, not equations, so a variable with duplicate
    /// equations contributes the union of its dependencies.
    fn find_cycle(&self) -> Option<Vec<VarId>> {
        let mut deps: BTreeMap<&VarId, BTreeSet<VarId>> = BTreeMap::new();
        for (v, eq) in &self.equations {
            deps.entry(v).or_default().extend(eq.vars());
        }

        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&VarId, u8> = deps.keys().map(|v| (*v, 0u8)).collect();
        let mut stack: Vec<VarId> = Vec::new();

        fn visit<'a>(
            var: &'a VarId,
            deps: &'a BTreeMap<&VarId, BTreeSet<VarId>>,
            state: &mut BTreeMap<&'a VarId, u8>,
            stack: &mut Vec<VarId>,
        ) -> Option<Vec<VarId>> {
            state.insert(var, 1);
            stack.push(var.clone());
            for used in &deps[var] {
                let Some((key, &s)) = state.get_key_value(used) else {
                    continue; // exogenous or undeclared
                };
                let key = *key;
                match s {
                    0 => {
                        if let Some(walk) = visit(key, deps, state, stack) {
                            return Some(walk);
                        }
                    }
                    1 => {
                        let start = stack.iter().position(|v| v == used).unwrap();
                        let mut walk: Vec<VarId> = stack[start..].to_vec();
                        walk.push(used.clone());
                        return Some(walk);
                    }
                    _ => {}
                }
            }
            stack.pop();
            state.insert(var, 2);
            None
        }

        let vars: Vec<&VarId> = deps.keys().copied().collect();
        for var in vars {
            if state[&var] == 0 {
                if let Some(walk) = visit(var, &deps, &mut state, &mut stack) {
                    return Some(walk);
                }
            }
        }
        None
    }

    /// Evaluation order over equation indices (Kahn's algorithm, ties broken
    /// by declaration order). Cached; `None` when the model is invalid.
    fn topo_order(&self) -> Option<&[usize]> {
        self.topo
            .get_or_init(|| {
                if !self.validate().is_valid() {
                    return None;
                }
                let index: BTreeMap<&VarId, usize> = self
                    .equations
                    .iter()
                    .enumerate()
                    .map(|(i, (v, _))| (v, i))
                    .collect();
                let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); self.equations.len()];
                let mut pending: Vec<usize> = vec![0; self.equations.len()];
                for (i, (_, eq)) in self.equations.iter().enumerate() {
                    for used in eq.vars() {
                        if let Some(&j) = index.get(&used) {
                            dependents[j].push(i);
                            pending[i] += 1;
                        }
                    }
                }
                let mut ready: BinaryHeap<std::cmp::Reverse<usize>> = (0..self.equations.len())
                    .filter(|&i| pending[i] == 0)
                    .map(std::cmp::Reverse)
                    .collect();
                let mut order = Vec::with_capacity(self.equations.len());
                while let Some(std::cmp::Reverse(i)) = ready.pop() {
                    order.push(i);
                    for &j in &dependents[i] {
                        pending[j] -= 1;
                        if pending[j] == 0 {
                            ready.push(std::cmp::Reverse(j));
                        }
                    }
                }
                debug_assert_eq!(order.len(), self.equations.len());
                Some(order)
            })
            .as_deref()
    }

    pub(crate) fn invalid_error(&self) -> ModelError {
        ModelError::Invalid {
            name: self.name.clone(),
            report: self.validate(),
        }
    }

    pub(crate) fn check_context(&self, context: &Context) -> Result<(), ModelError> {
        for var in context.0.vars() {
            if !self.is_exogenous(var) {
                return Err(ModelError::ForeignContextVariable(var.clone()));
            }
        }
        let missing: Vec<VarId> = self
            .exogenous
            .iter()
            .filter(|v| context.get(v).is_none())
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(ModelError::IncompleteContext(missing));
        }
        Ok(())
    }

    /// Solves the model under `context`: every equation is evaluated once in
    /// dependency order. Deterministic by construction.
    pub fn evaluate(&self, context: &Context) -> Result<Evaluation, ModelError> {
        let order = self.topo_order().ok_or_else(|| self.invalid_error())?;
        self.check_context(context)?;
        let mut values = context.0.clone();
        for &i in order {
            let (var, eq) = &self.equations[i];
            let value = eq.evaluate(&values)?;
            values.set(var.clone(), value);
        }
        Ok(Evaluation(values))
    }

    /// The model with the equations of `settings` replaced by constants.
    /// Targets must be endogenous. Acyclicity is preserved (interventions
    /// only remove dependencies).
    pub fn intervene(
        &self,
        settings: impl IntoIterator<Item = (VarId, bool)>,
    ) -> Result<CausalModel, ModelError> {
        let mut fixed: BTreeMap<VarId, bool> = BTreeMap::new();
        for (var, value) in settings {
            if self.is_exogenous(&var) {
                return Err(ModelError::ExogenousInterventionTarget(var));
            }
            if !self.is_endogenous(&var) {
                return Err(ModelError::UnknownInterventionTarget(var));
            }
            fixed.insert(var, value);
        }
        let equations = self
            .equations
            .iter()
            .map(|(v, eq)| match fixed.get(v) {
                Some(&value) => (v.clone(), BooleanFormula::Const(value)),
                None => (v.clone(), eq.clone()),
            })
            .collect();
        Ok(CausalModel::new(
            self.name.clone(),
            self.exogenous.clone(),
            equations,
        ))
    }

    /// Whether `phi` holds in the unique solution under `context`.
    pub fn satisfies(&self, context: &Context, phi: &BooleanFormula) -> Result<bool, ModelError> {
        let evaluation = self.evaluate(context)?;
        Ok(phi.evaluate(evaluation.as_assignment())?)
    }
}

/// Assembles an assignment into a [`Context`], rejecting duplicates.
/// Convenience for callers building contexts from parsed pairs.
pub fn context_from_unique_pairs(
    pairs: impl IntoIterator<Item = (VarId, bool)>,
) -> Result<Context, DuplicateBinding> {
    let mut values = BTreeMap::new();
    for (var, value) in pairs {
        match values.entry(var) {
            Entry::Vacant(e) => {
                e.insert(value);
            }
            Entry::Occupied(e) => return Err(DuplicateBinding(e.key().clone())),
        }
    }
    Ok(Context(Assignment::from_pairs(values)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable {0} is bound twice")]
pub struct DuplicateBinding(pub VarId);

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn v(name: &str) -> VarId {
        VarId::new(name).unwrap()
    }

    fn fv(name: &str) -> BooleanFormula {
        BooleanFormula::var(v(name))
    }

    /// The rock-throwing model: Suzy and Billy both throw, Suzy's rock gets
    /// there first.
    pub(crate) fn rock_throwing() -> CausalModel {
        CausalModel::new(
            "RockThrowing",
            vec![v("ST_exo"), v("BT_exo")],
            vec![
                (v("ST"), fv("ST_exo")),
                (v("BT"), fv("BT_exo")),
                (v("SH"), fv("ST")),
                (
                    v("BH"),
                    BooleanFormula::and([fv("BT"), BooleanFormula::not(fv("SH"))]),
                ),
                (v("BS"), BooleanFormula::or([fv("SH"), fv("BH")])),
            ],
        )
    }

    pub(crate) fn both_throw() -> Context {
        Context::from_pairs([(v("ST_exo"), true), (v("BT_exo"), true)])
    }

    #[test]
    fn rock_throwing_evaluation_matches_the_story() {
        let m = rock_throwing();
        assert!(m.validate().is_valid());
        let eval = m.evaluate(&both_throw()).unwrap();
        assert_eq!(
            eval.as_assignment().to_string(),
            "{BH=0, BS=1, BT=1, BT_exo=1, SH=1, ST=1, ST_exo=1}"
        );
    }

    #[test]
    fn evaluation_covers_all_variables_exactly() {
        let m = rock_throwing();
        let eval = m.evaluate(&both_throw()).unwrap();
        assert_eq!(
            eval.as_assignment().len(),
            m.num_exogenous() + m.num_endogenous()
        );
    }

    #[test]
    fn context_shape_is_enforced() {
        let m = rock_throwing();
        let missing = Context::from_pairs([(v("ST_exo"), true)]);
        assert_eq!(
            m.evaluate(&missing),
            Err(ModelError::IncompleteContext(vec![v("BT_exo")]))
        );
        let foreign = Context::from_pairs([
            (v("ST_exo"), true),
            (v("BT_exo"), true),
            (v("BS"), true),
        ]);
        assert_eq!(
            m.evaluate(&foreign),
            Err(ModelError::ForeignContextVariable(v("BS")))
        );
    }

    #[test]
    fn intervention_replaces_equations() {
        let m = rock_throwing();
        let m2 = m.intervene([(v("ST"), false)]).unwrap();
        let eval = m2.evaluate(&both_throw()).unwrap();
        // Suzy doesn't throw: Billy's rock hits, bottle still shatters
        assert_eq!(eval.get(&v("ST")), Some(false));
        assert_eq!(eval.get(&v("SH")), Some(false));
        assert_eq!(eval.get(&v("BH")), Some(true));
        assert_eq!(eval.get(&v("BS")), Some(true));
        // the original is untouched
        assert_eq!(m.evaluate(&both_throw()).unwrap().get(&v("BS")), Some(true));
    }

    #[test]
    fn intervention_targets_are_checked() {
        let m = rock_throwing();
        assert_eq!(
            m.intervene([(v("ST_exo"), false)]),
            Err(ModelError::ExogenousInterventionTarget(v("ST_exo")))
        );
        assert_eq!(
            m.intervene([(v("nope"), false)]),
            Err(ModelError::UnknownInterventionTarget(v("nope")))
        );
    }

    #[test]
    fn satisfies_checks_phi_in_the_solution() {
        let m = rock_throwing();
        assert!(m.satisfies(&both_throw(), &fv("BS")).unwrap());
        assert!(!m
            .satisfies(&both_throw(), &BooleanFormula::not(fv("BS")))
            .unwrap());
    }

    #[test]
    fn validation_reports_every_defect() {
        let m = CausalModel::new(
            "broken",
            vec![v("u"), v("u")],
            vec![
                (v("a"), fv("b")),
                (v("b"), fv("a")),
                (v("a"), fv("u")),
                (v("u"), fv("ghost")),
            ],
        );
        let report = m.validate();
        assert!(!report.is_valid());
        let findings = report.findings();
        assert!(findings.contains(&ValidationFinding::DuplicateExogenous(v("u"))));
        assert!(findings.contains(&ValidationFinding::DuplicateEquation(v("a"))));
        assert!(findings.contains(&ValidationFinding::ExogenousWithEquation(v("u"))));
        assert!(findings.contains(&ValidationFinding::UndeclaredVariable {
            equation: v("u"),
            variable: v("ghost"),
        }));
        assert!(findings
            .iter()
            .any(|f| matches!(f, ValidationFinding::Cycle(_))));
        // evaluation refuses invalid models
        assert!(matches!(
            m.evaluate(&Context::from_pairs([(v("u"), true)])),
            Err(ModelError::Invalid { .. })
        ));
    }

    #[test]
    fn cycle_walk_is_closed() {
        let m = CausalModel::new(
            "loop",
            vec![v("u")],
            vec![
                (v("a"), BooleanFormula::or([fv("u"), fv("c")])),
                (v("b"), fv("a")),
                (v("c"), fv("b")),
            ],
        );
        let report = m.validate();
        let cycle = report
            .findings()
            .iter()
            .find_map(|f| match f {
                ValidationFinding::Cycle(walk) => Some(walk),
                _ => None,
            })
            .expect("cycle not found");
        assert_eq!(cycle.first(), cycle.last());
        assert!(cycle.len() >= 3);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let m = CausalModel::new("selfloop", vec![v("u")], vec![(v("a"), fv("a"))]);
        assert!(!m.validate().is_valid());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let m = rock_throwing();
        let e1 = m.evaluate(&both_throw()).unwrap();
        let e2 = m.evaluate(&both_throw()).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn duplicate_context_bindings_are_rejected() {
        let err = context_from_unique_pairs([(v("u"), true), (v("u"), false)]).unwrap_err();
        assert_eq!(err, DuplicateBinding(v("u")));
    }
}

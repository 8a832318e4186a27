//! SAT solving and projected model enumeration on top of varisat.
//!
//! Models are reported as [`Assignment`]s over the CNF's *original*
//! variables only. Enumeration adds one blocking clause per reported model,
//! built from original variables alone, so assignments that differ only in
//! Tseitin auxiliaries collapse into a single reported model. Original
//! variables the solver left unassigned (they appear in no clause yet) are
//! completed with `false`; since the blocking clause mentions them, later
//! models explore their other value, and every projected model is still
//! reported exactly once.
//!
//! The enumeration order is an implementation detail of the underlying
//! solver. Callers must not rely on it; tests compare model sets.

use varisat::ExtendFormula;

use crate::cnf::CnfFormula;
use crate::formula::{Assignment, VarId};

fn load(cnf: &CnfFormula) -> (varisat::Solver<'static>, Vec<(VarId, varisat::Var)>) {
    let mut solver = varisat::Solver::new();
    for clause in cnf.clauses() {
        let lits: Vec<varisat::Lit> = clause
            .iter()
            .map(|lit| {
                varisat::Lit::from_var(
                    varisat::Var::from_index(lit.index() as usize),
                    lit.is_positive(),
                )
            })
            .collect();
        solver.add_clause(&lits);
    }
    let originals = cnf
        .original_vars()
        .map(|(name, index)| (name.clone(), varisat::Var::from_index(index as usize)))
        .collect();
    (solver, originals)
}

fn next_model(
    solver: &mut varisat::Solver<'static>,
    originals: &[(VarId, varisat::Var)],
) -> Option<Assignment> {
    let sat = solver.solve().expect("solver failed without proof output");
    if !sat {
        return None;
    }
    let model = solver.model().expect("sat result must carry a model");
    let mut assignment = Assignment::new();
    let mut blocking = Vec::with_capacity(originals.len());
    for (name, var) in originals {
        // unconstrained vars are absent from the model; default them to false
        let value = model
            .iter()
            .find(|lit| lit.var() == *var)
            .map_or(false, |lit| lit.is_positive());
        assignment.set(name.clone(), value);
        blocking.push(varisat::Lit::from_var(*var, !value));
    }
    solver.add_clause(&blocking);
    Some(assignment)
}

/// Returns one satisfying assignment projected onto the original variables,
/// or `None` if the formula is unsatisfiable.
pub fn solve(cnf: &CnfFormula) -> Option<Assignment> {
    let (mut solver, originals) = load(cnf);
    next_model(&mut solver, &originals)
}

/// Lazily enumerates all satisfying assignments projected onto the original
/// variables, each exactly once.
pub fn all_sat(cnf: &CnfFormula) -> AllSat {
    let (solver, originals) = load(cnf);
    AllSat {
        solver,
        originals,
        done: false,
    }
}

pub struct AllSat {
    solver: varisat::Solver<'static>,
    originals: Vec<(VarId, varisat::Var)>,
    done: bool,
}

impl Iterator for AllSat {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        let model = next_model(&mut self.solver, &self.originals);
        if model.is_none() {
            self.done = true;
        }
        model
    }
}

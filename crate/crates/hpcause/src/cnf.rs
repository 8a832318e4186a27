//! Conversion of formulas to CNF via Tseitin-style definitional auxiliaries.
//!
//! The produced [`CnfFormula`] keeps the distinction between *original*
//! variables (those of the source formula) and auxiliary definition
//! variables. That split carries the guarantee everything downstream relies
//! on:
//!
//! * every total assignment of the original variables satisfying the source
//!   formula extends to a model of the CNF, and
//! * every model of the CNF, restricted to the original variables, satisfies
//!   the source formula.
//!
//! Model enumeration therefore blocks only original variables, so two solver
//! models that differ in auxiliaries alone are reported once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::formula::{BooleanFormula, VarId};

/// A literal over CNF variable indices (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit {
    index: u32,
    positive: bool,
}

impl Lit {
    pub fn new(index: u32, positive: bool) -> Self {
        Lit { index, positive }
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit {
            index: self.index,
            positive: !self.positive,
        }
    }
}

/// Formula in conjunctive normal form, with named original variables and
/// unnamed auxiliaries.
#[derive(Debug, Clone, Default)]
pub struct CnfFormula {
    clauses: Vec<Vec<Lit>>,
    // index -> name for original variables, None for auxiliaries
    names: Vec<Option<VarId>>,
    original: BTreeMap<VarId, u32>,
}

impl CnfFormula {
    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Total number of CNF variables, auxiliaries included.
    pub fn num_vars(&self) -> u32 {
        self.names.len() as u32
    }

    /// Original (named) variables with their CNF indices, in name order.
    pub fn original_vars(&self) -> impl Iterator<Item = (&VarId, u32)> {
        self.original.iter().map(|(v, i)| (v, *i))
    }

    pub fn num_original_vars(&self) -> usize {
        self.original.len()
    }

    pub fn index_of(&self, var: &VarId) -> Option<u32> {
        self.original.get(var).copied()
    }

    pub fn name_of(&self, index: u32) -> Option<&VarId> {
        self.names.get(index as usize).and_then(|n| n.as_ref())
    }

    fn fresh_aux(&mut self) -> Lit {
        let index = self.names.len() as u32;
        self.names.push(None);
        Lit::new(index, true)
    }

    fn add_clause(&mut self, clause: Vec<Lit>) {
        self.clauses.push(clause);
    }
}

/// Converts `f` to CNF. Constant folding runs first; definition variables
/// are introduced bottom-up, and a top-level conjunction is decomposed
/// clausally instead of getting a definition of its own.
pub fn to_cnf(f: &BooleanFormula) -> CnfFormula {
    let mut cnf = CnfFormula::default();
    for var in f.vars() {
        let index = cnf.names.len() as u32;
        cnf.names.push(Some(var.clone()));
        cnf.original.insert(var, index);
    }

    let folded = f.simplify();
    match &folded {
        BooleanFormula::Const(true) => {}
        BooleanFormula::Const(false) => cnf.add_clause(vec![]),
        BooleanFormula::And(children) => {
            for child in children {
                let lit = define(child, &mut cnf);
                cnf.add_clause(vec![lit]);
            }
        }
        other => {
            let lit = define(other, &mut cnf);
            cnf.add_clause(vec![lit]);
        }
    }
    cnf
}

/// Returns a literal equivalent to `f`, adding definitional clauses as
/// needed. `f` is free of constants below the root (guaranteed by
/// `simplify`), but a stray constant is still handled defensively.
fn define(f: &BooleanFormula, cnf: &mut CnfFormula) -> Lit {
    match f {
        BooleanFormula::Const(b) => {
            let aux = cnf.fresh_aux();
            let lit = if *b { aux } else { !aux };
            cnf.add_clause(vec![lit]);
            lit
        }
        BooleanFormula::Var(v) => {
            let index = cnf.original[v];
            Lit::new(index, true)
        }
        BooleanFormula::Not(g) => !define(g, cnf),
        BooleanFormula::And(children) => {
            let lits: Vec<Lit> = children.iter().map(|c| define(c, cnf)).collect();
            let aux = cnf.fresh_aux();
            // aux <-> (l1 & ... & ln)
            let mut long = Vec::with_capacity(lits.len() + 1);
            long.push(aux);
            for l in &lits {
                cnf.add_clause(vec![!aux, *l]);
                long.push(!*l);
            }
            cnf.add_clause(long);
            aux
        }
        BooleanFormula::Or(children) => {
            let lits: Vec<Lit> = children.iter().map(|c| define(c, cnf)).collect();
            let aux = cnf.fresh_aux();
            // aux <-> (l1 | ... | ln)
            let mut long = Vec::with_capacity(lits.len() + 1);
            long.push(!aux);
            for l in &lits {
                cnf.add_clause(vec![aux, !*l]);
                long.push(*l);
            }
            cnf.add_clause(long);
            aux
        }
        BooleanFormula::Iff(a, b) => {
            let la = define(a, cnf);
            let lb = define(b, cnf);
            let aux = cnf.fresh_aux();
            // aux <-> (la <-> lb)
            cnf.add_clause(vec![!aux, !la, lb]);
            cnf.add_clause(vec![!aux, la, !lb]);
            cnf.add_clause(vec![aux, la, lb]);
            cnf.add_clause(vec![aux, !la, !lb]);
            aux
        }
    }
}

/// Renders the CNF in DIMACS format. Comment lines carry the mapping from
/// 1-based DIMACS indices to original variable names; unnamed indices are
/// Tseitin auxiliaries.
pub fn to_dimacs(cnf: &CnfFormula) -> String {
    let mut out = String::new();
    for (var, index) in cnf.original_vars() {
        let _ = writeln!(out, "c var {} = {}", index + 1, var);
    }
    if (cnf.num_vars() as usize) > cnf.num_original_vars() {
        let _ = writeln!(
            out,
            "c vars {}..{} are auxiliary",
            cnf.num_original_vars() + 1,
            cnf.num_vars()
        );
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.clauses().len());
    for clause in cnf.clauses() {
        for lit in clause {
            let n = lit.index() as i64 + 1;
            let _ = write!(out, "{} ", if lit.is_positive() { n } else { -n });
        }
        let _ = writeln!(out, "0");
    }
    out
}

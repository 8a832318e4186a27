//! Actual causality checking over acyclic binary structural causal models.
//!
//! The crate answers queries of the form "was X = x an actual cause of φ?"
//! under the modified Halpern-Pearl definition, against a causal model with
//! binary variables. Three conditions make up the definition:
//!
//! * **AC1**: the candidate cause and the effect both occurred,
//! * **AC2**: some set W of variables, frozen at its actual values, makes the
//!   effect counterfactually depend on the cause,
//! * **AC3**: no strict subset of the cause already satisfies AC1 and AC2.
//!
//! AC2 and AC3 are the expensive parts. Besides a brute-force subset search,
//! the checker reduces both to propositional satisfiability: one encoding
//! whose models are exactly the AC2 witnesses, and one whose models expose
//! every way the cause could have been smaller. See [`checker`] for the
//! strategies and [`formula`]/[`cnf`]/[`solver`] for the machinery they sit
//! on. Models can be written programmatically or in a small text format
//! ([`dsl`]); [`generate`] produces the synthetic model families used for
//! scaling experiments, and [`bench`] measures strategies against each other.
//!
//! ```
//! use hpcause::{check_cause, CausalQuery, CheckOptions, Strategy};
//! use hpcause::dsl::parse_model;
//! use hpcause::formula::{BooleanFormula, VarId};
//! use hpcause::model::Context;
//!
//! let model = parse_model(
//!     "model RockThrowing\n\
//!      exo ST_exo, BT_exo\n\
//!      ST = ST_exo\n\
//!      BT = BT_exo\n\
//!      SH = ST\n\
//!      BH = BT & !SH\n\
//!      BS = SH | BH\n",
//! )?;
//!
//! let suzy_throws = VarId::new("ST")?;
//! let context = Context::from_pairs([
//!     (VarId::new("ST_exo")?, true),
//!     (VarId::new("BT_exo")?, true),
//! ]);
//! let phi = BooleanFormula::var(VarId::new("BS")?);
//! let query = CausalQuery::new(&model, context, vec![(suzy_throws, true)], phi, Strategy::Sat)?;
//!
//! let result = check_cause(&query, &CheckOptions::default())?;
//! assert!(result.is_cause);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bench;
pub mod checker;
pub mod cnf;
pub mod dsl;
pub mod formula;
pub mod generate;
pub mod model;
pub mod solver;

pub use checker::{
    check_cause, CausalQuery, CausalityResult, CheckError, CheckOptions, ConditionTimings,
    NonMinimalityReport, Strategy,
};
pub use formula::{Assignment, BooleanFormula, VarId};
pub use model::{CausalModel, Context, Evaluation};

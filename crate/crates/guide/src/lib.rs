//! The book under `book/`, compiled. Each chapter is included as the doc
//! comment of an empty module, so `cargo test --doc -p guide` builds and
//! runs every code block in the book. If a chapter drifts from the
//! library, this crate stops compiling or its doc tests fail.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/causal-models.md")]
pub mod causal_models {}

#[doc = include_str!("../../../book/src/actual-causes.md")]
pub mod actual_causes {}

#[doc = include_str!("../../../book/src/checking-with-sat.md")]
pub mod checking_with_sat {}

#[doc = include_str!("../../../book/src/formulas-and-solving.md")]
pub mod formulas_and_solving {}

#[doc = include_str!("../../../book/src/generators-and-benchmarking.md")]
pub mod generators_and_benchmarking {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

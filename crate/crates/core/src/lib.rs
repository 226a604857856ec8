//! Deciding implication of inclusion atoms over Boolean teams.
//!
//! Three dialects are supported: repetition-free atoms, atoms with repeated
//! variables, and atoms with the Boolean constants `#T` and `#F`. The decider
//! answers with a replayable derivation when the query follows and with a
//! verified counterexample team when it does not. Some entailments have
//! neither: no team refutes them and the rules do not derive them. Those
//! are reported as [`Error::Underivable`].

pub mod calculus;
pub mod cli;
pub mod decide;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod semantics;
pub mod syntax;
pub mod witness;

pub use error::{Error, Result};
pub use semantics::{satisfies, BitTuple, Team};
pub use syntax::{parse_problem, Atom, Dialect, Problem, Sequence, Symbol};

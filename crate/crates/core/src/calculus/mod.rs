//! The proof system: rules, equality closure, normal forms, B3 coverage and saturation.

pub mod constants;
pub mod equality;
pub mod normal;
pub mod rules;
pub mod saturate;
pub mod trace;

pub use constants::{b3_coverage, consistent, consistent_instances, Coverage};
pub use equality::{derivable_equalities, derivable_equalities_over, EqualityClasses};
pub use normal::{decompose_rhs_repetitions, normalize, Normalized};
pub use rules::{validate_step, Rule, RuleStep, StepDetail};
pub use saturate::{minimal_bound, saturate, Saturation, SaturationConfig, DEFAULT_ATOM_BUDGET};
pub use trace::{DerivationTrace, Source, TraceStep};

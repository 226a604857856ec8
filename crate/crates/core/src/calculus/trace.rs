//! Derivation traces and their replay.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::rules::{validate_step, RuleStep};
use crate::syntax::Atom;

/// Where a premise of a step comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Assumption(usize),
    Step(usize),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Assumption(k) => write!(f, "A#{k}"),
            Source::Step(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: RuleStep,
    /// One source per premise, in premise order.
    pub sources: Vec<Source>,
}

/// A derivation of `target` from a list of assumptions.
///
/// A trace without steps derives a target that is itself an assumption.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub target: Atom,
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every step against its rule and its sources, and that the
    /// trace ends at the target.
    pub fn replay(&self, assumptions: &[Atom]) -> Result<(), String> {
        for (i, ts) in self.steps.iter().enumerate() {
            if ts.sources.len() != ts.step.premises.len() {
                return Err(format!(
                    "step {i}: {} sources for {} premises",
                    ts.sources.len(),
                    ts.step.premises.len()
                ));
            }
            for (premise, src) in ts.step.premises.iter().zip(&ts.sources) {
                let found = match *src {
                    Source::Assumption(k) => assumptions.get(k),
                    Source::Step(j) if j < i => Some(&self.steps[j].step.conclusion),
                    Source::Step(_) => None,
                };
                if found != Some(premise) {
                    return Err(format!(
                        "step {i}: premise `{premise}` does not match source {src}"
                    ));
                }
            }
            if !validate_step(&ts.step) {
                return Err(format!("step {i}: not an instance of {}", ts.step.rule));
            }
        }
        match self.steps.last() {
            Some(last) if last.step.conclusion == self.target => Ok(()),
            Some(last) => Err(format!(
                "last conclusion `{}` is not the target `{}`",
                last.step.conclusion, self.target
            )),
            None if assumptions.contains(&self.target) => Ok(()),
            None => Err(format!("empty trace for non-assumption `{}`", self.target)),
        }
    }

    /// Step rules in order, e.g. for asserting the shape of a derivation.
    pub fn rules(&self) -> Vec<super::rules::Rule> {
        self.steps.iter().map(|s| s.step.rule).collect()
    }

    /// One line per step, as printed by [`fmt::Display`].
    pub fn lines(&self, assumptions: &[Atom]) -> Vec<String> {
        if self.steps.is_empty() {
            let k = assumptions.iter().position(|a| *a == self.target);
            let src = k.map_or_else(|| "?".to_string(), |k| format!("A#{k}"));
            return vec![format!("{src} |- {}", self.target)];
        }
        self.steps
            .iter()
            .enumerate()
            .map(|(i, ts)| {
                let srcs: Vec<String> = ts.sources.iter().map(Source::to_string).collect();
                format!(
                    "{i}: {}{} [{}] |- {}",
                    ts.step.rule,
                    ts.step.detail,
                    srcs.join(", "),
                    ts.step.conclusion
                )
            })
            .collect()
    }
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines(&[]) {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

//! The inference rules as checkable steps.
//!
//! ```text
//! I1  x ⊆ x
//! I2  x ⊆ z, z ⊆ y            ⟹ x ⊆ y
//! I3  xyz ⊆ uvw               ⟹ xzy ⊆ uwv      (|x|=|u|, |y|=|v|)
//! I4  xy ⊆ uv                 ⟹ x ⊆ u          (|x|=|u|)
//! I5  xy ⊆ uv                 ⟹ xyy ⊆ uvv      (y, v single symbols)
//! I6  x1 x2 ⊆ y1 y1, z ⊆ v x2 ⟹ z ⊆ v x1
//! B1  #T ⊆ #F                 ⟹ q ⊆ r
//! B2  p ⊆ q                   ⟹ p#T ⊆ q#T  and  p#F ⊆ q#F
//! B3  A                       ⟹ p ⊆ q          (A covers every consistent constant sequence)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::b3_coverage;
use crate::error::Error;
use crate::syntax::{Atom, Sequence, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    B1,
    B2,
    B3,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::I1,
        Rule::I2,
        Rule::I3,
        Rule::I4,
        Rule::I5,
        Rule::I6,
        Rule::B1,
        Rule::B2,
        Rule::B3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::I1 => "I1",
            Rule::I2 => "I2",
            Rule::I3 => "I3",
            Rule::I4 => "I4",
            Rule::I5 => "I5",
            Rule::I6 => "I6",
            Rule::B1 => "B1",
            Rule::B2 => "B2",
            Rule::B3 => "B3",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::PreconditionViolated(format!("unknown rule `{s}`")))
    }
}

/// Rule parameters that are not recoverable from premises and conclusion alone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepDetail {
    #[default]
    None,
    /// I3: lengths of the first and second blocks.
    Split { first: usize, second: usize },
    /// I4: length of the kept prefix.
    Prefix(usize),
    /// B2: the appended constant.
    Constant(bool),
}

impl fmt::Display for StepDetail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepDetail::None => Ok(()),
            StepDetail::Split { first, second } => write!(f, "{{split={first},{second}}}"),
            StepDetail::Prefix(n) => write!(f, "{{prefix={n}}}"),
            StepDetail::Constant(b) => write!(f, "{{const={}}}", Symbol::constant(*b)),
        }
    }
}

/// One rule instance: premises, conclusion and the rule-specific parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleStep {
    pub rule: Rule,
    pub premises: Vec<Atom>,
    pub conclusion: Atom,
    pub detail: StepDetail,
}

impl RuleStep {
    pub fn new(rule: Rule, premises: Vec<Atom>, conclusion: Atom, detail: StepDetail) -> Self {
        RuleStep {
            rule,
            premises,
            conclusion,
            detail,
        }
    }
}

fn seq(items: &[Symbol]) -> Sequence {
    Sequence(items.to_vec())
}

/// Applies I3 with the given block lengths.
pub fn apply_i3(premise: &Atom, first: usize, second: usize) -> Option<Atom> {
    let n = premise.arity();
    if first + second > n {
        return None;
    }
    let swap = |s: &Sequence| {
        let items = s.items();
        let mut out = items[..first].to_vec();
        out.extend_from_slice(&items[first + second..]);
        out.extend_from_slice(&items[first..first + second]);
        Sequence(out)
    };
    Some(Atom {
        lhs: swap(&premise.lhs),
        rhs: swap(&premise.rhs),
    })
}

/// Applies I4 keeping a prefix of the given length.
pub fn apply_i4(premise: &Atom, prefix: usize) -> Option<Atom> {
    (prefix <= premise.arity()).then(|| Atom {
        lhs: seq(&premise.lhs.items()[..prefix]),
        rhs: seq(&premise.rhs.items()[..prefix]),
    })
}

/// Applies I5, duplicating the last position.
pub fn apply_i5(premise: &Atom) -> Option<Atom> {
    let (l, r) = (premise.lhs.items().last()?, premise.rhs.items().last()?);
    let mut lhs = premise.lhs.clone();
    let mut rhs = premise.rhs.clone();
    lhs.0.push(l.clone());
    rhs.0.push(r.clone());
    Some(Atom { lhs, rhs })
}

/// Applies I6: from `x1 x2 ⊆ y1 y1` and `z ⊆ v x2`, conclude `z ⊆ v x1`.
pub fn apply_i6(equality: &Atom, target: &Atom) -> Option<Atom> {
    if equality.arity() != 2 || equality.rhs.items()[0] != equality.rhs.items()[1] {
        return None;
    }
    let x1 = &equality.lhs.items()[0];
    let x2 = &equality.lhs.items()[1];
    if target.rhs.items().last() != Some(x2) {
        return None;
    }
    let mut rhs = target.rhs.clone();
    *rhs.0.last_mut().expect("nonempty") = x1.clone();
    Some(Atom {
        lhs: target.lhs.clone(),
        rhs,
    })
}

/// Applies B2 with the given constant.
pub fn apply_b2(premise: &Atom, constant: bool) -> Atom {
    let c = Symbol::constant(constant);
    let mut lhs = premise.lhs.clone();
    let mut rhs = premise.rhs.clone();
    lhs.0.push(c.clone());
    rhs.0.push(c);
    Atom { lhs, rhs }
}

pub(crate) fn top_sub_bot() -> Atom {
    Atom {
        lhs: Sequence(vec![Symbol::Top]),
        rhs: Sequence(vec![Symbol::Bot]),
    }
}

/// Whether the step is a syntactically correct instance of its rule.
///
/// B3 steps are accepted whenever their premises cover the conclusion;
/// minimality of the premise set is not required.
pub fn validate_step(step: &RuleStep) -> bool {
    let c = &step.conclusion;
    if c.lhs.len() != c.rhs.len() {
        return false;
    }
    let p = &step.premises;
    match (step.rule, step.detail) {
        (Rule::I1, StepDetail::None) => p.is_empty() && c.is_trivial(),
        (Rule::I2, StepDetail::None) => {
            p.len() == 2 && p[0].rhs == p[1].lhs && c.lhs == p[0].lhs && c.rhs == p[1].rhs
        }
        (Rule::I3, StepDetail::Split { first, second }) => {
            p.len() == 1 && apply_i3(&p[0], first, second).as_ref() == Some(c)
        }
        (Rule::I4, StepDetail::Prefix(n)) => p.len() == 1 && apply_i4(&p[0], n).as_ref() == Some(c),
        (Rule::I5, StepDetail::None) => p.len() == 1 && apply_i5(&p[0]).as_ref() == Some(c),
        (Rule::I6, StepDetail::None) => p.len() == 2 && apply_i6(&p[0], &p[1]).as_ref() == Some(c),
        (Rule::B1, StepDetail::None) => p.len() == 1 && p[0] == top_sub_bot(),
        (Rule::B2, StepDetail::Constant(k)) => p.len() == 1 && apply_b2(&p[0], k) == *c,
        (Rule::B3, StepDetail::None) => {
            !p.is_empty() && matches!(b3_coverage(p, c), Ok(cov) if cov.covered)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    fn step(rule: Rule, premises: &[&str], conclusion: &str, detail: StepDetail) -> RuleStep {
        RuleStep::new(
            rule,
            premises.iter().map(|s| atom(s)).collect(),
            atom(conclusion),
            detail,
        )
    }

    #[test]
    fn transitivity() {
        assert!(validate_step(&step(
            Rule::I2,
            &["x <= z", "z <= y"],
            "x <= y",
            StepDetail::None
        )));
        assert!(!validate_step(&step(
            Rule::I2,
            &["z <= y", "x <= z"],
            "x <= y",
            StepDetail::None
        )));
    }

    #[test]
    fn contradiction_yields_anything() {
        assert!(validate_step(&step(
            Rule::B1,
            &["#T <= #F"],
            "q1 <= r1",
            StepDetail::None
        )));
        assert!(!validate_step(&step(
            Rule::B1,
            &["#F <= #T"],
            "q1 <= r1",
            StepDetail::None
        )));
    }

    #[test]
    fn projection_keeps_a_prefix() {
        let wrong = step(
            Rule::I4,
            &["x1 x2 <= u1 u2"],
            "x2 <= u2",
            StepDetail::Prefix(1),
        );
        assert!(!validate_step(&wrong));
        let right = step(
            Rule::I4,
            &["x1 x2 <= u1 u2"],
            "x1 <= u1",
            StepDetail::Prefix(1),
        );
        assert!(validate_step(&right));
    }

    #[test]
    fn permutation_blocks() {
        let s = step(
            Rule::I3,
            &["a b c d <= e f g h"],
            "a d b c <= e h f g",
            StepDetail::Split {
                first: 1,
                second: 2,
            },
        );
        assert!(validate_step(&s));
        let bad = RuleStep {
            detail: StepDetail::Split {
                first: 2,
                second: 1,
            },
            ..s
        };
        assert!(!validate_step(&bad));
    }

    #[test]
    fn duplication_and_substitution() {
        assert!(validate_step(&step(
            Rule::I5,
            &["x y <= u v"],
            "x y y <= u v v",
            StepDetail::None
        )));
        assert!(validate_step(&step(
            Rule::I6,
            &["x1 x2 <= y1 y1", "z1 z2 <= v1 x2"],
            "z1 z2 <= v1 x1",
            StepDetail::None
        )));
        assert!(!validate_step(&step(
            Rule::I6,
            &["x1 x2 <= y1 y2", "z1 z2 <= v1 x2"],
            "z1 z2 <= v1 x1",
            StepDetail::None
        )));
    }

    #[test]
    fn constant_padding() {
        assert!(validate_step(&step(
            Rule::B2,
            &["p <= q"],
            "p #T <= q #T",
            StepDetail::Constant(true)
        )));
        assert!(!validate_step(&step(
            Rule::B2,
            &["p <= q"],
            "p #T <= q #F",
            StepDetail::Constant(true)
        )));
    }

    #[test]
    fn coverage_schema() {
        assert!(validate_step(&step(
            Rule::B3,
            &["#T p2 <= q1 q2", "#F p2 <= q1 q2"],
            "p1 p2 <= q1 q2",
            StepDetail::None
        )));
        assert!(!validate_step(&step(
            Rule::B3,
            &["#T p2 <= q1 q2"],
            "p1 p2 <= q1 q2",
            StepDetail::None
        )));
    }

    #[test]
    fn identity() {
        assert!(validate_step(&step(
            Rule::I1,
            &[],
            "x <= x",
            StepDetail::None
        )));
        assert!(!validate_step(&step(
            Rule::I1,
            &[],
            "x <= y",
            StepDetail::None
        )));
    }
}

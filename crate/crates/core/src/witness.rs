//! Counterexample teams for non-derivable queries.
//!
//! The team consists of all assignments over the problem's variables that
//! respect the derivable equalities, minus those giving the forbidden tuple
//! `c` to some derivable left side `w ⊆ y` of the query's right side `y`.
//! Without constants `c = 0^n`; with constants `c` is the value of a constant
//! instance of the query's left side that no derivable candidate covers.
//! When the query equates right-hand positions whose left symbols are not
//! equal, the removal step is skipped.

use std::fmt;

use serde::Serialize;

use crate::calculus::constants::consistent_bits;
use crate::calculus::{
    consistent_instances, derivable_equalities_over, EqualityClasses, Saturation,
};
use crate::error::{Error, Result};
use crate::semantics::{satisfies, BitTuple, Evaluator, Team};
use crate::syntax::{Atom, Problem, Sequence, Symbol};

/// Largest universe for which witness teams are materialized.
pub const MATERIALIZE_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPlan {
    /// Variables of the problem, in name order.
    pub universe: Vec<String>,
    pub classes: EqualityClasses,
    pub forbidden_tuple: Option<BitTuple>,
    pub forbidden_sequences: Vec<Sequence>,
    pub stop_branch: bool,
}

/// Whether some query positions `j, k` have `y_j ≡ y_k` but `x_j ≢ x_k`.
pub fn stop_branch(classes: &EqualityClasses, query: &Atom) -> bool {
    let (x, y) = (query.lhs.items(), query.rhs.items());
    (0..y.len()).any(|j| {
        (j + 1..y.len())
            .any(|k| classes.equivalent(&y[j], &y[k]) && !classes.equivalent(&x[j], &x[k]))
    })
}

/// The value `c` for the Boolean construction.
///
/// Candidates are the derivable `r` with `r_i ∈ {p_i, #T, #F}`. The result is
/// the least constant instance of `p` that respects `classes` and is
/// consistent with no candidate.
pub fn choose_c(
    p: &Sequence,
    derivables: &[Sequence],
    classes: Option<&EqualityClasses>,
) -> Result<BitTuple> {
    let fitting: Vec<&Sequence> = derivables
        .iter()
        .filter(|r| {
            r.len() == p.len()
                && r.iter()
                    .zip(p.iter())
                    .all(|(ri, pi)| ri == pi || ri.is_constant())
        })
        .collect();
    let pattern = match classes {
        Some(c) => c.substitute_seq(p),
        None => p.clone(),
    };
    for bits in consistent_instances(&pattern)? {
        if !consistent_bits(&bits, p) {
            continue;
        }
        if !fitting.iter().any(|r| consistent_bits(&bits, r)) {
            return Ok(BitTuple(bits));
        }
    }
    Err(Error::CoverageComplete)
}

/// Plans the counterexample for a query that the saturation did not derive.
pub fn plan(p: &Problem, sat: &Saturation) -> Result<WitnessPlan> {
    let universe = p.variables();
    let classes = derivable_equalities_over(&universe, &p.assumptions);
    plan_with(p, sat, classes)
}

pub(crate) fn plan_with(
    p: &Problem,
    sat: &Saturation,
    classes: EqualityClasses,
) -> Result<WitnessPlan> {
    let universe = p.variables();
    let stop = stop_branch(&classes, &p.query);
    if stop {
        return Ok(WitnessPlan {
            universe,
            classes,
            forbidden_tuple: None,
            forbidden_sequences: Vec::new(),
            stop_branch: true,
        });
    }
    let w = sat.with_rhs(&p.query.rhs);
    let c = if p.dialect.has_constants() {
        choose_c(&p.query.lhs, &w, Some(&classes))?
    } else {
        BitTuple::zeros(p.query.arity())
    };
    Ok(WitnessPlan {
        universe,
        classes,
        forbidden_tuple: Some(c),
        forbidden_sequences: w,
        stop_branch: false,
    })
}

/// Every other value of the query's left side that a class-respecting row
/// can take, in lexicographic order after the plan's own tuple.
///
/// `0^n` fails whenever forcing the left side to zeros forces some derivable
/// `w` to zeros as well, e.g. `p1 p2 <= p2 p1` with no assumptions. The
/// decider then retries the construction with these tuples.
pub fn fallback_tuples(plan: &WitnessPlan, query: &Atom) -> Result<Vec<BitTuple>> {
    match plan.forbidden_tuple.as_ref().filter(|_| !plan.stop_branch) {
        Some(first) => fallback_tuples_for(&plan.classes, query, first),
        None => Ok(Vec::new()),
    }
}

pub(crate) fn fallback_tuples_for(
    classes: &EqualityClasses,
    query: &Atom,
    first: &BitTuple,
) -> Result<Vec<BitTuple>> {
    let pattern = classes.substitute_seq(&query.lhs);
    Ok(consistent_instances(&pattern)?
        .into_iter()
        .filter(|bits| consistent_bits(bits, &query.lhs) && *bits != first.0)
        .map(BitTuple)
        .collect())
}

/// A team over `universe` satisfying the assumptions but not the query, by
/// exhaustive search; `None` means the query holds in every such team.
///
/// For each value `a` of the query's left side, the candidate is the largest
/// assumption-satisfying subteam of the rows whose right side differs from
/// `a`. Satisfying teams are closed under union, so if any refutation goes
/// through `a`, this one does.
pub fn exact_refutation(
    universe: &[String],
    assumptions: &[Atom],
    query: &Atom,
) -> Result<Option<Team>> {
    let n = universe.len();
    if n > MATERIALIZE_LIMIT {
        return Err(Error::CapExceeded {
            what: "witness team universe",
            size: n as u128,
            cap: MATERIALIZE_LIMIT as u128,
        });
    }
    let atoms = assumptions
        .iter()
        .map(|a| {
            Ok((
                Evaluator::new(universe, &a.lhs)?,
                Evaluator::new(universe, &a.rhs)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let x = Evaluator::new(universe, &query.lhs)?;
    let y = Evaluator::new(universe, &query.rhs)?;
    let all = 0..1u64 << n;
    let mut values: Vec<u64> = all.clone().map(|r| x.eval(r)).collect();
    values.sort_unstable();
    values.dedup();
    for a in values {
        let mut rows: Vec<u64> = all.clone().filter(|&r| y.eval(r) != a).collect();
        loop {
            let before = rows.len();
            for (lhs, rhs) in &atoms {
                let have: rustc_hash::FxHashSet<u64> = rows.iter().map(|&r| rhs.eval(r)).collect();
                rows.retain(|&r| have.contains(&lhs.eval(r)));
            }
            if rows.len() == before {
                break;
            }
        }
        if rows.iter().any(|&r| x.eval(r) == a) {
            return Team::new(universe.to_vec(), rows).map(Some);
        }
    }
    Ok(None)
}

/// Materializes the plan's team over the plan's universe.
pub fn build_counterexample(plan: &WitnessPlan) -> Result<Team> {
    let n = plan.universe.len();
    if n > MATERIALIZE_LIMIT {
        return Err(Error::CapExceeded {
            what: "witness team universe",
            size: n as u128,
            cap: MATERIALIZE_LIMIT as u128,
        });
    }
    if plan.classes.contradiction() {
        return Err(Error::PreconditionViolated(
            "the assumptions equate #T and #F; every query follows".into(),
        ));
    }
    // Each variable is a constant, or copies its class representative.
    let bit = |i: usize| 1u64 << (n - 1 - i);
    let mut fixed_mask = 0u64;
    let mut fixed_val = 0u64;
    let mut copies: Vec<(u64, u64)> = Vec::new();
    for (i, v) in plan.universe.iter().enumerate() {
        let sym = Symbol::var(v.clone());
        if let Some(c) = plan.classes.constant_of(&sym) {
            fixed_mask |= bit(i);
            if c {
                fixed_val |= bit(i);
            }
            continue;
        }
        let rep = plan.classes.representative(&sym);
        if let Some(j) = rep
            .as_var()
            .and_then(|r| plan.universe.iter().position(|u| u == r))
        {
            if j != i {
                copies.push((bit(i), bit(j)));
            }
        }
    }
    let forbidden = match (&plan.forbidden_tuple, plan.stop_branch) {
        (Some(c), false) => Some((
            c.code(),
            plan.forbidden_sequences
                .iter()
                .map(|w| Evaluator::new(&plan.universe, w))
                .collect::<Result<Vec<_>>>()?,
        )),
        _ => None,
    };
    let rows = (0..1u64 << n).filter(|&row| {
        if row & fixed_mask != fixed_val {
            return false;
        }
        if copies
            .iter()
            .any(|&(b, r)| (row & b != 0) != (row & r != 0))
        {
            return false;
        }
        match &forbidden {
            Some((c, ws)) => ws.iter().all(|w| w.eval(row) != *c),
            None => true,
        }
    });
    Team::new(plan.universe.clone(), rows)
}

/// Whether the team satisfies every assumption and refutes the query.
pub fn verify_counterexample(p: &Problem, t: &Team) -> bool {
    let holds = |a: &Atom| satisfies(t, a).unwrap_or(false);
    p.assumptions.iter().all(holds) && !satisfies(t, &p.query).unwrap_or(true)
}

/// A refutation: the team with the plan it was built from (absent when the
/// team came from [`exact_refutation`]), or only the plan when the team is
/// too large.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Team(Team, Option<WitnessPlan>),
    Constraints(WitnessPlan),
}

/// How a witness is rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WitnessFormat {
    #[default]
    Table,
    Constraints,
    None,
}

impl std::str::FromStr for WitnessFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(WitnessFormat::Table),
            "constraints" => Ok(WitnessFormat::Constraints),
            "none" => Ok(WitnessFormat::None),
            _ => Err(Error::PreconditionViolated(format!(
                "unknown witness format `{s}`"
            ))),
        }
    }
}

impl WitnessPlan {
    /// `a=b` per class member, then `forbid <seq> = <bits>` per forbidden sequence.
    pub fn constraint_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for class in self.classes.classes() {
            let rep = &class[0];
            for other in &class[1..] {
                out.push(format!("{other}={rep}"));
            }
        }
        if let (Some(c), false) = (&self.forbidden_tuple, self.stop_branch) {
            for w in &self.forbidden_sequences {
                out.push(format!("forbid {w} = {c}"));
            }
        }
        out
    }
}

impl fmt::Display for WitnessPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.constraint_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// JSON shape of a witness: variables and rows of bits, or constraint lines.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum WitnessJson {
    Team {
        variables: Vec<String>,
        rows: Vec<Vec<u8>>,
    },
    Constraints {
        variables: Vec<String>,
        constraints: Vec<String>,
    },
}

impl Witness {
    pub fn to_json(&self, format: WitnessFormat) -> WitnessJson {
        match (format, self) {
            (WitnessFormat::Constraints, Witness::Team(_, Some(p)))
            | (_, Witness::Constraints(p)) => WitnessJson::Constraints {
                variables: p.universe.clone(),
                constraints: p.constraint_lines(),
            },
            (_, Witness::Team(t, _)) => WitnessJson::Team {
                variables: t.universe().to_vec(),
                rows: t
                    .bit_rows()
                    .iter()
                    .map(|r| r.0.iter().map(|&b| b as u8).collect())
                    .collect(),
            },
        }
    }

    pub fn render(&self, format: WitnessFormat) -> String {
        match (format, self) {
            (WitnessFormat::None, _) => String::new(),
            (WitnessFormat::Table, Witness::Team(t, _)) => t.to_string(),
            (_, Witness::Constraints(p))
            | (WitnessFormat::Constraints, Witness::Team(_, Some(p))) => p.to_string(),
            (WitnessFormat::Constraints, Witness::Team(t, None)) => t.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::SaturationConfig;
    use crate::syntax::parse_problem;

    fn seqs(v: &[&str]) -> Vec<Sequence> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn c_for_table_three() {
        let c = choose_c(
            &"p1 p2".parse().unwrap(),
            &seqs(&["#F #F", "#T #T", "#F #T", "q1 q2"]),
            None,
        )
        .unwrap();
        assert_eq!(c.to_string(), "10");
    }

    #[test]
    fn c_without_candidates_is_least() {
        let c = choose_c(&"p1 p2".parse().unwrap(), &[], None).unwrap();
        assert_eq!(c.to_string(), "00");
    }

    #[test]
    fn c_fails_on_full_coverage() {
        let all = seqs(&["#F #F", "#F #T", "#T #F", "#T #T"]);
        assert_eq!(
            choose_c(&"p1 p2".parse().unwrap(), &all, None),
            Err(Error::CoverageComplete)
        );
    }

    #[test]
    fn c_respects_classes() {
        let classes = derivable_equalities_over(["p1", "p2"], &["p1 <= #T".parse().unwrap()]);
        let c = choose_c(&"p1 p2".parse().unwrap(), &[], Some(&classes)).unwrap();
        assert_eq!(c.to_string(), "10");
    }

    #[test]
    fn table_one_team() {
        let p = parse_problem(
            "dialect: repetitions\nassume: y1 y2 <= z1 z1\nassume: x1 z1 <= z1 z1\nquery: x1 x2 <= y1 y2\n",
        )
        .unwrap();
        let sat = Saturation::run(&p, &SaturationConfig::default()).unwrap();
        let plan = plan(&p, &sat).unwrap();
        assert!(plan.stop_branch);
        let t = build_counterexample(&plan).unwrap();
        assert_eq!(t.len(), 8);
        assert!(verify_counterexample(&p, &t));
    }

    #[test]
    fn empty_and_full_teams_do_not_verify() {
        let p = parse_problem(
            "assume: #F #F <= q1 q2\nassume: #T #T <= q1 q2\nassume: #F #T <= q1 q2\nquery: p1 p2 <= q1 q2\n",
        )
        .unwrap();
        let vars = p.variables();
        assert!(!verify_counterexample(&p, &Team::empty(vars.clone())));
        assert!(!verify_counterexample(&p, &Team::full(vars).unwrap()));
    }
}

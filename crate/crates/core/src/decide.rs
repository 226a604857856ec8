//! The implication decider and the reachability check for normalized problems.

use std::cell::RefCell;
use std::collections::{BTreeSet, VecDeque};
use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::calculus::{
    derivable_equalities_over, normalize, DerivationTrace, EqualityClasses, Rule, RuleStep,
    Saturation, SaturationConfig, StepDetail, TraceStep,
};
use crate::error::{Error, Result};
use crate::semantics::{satisfies, BitTuple, Team};
use crate::syntax::{Atom, Dialect, Problem, Sequence, Symbol};
use crate::witness::{
    build_counterexample, choose_c, exact_refutation, fallback_tuples_for, plan_with, stop_branch,
    Witness, WitnessFormat, WitnessJson, WitnessPlan, MATERIALIZE_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Entailed(DerivationTrace),
    NotEntailed(Witness),
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed(_))
    }

    pub fn trace(&self) -> Option<&DerivationTrace> {
        match self {
            Verdict::Entailed(t) => Some(t),
            Verdict::NotEntailed(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Entailed(_) => None,
            Verdict::NotEntailed(w) => Some(w),
        }
    }

    pub fn team(&self) -> Option<&Team> {
        match self.witness() {
            Some(Witness::Team(t, _)) => Some(t),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        if self.is_entailed() {
            "entailed"
        } else {
            "not-entailed"
        }
    }

    /// The machine-readable form; the trace is included only when asked for.
    pub fn to_json(
        &self,
        assumptions: &[Atom],
        with_trace: bool,
        witness: WitnessFormat,
    ) -> VerdictJson {
        VerdictJson {
            verdict: self.name(),
            trace: match self {
                Verdict::Entailed(t) if with_trace => Some(t.lines(assumptions)),
                _ => None,
            },
            witness: match self {
                Verdict::NotEntailed(w) if witness != WitnessFormat::None => {
                    Some(w.to_json(witness))
                }
                _ => None,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

/// The one-step derivation of a trivial atom.
pub fn identity_trace(a: &Atom) -> DerivationTrace {
    DerivationTrace {
        target: a.clone(),
        steps: vec![TraceStep {
            step: RuleStep::new(Rule::I1, vec![], a.clone(), StepDetail::None),
            sources: vec![],
        }],
    }
}

/// Decides `Σ ⊨ query` with default limits.
pub fn decide(p: &Problem) -> Result<Verdict> {
    decide_with(p, &SaturationConfig::default())
}

pub fn decide_with(p: &Problem, config: &SaturationConfig) -> Result<Verdict> {
    if p.query.is_trivial() {
        return Ok(Verdict::Entailed(identity_trace(&p.query)));
    }
    let bound = config
        .bound
        .unwrap_or_else(|| crate::calculus::minimal_bound(p));
    let decider = Decider::new(
        p.dialect,
        &p.assumptions,
        &p.variables(),
        bound,
        config.budget,
    )?;
    decider.decide(&p.query)
}

/// A constructed team, or `None` when it violates an assumption.
type CachedTeam = Option<Rc<Team>>;

/// Assumptions saturated once over a fixed universe, answering many queries.
///
/// Queries must use only the universe's variables and have arity at most
/// the bound; for each such query the answer equals [`decide`] on the problem
/// whose variables are exactly the universe.
pub struct Decider {
    dialect: Dialect,
    assumptions: Vec<Atom>,
    universe: Vec<String>,
    sat: Saturation,
    classes: EqualityClasses,
    /// Keyed by right side and forbidden tuple.
    teams: RefCell<FxHashMap<Sequence, FxHashMap<Vec<bool>, CachedTeam>>>,
    stop_team: RefCell<Option<Option<Rc<Team>>>>,
    derivables: RefCell<FxHashMap<Sequence, Rc<Vec<Sequence>>>>,
}

impl Decider {
    pub fn new(
        dialect: Dialect,
        assumptions: &[Atom],
        universe: &[String],
        bound: usize,
        budget: u128,
    ) -> Result<Self> {
        let mut universe = universe.to_vec();
        universe.sort();
        universe.dedup();
        let mut seen = BTreeSet::new();
        let assumptions: Vec<Atom> = assumptions
            .iter()
            .filter(|a| seen.insert((*a).clone()))
            .cloned()
            .collect();
        let sat = Saturation::over(dialect, &assumptions, &universe, bound, budget)?;
        let classes = derivable_equalities_over(&universe, &assumptions);
        Ok(Decider {
            dialect,
            assumptions,
            universe,
            sat,
            classes,
            teams: Default::default(),
            stop_team: Default::default(),
            derivables: Default::default(),
        })
    }

    pub fn saturation(&self) -> &Saturation {
        &self.sat
    }

    pub fn classes(&self) -> &EqualityClasses {
        &self.classes
    }

    pub fn assumptions(&self) -> &[Atom] {
        &self.assumptions
    }

    fn problem(&self, query: &Atom) -> Problem {
        Problem {
            dialect: self.dialect,
            assumptions: self.assumptions.clone(),
            query: query.clone(),
        }
    }

    /// The counterexample plan for a query.
    pub fn plan(&self, query: &Atom) -> Result<WitnessPlan> {
        let mut plan = plan_with(&self.problem(query), &self.sat, self.classes.clone())?;
        plan.universe = self.universe.clone();
        Ok(plan)
    }

    pub fn decide(&self, query: &Atom) -> Result<Verdict> {
        if query.is_trivial() {
            return Ok(Verdict::Entailed(identity_trace(query)));
        }
        if let Some(t) = self.sat.trace(query) {
            return Ok(Verdict::Entailed(t));
        }
        if query.arity() > self.sat.bound() {
            return Err(Error::PreconditionViolated(format!(
                "query arity {} exceeds the saturation bound {}",
                query.arity(),
                self.sat.bound()
            )));
        }
        if let Some(v) = query
            .vars()
            .into_iter()
            .find(|v| !self.universe.iter().any(|u| u == v))
        {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        if self.classes.contradiction() {
            return Err(Error::WitnessVerificationFailed(
                "#T and #F are derivably equal but #T <= #F was not derived".into(),
            ));
        }
        if self.universe.len() > MATERIALIZE_LIMIT {
            return Ok(Verdict::NotEntailed(Witness::Constraints(
                self.plan(query)?,
            )));
        }
        let (plan, team) = self.refutation(query)?;
        Ok(Verdict::NotEntailed(Witness::Team(team, plan)))
    }

    /// Like [`Decider::decide`] but only the yes/no answer, with the witness still checked.
    pub fn entails(&self, query: &Atom) -> Result<bool> {
        if query.is_trivial() || self.sat.contains(query) {
            return Ok(true);
        }
        if self.classes.contradiction() || self.universe.len() > MATERIALIZE_LIMIT {
            return self.decide(query).map(|v| v.is_entailed());
        }
        self.team_for(query).map(|_| false)
    }

    /// The plan and team refuting a non-derived query.
    ///
    /// The plan's own tuple is tried first, then [`crate::witness::fallback_tuples`]; the
    /// first team that satisfies every assumption and refutes the query wins.
    /// When none does, [`exact_refutation`] searches all teams; if that finds
    /// nothing either, the query holds in every model without a derivation
    /// and the result is [`Error::Underivable`].
    pub fn refutation(&self, query: &Atom) -> Result<(Option<WitnessPlan>, Team)> {
        let (c, team) = self.team_for(query)?;
        let plan = match c {
            Some(c) => {
                let mut plan = self.plan(query)?;
                plan.forbidden_tuple = c;
                Some(plan)
            }
            None => None,
        };
        Ok((plan, (*team).clone()))
    }

    /// The team refuting the query, with the forbidden tuple it was built
    /// from (`None` when it came from the exhaustive search).
    fn team_for(&self, query: &Atom) -> Result<(Option<Option<BitTuple>>, Rc<Team>)> {
        if stop_branch(&self.classes, query) {
            if let Some(team) = self.cached_team(query, None)? {
                if !satisfies(&team, query)? {
                    return Ok((Some(None), team));
                }
            }
        } else {
            let w = self.derivables(&query.rhs);
            let first = if self.dialect.has_constants() {
                choose_c(&query.lhs, &w, Some(&self.classes))?
            } else {
                BitTuple::zeros(query.arity())
            };
            if let Some(team) = self.cached_team(query, Some(&first))? {
                if !satisfies(&team, query)? {
                    return Ok((Some(Some(first)), team));
                }
            }
            for c in fallback_tuples_for(&self.classes, query, &first)? {
                if let Some(team) = self.cached_team(query, Some(&c))? {
                    if !satisfies(&team, query)? {
                        return Ok((Some(Some(c)), team));
                    }
                }
            }
        }
        match exact_refutation(&self.universe, &self.assumptions, query)? {
            Some(team) => Ok((None, Rc::new(team))),
            None => Err(Error::Underivable(query.to_string())),
        }
    }

    fn derivables(&self, rhs: &Sequence) -> Rc<Vec<Sequence>> {
        if let Some(w) = self.derivables.borrow().get(rhs) {
            return w.clone();
        }
        let w = Rc::new(self.sat.with_rhs(rhs));
        self.derivables.borrow_mut().insert(rhs.clone(), w.clone());
        w
    }

    /// The constructed team for the query's right side and forbidden tuple
    /// (`None` in the stop branch), or `None` if it violates an assumption.
    fn cached_team(&self, query: &Atom, c: Option<&BitTuple>) -> Result<Option<Rc<Team>>> {
        let cached = match c {
            Some(c) => self
                .teams
                .borrow()
                .get(&query.rhs)
                .and_then(|m| m.get(&c.0).cloned()),
            None => self.stop_team.borrow().clone(),
        };
        if let Some(t) = cached {
            return Ok(t);
        }
        let plan = WitnessPlan {
            universe: self.universe.clone(),
            classes: self.classes.clone(),
            forbidden_tuple: c.cloned(),
            forbidden_sequences: if c.is_some() {
                self.derivables(&query.rhs).to_vec()
            } else {
                Vec::new()
            },
            stop_branch: c.is_none(),
        };
        let team = build_counterexample(&plan)?;
        let mut admitted = true;
        for a in &self.assumptions {
            if !satisfies(&team, a)? {
                admitted = false;
                break;
            }
        }
        let team = admitted.then(|| Rc::new(team));
        match c {
            Some(c) => {
                self.teams
                    .borrow_mut()
                    .entry(query.rhs.clone())
                    .or_default()
                    .insert(c.0.clone(), team.clone());
            }
            None => *self.stop_team.borrow_mut() = Some(team.clone()),
        }
        Ok(team)
    }
}

/// A map from positions of a state to positions of an assumption's left side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceMap(pub Vec<usize>);

impl SequenceMap {
    /// All maps `f` with `s_i = u_{f(i)}`.
    pub fn matches(s: &[Symbol], u: &[Symbol]) -> Vec<SequenceMap> {
        let choices: Vec<Vec<usize>> = s
            .iter()
            .map(|x| (0..u.len()).filter(|&j| u[j] == *x).collect())
            .collect();
        if choices.iter().any(Vec::is_empty) {
            return Vec::new();
        }
        let mut out = vec![Vec::with_capacity(s.len())];
        for c in &choices {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    c.iter().map(move |&j| {
                        let mut next = prefix.clone();
                        next.push(j);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(SequenceMap).collect()
    }

    /// `v ∘ f`.
    pub fn apply(&self, v: &[Symbol]) -> Vec<Symbol> {
        self.0.iter().map(|&j| v[j].clone()).collect()
    }
}

/// Largest number of states the reachability search visits.
pub const REACH_STATE_BUDGET: usize = 1 << 22;

/// Reachability from the query's left side to its right side over the
/// normalized assumptions.
///
/// In the Boolean dialect every assumption `u ⊆ v` is used as `u#T#F ⊆ v#T#F`,
/// so constants in a state can be carried across. B3 has no counterpart here.
pub fn reach_entails(p: &Problem) -> Result<bool> {
    reach_entails_with(p, REACH_STATE_BUDGET)
}

/// [`reach_entails`] with an explicit bound on the number of visited states.
pub fn reach_entails_with(p: &Problem, budget: usize) -> Result<bool> {
    let n = normalize(p);
    if n.classes.contradiction() {
        return Ok(true);
    }
    if !n.obligations_hold() {
        return Ok(false);
    }
    let query = &n.problem.query;
    let mut rules: Vec<(Vec<Symbol>, Vec<Symbol>)> = n
        .problem
        .assumptions
        .iter()
        .map(|a| (a.lhs.0.clone(), a.rhs.0.clone()))
        .collect();
    if p.dialect.has_constants() {
        for (u, v) in &mut rules {
            u.extend([Symbol::Top, Symbol::Bot]);
            v.extend([Symbol::Top, Symbol::Bot]);
        }
    }
    let start = query.lhs.0.clone();
    let goal = query.rhs.0.clone();
    let mut seen: FxHashSet<Vec<Symbol>> = FxHashSet::default();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(s) = queue.pop_front() {
        if s == goal {
            return Ok(true);
        }
        for (u, v) in &rules {
            for f in SequenceMap::matches(&s, u) {
                let next = f.apply(v);
                if seen.insert(next.clone()) {
                    if seen.len() > budget {
                        return Err(Error::CapExceeded {
                            what: "reachability states",
                            size: seen.len() as u128,
                            cap: budget as u128,
                        });
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(false)
}

/// All `w` of the right side's length with `w ⊆ rhs` derivable from the assumptions.
pub fn derivable_set(p: &Problem, rhs: &Sequence) -> Result<Vec<Sequence>> {
    if rhs.len() != p.query.arity() {
        return Err(Error::PreconditionViolated(format!(
            "`{rhs}` does not have the query's arity {}",
            p.query.arity()
        )));
    }
    let sat = Saturation::run(p, &SaturationConfig::default())?;
    Ok(sat.with_rhs(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_problem;
    use crate::witness::verify_counterexample;

    fn problem(text: &str) -> Problem {
        parse_problem(text).unwrap()
    }

    fn entailed(text: &str) -> DerivationTrace {
        let p = problem(text);
        match decide(&p).unwrap() {
            Verdict::Entailed(t) => {
                t.replay(&p.assumptions).unwrap();
                assert_eq!(t.target, p.query);
                t
            }
            Verdict::NotEntailed(_) => panic!("expected entailment for {text}"),
        }
    }

    fn refuted(text: &str) -> Team {
        let p = problem(text);
        match decide(&p).unwrap() {
            Verdict::NotEntailed(Witness::Team(t, _)) => {
                assert!(verify_counterexample(&p, &t));
                t
            }
            other => panic!("expected a team for {text}, got {other:?}"),
        }
    }

    #[test]
    fn trivial_and_contradictory() {
        assert_eq!(entailed("query: x <= x\n").rules(), vec![Rule::I1]);
        let t = entailed("assume: #T <= #F\nquery: a b <= c d\n");
        assert_eq!(t.rules().last(), Some(&Rule::B1));
    }

    #[test]
    fn reference_examples() {
        assert_eq!(
            refuted("dialect: repetitions\nassume: y1 y2 <= z1 z1\nassume: x1 z1 <= z1 z1\nquery: x1 x2 <= y1 y2\n").len(),
            8
        );
        let t = entailed("assume: #T p2 <= q1 q2\nassume: #F p2 <= q1 q2\nquery: p1 p2 <= q1 q2\n");
        assert_eq!(t.rules(), vec![Rule::B3]);
        let table3 = "assume: #F #F <= q1 q2\nassume: #T #T <= q1 q2\nassume: #F #T <= q1 q2\nassume: r1 <= r1\nquery: p1 p2 <= q1 q2\n";
        assert_eq!(refuted(table3).len(), 24);
    }

    #[test]
    fn reachability_examples() {
        assert!(reach_entails(&problem(
            "dialect: repetition-free\nassume: x <= z\nassume: z <= y\nquery: x <= y\n"
        ))
        .unwrap());
        assert!(reach_entails(&problem(
            "dialect: repetition-free\nassume: x1 x2 <= u1 u2\nquery: x2 x1 <= u2 u1\n"
        ))
        .unwrap());
        assert!(!reach_entails(&problem(
            "dialect: repetitions\nassume: y1 y2 <= z1 z1\nquery: x1 <= y1\n"
        ))
        .unwrap());
    }

    #[test]
    fn sequence_maps_allow_duplication_and_projection() {
        let s: Vec<Symbol> = "a a".parse::<Sequence>().unwrap().0;
        let u: Vec<Symbol> = "a b".parse::<Sequence>().unwrap().0;
        let maps = SequenceMap::matches(&s, &u);
        assert_eq!(maps, vec![SequenceMap(vec![0, 0])]);
        let v: Vec<Symbol> = "c d".parse::<Sequence>().unwrap().0;
        assert_eq!(maps[0].apply(&v), "c c".parse::<Sequence>().unwrap().0);
    }

    #[test]
    fn derivable_sets() {
        let p = problem("query: y1 y2 <= y1 y2\n");
        let w = derivable_set(&p, &"y1 y2".parse().unwrap()).unwrap();
        assert!(w.contains(&"y1 y2".parse().unwrap()));
        let t2 = problem(
            "dialect: repetitions\nassume: y2 z1 <= z1 z1\nassume: x1 z1 <= y1 y2\nquery: x1 x2 <= y1 y2\n",
        );
        let w = derivable_set(&t2, &"y1 y2".parse().unwrap()).unwrap();
        assert!(w.contains(&"x1 z1".parse().unwrap()));
        assert!(w.contains(&"x1 y2".parse().unwrap()));
    }
}

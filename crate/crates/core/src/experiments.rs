//! Executable checks of two standalone results: no Armstrong team exists for
//! `{p1 ⊆ p2}` over three variables, and the `(n+1)`-premise instance of B3
//! is not derivable with fewer premises.

use std::fmt;

use serde::Serialize;

use crate::calculus::{b3_coverage, Rule};
use crate::decide::{decide, Decider, Verdict};
use crate::error::{Error, Result};
use crate::oracle::{oracle_check, AtomRows, DEFAULT_ORACLE_CAP};
use crate::semantics::{enumerate_teams, satisfies, Team};
use crate::syntax::{Atom, Dialect, Problem, Sequence, Symbol};

fn atom(s: &str) -> Atom {
    s.parse().expect("well-formed atom literal")
}

#[derive(Clone, Debug, Serialize)]
pub struct ArmstrongReport {
    pub teams_examined: usize,
    pub satisfying_sigma: usize,
    pub only_first: usize,
    pub only_second: usize,
    pub both: usize,
    /// Teams satisfying `p1 ⊆ p2` but neither disjunct; zero when the gap holds.
    pub neither: usize,
    pub first_entailed: bool,
    pub second_entailed: bool,
    /// Least teams separating each disjunct from `p1 ⊆ p2`.
    pub first_separating: Option<String>,
    pub second_separating: Option<String>,
    pub confirmed: bool,
}

impl fmt::Display for ArmstrongReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe p1 p2 p3, assumption p1 <= p2")?;
        writeln!(f, "teams examined: {}", self.teams_examined)?;
        writeln!(f, "teams satisfying p1 <= p2: {}", self.satisfying_sigma)?;
        writeln!(f, "  only p3 <= p2: {}", self.only_first)?;
        writeln!(f, "  only p2 <= p1: {}", self.only_second)?;
        writeln!(f, "  both: {}", self.both)?;
        writeln!(f, "  neither: {}", self.neither)?;
        writeln!(f, "p1 <= p2 entails p3 <= p2: {}", self.first_entailed)?;
        writeln!(f, "p1 <= p2 entails p2 <= p1: {}", self.second_entailed)?;
        if self.confirmed {
            write!(f, "gap confirmed over {} teams", self.teams_examined)
        } else {
            write!(f, "gap NOT confirmed")
        }
    }
}

/// Sweeps all 256 teams over `{p1, p2, p3}`.
pub fn check_armstrong_gap() -> Result<ArmstrongReport> {
    let universe: Vec<String> = ["p1", "p2", "p3"].iter().map(|s| s.to_string()).collect();
    let sigma = atom("p1 <= p2");
    let first = atom("p3 <= p2");
    let second = atom("p2 <= p1");
    let mut r = ArmstrongReport {
        teams_examined: 0,
        satisfying_sigma: 0,
        only_first: 0,
        only_second: 0,
        both: 0,
        neither: 0,
        first_entailed: true,
        second_entailed: true,
        first_separating: None,
        second_separating: None,
        confirmed: false,
    };
    for team in enumerate_teams(&universe, 3)? {
        r.teams_examined += 1;
        if !satisfies(&team, &sigma)? {
            continue;
        }
        r.satisfying_sigma += 1;
        match (satisfies(&team, &first)?, satisfies(&team, &second)?) {
            (true, true) => r.both += 1,
            (true, false) => r.only_first += 1,
            (false, true) => r.only_second += 1,
            (false, false) => r.neither += 1,
        }
    }
    let problem = |q: &Atom| Problem {
        dialect: Dialect::RepetitionFree,
        assumptions: vec![sigma.clone(), atom("p3 <= p3")],
        query: q.clone(),
    };
    let a1 = oracle_check(&problem(&first), DEFAULT_ORACLE_CAP)?;
    let a2 = oracle_check(&problem(&second), DEFAULT_ORACLE_CAP)?;
    r.first_entailed = a1.entailed;
    r.second_entailed = a2.entailed;
    r.first_separating = a1.separating.map(|t| t.to_string());
    r.second_separating = a2.separating.map(|t| t.to_string());
    r.confirmed =
        r.teams_examined == 256 && r.neither == 0 && !r.first_entailed && !r.second_entailed;
    Ok(r)
}

fn seq(names: impl IntoIterator<Item = String>) -> Sequence {
    Sequence(names.into_iter().map(Symbol::Var).collect())
}

fn ps(n: usize) -> Sequence {
    seq((1..=n).map(|i| format!("p{i}")))
}

fn qs(n: usize) -> Sequence {
    seq((1..=n).map(|i| format!("q{i}")))
}

/// The assumption set `B` and the conclusion `p ⊆ q` of the rule at arity `n`.
///
/// `B` holds `#F^n ⊆ q` and, for each `i`, `p` with `p_i` replaced by `#T`.
pub fn rule_star_instance(n: usize) -> Result<(Vec<Atom>, Atom)> {
    if n == 0 {
        return Err(Error::PreconditionViolated(
            "arity must be at least 1".into(),
        ));
    }
    let p = ps(n);
    let q = qs(n);
    let mut b = vec![Atom {
        lhs: Sequence(vec![Symbol::Bot; n]),
        rhs: q.clone(),
    }];
    for i in 0..n {
        let mut r = p.clone();
        r.0[i] = Symbol::Top;
        b.push(Atom {
            lhs: r,
            rhs: q.clone(),
        });
    }
    Ok((b, Atom { lhs: p, rhs: q }))
}

/// Variables of the catalogue teams: `p1..pn`, `q1..qn`, `r1..r_fresh`, sorted by name.
pub fn catalogue_universe(n: usize, fresh: usize) -> Vec<String> {
    let mut u: Vec<String> = (1..=n)
        .map(|i| format!("p{i}"))
        .chain((1..=n).map(|i| format!("q{i}")))
        .chain((1..=fresh).map(|i| format!("r{i}")))
        .collect();
    u.sort();
    u
}

/// Teams satisfying `B`, named by shape.
///
/// * `T1`: `p = 1^n`, `q ∈ {1^n, 0^n}`; fresh variables take all values.
/// * `T2`: `p = 0^n`, `q` has at most one 1; fresh variables take all values.
/// * `onehot-pj`: `p = e_j`, `q ∈ {0^n, e_j} ∪ {e_j + e_l}`; fresh variables 0.
/// * `zeroat-pj`: `p` is `1^n` except `p_j = 0`, `q ∈ {1^n, p, 0^n}`; fresh variables 1.
pub fn catalogue_teams(n: usize, fresh: usize) -> Result<Vec<(String, Team)>> {
    if n < 2 {
        return Err(Error::PreconditionViolated(
            "the catalogue needs n >= 2".into(),
        ));
    }
    let universe = catalogue_universe(n, fresh);
    let ones: Vec<bool> = vec![true; n];
    let zeros: Vec<bool> = vec![false; n];
    let unit = |j: usize| -> Vec<bool> { (0..n).map(|i| i == j).collect() };
    let build = |rows: Vec<(Vec<bool>, Vec<bool>)>, fresh_values: &[Vec<bool>]| -> Result<Team> {
        let mut codes = Vec::new();
        for (p, q) in &rows {
            for r in fresh_values {
                let value = |name: &str| -> bool {
                    let (kind, idx) = name.split_at(1);
                    let i: usize = idx.parse().expect("indexed name");
                    match kind {
                        "p" => p[i - 1],
                        "q" => q[i - 1],
                        _ => r[i - 1],
                    }
                };
                let code = universe
                    .iter()
                    .fold(0u64, |acc, v| acc << 1 | value(v) as u64);
                codes.push(code);
            }
        }
        Team::new(universe.clone(), codes)
    };
    let all_fresh: Vec<Vec<bool>> = (0..1u64 << fresh)
        .map(|c| (0..fresh).map(|i| c >> (fresh - 1 - i) & 1 == 1).collect())
        .collect();
    let fresh_zero = vec![vec![false; fresh]];
    let fresh_one = vec![vec![true; fresh]];

    let mut out = Vec::new();
    out.push((
        "T1".to_string(),
        build(
            vec![(ones.clone(), ones.clone()), (ones.clone(), zeros.clone())],
            &all_fresh,
        )?,
    ));
    let mut t2 = vec![(zeros.clone(), zeros.clone())];
    t2.extend((0..n).map(|i| (zeros.clone(), unit(i))));
    out.push(("T2".to_string(), build(t2, &all_fresh)?));
    for j in 0..n {
        let p = unit(j);
        let mut rows = vec![(p.clone(), zeros.clone()), (p.clone(), p.clone())];
        for l in (0..n).filter(|&l| l != j) {
            let mut q = p.clone();
            q[l] = true;
            rows.push((p.clone(), q));
        }
        out.push((format!("onehot-p{}", j + 1), build(rows, &fresh_zero)?));
    }
    for j in 0..n {
        let mut p = ones.clone();
        p[j] = false;
        let rows = vec![
            (p.clone(), ones.clone()),
            (p.clone(), p.clone()),
            (p.clone(), zeros.clone()),
        ];
        out.push((format!("zeroat-p{}", j + 1), build(rows, &fresh_one)?));
    }
    Ok(out)
}

/// How a candidate `u ⊆ q` of the sweep was settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    /// Member of `B ∪ {p ⊆ q, q ⊆ q}` and derivable.
    Allowed,
    /// Refuted by the named catalogue team.
    Catalogue { team: String },
    /// No catalogue team refutes it, but the decider's counterexample does.
    Witness { rows: usize },
    /// Follows from `B` although it is not among the allowed consequences.
    Entailed { rules: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Independence {
    pub assumption: String,
    /// Source of the team: `oracle`, `decider` or a catalogue id.
    pub source: String,
    pub team: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub candidate: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoKaryReport {
    pub n: usize,
    pub assumptions: Vec<String>,
    pub conclusion: String,
    /// Premise count of the final B3 step deriving the conclusion from `B`.
    pub b3_premises: Option<usize>,
    pub coverage_holds: bool,
    pub independence: Vec<Independence>,
    /// Proper subsets of `B` (as index lists) that still entail the conclusion.
    pub entailing_proper_subsets: Vec<Vec<usize>>,
    pub proper_subsets_checked: usize,
    pub catalogue: Vec<(String, bool)>,
    pub sweep: Vec<SweepEntry>,
}

impl NoKaryReport {
    pub fn allowed_consequences(&self) -> Vec<&str> {
        self.entries(|o| matches!(o, Outcome::Allowed))
    }

    pub fn extra_consequences(&self) -> Vec<&str> {
        self.entries(|o| matches!(o, Outcome::Entailed { .. }))
    }

    pub fn catalogue_gaps(&self) -> Vec<&str> {
        self.entries(|o| matches!(o, Outcome::Witness { .. }))
    }

    fn entries(&self, keep: impl Fn(&Outcome) -> bool) -> Vec<&str> {
        self.sweep
            .iter()
            .filter(|e| keep(&e.outcome))
            .map(|e| e.candidate.as_str())
            .collect()
    }

    /// Whether the rule needs exactly `n+1` premises.
    pub fn tight(&self) -> bool {
        self.b3_premises == Some(self.n + 1)
            && self.entailing_proper_subsets.is_empty()
            && self.independence.iter().all(|i| i.verified)
    }

    /// Whether every candidate outside the allowed set has a catalogue refutation.
    pub fn sweep_complete(&self) -> bool {
        self.extra_consequences().is_empty() && self.catalogue_gaps().is_empty()
    }

    pub fn confirmed(&self) -> bool {
        self.tight()
            && self.coverage_holds
            && self.catalogue.iter().all(|(_, ok)| *ok)
            && self.sweep_complete()
    }
}

impl fmt::Display for NoKaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "B:")?;
        for a in &self.assumptions {
            writeln!(f, "  {a}")?;
        }
        writeln!(f, "conclusion: {}", self.conclusion)?;
        writeln!(f, "B3 coverage: {}", self.coverage_holds)?;
        match self.b3_premises {
            Some(k) => writeln!(f, "derived by a B3 step with {k} premises")?,
            None => writeln!(f, "not derived by a final B3 step")?,
        }
        writeln!(f)?;
        writeln!(f, "independence:")?;
        for i in &self.independence {
            writeln!(
                f,
                "  {:<28} {:<12} {}",
                i.assumption,
                i.source,
                if i.verified { "ok" } else { "FAILED" }
            )?;
        }
        writeln!(
            f,
            "proper subsets checked: {}, still entailing: {}",
            self.proper_subsets_checked,
            self.entailing_proper_subsets.len()
        )?;
        writeln!(f)?;
        writeln!(f, "catalogue:")?;
        for (id, ok) in &self.catalogue {
            writeln!(
                f,
                "  {:<12} {}",
                id,
                if *ok { "satisfies B" } else { "VIOLATES B" }
            )?;
        }
        writeln!(f)?;
        writeln!(f, "sweep over u <= {}:", qs(self.n))?;
        for e in &self.sweep {
            let how = match &e.outcome {
                Outcome::Allowed => "allowed".to_string(),
                Outcome::Catalogue { team } => format!("x  refuted by {team}"),
                Outcome::Witness { rows } => {
                    format!("x  refuted by a {rows}-row decider team (no catalogue team)")
                }
                Outcome::Entailed { rules } => format!("ENTAILED ({})", rules.join(" ")),
            };
            writeln!(f, "  {:<28} {how}", e.candidate)?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "allowed {}, catalogue-refuted {}, decider-refuted {}, extra consequences {}",
            self.allowed_consequences().len(),
            self.sweep
                .iter()
                .filter(|e| matches!(e.outcome, Outcome::Catalogue { .. }))
                .count(),
            self.catalogue_gaps().len(),
            self.extra_consequences().len()
        )?;
        write!(
            f,
            "{}",
            if self.confirmed() {
                "confirmed"
            } else {
                "NOT confirmed"
            }
        )
    }
}

fn b3_premise_count(v: &Verdict) -> Option<usize> {
    let step = &v.trace()?.steps.last()?.step;
    (step.rule == Rule::B3).then_some(step.premises.len())
}

fn boolean(assumptions: Vec<Atom>, query: Atom) -> Problem {
    Problem {
        dialect: Dialect::BooleanConstants,
        assumptions,
        query,
    }
}

fn refutes(t: &Team, b: &[Atom], q: &Atom) -> Result<bool> {
    for a in b {
        if !satisfies(t, a)? {
            return Ok(false);
        }
    }
    Ok(!satisfies(t, q)?)
}

/// Runs both claims for arity `n ∈ {2, 3}`, sweeping candidates with one fresh variable.
pub fn check_no_kary(n: usize) -> Result<NoKaryReport> {
    check_no_kary_with(n, 1)
}

pub fn check_no_kary_with(n: usize, fresh: usize) -> Result<NoKaryReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::PreconditionViolated(format!(
            "n must be 2 or 3, got {n}"
        )));
    }
    let (b, conclusion) = rule_star_instance(n)?;
    let coverage_holds = b3_coverage(&b, &conclusion)?.covered;
    let full = decide(&boolean(b.clone(), conclusion.clone()))?;
    let b3_premises = b3_premise_count(&full);

    let pq_universe = catalogue_universe(n, 0);
    let mut independence = Vec::new();
    for (k, target) in b.iter().enumerate() {
        let rest: Vec<Atom> = b
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, a)| a.clone())
            .collect();
        let mut found: Option<(String, Team)> = None;
        if pq_universe.len() <= DEFAULT_ORACLE_CAP {
            // Least team satisfying the rest and refuting both target and conclusion.
            let rows: Vec<AtomRows> = rest
                .iter()
                .map(|a| AtomRows::new(&pq_universe, a))
                .collect::<Result<_>>()?;
            let t_rows = AtomRows::new(&pq_universe, target)?;
            let c_rows = AtomRows::new(&pq_universe, &conclusion)?;
            let teams = 1u64 << (1u64 << pq_universe.len());
            found = (0..teams)
                .find(|&m| {
                    rows.iter().all(|r| r.satisfied_by(m))
                        && !t_rows.satisfied_by(m)
                        && !c_rows.satisfied_by(m)
                })
                .map(|m| {
                    (
                        "oracle".to_string(),
                        crate::semantics::team_from_mask(&pq_universe, m),
                    )
                });
        }
        if found.is_none() {
            for q in [&conclusion, target] {
                if let Verdict::NotEntailed(crate::witness::Witness::Team(t, _)) =
                    decide(&boolean(rest.clone(), q.clone()))?
                {
                    if refutes(&t, &rest, target)? && !satisfies(&t, &conclusion)? {
                        found = Some(("decider".to_string(), t));
                        break;
                    }
                }
            }
        }
        independence.push(match found {
            Some((source, t)) => Independence {
                assumption: target.to_string(),
                verified: refutes(&t, &rest, target)? && !satisfies(&t, &conclusion)?,
                source,
                team: t.to_string(),
            },
            None => Independence {
                assumption: target.to_string(),
                source: "none".into(),
                team: String::new(),
                verified: false,
            },
        });
    }

    let mut entailing_proper_subsets = Vec::new();
    let mut proper_subsets_checked = 0;
    let full_mask = (1usize << b.len()) - 1;
    for mask in 0..full_mask {
        let subset: Vec<Atom> = (0..b.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| b[i].clone())
            .collect();
        proper_subsets_checked += 1;
        // The conclusion's variables stay in the universe even when the subset omits them.
        let decider = Decider::new(
            Dialect::BooleanConstants,
            &subset,
            &pq_universe,
            n,
            crate::calculus::DEFAULT_ATOM_BUDGET,
        )?;
        if decider.decide(&conclusion)?.is_entailed() {
            entailing_proper_subsets.push((0..b.len()).filter(|i| mask >> i & 1 == 1).collect());
        }
    }

    let catalogue = catalogue_teams(n, fresh)?;
    let mut catalogue_ok = Vec::new();
    for (id, t) in &catalogue {
        let mut ok = true;
        for a in &b {
            ok &= satisfies(t, a)?;
        }
        catalogue_ok.push((id.clone(), ok));
    }

    let mut symbols: Vec<Symbol> = vec![Symbol::Bot, Symbol::Top];
    symbols.extend(catalogue_universe(n, fresh).into_iter().map(Symbol::Var));
    let q = qs(n);
    let allowed: Vec<Sequence> = b
        .iter()
        .map(|a| a.lhs.clone())
        .chain([conclusion.lhs.clone(), q.clone()])
        .collect();
    let sweep_universe = catalogue_universe(n, fresh);
    let decider = Decider::new(
        Dialect::BooleanConstants,
        &b,
        &sweep_universe,
        n,
        crate::calculus::DEFAULT_ATOM_BUDGET,
    )?;
    let m = symbols.len();
    let mut sweep = Vec::new();
    for code in 0..m.pow(n as u32) {
        let u = Sequence(
            (0..n)
                .map(|i| symbols[code / m.pow((n - 1 - i) as u32) % m].clone())
                .collect(),
        );
        let cand = Atom {
            lhs: u.clone(),
            rhs: q.clone(),
        };
        let outcome = if allowed.contains(&u) {
            if !decider.decide(&cand)?.is_entailed() {
                return Err(Error::PreconditionViolated(format!(
                    "allowed consequence `{cand}` is not derived"
                )));
            }
            Outcome::Allowed
        } else if let Some((id, _)) = catalogue
            .iter()
            .zip(&catalogue_ok)
            .find(|((_, t), (_, ok))| *ok && !satisfies(t, &cand).unwrap_or(true))
            .map(|(c, _)| c)
        {
            Outcome::Catalogue { team: id.clone() }
        } else {
            match decider.decide(&cand)? {
                Verdict::Entailed(t) => Outcome::Entailed {
                    rules: t.rules().iter().map(|r| r.to_string()).collect(),
                },
                Verdict::NotEntailed(w) => Outcome::Witness {
                    rows: match w {
                        crate::witness::Witness::Team(t, _) => t.len(),
                        crate::witness::Witness::Constraints(_) => 0,
                    },
                },
            }
        };
        sweep.push(SweepEntry {
            candidate: cand.to_string(),
            outcome,
        });
    }

    Ok(NoKaryReport {
        n,
        assumptions: b.iter().map(Atom::to_string).collect(),
        conclusion: conclusion.to_string(),
        b3_premises,
        coverage_holds,
        independence,
        entailing_proper_subsets,
        proper_subsets_checked,
        catalogue: catalogue_ok,
        sweep,
    })
}

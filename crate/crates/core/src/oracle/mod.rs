//! Ground truth by enumerating every team over a small universe.
//!
//! With `n` variables there are `2^n` rows and `2^(2^n)` teams. A team is a
//! bitmask over rows. For an atom `x ⊆ y`, `need[r]` is the mask of rows whose
//! `y`-value equals row `r`'s `x`-value, so a team `T` satisfies the atom iff
//! `need[r] & T != 0` for every row `r` in `T`.

pub mod cnf;
pub mod valued;

pub use cnf::{parse_dimacs, reduce_3sat, sat_bruteforce, CnfFormula, Literal};
pub use valued::{valued_refutation, ValuedTeam};

use crate::error::{Error, Result};
use crate::semantics::{team_from_mask, Evaluator, Team};
use crate::syntax::{Atom, Problem};

/// Default variable cap: 16 rows, 65,536 teams.
pub const DEFAULT_ORACLE_CAP: usize = 4;
/// Hard variable cap: 32 rows, about 4.3 billion teams.
pub const MAX_ORACLE_CAP: usize = 5;

/// Row masks deciding one atom over a fixed universe.
#[derive(Clone, Debug)]
pub struct AtomRows {
    need: Vec<u64>,
}

impl AtomRows {
    pub fn new(universe: &[String], atom: &Atom) -> Result<Self> {
        let lhs = Evaluator::new(universe, &atom.lhs)?;
        let rhs = Evaluator::new(universe, &atom.rhs)?;
        let rows = 1u64 << universe.len();
        let need = (0..rows)
            .map(|r| {
                let v = lhs.eval(r);
                (0..rows)
                    .filter(|&t| rhs.eval(t) == v)
                    .fold(0, |m, t| m | 1 << t)
            })
            .collect();
        Ok(AtomRows { need })
    }

    #[inline]
    pub fn satisfied_by(&self, team: u64) -> bool {
        let mut rest = team;
        while rest != 0 {
            let r = rest.trailing_zeros();
            if self.need[r as usize] & team == 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }
}

/// The oracle's answer with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAnswer {
    pub entailed: bool,
    /// The least team (by mask) satisfying the assumptions but not the query.
    pub separating: Option<Team>,
    pub separating_mask: Option<u64>,
    pub teams_checked: u64,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if cap > MAX_ORACLE_CAP {
        return Err(Error::CapExceeded {
            what: "oracle variable cap",
            size: cap as u128,
            cap: MAX_ORACLE_CAP as u128,
        });
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "oracle universe",
            size: n as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// Enumerates every team over the problem's variables.
pub fn oracle_check(p: &Problem, cap: usize) -> Result<OracleAnswer> {
    let universe = p.variables();
    check_cap(universe.len(), cap)?;
    let assumptions = p
        .assumptions
        .iter()
        .map(|a| AtomRows::new(&universe, a))
        .collect::<Result<Vec<_>>>()?;
    let query = AtomRows::new(&universe, &p.query)?;
    let rows = 1u32 << universe.len();
    let count: u64 = if rows == 64 {
        u64::MAX
    } else {
        (1u64 << rows) - 1
    };
    let mut checked = 0u64;
    let mut mask = 0u64;
    loop {
        checked += 1;
        if assumptions.iter().all(|a| a.satisfied_by(mask)) && !query.satisfied_by(mask) {
            return Ok(OracleAnswer {
                entailed: false,
                separating: Some(team_from_mask(&universe, mask)),
                separating_mask: Some(mask),
                teams_checked: checked,
            });
        }
        if mask == count {
            break;
        }
        mask += 1;
    }
    Ok(OracleAnswer {
        entailed: true,
        separating: None,
        separating_mask: None,
        teams_checked: checked,
    })
}

/// Whether every team over `V(p)` satisfying the assumptions satisfies the query.
pub fn oracle_entails(p: &Problem, cap: usize) -> Result<bool> {
    oracle_check(p, cap).map(|a| a.entailed)
}

/// Satisfaction sets of atoms over a universe of at most four variables, one
/// bit per team.
#[derive(Clone, Debug)]
pub struct TeamIndex {
    universe: Vec<String>,
    teams: usize,
}

impl TeamIndex {
    pub fn new(universe: Vec<String>) -> Result<Self> {
        check_cap(universe.len(), DEFAULT_ORACLE_CAP)?;
        let teams = 1usize << (1usize << universe.len());
        Ok(TeamIndex { universe, teams })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn team_count(&self) -> usize {
        self.teams
    }

    /// Bitset over team masks of the teams satisfying the atom.
    pub fn models(&self, atom: &Atom) -> Result<Vec<u64>> {
        let rows = AtomRows::new(&self.universe, atom)?;
        let mut bits = vec![0u64; self.teams.div_ceil(64)];
        for t in 0..self.teams {
            if rows.satisfied_by(t as u64) {
                bits[t / 64] |= 1 << (t % 64);
            }
        }
        Ok(bits)
    }
}

/// Whether the models of the assumptions are included in the query's models.
pub fn models_entail(assumption_models: &[&[u64]], query_models: &[u64]) -> bool {
    (0..query_models.len()).all(|w| {
        let both = assumption_models.iter().fold(!0u64, |acc, m| acc & m[w]);
        both & !query_models[w] == 0
    })
}

/// The largest team over `universe` satisfying every atom.
///
/// Teams satisfying a set of inclusion atoms are closed under union, so this
/// is the union of all of them; computed by discarding rows whose left values
/// are not produced by the remaining rows, until stable.
pub fn largest_team(universe: &[String], atoms: &[Atom]) -> Result<Team> {
    if universe.len() > 20 {
        return Err(Error::CapExceeded {
            what: "largest-team universe",
            size: universe.len() as u128,
            cap: 20,
        });
    }
    let evs = atoms
        .iter()
        .map(|a| {
            Ok((
                Evaluator::new(universe, &a.lhs)?,
                Evaluator::new(universe, &a.rhs)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<u64> = (0..1u64 << universe.len()).collect();
    loop {
        let before = rows.len();
        for (lhs, rhs) in &evs {
            let values: rustc_hash::FxHashSet<u64> = rows.iter().map(|&r| rhs.eval(r)).collect();
            rows.retain(|&r| values.contains(&lhs.eval(r)));
        }
        if rows.len() == before {
            return Team::new(universe.to_vec(), rows);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{enumerate_teams, satisfies};
    use crate::syntax::{parse_problem, Dialect};

    fn problem(text: &str) -> Problem {
        parse_problem(text).unwrap()
    }

    #[test]
    fn converse_is_not_entailed() {
        let a = oracle_check(&problem("assume: p1 <= p2\nquery: p2 <= p1\n"), 4).unwrap();
        assert!(!a.entailed);
        // Rows 00 and 01 over (p1, p2).
        assert_eq!(a.separating_mask, Some(0b11));
        assert_eq!(a.separating.unwrap().rows(), &[0, 1]);
    }

    #[test]
    fn armstrong_pair_is_not_entailed() {
        let vars = "assume: p1 <= p2\nassume: p3 <= p3\n";
        assert!(!oracle_entails(&problem(&format!("{vars}query: p3 <= p2\n")), 4).unwrap());
        assert!(!oracle_entails(&problem(&format!("{vars}query: p2 <= p1\n")), 4).unwrap());
    }

    #[test]
    fn trivial_and_caps() {
        assert!(oracle_entails(&problem("query: x <= x\n"), 4).unwrap());
        let wide = problem("assume: a b c <= d e a\nquery: a b <= c d\nassume: e <= e\n");
        assert!(matches!(
            oracle_entails(&wide, 4),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            oracle_entails(&wide, 6),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn answers_are_deterministic() {
        let p = problem("assume: a b <= c c\nquery: c <= a\n");
        assert_eq!(oracle_check(&p, 4).unwrap(), oracle_check(&p, 4).unwrap());
    }

    #[test]
    fn row_masks_agree_with_satisfaction() {
        let universe: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        for text in ["a b <= c c", "#T a <= b c", "a <= #F", "c b <= a a"] {
            let atom: Atom = text.parse().unwrap();
            let rows = AtomRows::new(&universe, &atom).unwrap();
            for (mask, team) in enumerate_teams(&universe, 3).unwrap().enumerate() {
                assert_eq!(
                    rows.satisfied_by(mask as u64),
                    satisfies(&team, &atom).unwrap()
                );
            }
        }
    }

    #[test]
    fn index_matches_direct_oracle() {
        let universe: Vec<String> = ["p1", "p2"].iter().map(|s| s.to_string()).collect();
        let idx = TeamIndex::new(universe).unwrap();
        let a: Atom = "p1 <= p2".parse().unwrap();
        let q: Atom = "p2 <= p1".parse().unwrap();
        let ma = idx.models(&a).unwrap();
        let mq = idx.models(&q).unwrap();
        assert!(!models_entail(&[&ma], &mq));
        assert!(models_entail(&[&ma], &ma));
        let p = Problem::new(Dialect::BooleanConstants, vec![a], q).unwrap();
        assert!(!oracle_entails(&p, 4).unwrap());
    }

    #[test]
    fn largest_team_of_a_constant_atom() {
        let universe: Vec<String> = ["p1", "p2"].iter().map(|s| s.to_string()).collect();
        let t = largest_team(&universe, &["p1 <= #T".parse().unwrap()]).unwrap();
        assert_eq!(t.rows(), &[2, 3]);
        let t = largest_team(&universe, &["#F <= #T".parse().unwrap()]).unwrap();
        assert!(t.is_empty());
    }
}

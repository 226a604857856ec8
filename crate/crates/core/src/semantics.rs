//! Teams of Boolean assignments and the satisfaction relation.
//!
//! A row is a fixed-width bit pattern over the team's universe: the first
//! variable of the universe is the most significant bit, so sorting rows
//! numerically sorts them as the binary numbers they spell.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Atom, Sequence, Symbol};

/// Largest universe a row pattern can hold.
pub const MAX_ROW_WIDTH: usize = 63;

/// A tuple of bits, e.g. the value `s(x)` of a sequence under an assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitTuple(pub Vec<bool>);

impl BitTuple {
    pub fn zeros(n: usize) -> Self {
        BitTuple(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Decodes the low `n` bits of `code`, most significant first.
    pub fn from_code(code: u64, n: usize) -> Self {
        BitTuple((0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect())
    }

    pub fn code(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }
}

impl fmt::Display for BitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::PreconditionViolated(format!("`{c}` is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitTuple)
    }
}

/// One position of a compiled sequence.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Shift(u32),
    Const(bool),
}

/// A sequence compiled against a universe, evaluating rows to tuple codes.
#[derive(Clone, Debug)]
pub struct Evaluator {
    slots: Vec<Slot>,
}

impl Evaluator {
    pub fn new(universe: &[String], seq: &Sequence) -> Result<Self> {
        let width = universe.len();
        let slots = seq
            .iter()
            .map(|sym| match sym {
                Symbol::Top => Ok(Slot::Const(true)),
                Symbol::Bot => Ok(Slot::Const(false)),
                Symbol::Var(name) => universe
                    .iter()
                    .position(|v| v == name)
                    .map(|i| Slot::Shift((width - 1 - i) as u32))
                    .ok_or_else(|| Error::UnknownVariable(name.clone())),
            })
            .collect::<Result<Vec<_>>>()?;
        if slots.len() > 64 {
            return Err(Error::CapExceeded {
                what: "sequence length for evaluation",
                size: slots.len() as u128,
                cap: 64,
            });
        }
        Ok(Evaluator { slots })
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    #[inline]
    pub fn eval(&self, row: u64) -> u64 {
        self.slots.iter().fold(0u64, |acc, slot| {
            let bit = match *slot {
                Slot::Shift(s) => row >> s & 1,
                Slot::Const(b) => b as u64,
            };
            acc << 1 | bit
        })
    }
}

/// A finite set of total assignments over an ordered universe of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Team {
    universe: Vec<String>,
    rows: Vec<u64>,
}

impl Team {
    pub fn new(universe: Vec<String>, rows: impl IntoIterator<Item = u64>) -> Result<Self> {
        if universe.len() > MAX_ROW_WIDTH {
            return Err(Error::CapExceeded {
                what: "team universe",
                size: universe.len() as u128,
                cap: MAX_ROW_WIDTH as u128,
            });
        }
        let limit = 1u64 << universe.len();
        let mut rows: Vec<u64> = rows.into_iter().collect();
        if let Some(&bad) = rows.iter().find(|&&r| r >= limit) {
            return Err(Error::PreconditionViolated(format!(
                "row pattern {bad} is wider than the {}-variable universe",
                universe.len()
            )));
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(Team { universe, rows })
    }

    pub fn empty(universe: Vec<String>) -> Self {
        Team {
            universe,
            rows: Vec::new(),
        }
    }

    /// Every assignment over the universe.
    pub fn full(universe: Vec<String>) -> Result<Self> {
        let n = universe.len();
        Team::new(universe, 0..1u64 << n)
    }

    /// Builds a team from rows given as bit tuples in universe order.
    pub fn from_bit_rows(universe: Vec<String>, rows: &[BitTuple]) -> Result<Self> {
        for r in rows {
            if r.len() != universe.len() {
                return Err(Error::PreconditionViolated(format!(
                    "row {r} has {} bits for a {}-variable universe",
                    r.len(),
                    universe.len()
                )));
            }
        }
        Team::new(universe, rows.iter().map(BitTuple::code))
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn bit_rows(&self) -> Vec<BitTuple> {
        self.rows
            .iter()
            .map(|&r| BitTuple::from_code(r, self.universe.len()))
            .collect()
    }

    /// The value of a variable in a row.
    pub fn value(&self, row: u64, var: &str) -> Result<bool> {
        let i = self
            .universe
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(row >> (self.universe.len() - 1 - i) & 1 == 1)
    }

    pub fn union(&self, other: &Team) -> Result<Team> {
        if self.universe != other.universe {
            return Err(Error::PreconditionViolated(
                "union of teams over different universes".into(),
            ));
        }
        Team::new(
            self.universe.clone(),
            self.rows.iter().chain(other.rows.iter()).copied(),
        )
    }

    /// Keeps only the listed variables, in the order given.
    pub fn restrict(&self, vars: &[String]) -> Result<Team> {
        let shifts = vars
            .iter()
            .map(|v| {
                self.universe
                    .iter()
                    .position(|u| u == v)
                    .map(|i| self.universe.len() - 1 - i)
                    .ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|&r| shifts.iter().fold(0u64, |acc, &s| acc << 1 | (r >> s & 1)));
        Team::new(vars.to_vec(), rows)
    }

    pub fn contains_row(&self, row: u64) -> bool {
        self.rows.binary_search(&row).is_ok()
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.universe.join(" "))?;
        let n = self.universe.len();
        for &r in &self.rows {
            let bits: Vec<&str> = (0..n)
                .map(|i| if r >> (n - 1 - i) & 1 == 1 { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", bits.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Team {
    type Err = Error;

    /// Parses the table format: a header of variable names, then one row of bits per line.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let Some((_, header)) = lines.next() else {
            return Err(Error::TeamFormat {
                line: 1,
                message: "missing header".into(),
            });
        };
        let universe: Vec<String> = header.split_whitespace().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let bits: Vec<&str> = line.split_whitespace().collect();
            if bits.len() != universe.len() {
                return Err(Error::TeamFormat {
                    line: idx + 1,
                    message: format!("expected {} bits, found {}", universe.len(), bits.len()),
                });
            }
            let mut code = 0u64;
            for b in bits {
                code = code << 1
                    | match b {
                        "0" => 0,
                        "1" => 1,
                        other => {
                            return Err(Error::TeamFormat {
                                line: idx + 1,
                                message: format!("`{other}` is not a bit"),
                            })
                        }
                    };
            }
            rows.push(code);
        }
        Team::new(universe, rows)
    }
}

/// `T[x]`: the set of values the sequence takes across the rows of the team.
pub fn project(team: &Team, seq: &Sequence) -> Result<BTreeSet<BitTuple>> {
    let ev = Evaluator::new(&team.universe, seq)?;
    Ok(team
        .rows
        .iter()
        .map(|&r| BitTuple::from_code(ev.eval(r), ev.arity()))
        .collect())
}

/// `T ⊨ x ⊆ y` iff `T[x] ⊆ T[y]`.
pub fn satisfies(team: &Team, atom: &Atom) -> Result<bool> {
    let lhs = Evaluator::new(&team.universe, &atom.lhs)?;
    let rhs = Evaluator::new(&team.universe, &atom.rhs)?;
    Ok(satisfies_compiled(&team.rows, &lhs, &rhs))
}

pub(crate) fn satisfies_compiled(rows: &[u64], lhs: &Evaluator, rhs: &Evaluator) -> bool {
    if rows.len() <= 16 {
        let mut values = [0u64; 16];
        for (slot, &r) in values.iter_mut().zip(rows) {
            *slot = rhs.eval(r);
        }
        let values = &values[..rows.len()];
        return rows.iter().all(|&r| values.contains(&lhs.eval(r)));
    }
    let values: FxHashSet<u64> = rows.iter().map(|&r| rhs.eval(r)).collect();
    rows.iter().all(|&r| values.contains(&lhs.eval(r)))
}

/// The row-quantifier form of satisfaction: every row has a witness row with `s(x) = s'(y)`.
pub fn satisfies_by_rows(team: &Team, atom: &Atom) -> Result<bool> {
    let lhs = Evaluator::new(&team.universe, &atom.lhs)?;
    let rhs = Evaluator::new(&team.universe, &atom.rhs)?;
    Ok(team
        .rows
        .iter()
        .all(|&s| team.rows.iter().any(|&t| lhs.eval(s) == rhs.eval(t))))
}

pub fn is_trivial(atom: &Atom) -> bool {
    atom.is_trivial()
}

/// Whether some nonempty team satisfies the atom.
///
/// Computed as the largest satisfying team over the atom's variables: start
/// from every assignment and discard rows whose left value is not produced
/// by any remaining row's right side, until stable. Satisfying teams are
/// closed under union, so the result is empty iff no nonempty team exists.
pub fn nonempty_satisfiable(atom: &Atom) -> bool {
    let universe: Vec<String> = atom.vars().into_iter().map(str::to_string).collect();
    if universe.len() > 20 {
        // 2^20 rows is the largest team materialized here.
        return tuple_level_satisfiable(atom);
    }
    let lhs = Evaluator::new(&universe, &atom.lhs).expect("universe covers atom");
    let rhs = Evaluator::new(&universe, &atom.rhs).expect("universe covers atom");
    let mut rows: Vec<u64> = (0..1u64 << universe.len()).collect();
    loop {
        let values: FxHashSet<u64> = rows.iter().map(|&r| rhs.eval(r)).collect();
        let before = rows.len();
        rows.retain(|&r| values.contains(&lhs.eval(r)));
        if rows.len() == before {
            return !rows.is_empty();
        }
    }
}

/// Necessary condition only: some tuple is realizable on both sides.
fn tuple_level_satisfiable(atom: &Atom) -> bool {
    let n = atom.arity();
    'outer: for code in 0..1u64 << n.min(20) {
        for side in [&atom.lhs, &atom.rhs] {
            let mut bound: Vec<(&Symbol, bool)> = Vec::new();
            for (i, sym) in side.iter().enumerate() {
                let bit = code >> (n - 1 - i) & 1 == 1;
                match sym.constant_value() {
                    Some(c) if c != bit => continue 'outer,
                    Some(_) => {}
                    None => match bound.iter().find(|(s, _)| *s == sym) {
                        Some(&(_, b)) if b != bit => continue 'outer,
                        Some(_) => {}
                        None => bound.push((sym, bit)),
                    },
                }
            }
        }
        return true;
    }
    false
}

/// All teams over `universe`, ordered by characteristic bitmask.
pub fn enumerate_teams(universe: &[String], cap: usize) -> Result<impl Iterator<Item = Team>> {
    if universe.len() > cap {
        return Err(Error::CapExceeded {
            what: "team enumeration universe",
            size: universe.len() as u128,
            cap: cap as u128,
        });
    }
    let rows = 1usize << universe.len();
    if rows > 63 {
        return Err(Error::CapExceeded {
            what: "team enumeration universe",
            size: universe.len() as u128,
            cap: 5,
        });
    }
    let universe = universe.to_vec();
    let count: u128 = 1u128 << rows;
    Ok((0..count).map(move |mask| team_from_mask(&universe, mask as u64)))
}

/// The team whose rows are the set bits of `mask`.
pub fn team_from_mask(universe: &[String], mask: u64) -> Team {
    let rows = (0..64u64).filter(|r| mask >> r & 1 == 1);
    Team {
        universe: universe.to_vec(),
        rows: rows.collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    fn seq(s: &str) -> Sequence {
        s.parse().unwrap()
    }

    fn tuples(v: &[&str]) -> BTreeSet<BitTuple> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn projection_of_table_four_t1() {
        let t1: Team = "p1 p2 q1 q2\n1 1 1 1\n1 1 0 0\n".parse().unwrap();
        assert_eq!(project(&t1, &seq("q1 q2")).unwrap(), tuples(&["11", "00"]));
    }

    #[test]
    fn projection_edge_cases() {
        let empty = Team::empty(names(&["x1"]));
        assert!(project(&empty, &seq("x1")).unwrap().is_empty());
        let t = Team::full(names(&["x1"])).unwrap();
        assert_eq!(project(&t, &seq("#T #F")).unwrap(), tuples(&["10"]));
        assert_eq!(
            project(&t, &seq("y")).unwrap_err(),
            Error::UnknownVariable("y".into())
        );
    }

    #[test]
    fn satisfaction_examples() {
        let t: Team = "p1 p2\n0 0\n0 1\n".parse().unwrap();
        assert!(satisfies(&t, &atom("p1 <= p2")).unwrap());
        assert!(!satisfies(&t, &atom("p2 <= p1")).unwrap());
        let empty = Team::empty(names(&["p1", "p2"]));
        assert!(satisfies(&empty, &atom("#F <= #T")).unwrap());
        assert!(satisfies(&empty, &atom("p1 p2 <= p2 p1")).unwrap());
    }

    #[test]
    fn trivial_examples() {
        assert!(is_trivial(&atom("x1 x2 <= x1 x2")));
        assert!(is_trivial(&atom("#T <= #T")));
        assert!(!is_trivial(&atom("x1 x2 <= x2 x1")));
        let t: Team = "x1 x2\n0 1\n".parse().unwrap();
        assert!(!satisfies(&t, &atom("x1 x2 <= x2 x1")).unwrap());
    }

    #[test]
    fn nonempty_satisfiable_examples() {
        assert!(!nonempty_satisfiable(&atom("#F <= #T")));
        assert!(nonempty_satisfiable(&atom("p1 <= #T")));
        assert!(!nonempty_satisfiable(&atom("#T #F <= p1 p1")));
        assert!(nonempty_satisfiable(&atom("p1 p2 <= p2 #F")));
        assert!(nonempty_satisfiable(&atom("#T <= #T")));
    }

    #[test]
    fn nonempty_satisfiable_matches_enumeration() {
        for text in [
            "p1 #T <= #T p1",
            "p1 p2 <= p2 #F",
            "p1 #F <= p2 p2",
            "#T p1 <= p1 #F",
            "p1 p2 <= #T #T",
            "p1 <= #F",
        ] {
            let a = atom(text);
            let universe: Vec<String> = a.vars().into_iter().map(str::to_string).collect();
            let by_enumeration = enumerate_teams(&universe, 4)
                .unwrap()
                .any(|t| !t.is_empty() && satisfies(&t, &a).unwrap());
            assert_eq!(nonempty_satisfiable(&a), by_enumeration, "{text}");
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let one: Vec<Team> = enumerate_teams(&names(&["p1"]), 4).unwrap().collect();
        assert_eq!(one.len(), 4);
        assert_eq!(one[0].rows(), &[] as &[u64]);
        assert_eq!(one[1].rows(), &[0]);
        assert_eq!(one[2].rows(), &[1]);
        assert_eq!(one[3].rows(), &[0, 1]);
        assert_eq!(
            enumerate_teams(&names(&["p1", "p2"]), 4).unwrap().count(),
            16
        );
        assert_eq!(
            enumerate_teams(&names(&["p1", "p2", "p3"]), 4)
                .unwrap()
                .count(),
            256
        );
        assert!(matches!(
            enumerate_teams(&names(&["a", "b", "c"]), 2),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn team_serialization_orders_rows() {
        let t = Team::new(names(&["a", "b"]), [3, 0, 2]).unwrap();
        let text = t.to_string();
        assert_eq!(text, "a b\n0 0\n1 0\n1 1\n");
        assert_eq!(text.parse::<Team>().unwrap(), t);
        assert!(matches!(
            "a b\n0 1 1\n".parse::<Team>(),
            Err(Error::TeamFormat { line: 2, .. })
        ));
    }

    #[test]
    fn restrict_drops_columns() {
        let t: Team = "a b c\n1 0 1\n1 1 1\n".parse().unwrap();
        let r = t.restrict(&names(&["c", "a"])).unwrap();
        assert_eq!(r.to_string(), "c a\n1 1\n");
    }
}

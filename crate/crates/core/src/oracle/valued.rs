//! Refutations over teams with more than two values.
//!
//! Rows range over `{0, .., k-1}^V`, with `#F` read as 0 and `#T` as 1. The
//! search is exact for the given `k`: teams satisfying the assumptions are
//! closed under union, so if some team refutes `x ⊆ y` through a value `a`
//! of `x` missing from `y`, then the largest assumption-satisfying subteam of
//! the rows with `y ≠ a` refutes it as well.
//!
//! The rules I1–I6 are sound for any number of values, so a refutation with
//! `k > 2` shows a query is not derivable without the constant rules.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::syntax::{Atom, Problem, Sequence, Symbol};

/// Largest number of rows `k^|V|` the search will build.
pub const VALUED_ROW_CAP: u64 = 1 << 16;

/// A team over `k` values, one row per assignment in `universe` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedTeam {
    pub universe: Vec<String>,
    pub values: u8,
    pub rows: Vec<Vec<u8>>,
}

impl ValuedTeam {
    fn project(&self, seq: &Sequence) -> Result<FxHashSet<Vec<u8>>> {
        let pos = positions(&self.universe, seq)?;
        Ok(self.rows.iter().map(|r| eval(&pos, r)).collect())
    }

    pub fn satisfies(&self, atom: &Atom) -> Result<bool> {
        let have = self.project(&atom.rhs)?;
        let pos = positions(&self.universe, &atom.lhs)?;
        Ok(self.rows.iter().all(|r| have.contains(&eval(&pos, r))))
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Const(u8),
    Var(usize),
}

fn positions(universe: &[String], seq: &Sequence) -> Result<Vec<Slot>> {
    seq.iter()
        .map(|s| match s {
            Symbol::Bot => Ok(Slot::Const(0)),
            Symbol::Top => Ok(Slot::Const(1)),
            Symbol::Var(v) => universe
                .iter()
                .position(|u| u == v)
                .map(Slot::Var)
                .ok_or_else(|| Error::UnknownVariable(v.clone())),
        })
        .collect()
}

fn eval(pos: &[Slot], row: &[u8]) -> Vec<u8> {
    pos.iter()
        .map(|s| match *s {
            Slot::Const(c) => c,
            Slot::Var(i) => row[i],
        })
        .collect()
}

/// A team over `values` values satisfying the assumptions but not the query,
/// if one exists over the problem's variables.
pub fn valued_refutation(p: &Problem, values: u8) -> Result<Option<ValuedTeam>> {
    if values < 2 {
        return Err(Error::PreconditionViolated(
            "at least two values are needed".into(),
        ));
    }
    let universe = p.variables();
    let count = (values as u64)
        .checked_pow(universe.len() as u32)
        .unwrap_or(u64::MAX);
    if count > VALUED_ROW_CAP {
        return Err(Error::CapExceeded {
            what: "valued oracle rows",
            size: count as u128,
            cap: VALUED_ROW_CAP as u128,
        });
    }
    let all: Vec<Vec<u8>> = (0..count)
        .map(|mut code| {
            let mut row = vec![0u8; universe.len()];
            for slot in row.iter_mut().rev() {
                *slot = (code % values as u64) as u8;
                code /= values as u64;
            }
            row
        })
        .collect();
    let atoms = p
        .assumptions
        .iter()
        .map(|a| Ok((positions(&universe, &a.lhs)?, positions(&universe, &a.rhs)?)))
        .collect::<Result<Vec<_>>>()?;
    let x = positions(&universe, &p.query.lhs)?;
    let y = positions(&universe, &p.query.rhs)?;

    let mut tried = FxHashSet::default();
    for row in &all {
        let a = eval(&x, row);
        if !tried.insert(a.clone()) {
            continue;
        }
        let mut rows: Vec<&Vec<u8>> = all.iter().filter(|r| eval(&y, r) != a).collect();
        loop {
            let before = rows.len();
            for (lhs, rhs) in &atoms {
                let have: FxHashSet<Vec<u8>> = rows.iter().map(|r| eval(rhs, r)).collect();
                rows.retain(|r| have.contains(&eval(lhs, r)));
            }
            if rows.len() == before {
                break;
            }
        }
        if rows.iter().any(|r| eval(&x, r) == a) {
            return Ok(Some(ValuedTeam {
                universe,
                values,
                rows: rows.into_iter().cloned().collect(),
            }));
        }
    }
    Ok(None)
}

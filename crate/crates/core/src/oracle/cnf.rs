//! 3-CNF formulas, DIMACS input, brute-force SAT and the reduction to B3 coverage.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Atom, Sequence, Symbol};

/// Largest variable count `sat_bruteforce` accepts.
pub const SAT_VAR_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    fn dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }
}

/// A conjunction of three-literal clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    /// Builds a formula, taking the variable count from the clauses.
    pub fn new(clauses: Vec<[Literal; 3]>) -> Self {
        let num_vars = clauses.iter().flatten().map(|l| l.var).max().unwrap_or(0);
        CnfFormula { num_vars, clauses }
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| assignment[l.var - 1] == l.positive))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            let lits: Vec<String> = c.iter().map(|l| l.dimacs().to_string()).collect();
            out.push_str(&format!("{} 0\n", lits.join(" ")));
        }
        out
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c
                    .iter()
                    .map(|l| format!("{}p{}", if l.positive { "" } else { "~" }, l.var))
                    .collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        if clauses.is_empty() {
            f.write_str("(empty)")
        } else {
            f.write_str(&clauses.join(" & "))
        }
    }
}

/// Reads a DIMACS CNF file whose clauses all have exactly three literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: String| Error::Dimacs { line, message };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<(Literal, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(err(line, "second problem line".into()));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v
                        .parse()
                        .map_err(|_| err(line, format!("bad variable count `{v}`")))?;
                    let c = c
                        .parse()
                        .map_err(|_| err(line, format!("bad clause count `{c}`")))?;
                    header = Some((v, c, line));
                }
                _ => return Err(err(line, "expected `p cnf <vars> <clauses>`".into())),
            }
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(err(line, "clause before the problem line".into()));
        };
        for tok in trimmed.split_whitespace() {
            let n: i64 = tok
                .parse()
                .map_err(|_| err(line, format!("`{tok}` is not a literal")))?;
            if n == 0 {
                if current.len() != 3 {
                    return Err(err(
                        current.first().map_or(line, |&(_, l)| l),
                        format!(
                            "clause has {} literals; only 3-literal clauses are accepted",
                            current.len()
                        ),
                    ));
                }
                clauses.push([current[0].0, current[1].0, current[2].0]);
                current.clear();
                continue;
            }
            let var = n.unsigned_abs() as usize;
            if var > num_vars {
                return Err(err(
                    line,
                    format!("variable {var} exceeds the declared {num_vars}"),
                ));
            }
            current.push((
                Literal {
                    var,
                    positive: n > 0,
                },
                line,
            ));
        }
    }
    let Some((num_vars, count, header_line)) = header else {
        return Err(err(0, "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(err(
            current[0].1,
            "last clause is not terminated by 0".into(),
        ));
    }
    if clauses.len() != count {
        return Err(err(
            header_line,
            format!(
                "header declares {count} clauses but {} were given",
                clauses.len()
            ),
        ));
    }
    Ok(CnfFormula { num_vars, clauses })
}

/// Whether some assignment satisfies the formula, by trying all of them.
pub fn sat_bruteforce(f: &CnfFormula) -> Result<bool> {
    if f.num_vars > SAT_VAR_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force SAT variables",
            size: f.num_vars as u128,
            cap: SAT_VAR_CAP as u128,
        });
    }
    // Per clause: variables appearing positively and negatively, as bit masks.
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << (l.var - 1);
                if l.positive {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    Ok((0..1u32 << f.num_vars).any(|a| {
        masks
            .iter()
            .all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)
    }))
}

/// The B3 instance whose coverage holds iff the formula is unsatisfiable.
///
/// The target is `p ⊆ r` where `p` lists the variable of every literal in
/// clause order and `r` is fresh. Each clause contributes one candidate: `p`
/// with that clause's block replaced by the constants falsifying it.
pub fn reduce_3sat(f: &CnfFormula) -> Result<(Vec<Atom>, Atom)> {
    if f.clauses.is_empty() {
        return Err(Error::PreconditionViolated(
            "the reduction needs at least one clause".into(),
        ));
    }
    let p: Vec<Symbol> = f
        .clauses
        .iter()
        .flatten()
        .map(|l| Symbol::var(format!("p{}", l.var)))
        .collect();
    let r: Vec<Symbol> = (1..=p.len())
        .map(|i| Symbol::var(format!("r{i}")))
        .collect();
    let r = Sequence(r);
    let candidates = f
        .clauses
        .iter()
        .enumerate()
        .map(|(i, clause)| {
            let mut b = p.clone();
            for (j, l) in clause.iter().enumerate() {
                b[3 * i + j] = Symbol::constant(!l.positive);
            }
            Atom {
                lhs: Sequence(b),
                rhs: r.clone(),
            }
        })
        .collect();
    Ok((
        candidates,
        Atom {
            lhs: Sequence(p),
            rhs: r,
        },
    ))
}

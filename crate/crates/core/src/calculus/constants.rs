//! Consistency of constant sequences and the coverage condition of B3.

use crate::error::{Error, Result};
use crate::syntax::{Atom, Sequence, Symbol};

/// Largest number of distinct variables whose constant instances are enumerated.
pub const MAX_ENUMERATED_VARS: usize = 30;

/// Whether `𝗑 ⊆ r` is consistent: constants of `r` match `𝗑` positionally and
/// repeated symbols of `r` carry equal constants in `𝗑`.
pub fn consistent(atom: &Atom) -> Result<bool> {
    let bits = atom.lhs.constant_bits().ok_or_else(|| {
        Error::PreconditionViolated(format!("left side of `{atom}` is not all constants"))
    })?;
    Ok(consistent_bits(&bits, &atom.rhs))
}

pub(crate) fn consistent_bits(bits: &[bool], r: &Sequence) -> bool {
    let items = r.items();
    for (i, sym) in items.iter().enumerate() {
        if let Some(c) = sym.constant_value() {
            if c != bits[i] {
                return false;
            }
        }
        if items[..i]
            .iter()
            .zip(bits)
            .any(|(s, &b)| s == sym && b != bits[i])
        {
            return false;
        }
    }
    true
}

/// All constant sequences consistent with `p`, in lexicographic order (`#F < #T`).
pub fn consistent_instances(p: &Sequence) -> Result<Vec<Vec<bool>>> {
    let mut distinct: Vec<&Symbol> = Vec::new();
    for sym in p.iter() {
        if !sym.is_constant() && !distinct.contains(&sym) {
            distinct.push(sym);
        }
    }
    let d = distinct.len();
    if d > MAX_ENUMERATED_VARS {
        return Err(Error::CapExceeded {
            what: "distinct variables in a B3 target",
            size: d as u128,
            cap: MAX_ENUMERATED_VARS as u128,
        });
    }
    let slots: Vec<Result<bool, usize>> = p
        .iter()
        .map(|sym| match sym.constant_value() {
            Some(c) => Ok(c),
            None => Err(distinct.iter().position(|s| *s == sym).expect("listed")),
        })
        .collect();
    Ok((0..1u64 << d)
        .map(|code| {
            slots
                .iter()
                .map(|slot| match *slot {
                    Ok(c) => c,
                    Err(v) => code >> (d - 1 - v) & 1 == 1,
                })
                .collect()
        })
        .collect())
}

/// Outcome of a coverage check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covered: bool,
    /// The least constant sequence consistent with the target but with no candidate.
    pub uncovered: Option<Sequence>,
}

/// Checks whether the candidates `r ⊆ q` cover the target `p ⊆ q` in the sense of B3.
pub fn b3_coverage(candidates: &[Atom], target: &Atom) -> Result<Coverage> {
    let p = target.lhs.items();
    for c in candidates {
        if c.rhs != target.rhs {
            return Err(Error::PreconditionViolated(format!(
                "candidate `{c}` does not share the right side of `{target}`"
            )));
        }
        let fits = c
            .lhs
            .iter()
            .zip(p)
            .all(|(r, pi)| r == pi || r.is_constant());
        if !fits {
            return Err(Error::PreconditionViolated(format!(
                "candidate `{c}` is not an instance of `{}` with constants",
                target.lhs
            )));
        }
    }
    for bits in consistent_instances(&target.lhs)? {
        if !candidates.iter().any(|c| consistent_bits(&bits, &c.lhs)) {
            return Ok(Coverage {
                covered: false,
                uncovered: Some(Sequence::constants(&bits)),
            });
        }
    }
    Ok(Coverage {
        covered: true,
        uncovered: None,
    })
}

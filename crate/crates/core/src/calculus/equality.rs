//! Derivable equalities between symbols.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Atom, Sequence, Symbol};

/// A partition of `V ∪ {#T, #F}` into classes of derivably equal symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityClasses {
    /// `#T`, `#F`, then the variables in name order.
    symbols: Vec<Symbol>,
    index: BTreeMap<Symbol, usize>,
    /// Index of each symbol's representative.
    rep: Vec<usize>,
}

const TOP: usize = 0;
const BOT: usize = 1;

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        // Smaller index wins, so constants and then least names stay roots.
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.0[hi] = lo;
        true
    }
}

impl EqualityClasses {
    /// The discrete partition over the given variables.
    pub fn discrete<S: AsRef<str>>(vars: impl IntoIterator<Item = S>) -> Self {
        let mut names: Vec<String> = vars.into_iter().map(|v| v.as_ref().to_string()).collect();
        names.sort();
        names.dedup();
        let symbols: Vec<Symbol> = [Symbol::Top, Symbol::Bot]
            .into_iter()
            .chain(names.into_iter().map(Symbol::Var))
            .collect();
        let index = symbols.iter().cloned().zip(0..).collect();
        let rep = (0..symbols.len()).collect();
        EqualityClasses {
            symbols,
            index,
            rep,
        }
    }

    fn idx(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contradiction(&self) -> bool {
        self.rep[BOT] == TOP
    }

    /// The class representative; symbols outside the universe represent themselves.
    pub fn representative(&self, s: &Symbol) -> Symbol {
        match self.idx(s) {
            Some(i) => self.symbols[self.rep[i]].clone(),
            None => s.clone(),
        }
    }

    pub fn equivalent(&self, a: &Symbol, b: &Symbol) -> bool {
        a == b || self.representative(a) == self.representative(b)
    }

    /// The constant a symbol is forced to, if any.
    pub fn constant_of(&self, s: &Symbol) -> Option<bool> {
        match self.idx(s).map(|i| self.rep[i]) {
            Some(TOP) => Some(true),
            Some(BOT) => Some(false),
            _ => s.constant_value(),
        }
    }

    /// Variables of the universe in name order.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.symbols[2..].iter().filter_map(Symbol::as_var)
    }

    /// Classes with at least two members, each listed representative first.
    pub fn classes(&self) -> Vec<Vec<Symbol>> {
        let mut groups: BTreeMap<usize, Vec<Symbol>> = BTreeMap::new();
        for (i, s) in self.symbols.iter().enumerate() {
            groups.entry(self.rep[i]).or_default().push(s.clone());
        }
        groups.into_values().filter(|g| g.len() > 1).collect()
    }

    pub fn substitute_seq(&self, seq: &Sequence) -> Sequence {
        Sequence(seq.iter().map(|s| self.representative(s)).collect())
    }

    pub fn substitute(&self, atom: &Atom) -> Atom {
        Atom {
            lhs: self.substitute_seq(&atom.lhs),
            rhs: self.substitute_seq(&atom.rhs),
        }
    }
}

impl fmt::Display for EqualityClasses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes = self.classes();
        if classes.is_empty() {
            return f.write_str("(no equalities)");
        }
        let parts: Vec<String> = classes
            .iter()
            .map(|c| {
                let names: Vec<String> = c.iter().map(|s| s.to_string()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Equalities derivable from the assumptions, over their own variables.
pub fn derivable_equalities(assumptions: &[Atom]) -> EqualityClasses {
    let vars: Vec<String> = assumptions
        .iter()
        .flat_map(|a| a.vars())
        .map(str::to_string)
        .collect();
    derivable_equalities_over(vars, assumptions)
}

/// Equalities derivable from the assumptions, over `vars` plus their variables.
///
/// Closure of two propagation steps per assumption `u ⊆ v`: if `v_i` and
/// `v_j` are equal then so are `u_i` and `u_j`; if `v_i` is equal to a
/// constant then so is `u_i`. Repeated right-hand symbols and right-hand
/// constants are the seeds.
pub fn derivable_equalities_over<S: AsRef<str>>(
    vars: impl IntoIterator<Item = S>,
    assumptions: &[Atom],
) -> EqualityClasses {
    let all: Vec<String> = vars
        .into_iter()
        .map(|v| v.as_ref().to_string())
        .chain(
            assumptions
                .iter()
                .flat_map(|a| a.vars())
                .map(str::to_string),
        )
        .collect();
    let mut classes = EqualityClasses::discrete(all);
    let compiled: Vec<(Vec<usize>, Vec<usize>)> = assumptions
        .iter()
        .map(|a| {
            let ids = |s: &Sequence| {
                s.iter()
                    .map(|x| classes.idx(x).expect("in universe"))
                    .collect()
            };
            (ids(&a.lhs), ids(&a.rhs))
        })
        .collect();
    let mut dsu = Dsu((0..classes.symbols.len()).collect());
    loop {
        let mut changed = false;
        for (lhs, rhs) in &compiled {
            for i in 0..rhs.len() {
                let ri = dsu.find(rhs[i]);
                if ri == TOP || ri == BOT {
                    changed |= dsu.union(lhs[i], ri);
                }
                for j in i + 1..rhs.len() {
                    if dsu.find(rhs[j]) == ri {
                        changed |= dsu.union(lhs[i], lhs[j]);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..classes.rep.len() {
        classes.rep[i] = dsu.find(i);
    }
    classes
}

//! Substitution by class representatives and splitting of right-hand repetitions.

use std::collections::BTreeSet;

use super::equality::{derivable_equalities_over, EqualityClasses};
use crate::syntax::{Atom, Problem, Sequence};

/// Splits `a` into an atom whose right side has no repeated symbol and the
/// arity-2 equality atoms `u_i u_j ⊆ y y` that were dropped, `i` being the
/// first occurrence of `y`.
pub fn decompose_rhs_repetitions(a: &Atom) -> (Atom, Vec<Atom>) {
    let rhs = a.rhs.items();
    let lhs = a.lhs.items();
    let mut core_l = Vec::new();
    let mut core_r = Vec::new();
    let mut equalities = Vec::new();
    for (j, y) in rhs.iter().enumerate() {
        match rhs[..j].iter().position(|s| s == y) {
            Some(i) => equalities.push(Atom {
                lhs: Sequence(vec![lhs[i].clone(), lhs[j].clone()]),
                rhs: Sequence(vec![y.clone(), y.clone()]),
            }),
            None => {
                core_l.push(lhs[j].clone());
                core_r.push(y.clone());
            }
        }
    }
    (
        Atom {
            lhs: Sequence(core_l),
            rhs: Sequence(core_r),
        },
        equalities,
    )
}

/// A problem rewritten over class representatives.
#[derive(Clone, Debug)]
pub struct Normalized {
    /// Assumption cores and the core of the query. The dialect is kept even
    /// where substitution introduced repetitions or constants.
    pub problem: Problem,
    pub classes: EqualityClasses,
    /// Equality atoms split off the substituted query.
    pub query_equalities: Vec<Atom>,
}

impl Normalized {
    /// Whether every equality obligation of the query holds by the classes.
    pub fn obligations_hold(&self) -> bool {
        self.query_equalities.iter().all(|e| {
            self.classes
                .equivalent(&e.lhs.items()[0], &e.lhs.items()[1])
        })
    }
}

/// Substitutes representatives everywhere and splits right-hand repetitions.
///
/// The equality atoms split off assumptions are dropped: after substitution
/// their two left symbols coincide, so each follows from its core.
pub fn normalize(p: &Problem) -> Normalized {
    let classes = derivable_equalities_over(p.variables(), &p.assumptions);
    let mut seen = BTreeSet::new();
    let mut assumptions = Vec::new();
    for a in &p.assumptions {
        let (core, _) = decompose_rhs_repetitions(&classes.substitute(a));
        if seen.insert(core.clone()) {
            assumptions.push(core);
        }
    }
    let (query, query_equalities) = decompose_rhs_repetitions(&classes.substitute(&p.query));
    Normalized {
        problem: Problem {
            dialect: p.dialect,
            assumptions,
            query,
        },
        classes,
        query_equalities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_problem, Symbol};

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    #[test]
    fn decomposition_keeps_first_occurrence() {
        let (core, eqs) = decompose_rhs_repetitions(&atom("u1 u2 u3 <= y1 y1 v3"));
        assert_eq!(core, atom("u1 u3 <= y1 v3"));
        assert_eq!(eqs, vec![atom("u1 u2 <= y1 y1")]);

        let (core, eqs) = decompose_rhs_repetitions(&atom("p1 p2 p3 <= q1 q1 q1"));
        assert_eq!(core, atom("p1 <= q1"));
        assert_eq!(eqs, vec![atom("p1 p2 <= q1 q1"), atom("p1 p3 <= q1 q1")]);

        let (core, eqs) = decompose_rhs_repetitions(&atom("x1 x2 <= y1 y2"));
        assert_eq!(core, atom("x1 x2 <= y1 y2"));
        assert!(eqs.is_empty());
    }

    #[test]
    fn table_one_normal_form() {
        let p = parse_problem(
            "dialect: repetitions\nassume: y1 y2 <= z1 z1\nassume: x1 z1 <= z1 z1\nquery: x1 x2 <= y1 y2\n",
        )
        .unwrap();
        let n = normalize(&p);
        assert_eq!(n.problem.query, atom("x1 <= y1"));
        assert_eq!(n.query_equalities, vec![atom("x1 x2 <= y1 y1")]);
        assert!(!n.obligations_hold());
        assert_eq!(
            n.problem.assumptions,
            vec![atom("y1 <= x1"), atom("x1 <= x1")]
        );
    }

    #[test]
    fn plain_problems_are_unchanged() {
        let p =
            parse_problem("dialect: repetition-free\nassume: a b <= c d\nquery: a <= c\n").unwrap();
        let n = normalize(&p);
        assert_eq!(n.problem, p);
        assert!(n.query_equalities.is_empty());
    }

    #[test]
    fn constant_classes_substitute() {
        let p = parse_problem("assume: p1 <= #T\nquery: p1 p2 <= q1 q2\n").unwrap();
        let n = normalize(&p);
        assert_eq!(n.problem.query.lhs.items()[0], Symbol::Top);
        assert_eq!(n.problem.assumptions, vec![atom("#T <= #T")]);
    }
}

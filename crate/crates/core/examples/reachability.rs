//! Reachability over sequences: a chain of assumptions rewrites the query's
//! left side into its right side through projection, permutation and
//! duplication maps. The constant rule B3 has no counterpart, so the last
//! problem is not reached although it is derivable.
//!
//! cargo run --example reachability

use incdep::decide::{reach_entails, SequenceMap};
use incdep::{parse_problem, Symbol};

fn main() -> incdep::Result<()> {
    for text in [
        "assume: x <= z\nassume: z <= y\nquery: x <= y\n",
        "dialect: repetition-free\nassume: x1 x2 <= u1 u2\nquery: x2 x1 <= u2 u1\n",
        "dialect: repetitions\nassume: y1 y2 <= z1 z1\nquery: x1 <= y1\n",
        "assume: #T p2 <= q1 q2\nassume: #F p2 <= q1 q2\nquery: p1 p2 <= q1 q2\n",
    ] {
        let p = parse_problem(text)?;
        println!("{}: {}", p.query, reach_entails(&p)?);
    }

    let v = |s: &str| Symbol::var(s);
    let state = [v("b"), v("b"), v("a")];
    let lhs = [v("a"), v("b")];
    for f in SequenceMap::matches(&state, &lhs) {
        println!(
            "map {:?} sends u1 u2 to {:?}",
            f.0,
            f.apply(&[v("u1"), v("u2")])
        );
    }
    Ok(())
}

//! The brute-force team oracle, and a many-valued search that shows when a
//! Boolean entailment has no derivation.
//!
//! cargo run --example oracle

use incdep::decide::decide;
use incdep::oracle::{oracle_check, valued_refutation};
use incdep::{parse_problem, Error};

fn main() -> incdep::Result<()> {
    let refuted = parse_problem("assume: p1 <= p2\nquery: p2 <= p1\n")?;
    let a = oracle_check(&refuted, 4)?;
    println!(
        "p1 <= p2 |= p2 <= p1: {} after {} teams",
        a.entailed, a.teams_checked
    );
    if let Some(t) = a.separating {
        print!("{t}");
    }

    let p = parse_problem(
        "dialect: repetition-free\nassume: p1 p2 <= p2 p1\nassume: p1 p3 <= p3 p2\nquery: p1 p3 <= p2 p3\n",
    )?;
    println!("\nBoolean oracle: {}", oracle_check(&p, 4)?.entailed);
    match decide(&p) {
        Err(Error::Underivable(q)) => println!("decider: no derivation of {q}"),
        other => println!("decider: {other:?}"),
    }
    if let Some(t) = valued_refutation(&p, 3)? {
        println!("three-valued refutation over {:?}:", t.universe);
        for row in &t.rows {
            println!("  {row:?}");
        }
    }
    Ok(())
}

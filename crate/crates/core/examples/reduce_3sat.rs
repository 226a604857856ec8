//! A 3-CNF formula becomes a coverage question for the constant rule: the
//! candidates cover the target exactly when the formula is unsatisfiable.
//!
//! cargo run --example reduce_3sat

use incdep::calculus::b3_coverage;
use incdep::oracle::{parse_dimacs, reduce_3sat, sat_bruteforce};

fn main() -> incdep::Result<()> {
    let sat = "p cnf 3 2\n1 2 -3 0\n-1 3 2 0\n";
    let unsat = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";
    for text in [sat, unsat] {
        let f = parse_dimacs(text)?;
        let (candidates, target) = reduce_3sat(&f)?;
        let cov = b3_coverage(&candidates, &target)?;
        println!("{f}");
        for c in &candidates {
            println!("  {c}");
        }
        println!("  target {target}");
        println!(
            "  covered {}, satisfiable {}",
            cov.covered,
            sat_bruteforce(&f)?
        );
        if let Some(x) = cov.uncovered {
            println!("  uncovered {x}");
        }
    }
    Ok(())
}

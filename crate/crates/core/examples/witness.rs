//! The counterexample construction for a Boolean problem: equality classes,
//! derivable left sides, the forbidden tuple and the resulting team.
//!
//! cargo run --example witness

use incdep::calculus::saturate;
use incdep::parse_problem;
use incdep::witness::{build_counterexample, plan, verify_counterexample, Witness, WitnessFormat};

fn main() -> incdep::Result<()> {
    let p = parse_problem(
        "assume: #F #F <= q1 q2\nassume: #T #T <= q1 q2\nassume: #F #T <= q1 q2\nquery: p1 p2 <= q1 q2\n",
    )?;
    let sat = saturate(&p, 2)?;
    let plan = plan(&p, &sat)?;
    let w = Witness::Constraints(plan.clone());
    print!("{}", w.render(WitnessFormat::Constraints));
    let team = build_counterexample(&plan)?;
    println!(
        "{} rows, verified: {}",
        team.len(),
        verify_counterexample(&p, &team)
    );
    print!("{team}");
    Ok(())
}

//! Derivation traces: print, replay, and catch a tampered step.
//!
//! cargo run --example traces

use incdep::calculus::Rule;
use incdep::decide::decide;
use incdep::parse_problem;

fn main() -> incdep::Result<()> {
    let p = parse_problem(
        "dialect: repetitions\nassume: x1 x2 <= y1 y1\nassume: z1 z2 <= v x2\nquery: z1 z2 <= v x1\n",
    )?;
    let v = decide(&p)?;
    let trace = v.trace().expect("entailed");
    for line in trace.lines(&p.assumptions) {
        println!("{line}");
    }
    println!("replay: {:?}", trace.replay(&p.assumptions));
    println!("{}", serde_json::to_string(&trace.steps[0]).expect("json"));

    let mut forged = trace.clone();
    if let Some(last) = forged.steps.last_mut() {
        last.step.rule = Rule::I2;
    }
    println!("forged replay: {:?}", forged.replay(&p.assumptions));
    Ok(())
}

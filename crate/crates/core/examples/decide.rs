//! Decide a few implication problems and print each verdict with its evidence.
//!
//! cargo run --example decide

use incdep::decide::{decide, Decider, Verdict};
use incdep::witness::WitnessFormat;
use incdep::{parse_problem, Atom, Dialect};

fn main() -> incdep::Result<()> {
    let problems = [
        "dialect: repetition-free\nassume: a b <= c d\nassume: c d <= e f\nquery: b a <= f e\n",
        "dialect: repetitions\nassume: y1 y2 <= z1 z1\nassume: x1 z1 <= z1 z1\nquery: x1 x2 <= y1 y2\n",
        "assume: #T p2 <= q1 q2\nassume: #F p2 <= q1 q2\nquery: p1 p2 <= q1 q2\n",
    ];
    for text in problems {
        let p = parse_problem(text)?;
        let v = decide(&p)?;
        let sigma: Vec<String> = p.assumptions.iter().map(|a| a.to_string()).collect();
        println!("{{{}}} |= {}: {}", sigma.join(", "), p.query, v.name());
        match &v {
            Verdict::Entailed(t) => {
                for line in t.lines(&p.assumptions) {
                    println!("  {line}");
                }
            }
            Verdict::NotEntailed(w) => print!("{}", w.render(WitnessFormat::Table)),
        }
        println!();
    }

    // One saturation, many queries.
    let sigma: Vec<Atom> = vec!["p1 <= p2".parse()?, "p2 <= p3".parse()?];
    let vars: Vec<String> = ["p1", "p2", "p3"].map(String::from).to_vec();
    let d = Decider::new(Dialect::RepetitionFree, &sigma, &vars, 2, 1 << 20)?;
    for q in ["p1 <= p3", "p3 <= p1", "p2 p1 <= p3 p2"] {
        let q: Atom = q.parse()?;
        println!("{q}: {}", d.entails(&q)?);
    }
    Ok(())
}

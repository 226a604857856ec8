//! No single team satisfies exactly the consequences of `p1 <= p2`.
//!
//! cargo run --example armstrong

fn main() -> incdep::Result<()> {
    let r = incdep::experiments::check_armstrong_gap()?;
    println!("{r}");
    if let (Some(a), Some(b)) = (&r.first_separating, &r.second_separating) {
        println!("separating p3 <= p2: {a}");
        println!("separating p2 <= p1: {b}");
    }
    Ok(())
}

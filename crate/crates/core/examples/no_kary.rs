//! The constant rule needs all n+1 premises: every proper subset fails.
//!
//! cargo run --example no_kary

fn main() -> incdep::Result<()> {
    for n in [2, 3] {
        let r = incdep::experiments::check_no_kary(n)?;
        println!("{r}");
        println!(
            "tight: {}, extra consequences: {:?}\n",
            r.tight(),
            r.extra_consequences()
        );
    }
    Ok(())
}

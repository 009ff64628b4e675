//! Runs every theorem check and prints one line per check. Pass a fault name
//! as the first argument (`gradient_sign`) to see the suite catch it.
//!
//!     cargo run --release --example verify_suite [gradient_sign]

use mirrorsym::experiments::verify::run_suite;
use mirrorsym::experiments::Fault;
use mirrorsym::numerics::RngStream;

fn main() -> mirrorsym::Result<()> {
    let fault: Fault = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("none")
        .parse()?;
    let checks = run_suite(50, fault, RngStream::new(0, 0))?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(())
}

//! Along a mirror direction the loss is a smooth function of z = s^2, so
//! it has a finite slope in z at the symmetric point: a penalty of the form
//! gamma * s^2 acts like L1 on z.
//!
//!     cargo run --example l1_equivalence

use mirrorsym::experiments::verify::l1_check;
use mirrorsym::models::zoo::zoo;
use mirrorsym::numerics::RngStream;

fn main() -> mirrorsym::Result<()> {
    for (i, e) in zoo(RngStream::new(0, 0)).iter().enumerate() {
        let (mirrors, control) = match e.name.as_str() {
            "tanh" | "hadamard" => (&e.mirrors, false),
            "linear" => (&e.negative_controls, true),
            _ => continue,
        };
        for sym in mirrors {
            let rep = l1_check(e.model.as_ref(), sym, 8, RngStream::new(0, i as u64))?;
            println!(
                "{:<9} {:<20}{} slope {:>9.4} ratios {:?} odd part {:.1e} -> {}",
                e.name,
                sym.label(),
                if control { " (control)" } else { "" },
                rep.slope,
                rep.ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
                rep.odd_part,
                if rep.passed { "pass" } else { "fail" }
            );
        }
    }
    Ok(())
}

//! Gradients at symmetric points have no component along the mirror, so SGD
//! started on the symmetric set never leaves it. Injected gradient noise
//! knocks it off.
//!
//!     cargo run --example stationary_condition

use mirrorsym::experiments::verify::{persistence_residual, stationary_residual};
use mirrorsym::models::zoo::zoo;
use mirrorsym::numerics::RngStream;

fn main() -> mirrorsym::Result<()> {
    println!(
        "{:<18} {:<28} {:>12} {:>12} {:>12}",
        "model", "mirror", "|O^T grad|", "sgd sigma=0", "sigma=1e-3"
    );
    for (i, e) in zoo(RngStream::new(0, 0)).iter().enumerate() {
        for (j, sym) in e.mirrors.iter().enumerate() {
            let rng = RngStream::new(0, 1).derive(i as u64).derive(j as u64);
            let model = e.model.as_ref();
            let grad = stationary_residual(model, sym, &[0.0, 0.1, 1.0], 100, rng)?;
            let clean = persistence_residual(model, sym, 0.0, 1000, rng)?;
            let noisy = persistence_residual(model, sym, 1e-3, 1000, rng)?;
            println!(
                "{:<18} {:<28} {:>12.1e} {:>12.1e} {:>12.1e}",
                e.name,
                sym.label(),
                grad,
                clean,
                noisy
            );
        }
    }
    Ok(())
}

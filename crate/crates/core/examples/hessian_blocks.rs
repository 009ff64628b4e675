//! The Hessian at a symmetric point splits into a block on the symmetric
//! subspace and a block on the mirror directions. Shown on the tanh network
//! at the origin and on every model in the zoo.
//!
//!     cargo run --example hessian_blocks

use mirrorsym::analysis::hessian_block_check;
use mirrorsym::experiments::verify::tanh_hessian_check;
use mirrorsym::models::zoo::zoo;
use mirrorsym::numerics::{normal_vec, RngStream};

fn main() -> mirrorsym::Result<()> {
    let r = tanh_hessian_check(10)?;
    println!("two-layer tanh, d = 10, theta = 0, x = 1, y = 2");
    println!("  entries outside the (w_i, u_i) pairs  {:.1e}", r.off_block);
    println!("  pair coupling vs -xy                  {:.1e}", r.coupling);
    println!("  pair eigenvalues vs +-2               {:.1e}", r.eigenvalue);
    println!("  pair eigenvectors vs (1, +-1)/sqrt 2  {:.1e}", r.eigenvector);

    println!();
    println!("{:<18} {:<28} {:>12} {:>12}", "model", "mirror", "|m^T H n|", "|H|_F");
    let mut rng = RngStream::new(0, 1).rng();
    for e in zoo(RngStream::new(0, 0)) {
        for sym in &e.mirrors {
            let theta = sym.project_symmetric(&normal_vec(&mut rng, sym.dim(), 1.0))?;
            let sample = e.model.random_sample(&mut rng);
            let rep = hessian_block_check(e.model.as_ref(), sym, &theta, &sample)?;
            println!(
                "{:<18} {:<28} {:>12.1e} {:>12.3}",
                e.name,
                sym.label(),
                rep.block_residual,
                rep.frobenius()
            );
        }
    }
    Ok(())
}

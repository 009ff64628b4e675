//! Above a critical weight decay the symmetric projection of any point has
//! the lower regularized loss.
//!
//!     cargo run --example weight_decay_threshold

use mirrorsym::analysis::{gamma_threshold, regularized_loss};
use mirrorsym::models::{hadamard_regression, PerSampleLoss};
use mirrorsym::numerics::{normal_vec, RngStream};

fn main() -> mirrorsym::Result<()> {
    let model = hadamard_regression(4);
    let sym = &model.mirrors()[0];
    let mut rng = RngStream::new(0, 0).rng();
    let data: Vec<_> = (0..32).map(|_| model.random_sample(&mut rng)).collect();

    println!("{:>10} {:>12} {:>12} {:>12}", "gamma0", "gamma", "L(theta)", "L(proj)");
    for _ in 0..8 {
        let theta = normal_vec(&mut rng, model.dim(), 1.0);
        let g0 = gamma_threshold(&model, sym, &theta, &data)?;
        let gamma = 1.01 * g0.max(0.0);
        let proj = sym.project_symmetric(&theta)?;
        println!(
            "{:>10.4} {:>12.4} {:>12.4} {:>12.4}",
            g0,
            gamma,
            regularized_loss(&model, &theta, &data, gamma),
            regularized_loss(&model, &proj, &data, gamma)
        );
    }
    Ok(())
}

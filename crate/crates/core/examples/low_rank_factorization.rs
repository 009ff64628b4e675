//! Weight decay on a matrix factorization W·U collapses it to low rank; the
//! residual parametrization (I + W)(I + U) has no rotation mirror and stays
//! full rank.
//!
//!     cargo run --release --example low_rank_factorization

use mirrorsym::experiments::{sweep_rank, Experiment, ExperimentConfig};

fn main() -> mirrorsym::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::SweepRank);
    cfg.set("model", "d", "20");
    cfg.set("data", "n", "80");
    cfg.set("model", "variants", "plain, residual");
    cfg.set("sweep", "weight_decay", "0, 0.1, 0.2, 0.3");

    println!("{:<10} {:>6} {:>6} {:>6} {:>10}", "variant", "mu", "gamma", "rank", "loss");
    for r in sweep_rank(&cfg)? {
        println!(
            "{:<10} {:>6} {:>6} {:>6} {:>10.4}",
            r.variant, r.mu, r.gamma, r.rank, r.loss
        );
    }
    Ok(())
}

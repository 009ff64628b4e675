//! Larger learning rates drive the Hadamard-parametrized regression to
//! sparser solutions; plain linear regression stays dense.
//!
//!     cargo run --release --example sparsity_sweep

use mirrorsym::experiments::{sweep_sparsity, Experiment, ExperimentConfig};

fn main() -> mirrorsym::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::SweepSparsity);
    cfg.set("experiment", "replicates", "2");
    cfg.set("sweep", "learning_rate", "0.02, 0.04, 0.06, 0.08");

    println!("{:<16} {:>6} {:>10} {:>10}", "model", "lr", "sparsity", "loss");
    for r in sweep_sparsity(&cfg)? {
        println!(
            "{:<16} {:>6} {:>10.3} {:>10.3}{}",
            r.model,
            r.learning_rate,
            r.sparsity,
            r.loss,
            if r.diverged { "  diverged" } else { "" }
        );
    }
    Ok(())
}

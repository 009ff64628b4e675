//! A model with a sign-flip symmetry accumulates dead parameters across a
//! sequence of tasks. Gradient noise or a random bias that breaks the
//! symmetry prevents it.
//!
//!     cargo run --release --example continual_plasticity

use mirrorsym::experiments::{continual, Experiment, ExperimentConfig};

fn main() -> mirrorsym::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Continual);
    cfg.set("model", "d", "40");
    cfg.set("data", "tasks", "5");
    cfg.set("trainer", "steps", "8000");

    let rows = continual(&cfg)?;
    let variants = cfg.texts("model", "variants");
    print!("{:>5}", "task");
    for v in &variants {
        print!(" {v:>16}");
    }
    println!();
    for task in 1..=cfg.count("data", "tasks") {
        print!("{task:>5}");
        for v in &variants {
            let n = rows
                .iter()
                .find(|r| &r.variant == v && r.task == task)
                .map_or(0, |r| r.dead_neurons);
            print!(" {n:>16}");
        }
        println!();
    }
    Ok(())
}

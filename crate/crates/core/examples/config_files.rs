//! Experiment configs: defaults, parsing, the echo header written at the top
//! of every CSV, and running a command in-process.
//!
//!     cargo run --example config_files

use mirrorsym::experiments::{run, Experiment, ExperimentConfig};

const CONFIG: &str = "
# a short stability scan
[sweep]
learning_rate = 0.5, 1.5
gamma = 0, 0.2

[distribution]
h = two_point(2, 0)   # equiprobable

[experiment]
seed = 3
";

fn main() -> mirrorsym::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG, Experiment::Lyapunov)?;
    let report = run(&cfg)?;
    print!("{}", report.csv);

    let reparsed = ExperimentConfig::parse(&cfg.echo().replace("# ", ""), Experiment::Lyapunov)?;
    println!("echo parses back to the same config: {}", reparsed == cfg);

    match ExperimentConfig::parse("[sweep]\nlearning_rat = 1\n", Experiment::Lyapunov) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

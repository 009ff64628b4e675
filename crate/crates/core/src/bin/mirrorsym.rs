use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mirrorsym::experiments::{run, Experiment, ExperimentConfig, EXIT_CONFIG};

/// Mirror-symmetry experiments and theorem checks. Results are CSV.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Experiment config file; omitted keys take their defaults.
    #[arg(long, global = true, env = "MIRRORSYM_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides `[experiment] seed`.
    #[arg(long, global = true, env = "MIRRORSYM_SEED")]
    seed: Option<u64>,
    /// Output path; overrides `[experiment] output`. `-` is stdout.
    #[arg(long, global = true, env = "MIRRORSYM_OUT")]
    out: Option<String>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "MIRRORSYM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Final sparsity vs learning rate, with and without rescaling symmetry.
    SweepSparsity,
    /// Rank of a matrix factorization vs weight decay and label noise.
    SweepRank,
    /// Dead parameters across a sequence of regression tasks.
    Continual,
    /// Stability of symmetric points under noisy linearized dynamics.
    Lyapunov,
    /// Run the theorem-check suite; exits 1 if any check fails.
    Verify,
    /// Print the default config for an experiment.
    Defaults {
        #[arg(value_parser = parse_experiment)]
        experiment: Experiment,
    },
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: mirrorsym::Error| e.to_string())
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("mirrorsym: {msg}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let experiment = match cli.command {
        Command::SweepSparsity => Experiment::SweepSparsity,
        Command::SweepRank => Experiment::SweepRank,
        Command::Continual => Experiment::Continual,
        Command::Lyapunov => Experiment::Lyapunov,
        Command::Verify => Experiment::Verify,
        Command::Defaults { experiment } => {
            print!("{}", ExperimentConfig::defaults(experiment).echo());
            return ExitCode::SUCCESS;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(e);
        }
    }
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", path.display())),
            };
            match ExperimentConfig::parse(&text, experiment) {
                Ok(c) => c,
                Err(e) => return fail(format!("{}: {e}", path.display())),
            }
        }
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = &cli.out {
        cfg.set_output(out);
    }
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match cfg.output() {
        None => print!("{}", report.csv),
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &report.csv) {
                return fail(format!("{path}: {e}"));
            }
        }
    }
    if report.failed_checks > 0 {
        eprintln!("mirrorsym: {} check(s) failed", report.failed_checks);
    }
    ExitCode::from(report.exit_code() as u8)
}

//! Desk-scale experiments and the theorem-check suite, driven by
//! [`ExperimentConfig`] files and emitting CSV.
//!
//! Every command is a pure function of its resolved configuration (including
//! the seed), so equal configs give byte-identical output.

mod config;
mod continual;
mod lyapunov;
mod sweeps;
pub mod verify;

use std::fmt;
use std::str::FromStr;

pub use config::{parse_curvature, split_list, ExperimentConfig};
pub use continual::{continual, ContinualRow};
pub use lyapunov::{lyapunov, LyapunovRow};
pub use sweeps::{sweep_rank, sweep_sparsity, RankRow, SparsityRow};
pub use verify::{Check, Fault};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    SweepSparsity,
    SweepRank,
    Continual,
    Lyapunov,
    Verify,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::SweepSparsity,
        Experiment::SweepRank,
        Experiment::Continual,
        Experiment::Lyapunov,
        Experiment::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SweepSparsity => "sweep-sparsity",
            Experiment::SweepRank => "sweep-rank",
            Experiment::Continual => "continual",
            Experiment::Lyapunov => "lyapunov",
            Experiment::Verify => "verify",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::contract(format!("unknown experiment {s:?}")))
    }
}

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// Process exit status when a verification check fails.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Process exit status for an unusable configuration.
pub const EXIT_CONFIG: i32 = 2;

/// Output of one command: the config echo followed by a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub failed_checks: usize,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failed_checks > 0 {
            EXIT_VERIFY_FAILED
        } else {
            EXIT_OK
        }
    }
}

/// Builds the CSV text: `# `-prefixed config echo, header row, rows.
pub fn to_csv<R: AsRef<[String]>>(cfg: &ExperimentConfig, header: &[&str], rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(cfg.echo().into_bytes());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.as_ref()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Runs the experiment `cfg` is for.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let table = |header: &[&str], rows: Vec<Vec<String>>| Report {
        csv: to_csv(cfg, header, &rows),
        failed_checks: 0,
    };
    Ok(match cfg.experiment() {
        Experiment::SweepSparsity => table(
            SparsityRow::HEADER,
            sweep_sparsity(cfg)?.iter().map(SparsityRow::cells).collect(),
        ),
        Experiment::SweepRank => table(
            RankRow::HEADER,
            sweep_rank(cfg)?.iter().map(RankRow::cells).collect(),
        ),
        Experiment::Continual => table(
            ContinualRow::HEADER,
            continual(cfg)?.iter().map(ContinualRow::cells).collect(),
        ),
        Experiment::Lyapunov => table(
            LyapunovRow::HEADER,
            lyapunov(cfg)?.iter().map(LyapunovRow::cells).collect(),
        ),
        Experiment::Verify => {
            let checks = verify_checks(cfg)?;
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.passed.to_string(),
                        c.residual.to_string(),
                        c.tolerance.to_string(),
                    ]
                })
                .collect();
            Report {
                csv: to_csv(cfg, &["check", "passed", "residual", "tolerance"], &rows),
                failed_checks: checks.iter().filter(|c| !c.passed).count(),
            }
        }
    })
}

/// The `verify` command's checks.
pub fn verify_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let fault: Fault = cfg.text("verify", "inject_fault").parse()?;
    verify::run_suite(
        cfg.count("verify", "samples"),
        fault,
        RngStream::new(cfg.seed(), 0),
    )
}

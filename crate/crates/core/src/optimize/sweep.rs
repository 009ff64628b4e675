use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use super::config::TrainerConfig;
use super::metrics::MetricSpec;
use super::train::{train, Trajectory};
use crate::data::DataSource;
use crate::error::{Error, Result};
use crate::models::PerSampleLoss;

/// One grid point: a model, its data and a trainer configuration.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub label: String,
    pub model: Arc<dyn PerSampleLoss>,
    pub data: DataSource,
    pub config: TrainerConfig,
    pub metrics: MetricSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub cell_id: usize,
    pub replicate: usize,
    pub label: String,
    pub trajectory: Trajectory,
}

/// Runs every `(cell, replicate)` pair, in parallel on the current rayon pool.
/// Replicate `r` of a cell uses `stream_id = config.stream_id + r`. Output is
/// ordered by `(cell_id, replicate)`.
pub fn sweep(cells: &[SweepCell], replicates: usize) -> Result<Vec<RunSummary>> {
    if cells.is_empty() || replicates == 0 {
        return Err(Error::contract(
            "sweep needs at least one cell and one replicate",
        ));
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..replicates).map(move |r| (c, r)))
        .collect();
    jobs.par_iter()
        .map(|&(c, r)| {
            let cell = &cells[c];
            let mut cfg = cell.config.clone();
            cfg.stream_id = cfg.stream_id.wrapping_add(r as u64);
            let trajectory = train(cell.model.as_ref(), &cell.data, &cfg, &cell.metrics)?;
            Ok(RunSummary {
                cell_id: c,
                replicate: r,
                label: cell.label.clone(),
                trajectory,
            })
        })
        .collect()
}

/// Long-format CSV: `# key=value` header lines, then
/// `cell_id,replicate,step,metric_name,value`.
pub fn runs_to_csv(runs: &[RunSummary], header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["cell_id", "replicate", "step", "metric_name", "value"])
        .expect("in-memory write");
    for run in runs {
        for rec in &run.trajectory.records {
            for (name, v) in run.trajectory.metric_names.iter().zip(&rec.values) {
                w.write_record([
                    run.cell_id.to_string(),
                    run.replicate.to_string(),
                    rec.step.to_string(),
                    name.clone(),
                    v.to_string(),
                ])
                .expect("in-memory write");
            }
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Generator;
    use crate::models::hadamard_regression;
    use crate::optimize::Metric;

    fn cells() -> Vec<SweepCell> {
        let model: Arc<dyn PerSampleLoss> = Arc::new(hadamard_regression(4));
        [0.01, 0.05]
            .iter()
            .enumerate()
            .map(|(i, lr)| SweepCell {
                label: format!("lr={lr}"),
                model: model.clone(),
                data: DataSource::Stream(Generator::sparse_regression(4, 1.0).unwrap()),
                config: TrainerConfig {
                    learning_rate: *lr,
                    steps: 50,
                    record_every: 25,
                    stream_id: 100 * i as u64,
                    ..Default::default()
                },
                metrics: MetricSpec::new(vec![Metric::Loss, Metric::Sparsity]),
            })
            .collect()
    }

    #[test]
    fn ordered_and_deterministic() {
        let a = sweep(&cells(), 3).unwrap();
        let b = sweep(&cells(), 3).unwrap();
        assert_eq!(a, b);
        let order: Vec<(usize, usize)> = a.iter().map(|r| (r.cell_id, r.replicate)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        assert_ne!(a[0].trajectory.final_theta, a[1].trajectory.final_theta);
        let csv = runs_to_csv(&a, &[("seed".into(), "0".into())]);
        assert!(csv.starts_with("# seed=0\ncell_id,replicate,step,metric_name,value\n"));
        assert_eq!(csv, runs_to_csv(&b, &[("seed".into(), "0".into())]));
    }

    #[test]
    fn single_cell_matches_train() {
        let c = &cells()[..1];
        let runs = sweep(c, 1).unwrap();
        let direct = train(c[0].model.as_ref(), &c[0].data, &c[0].config, &c[0].metrics).unwrap();
        assert_eq!(runs[0].trajectory, direct);
    }

    #[test]
    fn empty_grid_is_an_error() {
        assert!(sweep(&[], 1).is_err());
        assert!(sweep(&cells(), 0).is_err());
    }
}

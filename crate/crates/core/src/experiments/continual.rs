use rayon::prelude::*;

use super::ExperimentConfig;
use crate::data::gen_continual_tasks;
use crate::error::{Error, Result};
use crate::models::{
    apply_symmetry_removal, hadamard_regression, linear_regression, PerSampleLoss,
    SymmetryRemoval,
};
use crate::numerics::RngStream;
use crate::optimize::{train_continual, Metric, MetricSpec, TrainerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ContinualRow {
    pub variant: String,
    /// 1-based.
    pub task: usize,
    pub dead_neurons: usize,
}

impl ContinualRow {
    pub const HEADER: &'static [&'static str] = &["variant", "task", "dead_neurons"];

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.variant.clone(),
            self.task.to_string(),
            self.dead_neurons.to_string(),
        ]
    }
}

/// Dead-parameter counts after each task of a continual regression sequence,
/// for a plain linear regressor (`vanilla`), a Hadamard-parametrized one
/// (`symmetric`) and the Hadamard one with either injected gradient noise
/// (`symmetric+noise`) or a fixed random bias (`symmetric+bias`).
pub fn continual(cfg: &ExperimentConfig) -> Result<Vec<ContinualRow>> {
    let seed = cfg.seed();
    let d = cfg.count("model", "d");
    let tasks = gen_continual_tasks(
        d,
        cfg.count("data", "n_per_task"),
        cfg.count("data", "tasks"),
        cfg.real("data", "noise_sd"),
        RngStream::new(seed, 1),
    )?;
    let base = TrainerConfig {
        learning_rate: cfg.real("trainer", "learning_rate"),
        weight_decay: cfg.real("trainer", "weight_decay"),
        batch_size: cfg.count("trainer", "batch_size"),
        steps: cfg.count("trainer", "steps"),
        optimizer: cfg.optimizer("trainer", "optimizer"),
        seed,
        stream_id: 0,
        record_every: cfg.count("trainer", "steps").max(1),
        ..TrainerConfig::default()
    };
    let metrics = MetricSpec::new(vec![Metric::DeadNeurons {
        threshold: cfg.real("metrics", "dead_threshold"),
    }]);

    let variants = cfg.texts("model", "variants");
    let mut jobs: Vec<(String, Box<dyn PerSampleLoss>, TrainerConfig)> = Vec::new();
    for v in &variants {
        let mut c = base.clone();
        let model: Box<dyn PerSampleLoss> = match v.as_str() {
            "vanilla" => Box::new(linear_regression(d)),
            "symmetric" => Box::new(hadamard_regression(d)),
            "symmetric+noise" => {
                c.grad_noise_sd = cfg.real("fixes", "grad_noise_sd");
                Box::new(hadamard_regression(d))
            }
            "symmetric+bias" => apply_symmetry_removal(
                Box::new(hadamard_regression(d)),
                SymmetryRemoval::RandomBias(cfg.real("fixes", "bias_sd")),
                RngStream::new(seed, 2),
            )?,
            other => {
                return Err(Error::contract(format!(
                    "unknown continual variant {other:?} (expected vanilla, symmetric, \
                     symmetric+noise or symmetric+bias)"
                )))
            }
        };
        jobs.push((v.clone(), model, c));
    }

    let per_variant: Vec<Result<Vec<ContinualRow>>> = jobs
        .par_iter()
        .map(|(name, model, c)| {
            let trajectories = train_continual(model.as_ref(), &tasks, c, &metrics)?;
            Ok(trajectories
                .iter()
                .enumerate()
                .map(|(k, t)| ContinualRow {
                    variant: name.clone(),
                    task: k + 1,
                    dead_neurons: t.last("dead_neurons").unwrap_or(f64::NAN) as usize,
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_variant {
        out.extend(rows?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Experiment;

    #[test]
    fn small_run_shape() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Continual);
        cfg.set("model", "d", "5");
        cfg.set("data", "n_per_task", "8");
        cfg.set("data", "tasks", "3");
        cfg.set("trainer", "batch_size", "4");
        cfg.set("trainer", "steps", "30");
        let rows = continual(&cfg).unwrap();
        assert_eq!(rows.len(), 4 * 3);
        assert_eq!(rows[3].variant, "symmetric");
        assert_eq!(rows[3].task, 1);
        assert!(rows.iter().all(|r| r.dead_neurons <= 10));
        cfg.set("model", "variants", "vanilla, frozen");
        assert!(continual(&cfg).is_err());
    }
}

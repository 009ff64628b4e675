use std::sync::Arc;

use super::ExperimentConfig;
use crate::data::{gen_matfac, DataSource, Generator};
use crate::error::{Error, Result};
use crate::models::{matrix_factorization, PerSampleLoss};
use crate::numerics::RngStream;
use crate::optimize::{sweep, Metric, MetricSpec, SweepCell, TrainerConfig};

/// Cells get stream ids this far apart so replicates never share a stream.
const STREAM_STRIDE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityRow {
    pub model: String,
    pub learning_rate: f64,
    pub replicate: usize,
    pub sparsity: f64,
    pub loss: f64,
    pub diverged: bool,
}

impl SparsityRow {
    pub const HEADER: &'static [&'static str] =
        &["model", "lr", "replicate", "sparsity", "loss", "diverged"];

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.model.clone(),
            self.learning_rate.to_string(),
            self.replicate.to_string(),
            self.sparsity.to_string(),
            self.loss.to_string(),
            self.diverged.to_string(),
        ]
    }
}

/// Final parameter sparsity of each model across a learning-rate grid, trained
/// online on fresh sparse-regression samples.
pub fn sweep_sparsity(cfg: &ExperimentConfig) -> Result<Vec<SparsityRow>> {
    let seed = cfg.seed();
    let noise_sd = cfg.real("data", "noise_sd");
    let steps = cfg.count("trainer", "steps");
    let metrics = MetricSpec {
        metrics: vec![Metric::Sparsity, Metric::Loss],
        eval_size: cfg.count("metrics", "eval_size"),
    };
    let mut cells = Vec::new();
    for (mi, spec) in cfg.models("model", "models").iter().enumerate() {
        let model: Arc<dyn PerSampleLoss> = spec
            .build(RngStream::new(seed, 1).derive(mi as u64))?
            .into();
        let (nx, ny) = model.sample_shape();
        if ny != 1 {
            return Err(Error::contract(format!(
                "sweep-sparsity needs scalar-output models, got {spec}"
            )));
        }
        let gen = Generator::sparse_regression(nx, noise_sd)?;
        for &lr in &cfg.reals("sweep", "learning_rate") {
            let id = cells.len() as u64;
            cells.push(SweepCell {
                label: spec.to_string(),
                model: model.clone(),
                data: DataSource::Stream(gen.clone()),
                config: TrainerConfig {
                    learning_rate: lr,
                    weight_decay: cfg.real("trainer", "weight_decay"),
                    batch_size: cfg.count("trainer", "batch_size"),
                    steps,
                    optimizer: cfg.optimizer("trainer", "optimizer"),
                    momentum: cfg.real("trainer", "momentum"),
                    grad_noise_sd: cfg.real("trainer", "grad_noise_sd"),
                    seed,
                    stream_id: id * STREAM_STRIDE,
                    record_every: steps.max(1),
                    ..TrainerConfig::default()
                },
                metrics: metrics.clone(),
            });
        }
    }
    let runs = sweep(&cells, cfg.count("experiment", "replicates"))?;
    Ok(runs
        .into_iter()
        .map(|r| {
            let c = &cells[r.cell_id].config;
            SparsityRow {
                model: r.label.clone(),
                learning_rate: c.learning_rate,
                replicate: r.replicate,
                sparsity: r.trajectory.last("sparsity").unwrap_or(f64::NAN),
                loss: r.trajectory.last("loss").unwrap_or(f64::NAN),
                diverged: r.trajectory.diverged,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub variant: String,
    pub mu: f64,
    pub gamma: f64,
    pub learning_rate: f64,
    pub replicate: usize,
    pub rank: f64,
    pub loss: f64,
}

impl RankRow {
    pub const HEADER: &'static [&'static str] =
        &["variant", "mu", "gamma", "lr", "replicate", "rank", "loss"];

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.variant.clone(),
            self.mu.to_string(),
            self.gamma.to_string(),
            self.learning_rate.to_string(),
            self.replicate.to_string(),
            self.rank.to_string(),
            self.loss.to_string(),
        ]
    }
}

/// Rank of the end-to-end matrix of a factorization, with or without the
/// residual connection, across label-noise levels μ, weight decays and
/// learning rates. With a fixed source each μ has one dataset of `n` points;
/// with a stream every step draws fresh samples.
pub fn sweep_rank(cfg: &ExperimentConfig) -> Result<Vec<RankRow>> {
    let seed = cfg.seed();
    let d = cfg.count("model", "d");
    let n = cfg.count("data", "n");
    let steps = cfg.count("trainer", "steps");
    let metrics = MetricSpec {
        metrics: vec![
            Metric::Rank {
                rel_tol: cfg.real("metrics", "rank_tol"),
            },
            Metric::Loss,
        ],
        eval_size: cfg.count("metrics", "eval_size"),
    };
    let mus = cfg.reals("data", "mu");
    let stream = match cfg.text("data", "source").as_str() {
        "fixed" => false,
        "stream" => true,
        other => {
            return Err(Error::contract(format!(
                "unknown data source {other:?} (expected fixed or stream)"
            )))
        }
    };
    let sources = mus
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            Ok(if stream {
                DataSource::Stream(Generator::matfac(d, mu)?)
            } else {
                DataSource::Fixed(gen_matfac(d, n, mu, RngStream::new(seed, 1).derive(i as u64))?)
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    let mut keys = Vec::new();
    for variant in cfg.texts("model", "variants") {
        let residual = match variant.as_str() {
            "plain" => false,
            "residual" => true,
            other => {
                return Err(Error::contract(format!(
                    "unknown factorization variant {other:?} (expected plain or residual)"
                )))
            }
        };
        let model: Arc<dyn PerSampleLoss> = Arc::new(matrix_factorization(d, residual));
        for (mi, &mu) in mus.iter().enumerate() {
            for &lr in &cfg.reals("sweep", "learning_rate") {
                for &gamma in &cfg.reals("sweep", "weight_decay") {
                    let id = cells.len() as u64;
                    keys.push((variant.clone(), mu, gamma));
                    cells.push(SweepCell {
                        label: variant.clone(),
                        model: model.clone(),
                        data: sources[mi].clone(),
                        config: TrainerConfig {
                            learning_rate: lr,
                            weight_decay: gamma,
                            batch_size: cfg.count("trainer", "batch_size"),
                            steps,
                            optimizer: cfg.optimizer("trainer", "optimizer"),
                            momentum: cfg.real("trainer", "momentum"),
                            grad_noise_sd: cfg.real("trainer", "grad_noise_sd"),
                            seed,
                            stream_id: id * STREAM_STRIDE,
                            record_every: steps.max(1),
                            ..TrainerConfig::default()
                        },
                        metrics: metrics.clone(),
                    });
                }
            }
        }
    }
    let runs = sweep(&cells, cfg.count("experiment", "replicates"))?;
    Ok(runs
        .into_iter()
        .map(|r| {
            let (variant, mu, gamma) = keys[r.cell_id].clone();
            RankRow {
                variant,
                mu,
                gamma,
                learning_rate: cells[r.cell_id].config.learning_rate,
                replicate: r.replicate,
                rank: r.trajectory.last("rank").unwrap_or(f64::NAN),
                loss: r.trajectory.last("loss").unwrap_or(f64::NAN),
            }
        })
        .collect())
}

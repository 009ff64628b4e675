use super::config::{Init, Optimizer, TrainerConfig};
use super::metrics::MetricSpec;
use crate::data::{DataSource, TaskSequence};
use crate::error::{check_dim, Error, Result};
use crate::models::{PerSampleLoss, Sample};
use crate::numerics::{normal, normal_vec, Rng};

/// `‖θ‖` beyond which a run is flagged as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub step: usize,
    /// In the order of [`Trajectory::metric_names`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: String,
    pub metric_names: Vec<String>,
    pub records: Vec<Record>,
    pub final_theta: Vec<f64>,
    pub diverged: bool,
    /// Step after which θ first left the finite, bounded region.
    pub diverged_at: Option<usize>,
    pub config: TrainerConfig,
}

impl Trajectory {
    fn index(&self, name: &str) -> Option<usize> {
        self.metric_names.iter().position(|n| n == name)
    }

    /// `(step, value)` pairs for one metric.
    pub fn series(&self, name: &str) -> Vec<(usize, f64)> {
        self.index(name).map_or_else(Vec::new, |i| {
            self.records.iter().map(|r| (r.step, r.values[i])).collect()
        })
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        let i = self.index(name)?;
        self.records.last().map(|r| r.values[i])
    }

    /// Largest recorded value of a metric.
    pub fn max(&self, name: &str) -> Option<f64> {
        let s = self.series(name);
        (!s.is_empty()).then(|| s.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max))
    }
}

fn initial_theta(model: &dyn PerSampleLoss, init: &Init, rng: &mut Rng) -> Result<Vec<f64>> {
    match init {
        Init::Explicit(theta) => {
            check_dim("explicit initialization", model.dim(), theta.len())?;
            Ok(theta.clone())
        }
        Init::Gaussian(Some(scale)) => Ok(normal_vec(rng, model.dim(), *scale)),
        Init::Gaussian(None) => {
            let mut theta = Vec::with_capacity(model.dim());
            for (i, b) in model.layout().blocks().iter().enumerate() {
                theta.extend(normal_vec(rng, b.len, model.init_scale(i)));
            }
            Ok(theta)
        }
    }
}

struct Batcher<'a> {
    source: &'a DataSource,
    optimizer: Optimizer,
    batch_size: usize,
    fresh: Vec<Sample>,
}

impl<'a> Batcher<'a> {
    fn next(&mut self, rng: &mut Rng) -> Vec<&Sample> {
        match self.source {
            DataSource::Fixed(ds) => {
                if self.optimizer == Optimizer::Gd {
                    ds.samples.iter().collect()
                } else {
                    (0..self.batch_size)
                        .map(|_| &ds.samples[rand::Rng::random_range(rng, 0..ds.samples.len())])
                        .collect()
                }
            }
            DataSource::Stream(g) => {
                self.fresh = (0..self.batch_size).map(|_| g.sample(rng)).collect();
                self.fresh.iter().collect()
            }
        }
    }
}

/// Runs the update `θ ← θ − λ·step(ĝ + 2γθ + η)` for `config.steps` steps.
///
/// `step` is the identity for GD/SGD, heavy-ball accumulation when momentum is
/// positive, and division by the bias-corrected running RMS for the adaptive
/// optimizer. Metrics are recorded at step 0, every `record_every` steps and
/// at the end. In stream mode they are evaluated on a held-out set of
/// `metrics.eval_size` samples.
pub fn train(
    model: &dyn PerSampleLoss,
    data: &DataSource,
    config: &TrainerConfig,
    metrics: &MetricSpec,
) -> Result<Trajectory> {
    config.validate()?;
    metrics.check(model)?;
    let streams = config.rng_stream();
    let eval_owned;
    let eval: &[Sample] = match data {
        DataSource::Fixed(ds) => {
            if ds.is_empty() {
                return Err(Error::contract("empty dataset"));
            }
            if config.optimizer != Optimizer::Gd && config.batch_size > ds.len() {
                return Err(Error::contract(format!(
                    "batch_size {} exceeds dataset size {}",
                    config.batch_size,
                    ds.len()
                )));
            }
            &ds.samples
        }
        DataSource::Stream(g) => {
            if config.optimizer == Optimizer::Gd {
                return Err(Error::contract("full-batch GD needs a fixed dataset"));
            }
            let mut r = streams.derive(4).rng();
            eval_owned = (0..metrics.eval_size)
                .map(|_| g.sample(&mut r))
                .collect::<Vec<_>>();
            &eval_owned
        }
    };
    if let Some(s) = eval.first() {
        crate::models::check_sample(model, s)?;
    }

    let mut theta = initial_theta(model, &config.init, &mut streams.derive(1).rng())?;
    let mut batch_rng = streams.derive(2).rng();
    let mut noise_rng = streams.derive(3).rng();
    let mut batcher = Batcher {
        source: data,
        optimizer: config.optimizer,
        batch_size: config.batch_size,
        fresh: Vec::new(),
    };

    let full = match (data, config.optimizer) {
        (DataSource::Fixed(ds), Optimizer::Gd) => model.full_batch(&ds.samples),
        _ => None,
    };

    let d = model.dim();
    let (lr, gamma, sigma) = (
        config.learning_rate,
        config.weight_decay,
        config.grad_noise_sd,
    );
    let mut grad = vec![0.0; d];
    let mut buf = vec![0.0; d];
    let mut second = vec![0.0; d];
    let mut beta2_pow = 1.0;
    let mut records = Vec::new();
    let record = |theta: &[f64], step: usize, records: &mut Vec<Record>| {
        let values = metrics
            .metrics
            .iter()
            .map(|m| m.evaluate(model, theta, eval))
            .collect();
        records.push(Record { step, values });
    };

    let mut diverged_at = None;
    let mut last_step = 0;
    for t in 0..config.steps {
        if t % config.record_every == 0 {
            record(&theta, t, &mut records);
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        let inv_n = match &full {
            Some(f) => {
                f.accumulate_mean_grad(&theta, &mut grad);
                1.0
            }
            None => {
                let batch = batcher.next(&mut batch_rng);
                model.accumulate_batch_grad(&theta, &batch, &mut grad);
                1.0 / batch.len() as f64
            }
        };
        for i in 0..d {
            grad[i] = grad[i] * inv_n + 2.0 * gamma * theta[i];
        }
        if sigma > 0.0 {
            grad.iter_mut()
                .for_each(|g| *g += sigma * normal(&mut noise_rng));
        }
        match config.optimizer {
            Optimizer::AdaptiveNoMomentum => {
                beta2_pow *= BETA2;
                let correction = 1.0 - beta2_pow;
                for i in 0..d {
                    second[i] = BETA2 * second[i] + (1.0 - BETA2) * grad[i] * grad[i];
                    theta[i] -= lr * grad[i] / ((second[i] / correction).sqrt() + EPS);
                }
            }
            _ if config.momentum > 0.0 => {
                for i in 0..d {
                    buf[i] = config.momentum * buf[i] + grad[i];
                    theta[i] -= lr * buf[i];
                }
            }
            _ => {
                for i in 0..d {
                    theta[i] -= lr * grad[i];
                }
            }
        }
        last_step = t + 1;
        let sq: f64 = theta.iter().map(|v| v * v).sum();
        if !sq.is_finite() || sq.sqrt() > DIVERGENCE_NORM {
            diverged_at = Some(last_step);
            break;
        }
    }
    if records.last().is_none_or(|r| r.step != last_step) {
        record(&theta, last_step, &mut records);
    }

    Ok(Trajectory {
        model: model.spec(),
        metric_names: metrics.names(),
        records,
        final_theta: theta,
        diverged: diverged_at.is_some(),
        diverged_at,
        config: config.clone(),
    })
}

/// Trains on each task in turn; task `k+1` starts from the final θ of task
/// `k`. Task 0 uses `config` unchanged; later tasks draw minibatches from
/// stream `config.rng_stream().derive(k)`.
pub fn train_continual(
    model: &dyn PerSampleLoss,
    tasks: &TaskSequence,
    config: &TrainerConfig,
    metrics: &MetricSpec,
) -> Result<Vec<Trajectory>> {
    let mut out: Vec<Trajectory> = Vec::with_capacity(tasks.tasks.len());
    for (k, task) in tasks.tasks.iter().enumerate() {
        let mut cfg = config.clone();
        if let Some(prev) = out.last() {
            if prev.diverged {
                return Err(Error::NumericalDomain(format!(
                    "task {} diverged; cannot continue",
                    k - 1
                )));
            }
            cfg.init = Init::Explicit(prev.final_theta.clone());
            cfg.stream_id = config.rng_stream().derive(k as u64).stream_id;
        }
        out.push(train(
            model,
            &DataSource::Fixed(task.clone()),
            &cfg,
            metrics,
        )?);
    }
    Ok(out)
}

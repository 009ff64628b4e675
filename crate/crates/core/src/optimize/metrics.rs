use crate::analysis::{cluster_count, sparsity};
use crate::error::{Error, Result};
use crate::models::{mean_grad, mean_loss, PerSampleLoss, Sample};
use crate::numerics::{norm, numerical_rank, svd};
use crate::symmetry::MirrorSymmetry;

/// Default `|∂L/∂θ_i|` below which a parameter counts as dead.
pub const DEAD_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Mean `ℓ0` over the evaluation set.
    Loss,
    MirrorResidual(MirrorSymmetry),
    Sparsity,
    /// Numerical rank of the model's product matrix.
    Rank {
        rel_tol: f64,
    },
    /// Parameters whose dataset-averaged `ℓ0` gradient is below `threshold`.
    DeadNeurons {
        threshold: f64,
    },
    ClusterCount,
    ParamNorm,
}

impl Metric {
    pub fn name(&self) -> String {
        match self {
            Metric::Loss => "loss".into(),
            Metric::MirrorResidual(m) => format!("mirror_residual[{}]", m.label()),
            Metric::Sparsity => "sparsity".into(),
            Metric::Rank { .. } => "rank".into(),
            Metric::DeadNeurons { .. } => "dead_neurons".into(),
            Metric::ClusterCount => "cluster_count".into(),
            Metric::ParamNorm => "param_norm".into(),
        }
    }

    pub fn dead_neurons() -> Self {
        Metric::DeadNeurons {
            threshold: DEAD_THRESHOLD,
        }
    }

    fn check(&self, model: &dyn PerSampleLoss) -> Result<()> {
        let probe = vec![0.0; model.dim()];
        match self {
            Metric::MirrorResidual(m) if m.dim() != model.dim() => Err(Error::contract(format!(
                "mirror {} has dimension {}, model has {}",
                m.label(),
                m.dim(),
                model.dim()
            ))),
            Metric::Rank { .. } if model.product_matrix(&probe).is_none() => Err(Error::contract(
                format!("model {} has no product matrix", model.spec()),
            )),
            Metric::ClusterCount if model.hidden_units(&probe).is_none() => Err(Error::contract(
                format!("model {} has no hidden units", model.spec()),
            )),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, model: &dyn PerSampleLoss, theta: &[f64], eval: &[Sample]) -> f64 {
        match self {
            Metric::Loss => mean_loss(model, theta, eval),
            Metric::MirrorResidual(m) => m.mirror_residual(theta).unwrap_or(f64::NAN),
            Metric::Sparsity => sparsity(theta),
            Metric::Rank { rel_tol } => model
                .product_matrix(theta)
                .and_then(|p| svd(&p).ok())
                .and_then(|s| numerical_rank(&s.singular_values, *rel_tol).ok())
                .map_or(f64::NAN, |r| r as f64),
            Metric::DeadNeurons { threshold } => {
                dead_neurons(model, theta, eval, *threshold) as f64
            }
            Metric::ClusterCount => model
                .hidden_units(theta)
                .map_or(f64::NAN, |u| cluster_count(&u) as f64),
            Metric::ParamNorm => norm(theta),
        }
    }
}

/// Count of coordinates whose dataset-averaged gradient of `ℓ0` has magnitude
/// below `threshold`.
pub fn dead_neurons(
    model: &dyn PerSampleLoss,
    theta: &[f64],
    samples: &[Sample],
    threshold: f64,
) -> usize {
    mean_grad(model, theta, samples)
        .iter()
        .filter(|g| g.abs() < threshold)
        .count()
}

/// Metrics evaluated on θ_t at every recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub metrics: Vec<Metric>,
    /// Size of the held-out evaluation set drawn in stream mode.
    pub eval_size: usize,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec {
            metrics: vec![Metric::Loss],
            eval_size: 1000,
        }
    }
}

impl MetricSpec {
    pub fn new(metrics: Vec<Metric>) -> Self {
        MetricSpec {
            metrics,
            ..Default::default()
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.metrics.iter().map(Metric::name).collect()
    }

    pub fn check(&self, model: &dyn PerSampleLoss) -> Result<()> {
        self.metrics.iter().try_for_each(|m| m.check(model))
    }
}

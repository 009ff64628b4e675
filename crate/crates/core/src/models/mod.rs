//! Per-sample losses with analytic gradients, each carrying the mirrors it is
//! known to be symmetric under.
//!
//! Every model implements [`PerSampleLoss`], the data-dependent part `ℓ0(θ, x)`
//! of the training objective. Weight decay `γ‖θ‖²` is never part of a model; the
//! optimizer adds it.

mod bias;
mod swap_quadratic;
mod hadamard;
mod linear;
mod matfac;
mod perm;
mod spec;
mod tanh;
pub mod zoo;

use std::fmt;

use crate::error::{check_dim, Result};
use crate::numerics::{normal_vec, Matrix, Rng};
use crate::symmetry::{MirrorSymmetry, ParamLayout};

pub use bias::{apply_symmetry_removal, RandomBias, SymmetryRemoval};
pub use swap_quadratic::{swap_quadratic, SwapQuadratic};
pub use hadamard::{hadamard_regression, HadamardRegression};
pub use linear::{linear_regression, LinearRegression};
pub use matfac::{matrix_factorization, MatrixFactorization};
pub use perm::{permutation_mlp, PermutationMlp};
pub use spec::ModelSpec;
pub use tanh::{two_layer_tanh, TwoLayerTanh};

/// One data point. Shapes are fixed per model (see
/// [`PerSampleLoss::sample_shape`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Sample { x, y }
    }

    pub fn scalar(x: f64, y: f64) -> Self {
        Sample {
            x: vec![x],
            y: vec![y],
        }
    }
}

/// The data-dependent loss `ℓ0(θ, x) ≥ 0` with its analytic gradient.
pub trait PerSampleLoss: Send + Sync + fmt::Debug {
    /// Config string that rebuilds this model (see [`ModelSpec`]).
    fn spec(&self) -> String;

    fn layout(&self) -> &ParamLayout;

    fn dim(&self) -> usize {
        self.layout().dim()
    }

    /// `(len(x), len(y))`
    fn sample_shape(&self) -> (usize, usize);

    fn loss(&self, theta: &[f64], sample: &Sample) -> f64;

    /// Adds `∇θ ℓ0(θ, x)` into `grad` and returns `ℓ0(θ, x)`.
    fn accumulate_grad(&self, theta: &[f64], sample: &Sample, grad: &mut [f64]) -> f64;

    /// Adds the gradient summed over `batch` into `grad`; returns the summed
    /// loss. Wrappers override this to amortize per-call work.
    fn accumulate_batch_grad(&self, theta: &[f64], batch: &[&Sample], grad: &mut [f64]) -> f64 {
        batch
            .iter()
            .map(|s| self.accumulate_grad(theta, s, grad))
            .sum()
    }

    /// Mirrors under which `ℓ0(θ, x) = ℓ0(Rθ, x)` for all `θ, x`.
    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        Vec::new()
    }

    /// The end-to-end linear map whose rank is tracked (e.g. `WU`).
    fn product_matrix(&self, _theta: &[f64]) -> Option<Matrix> {
        None
    }

    /// Per-hidden-unit parameter vectors, for clustering.
    fn hidden_units(&self, _theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }

    /// Per-hidden-unit pre-activations for one input.
    fn hidden_preactivations(&self, _theta: &[f64], _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Standard deviation of the default Gaussian initialization of block
    /// `index` in [`layout`](Self::layout).
    fn init_scale(&self, index: usize) -> f64 {
        let len = self.layout().blocks()[index].len.max(1);
        0.1 / (len as f64).sqrt()
    }

    /// A precomputed full-dataset gradient oracle, for models where one is
    /// cheaper than summing per-sample gradients.
    fn full_batch<'a>(&'a self, _samples: &'a [Sample]) -> Option<Box<dyn FullBatch + 'a>> {
        None
    }

    /// A standard-normal `(x, y)` of the right shape.
    fn random_sample(&self, rng: &mut Rng) -> Sample {
        let (nx, ny) = self.sample_shape();
        Sample {
            x: normal_vec(rng, nx, 1.0),
            y: normal_vec(rng, ny, 1.0),
        }
    }
}

/// Mean loss and gradient over a fixed dataset.
pub trait FullBatch: Send + Sync {
    /// Adds the dataset-averaged gradient into `grad`; returns the mean loss.
    fn accumulate_mean_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64;
}

/// `∇θ ℓ0(θ, x)` as a fresh vector.
pub fn grad(model: &dyn PerSampleLoss, theta: &[f64], sample: &Sample) -> Vec<f64> {
    let mut g = vec![0.0; model.dim()];
    model.accumulate_grad(theta, sample, &mut g);
    g
}

pub fn check_sample(model: &dyn PerSampleLoss, sample: &Sample) -> Result<()> {
    let (nx, ny) = model.sample_shape();
    check_dim("sample x", nx, sample.x.len())?;
    check_dim("sample y", ny, sample.y.len())
}

pub fn check_theta(model: &dyn PerSampleLoss, theta: &[f64]) -> Result<()> {
    check_dim("parameter vector", model.dim(), theta.len())
}

/// Dataset-averaged loss `L0(θ) = mean ℓ0(θ, x)`.
pub fn mean_loss(model: &dyn PerSampleLoss, theta: &[f64], samples: &[Sample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| model.loss(theta, s)).sum::<f64>() / samples.len() as f64
}

/// Dataset-averaged gradient.
pub fn mean_grad(model: &dyn PerSampleLoss, theta: &[f64], samples: &[Sample]) -> Vec<f64> {
    let mut g = vec![0.0; model.dim()];
    let batch: Vec<&Sample> = samples.iter().collect();
    model.accumulate_batch_grad(theta, &batch, &mut g);
    if !samples.is_empty() {
        let n = samples.len() as f64;
        g.iter_mut().for_each(|v| *v /= n);
    }
    g
}

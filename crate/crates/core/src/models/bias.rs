use super::{PerSampleLoss, Sample};
use crate::error::{Error, Result};
use crate::numerics::{normal_vec, Matrix, Rng, RngStream};
use crate::symmetry::{MirrorSymmetry, ParamLayout};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryRemoval {
    None,
    /// Fixed offsets `β_i ~ N(0, scale²)`.
    RandomBias(f64),
}

/// Evaluates the inner model at `θ + β`. Mirrors of the inner model no longer
/// apply.
#[derive(Debug)]
pub struct RandomBias {
    inner: Box<dyn PerSampleLoss>,
    beta: Vec<f64>,
    scale: f64,
}

impl RandomBias {
    pub fn new(inner: Box<dyn PerSampleLoss>, scale: f64, rng: RngStream) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::contract(format!(
                "bias scale must be positive, got {scale}"
            )));
        }
        let beta = normal_vec(&mut rng.rng(), inner.dim(), scale);
        Ok(RandomBias { inner, beta, scale })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn inner(&self) -> &dyn PerSampleLoss {
        self.inner.as_ref()
    }

    fn shifted(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().zip(&self.beta).map(|(t, b)| t + b).collect()
    }
}

pub fn apply_symmetry_removal(
    model: Box<dyn PerSampleLoss>,
    kind: SymmetryRemoval,
    rng: RngStream,
) -> Result<Box<dyn PerSampleLoss>> {
    match kind {
        SymmetryRemoval::None => Ok(model),
        SymmetryRemoval::RandomBias(scale) => Ok(Box::new(RandomBias::new(model, scale, rng)?)),
    }
}

impl PerSampleLoss for RandomBias {
    fn spec(&self) -> String {
        format!("{}+bias({})", self.inner.spec(), self.scale)
    }

    fn layout(&self) -> &ParamLayout {
        self.inner.layout()
    }

    fn sample_shape(&self) -> (usize, usize) {
        self.inner.sample_shape()
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        self.inner.loss(&self.shifted(theta), s)
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        self.inner.accumulate_grad(&self.shifted(theta), s, grad)
    }

    fn accumulate_batch_grad(&self, theta: &[f64], batch: &[&Sample], grad: &mut [f64]) -> f64 {
        self.inner
            .accumulate_batch_grad(&self.shifted(theta), batch, grad)
    }

    fn init_scale(&self, index: usize) -> f64 {
        self.inner.init_scale(index)
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        Vec::new()
    }

    fn product_matrix(&self, theta: &[f64]) -> Option<Matrix> {
        self.inner.product_matrix(&self.shifted(theta))
    }

    fn hidden_units(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.inner.hidden_units(&self.shifted(theta))
    }

    fn hidden_preactivations(&self, theta: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        self.inner.hidden_preactivations(&self.shifted(theta), x)
    }

    fn random_sample(&self, rng: &mut Rng) -> Sample {
        self.inner.random_sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hadamard_regression, test_support::gradient_error};
    use crate::symmetry::verify_loss_symmetry;

    #[test]
    fn vanishing_bias_recovers_model() {
        let base = hadamard_regression(3);
        let wrapped =
            RandomBias::new(Box::new(base.clone()), 1e-300, RngStream::new(1, 0)).unwrap();
        let mut rng = RngStream::new(2, 0).rng();
        let th = normal_vec(&mut rng, 6, 1.0);
        let s = base.random_sample(&mut rng);
        assert_eq!(wrapped.loss(&th, &s), base.loss(&th, &s));
    }

    #[test]
    fn bias_breaks_sign_flip() {
        let base = hadamard_regression(3);
        let flip = base.mirrors().remove(0);
        let wrapped = apply_symmetry_removal(
            Box::new(base),
            SymmetryRemoval::RandomBias(1e-2),
            RngStream::new(3, 0),
        )
        .unwrap();
        assert!(wrapped.mirrors().is_empty());
        let rep =
            verify_loss_symmetry(wrapped.as_ref(), &flip, 50, RngStream::new(4, 0), 1e-12).unwrap();
        assert!(!rep.passed);
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..50 {
            let th = normal_vec(&mut rng, 6, 1.0);
            let s = wrapped.random_sample(&mut rng);
            assert!(gradient_error(wrapped.as_ref(), &th, &s) < 1e-6);
        }
    }

    #[test]
    fn rejects_nonpositive_scale() {
        let r = RandomBias::new(Box::new(hadamard_regression(1)), 0.0, RngStream::new(0, 0));
        assert!(r.is_err());
    }
}

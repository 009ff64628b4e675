use super::{PerSampleLoss, Sample};
use crate::numerics::dot;
use crate::symmetry::ParamLayout;

/// `ℓ0(v; x, y) = ½(vᵀx − y)²`. Carries no mirror symmetry.
#[derive(Debug, Clone)]
pub struct LinearRegression {
    d: usize,
    layout: ParamLayout,
}

pub fn linear_regression(d: usize) -> LinearRegression {
    assert!(d >= 1, "linear_regression needs d >= 1");
    LinearRegression {
        d,
        layout: ParamLayout::new().with_vector("v", d),
    }
}

impl PerSampleLoss for LinearRegression {
    fn spec(&self) -> String {
        format!("linear(d={})", self.d)
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (self.d, 1)
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let r = dot(theta, &s.x) - s.y[0];
        0.5 * r * r
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let r = dot(theta, &s.x) - s.y[0];
        for (g, x) in grad.iter_mut().zip(&s.x) {
            *g += r * x;
        }
        0.5 * r * r
    }
}

use super::{PerSampleLoss, Sample};
use crate::numerics::Matrix;
use crate::symmetry::{
    make_standard_mirror, MirrorSymmetry, PairSign, ParamLayout, StandardMirrorKind,
};

/// `ℓ0(u, w; x, y) = ½((u⊙w)ᵀx − y)²` with θ = (u, w).
#[derive(Debug, Clone)]
pub struct HadamardRegression {
    d: usize,
    layout: ParamLayout,
}

pub fn hadamard_regression(d: usize) -> HadamardRegression {
    assert!(d >= 1, "hadamard_regression needs d >= 1");
    HadamardRegression {
        d,
        layout: ParamLayout::new().with_vector("u", d).with_vector("w", d),
    }
}

impl HadamardRegression {
    /// `v = u⊙w`
    pub fn effective_weights(&self, theta: &[f64]) -> Vec<f64> {
        let (u, w) = theta.split_at(self.d);
        u.iter().zip(w).map(|(a, b)| a * b).collect()
    }

    fn residual(&self, theta: &[f64], s: &Sample) -> f64 {
        let (u, w) = theta.split_at(self.d);
        let f: f64 = (0..self.d).map(|i| u[i] * w[i] * s.x[i]).sum();
        f - s.y[0]
    }
}

impl PerSampleLoss for HadamardRegression {
    fn spec(&self) -> String {
        format!("hadamard(d={})", self.d)
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (self.d, 1)
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let r = self.residual(theta, s);
        0.5 * r * r
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let d = self.d;
        let r = self.residual(theta, s);
        for i in 0..d {
            grad[i] += r * theta[d + i] * s.x[i];
            grad[d + i] += r * theta[i] * s.x[i];
        }
        0.5 * r * r
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        let mut kinds = vec![StandardMirrorKind::RescalingSignFlip {
            blocks: vec!["u".into(), "w".into()],
        }];
        for i in 0..self.d {
            for sign in [PairSign::Plus, PairSign::Minus] {
                kinds.push(StandardMirrorKind::RescalingScalarPair {
                    a: i,
                    b: self.d + i,
                    sign,
                });
            }
        }
        kinds
            .iter()
            .map(|k| make_standard_mirror(k, &self.layout).expect("valid hadamard mirror"))
            .collect()
    }

    fn product_matrix(&self, theta: &[f64]) -> Option<Matrix> {
        Some(Matrix::diag(&self.effective_weights(theta)))
    }
}

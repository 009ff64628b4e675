use super::{PerSampleLoss, Sample};
use crate::symmetry::{make_standard_mirror, MirrorSymmetry, ParamLayout, StandardMirrorKind};

/// `ℓ0(w, u; x, y) = ½(Σᵢ uᵢ tanh(wᵢx) − y)²` with scalar x, y and θ = (w, u).
#[derive(Debug, Clone)]
pub struct TwoLayerTanh {
    d: usize,
    layout: ParamLayout,
}

pub fn two_layer_tanh(d: usize) -> TwoLayerTanh {
    assert!(d >= 1, "two_layer_tanh needs d >= 1");
    TwoLayerTanh {
        d,
        layout: ParamLayout::new().with_vector("w", d).with_vector("u", d),
    }
}

impl TwoLayerTanh {
    fn residual(&self, theta: &[f64], s: &Sample) -> f64 {
        let (w, u) = theta.split_at(self.d);
        let f: f64 = w
            .iter()
            .zip(u)
            .map(|(wi, ui)| ui * (wi * s.x[0]).tanh())
            .sum();
        f - s.y[0]
    }
}

impl PerSampleLoss for TwoLayerTanh {
    fn spec(&self) -> String {
        format!("tanh(d={})", self.d)
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (1, 1)
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let r = self.residual(theta, s);
        0.5 * r * r
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let d = self.d;
        let x = s.x[0];
        let r = self.residual(theta, s);
        for i in 0..d {
            let t = (theta[i] * x).tanh();
            grad[i] += r * theta[d + i] * (1.0 - t * t) * x;
            grad[d + i] += r * t;
        }
        0.5 * r * r
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        (0..self.d)
            .map(|i| {
                make_standard_mirror(
                    &StandardMirrorKind::SignFlip {
                        indices: vec![i, self.d + i],
                    },
                    &self.layout,
                )
                .expect("valid sign flip")
            })
            .collect()
    }

    fn hidden_units(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        Some(
            (0..self.d)
                .map(|i| vec![theta[i], theta[self.d + i]])
                .collect(),
        )
    }

    fn hidden_preactivations(&self, theta: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        Some(theta[..self.d].iter().map(|w| w * x[0]).collect())
    }
}

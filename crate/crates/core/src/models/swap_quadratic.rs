use super::{PerSampleLoss, Sample};
use crate::numerics::Rng;
use crate::symmetry::{make_standard_mirror, MirrorSymmetry, ParamLayout, StandardMirrorKind};

/// `ℓ0(w1, w2) = ((w1 + w2) − 1)²`. Data-free; samples are empty.
#[derive(Debug, Clone)]
pub struct SwapQuadratic {
    layout: ParamLayout,
}

pub fn swap_quadratic() -> SwapQuadratic {
    SwapQuadratic {
        layout: ParamLayout::new().with_vector("w1", 1).with_vector("w2", 1),
    }
}

impl PerSampleLoss for SwapQuadratic {
    fn spec(&self) -> String {
        "swap_quadratic".into()
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (0, 0)
    }

    fn loss(&self, theta: &[f64], _s: &Sample) -> f64 {
        let r = theta[0] + theta[1] - 1.0;
        r * r
    }

    fn accumulate_grad(&self, theta: &[f64], _s: &Sample, grad: &mut [f64]) -> f64 {
        let r = theta[0] + theta[1] - 1.0;
        grad[0] += 2.0 * r;
        grad[1] += 2.0 * r;
        r * r
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        let kind = StandardMirrorKind::PermutationSwap {
            a: "w1".into(),
            b: "w2".into(),
        };
        vec![make_standard_mirror(&kind, &self.layout).expect("valid swap")]
    }

    fn random_sample(&self, _rng: &mut Rng) -> Sample {
        Sample::new(Vec::new(), Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::grad;

    #[test]
    fn minimizer_with_decay() {
        let m = swap_quadratic();
        let s = Sample::new(vec![], vec![]);
        assert_eq!(m.loss(&[0.5, 0.5], &s), 0.0);
        // stationarity of ℓ0 + γ‖w‖² on the line w1 = w2 = w: 2(2w − 1) + 2γw = 0
        for gamma in [0.1, 2.0, 10.0] {
            let w = 1.0 / (2.0 + gamma);
            let g = grad(&m, &[w, w], &s);
            assert!((g[0] + 2.0 * gamma * w).abs() < 1e-14);
            assert!((g[1] + 2.0 * gamma * w).abs() < 1e-14);
            assert!(w != 0.0);
        }
        assert_eq!(1.0 / (2.0 + 2.0), 0.25);
    }
}

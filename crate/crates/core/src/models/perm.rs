use super::{PerSampleLoss, Sample};
use crate::symmetry::{make_standard_mirror, MirrorSymmetry, ParamLayout, StandardMirrorKind};

/// `f(x) = Σ_a u_a tanh(w_aᵀx)`, `ℓ0 = ½(f(x) − y)²`. Each hidden unit is one
/// block `unit{a}` laid out as `(w_a, u_a)`.
#[derive(Debug, Clone)]
pub struct PermutationMlp {
    width: usize,
    in_dim: usize,
    layout: ParamLayout,
}

pub fn permutation_mlp(width: usize, in_dim: usize) -> PermutationMlp {
    assert!(width >= 2, "permutation_mlp needs width >= 2");
    assert!(in_dim >= 1, "permutation_mlp needs in_dim >= 1");
    let layout = (0..width).fold(ParamLayout::new(), |l, a| {
        l.with_vector(format!("unit{a}"), in_dim + 1)
    });
    PermutationMlp {
        width,
        in_dim,
        layout,
    }
}

impl PermutationMlp {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn unit<'a>(&self, theta: &'a [f64], a: usize) -> (&'a [f64], f64) {
        let k = self.in_dim + 1;
        let block = &theta[a * k..(a + 1) * k];
        (&block[..self.in_dim], block[self.in_dim])
    }

    fn pre(w: &[f64], x: &[f64]) -> f64 {
        w.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Network output `f(x)`.
    pub fn predict(&self, theta: &[f64], x: &[f64]) -> f64 {
        (0..self.width)
            .map(|a| {
                let (w, u) = self.unit(theta, a);
                u * Self::pre(w, x).tanh()
            })
            .sum()
    }
}

impl PerSampleLoss for PermutationMlp {
    fn spec(&self) -> String {
        format!("perm_mlp(width={},in={})", self.width, self.in_dim)
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (self.in_dim, 1)
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let r = self.predict(theta, &s.x) - s.y[0];
        0.5 * r * r
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let k = self.in_dim + 1;
        let r = self.predict(theta, &s.x) - s.y[0];
        for a in 0..self.width {
            let (w, u) = self.unit(theta, a);
            let t = Self::pre(w, &s.x).tanh();
            let g = &mut grad[a * k..(a + 1) * k];
            let c = r * u * (1.0 - t * t);
            for (gi, xi) in g.iter_mut().zip(&s.x) {
                *gi += c * xi;
            }
            g[self.in_dim] += r * t;
        }
        0.5 * r * r
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        let mut out = Vec::new();
        for a in 0..self.width {
            for b in (a + 1)..self.width {
                let kind = StandardMirrorKind::PermutationSwap {
                    a: format!("unit{a}"),
                    b: format!("unit{b}"),
                };
                out.push(make_standard_mirror(&kind, &self.layout).expect("valid swap"));
            }
        }
        out
    }

    fn hidden_units(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        let k = self.in_dim + 1;
        Some(theta.chunks(k).map(<[f64]>::to_vec).collect())
    }

    fn hidden_preactivations(&self, theta: &[f64], x: &[f64]) -> Option<Vec<f64>> {
        Some(
            (0..self.width)
                .map(|a| Self::pre(self.unit(theta, a).0, x))
                .collect(),
        )
    }
}

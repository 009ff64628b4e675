use super::{FullBatch, PerSampleLoss, Sample};
use crate::numerics::Matrix;
use crate::symmetry::{
    make_standard_mirror, MirrorSymmetry, ParamLayout, RotationTarget, Side, StandardMirrorKind,
};

/// `ℓ0 = ½‖f(x) − y‖²` with `f(x) = WUx`, or `(I + W)(I + U)x` when residual.
/// θ holds W then U, each d×d row-major.
#[derive(Debug, Clone)]
pub struct MatrixFactorization {
    d: usize,
    residual: bool,
    layout: ParamLayout,
}

pub fn matrix_factorization(d: usize, residual: bool) -> MatrixFactorization {
    assert!(d >= 1, "matrix_factorization needs d >= 1");
    MatrixFactorization {
        d,
        residual,
        layout: ParamLayout::new()
            .with_matrix("W", d, d)
            .with_matrix("U", d, d),
    }
}

impl MatrixFactorization {
    pub fn is_residual(&self) -> bool {
        self.residual
    }

    /// The paired mirror `W ↦ W(I − 2Π)`, `U ↦ (I − 2Π)U`.
    pub fn rotation_mirror(&self, projection: &Matrix) -> crate::Result<MirrorSymmetry> {
        make_standard_mirror(
            &StandardMirrorKind::RotationReflection {
                projection: projection.clone(),
                targets: vec![
                    RotationTarget {
                        block: "W".into(),
                        side: Side::Cols,
                    },
                    RotationTarget {
                        block: "U".into(),
                        side: Side::Rows,
                    },
                ],
            },
            &self.layout,
        )
    }

    /// Returns `(h, f)` with `h = Ux (+x)` and `f = Wh (+h)`.
    fn forward(&self, theta: &[f64], x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.d;
        let (w, u) = theta.split_at(d * d);
        let mut h: Vec<f64> = (0..d)
            .map(|i| {
                u[i * d..(i + 1) * d]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        if self.residual {
            h.iter_mut().zip(x).for_each(|(a, b)| *a += b);
        }
        let mut f: Vec<f64> = (0..d)
            .map(|i| {
                w[i * d..(i + 1) * d]
                    .iter()
                    .zip(&h)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        if self.residual {
            f.iter_mut().zip(&h).for_each(|(a, b)| *a += b);
        }
        (h, f)
    }
}

impl PerSampleLoss for MatrixFactorization {
    fn spec(&self) -> String {
        if self.residual {
            format!("matfac_residual(d={})", self.d)
        } else {
            format!("matfac(d={})", self.d)
        }
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        (self.d, self.d)
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        let (_, f) = self.forward(theta, &s.x);
        0.5 * f
            .iter()
            .zip(&s.y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let d = self.d;
        let (h, f) = self.forward(theta, &s.x);
        let r: Vec<f64> = f.iter().zip(&s.y).map(|(a, b)| a - b).collect();
        let w = &theta[..d * d];
        let (gw, gu) = grad.split_at_mut(d * d);
        let mut gh = if self.residual {
            r.clone()
        } else {
            vec![0.0; d]
        };
        for i in 0..d {
            for j in 0..d {
                gw[i * d + j] += r[i] * h[j];
                gh[j] += w[i * d + j] * r[i];
            }
        }
        for i in 0..d {
            for j in 0..d {
                gu[i * d + j] += gh[i] * s.x[j];
            }
        }
        0.5 * r.iter().map(|v| v * v).sum::<f64>()
    }

    fn full_batch<'a>(&'a self, samples: &'a [Sample]) -> Option<Box<dyn FullBatch + 'a>> {
        if samples.is_empty() {
            return None;
        }
        let d = self.d;
        let n = samples.len() as f64;
        let mut sxx = Matrix::zeros(d, d);
        let mut syx = Matrix::zeros(d, d);
        let mut yy = 0.0;
        for s in samples {
            let (xx, yx) = (sxx.as_mut_slice(), syx.as_mut_slice());
            for i in 0..d {
                for j in 0..d {
                    xx[i * d + j] += s.x[i] * s.x[j] / n;
                    yx[i * d + j] += s.y[i] * s.x[j] / n;
                }
            }
            yy += s.y.iter().map(|v| v * v).sum::<f64>() / n;
        }
        Some(Box::new(MatFacStats {
            model: self,
            sxx,
            syx,
            yy,
        }))
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        if self.residual {
            return Vec::new();
        }
        (0..self.d)
            .map(|i| {
                let mut e = vec![0.0; self.d];
                e[i] = 1.0;
                self.rotation_mirror(&Matrix::outer(&e, &e))
                    .expect("valid rotation mirror")
            })
            .collect()
    }

    fn product_matrix(&self, theta: &[f64]) -> Option<Matrix> {
        let d = self.d;
        let mut w = Matrix::from_vec(d, d, theta[..d * d].to_vec()).ok()?;
        let mut u = Matrix::from_vec(d, d, theta[d * d..].to_vec()).ok()?;
        if self.residual {
            w = w.add(&Matrix::identity(d)).ok()?;
            u = u.add(&Matrix::identity(d)).ok()?;
        }
        w.matmul(&u).ok()
    }
}

/// Second moments `Σxx = E[xxᵀ]`, `Σyx = E[yxᵀ]`, `E‖y‖²` of a dataset. With
/// `M` the end-to-end matrix, the mean loss is
/// `½tr(MΣxxMᵀ) − tr(MΣyxᵀ) + ½E‖y‖²` and `∂L/∂M = MΣxx − Σyx`.
struct MatFacStats<'a> {
    model: &'a MatrixFactorization,
    sxx: Matrix,
    syx: Matrix,
    yy: f64,
}

impl FullBatch for MatFacStats<'_> {
    fn accumulate_mean_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.model.d;
        let mut w = Matrix::from_vec(d, d, theta[..d * d].to_vec()).expect("finite θ");
        let mut u = Matrix::from_vec(d, d, theta[d * d..].to_vec()).expect("finite θ");
        if self.model.residual {
            w = w.add(&Matrix::identity(d)).expect("square");
            u = u.add(&Matrix::identity(d)).expect("square");
        }
        let m = w.matmul(&u).expect("square");
        let msxx = m.matmul(&self.sxx).expect("square");
        let gm = msxx.sub(&self.syx).expect("square");
        let gw = gm.matmul(&u.transpose()).expect("square");
        let gu = w.transpose().matmul(&gm).expect("square");
        let (a, b) = grad.split_at_mut(d * d);
        a.iter_mut().zip(gw.as_slice()).for_each(|(g, v)| *g += v);
        b.iter_mut().zip(gu.as_slice()).for_each(|(g, v)| *g += v);
        let quad: f64 = m.as_slice().iter().zip(msxx.as_slice()).map(|(p, q)| p * q).sum();
        let cross: f64 = m.as_slice().iter().zip(self.syx.as_slice()).map(|(p, q)| p * q).sum();
        0.5 * quad - cross + 0.5 * self.yy
    }
}

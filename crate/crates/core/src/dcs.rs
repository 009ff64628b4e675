//! Differentiable constraint by symmetry.
//!
//! A base parameter vector θ is reparametrized as
//! `θ = T(w, u, v) = (I − P)v + (Pw) ⊙ (Pu)` and the penalty `α(‖w‖² + ‖u‖²)` is
//! added. Flipping the sign of `(Pw, Pu)` leaves the wrapped loss unchanged, so
//! the wrapped model carries a mirror whose symmetric set is `Pw = Pu = 0`,
//! where `Pθ = 0`.

use crate::error::{check_dim, Error, Result};
use crate::models::{PerSampleLoss, Sample};
use crate::numerics::{norm, Matrix, Rng};
use crate::symmetry::{make_mirror, MirrorSymmetry, ParamLayout};

#[derive(Debug, Clone)]
pub struct DcsConfig {
    projection: Matrix,
    basis: Matrix,
    alpha: f64,
}

impl DcsConfig {
    /// `projection` must be symmetric and idempotent; `alpha ≥ 0`.
    pub fn new(projection: Matrix, alpha: f64) -> Result<Self> {
        if !projection.is_square() {
            return Err(Error::contract("DCS projection must be square"));
        }
        let pp = projection.matmul(&projection)?;
        if projection.asymmetry() > 1e-10 || pp.sub(&projection)?.max_abs() > 1e-10 {
            return Err(Error::contract("DCS projection must satisfy P = Pᵀ = P²"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::contract(format!(
                "DCS alpha must be >= 0, got {alpha}"
            )));
        }
        let eig = crate::numerics::sym_eig(&projection)?;
        let d = projection.rows();
        let cols: Vec<Vec<f64>> = (0..d)
            .filter(|&i| eig.values[i] > 0.5)
            .map(|i| eig.vector(i))
            .collect();
        Ok(DcsConfig {
            basis: Matrix::from_columns(d, &cols),
            projection,
            alpha,
        })
    }

    /// Uses the projection `P = OOᵀ` of an existing mirror.
    pub fn from_mirror(sym: &MirrorSymmetry, alpha: f64) -> Result<Self> {
        Self::new(sym.projection(), alpha)
    }

    /// `P = I`
    pub fn identity(d: usize, alpha: f64) -> Self {
        Self::new(Matrix::identity(d), alpha).expect("identity is a projection")
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        self.projection.matvec(x).expect("dimension checked")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcsParams {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl DcsParams {
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(3) {
            return Err(Error::contract(
                "DCS parameter length must be a multiple of 3",
            ));
        }
        let d = flat.len() / 3;
        Ok(DcsParams {
            w: flat[..d].to_vec(),
            u: flat[d..2 * d].to_vec(),
            v: flat[2 * d..].to_vec(),
        })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        [self.w.as_slice(), &self.u, &self.v].concat()
    }

    fn check(&self, d: usize) -> Result<()> {
        check_dim("DCS w", d, self.w.len())?;
        check_dim("DCS u", d, self.u.len())?;
        check_dim("DCS v", d, self.v.len())?;
        if self.to_flat().iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalDomain("non-finite DCS parameter".into()));
        }
        Ok(())
    }
}

/// Default initialization scale of the `w` and `u` blocks.
pub const DCS_INIT_SCALE: f64 = 0.5;

/// `T(w, u, v) = (I − P)v + (Pw) ⊙ (Pu)`
pub fn dcs_transform(p: &DcsParams, cfg: &DcsConfig) -> Result<Vec<f64>> {
    p.check(cfg.dim())?;
    Ok(transform_flat(cfg, &p.w, &p.u, &p.v))
}

fn transform_flat(cfg: &DcsConfig, w: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
    let pw = cfg.project(w);
    let pu = cfg.project(u);
    let pv = cfg.project(v);
    (0..v.len()).map(|i| v[i] - pv[i] + pw[i] * pu[i]).collect()
}

/// Returns `θ = T(w, u, v)` and the constraint residual `‖Pθ‖`.
pub fn dcs_extract(p: &DcsParams, cfg: &DcsConfig) -> Result<(Vec<f64>, f64)> {
    let theta = dcs_transform(p, cfg)?;
    let r = norm(&cfg.project(&theta));
    Ok((theta, r))
}

/// A preimage of θ under T: `v = θ`, `Pw = √|Pθ|`, `Pu = sign(Pθ)·√|Pθ|`.
/// Requires a coordinate projection (diagonal with 0/1 entries), the only case
/// where `Pθ` is always a Hadamard product of two vectors in `im(P)`.
pub fn dcs_preimage(theta: &[f64], cfg: &DcsConfig) -> Result<DcsParams> {
    check_dim("DCS preimage", cfg.dim(), theta.len())?;
    let p = &cfg.projection;
    let d = cfg.dim();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || p[(i, j)].abs() < 1e-12));
    if !diagonal {
        return Err(Error::Precondition(
            "explicit preimage needs a coordinate projection".into(),
        ));
    }
    let pt = cfg.project(theta);
    let w: Vec<f64> = pt.iter().map(|x| x.abs().sqrt()).collect();
    let u: Vec<f64> = pt.iter().map(|x| x.signum() * x.abs().sqrt()).collect();
    Ok(DcsParams {
        w,
        u,
        v: theta.to_vec(),
    })
}

/// The wrapped loss over `(w, u, v)`:
/// `ℓ0_base(T(w, u, v), x) + α(‖w‖² + ‖u‖²)`.
#[derive(Debug)]
pub struct DcsModel {
    base: Box<dyn PerSampleLoss>,
    cfg: DcsConfig,
    layout: ParamLayout,
}

pub fn dcs_wrap(base: Box<dyn PerSampleLoss>, cfg: DcsConfig) -> Result<DcsModel> {
    check_dim("DCS projection vs base model", base.dim(), cfg.dim())?;
    let d = base.dim();
    let layout = ParamLayout::new()
        .with_vector("w", d)
        .with_vector("u", d)
        .with_vector("v", d);
    Ok(DcsModel { base, cfg, layout })
}

impl DcsModel {
    pub fn base(&self) -> &dyn PerSampleLoss {
        self.base.as_ref()
    }

    pub fn config(&self) -> &DcsConfig {
        &self.cfg
    }

    /// `T` applied to a flat `(w, u, v)` vector.
    pub fn transform(&self, flat: &[f64]) -> Vec<f64> {
        let d = self.cfg.dim();
        transform_flat(&self.cfg, &flat[..d], &flat[d..2 * d], &flat[2 * d..])
    }

    /// Sign flip of `(Pw, Pu)`: `O = blockdiag(Q, Q, 0)` with `Q` an orthonormal
    /// basis of `im(P)`.
    pub fn artificial_mirror(&self) -> MirrorSymmetry {
        let d = self.cfg.dim();
        let q = &self.cfg.basis;
        let mut cols = Vec::with_capacity(2 * q.cols());
        for block in 0..2 {
            for c in q.columns() {
                let mut col = vec![0.0; 3 * d];
                col[block * d..(block + 1) * d].copy_from_slice(&c);
                cols.push(col);
            }
        }
        make_mirror(&Matrix::from_columns(3 * d, &cols))
            .expect("block basis is orthonormal")
            .with_label("dcs_sign_flip(Pw,Pu)")
    }

    fn penalty(&self, flat: &[f64]) -> f64 {
        let d = self.cfg.dim();
        self.cfg.alpha * flat[..2 * d].iter().map(|x| x * x).sum::<f64>()
    }

    /// Chain rule through T for a base gradient `g` at `T(w, u, v)`.
    fn pull_back(&self, flat: &[f64], g: &[f64], grad: &mut [f64], copies: f64) {
        let d = self.cfg.dim();
        let pw = self.cfg.project(&flat[..d]);
        let pu = self.cfg.project(&flat[d..2 * d]);
        let gu_term: Vec<f64> = g.iter().zip(&pw).map(|(a, b)| a * b).collect();
        let gw_term: Vec<f64> = g.iter().zip(&pu).map(|(a, b)| a * b).collect();
        let pgw = self.cfg.project(&gw_term);
        let pgu = self.cfg.project(&gu_term);
        let pg = self.cfg.project(g);
        let a2 = 2.0 * self.cfg.alpha * copies;
        for i in 0..d {
            grad[i] += pgw[i] + a2 * flat[i];
            grad[d + i] += pgu[i] + a2 * flat[d + i];
            grad[2 * d + i] += g[i] - pg[i];
        }
    }
}

impl PerSampleLoss for DcsModel {
    fn spec(&self) -> String {
        format!("dcs(alpha={})[{}]", self.cfg.alpha, self.base.spec())
    }

    fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    fn sample_shape(&self) -> (usize, usize) {
        self.base.sample_shape()
    }

    fn init_scale(&self, index: usize) -> f64 {
        match index {
            0 | 1 => DCS_INIT_SCALE,
            _ => 0.1 / (self.cfg.dim().max(1) as f64).sqrt(),
        }
    }

    fn loss(&self, theta: &[f64], s: &Sample) -> f64 {
        self.base.loss(&self.transform(theta), s) + self.penalty(theta)
    }

    fn accumulate_grad(&self, theta: &[f64], s: &Sample, grad: &mut [f64]) -> f64 {
        let t = self.transform(theta);
        let mut g = vec![0.0; t.len()];
        let l = self.base.accumulate_grad(&t, s, &mut g);
        self.pull_back(theta, &g, grad, 1.0);
        l + self.penalty(theta)
    }

    fn accumulate_batch_grad(&self, theta: &[f64], batch: &[&Sample], grad: &mut [f64]) -> f64 {
        let t = self.transform(theta);
        let mut g = vec![0.0; t.len()];
        let l = self.base.accumulate_batch_grad(&t, batch, &mut g);
        let n = batch.len() as f64;
        self.pull_back(theta, &g, grad, n);
        l + n * self.penalty(theta)
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        vec![self.artificial_mirror()]
    }

    fn product_matrix(&self, theta: &[f64]) -> Option<Matrix> {
        self.base.product_matrix(&self.transform(theta))
    }

    fn hidden_units(&self, theta: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.base.hidden_units(&self.transform(theta))
    }

    fn random_sample(&self, rng: &mut Rng) -> Sample {
        self.base.random_sample(rng)
    }
}

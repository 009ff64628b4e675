use crate::error::{Error, Result};
use crate::models::{PerSampleLoss, Sample};
use crate::numerics::{fd_hessian, orthogonal_complement, sym_eig, Matrix, SymEigResult};
use crate::symmetry::MirrorSymmetry;

/// Largest `mirror_residual` accepted as a symmetric point.
pub const SYMMETRIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HessianReport {
    pub hessian: Matrix,
    /// `max |mᵀHn|` over orthonormal bases `m ∈ ker(Oᵀ)`, `n ∈ im(P)`.
    pub block_residual: f64,
    pub eig: SymEigResult,
}

impl HessianReport {
    pub fn frobenius(&self) -> f64 {
        self.hessian.frobenius_norm()
    }
}

/// Finite-difference Hessian of `ℓ0(·, x)` at a symmetric θ, and the size of
/// its off-diagonal block between `ker(Oᵀ)` and `im(P)`.
pub fn hessian_block_check(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    theta: &[f64],
    x: &Sample,
) -> Result<HessianReport> {
    let r = sym.mirror_residual(theta)?;
    if r > SYMMETRIC_TOL {
        return Err(Error::Precondition(format!(
            "θ is not symmetric under {} (residual {r:e})",
            sym.label()
        )));
    }
    let h = fd_hessian(|t| model.loss(t, x), theta, None)?;
    let q = sym.o();
    let block_residual = if q.cols() == 0 {
        0.0
    } else {
        let k = orthogonal_complement(q);
        let hq = h.matmul(q)?;
        k.transpose().matmul(&hq)?.max_abs()
    };
    let eig = sym_eig(&h)?;
    Ok(HessianReport {
        hessian: h,
        block_residual,
        eig,
    })
}

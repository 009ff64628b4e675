use crate::error::{Error, Result};
use crate::models::{mean_loss, PerSampleLoss, Sample};
use crate::numerics::norm;
use crate::symmetry::MirrorSymmetry;

/// `L_γ(θ) = L0(θ) + γ‖θ‖²` averaged over `data`.
pub fn regularized_loss(
    model: &dyn PerSampleLoss,
    theta: &[f64],
    data: &[Sample],
    gamma: f64,
) -> f64 {
    let n = norm(theta);
    mean_loss(model, theta, data) + gamma * n * n
}

/// `γ0 = (L0(u) − L0(θ)) / s²` with `u = (I − P)θ`, `s = ‖Pθ‖`. For every
/// `γ > max(0, γ0)` the symmetric projection has the lower regularized loss.
pub fn gamma_threshold(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    theta: &[f64],
    data: &[Sample],
) -> Result<f64> {
    let s = sym.mirror_residual(theta)?;
    if s == 0.0 {
        return Err(Error::Precondition(
            "γ threshold is undefined at a symmetric point".into(),
        ));
    }
    let u = sym.project_symmetric(theta)?;
    Ok((mean_loss(model, &u, data) - mean_loss(model, theta, data)) / (s * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{swap_quadratic, hadamard_regression};

    #[test]
    fn scalar_hadamard_threshold() {
        // ½(uw·x − y)² with x = √2, y = √2 is (uw − 1)².
        let m = hadamard_regression(1);
        let r2 = 2f64.sqrt();
        let data = [Sample::scalar(r2, r2)];
        let flip = &m.mirrors()[0];
        let g0 = gamma_threshold(&m, flip, &[1.0, 1.0], &data).unwrap();
        assert!((g0 - 0.5).abs() < 1e-14);
        for gamma in [0.51, 1.0, 3.0] {
            let sym_loss = regularized_loss(&m, &[0.0, 0.0], &data, gamma);
            let loss = regularized_loss(&m, &[1.0, 1.0], &data, gamma);
            assert!((sym_loss - 1.0).abs() < 1e-14);
            assert!((loss - 2.0 * gamma).abs() < 1e-14);
            assert!(sym_loss < loss);
        }
    }

    #[test]
    fn negative_threshold_and_symmetric_point() {
        let m = swap_quadratic();
        let data = [Sample::new(vec![], vec![])];
        let swap = &m.mirrors()[0];
        // (1, −1) has loss 1, its projection (0, 0) also has loss 1
        assert_eq!(gamma_threshold(&m, swap, &[1.0, -1.0], &data).unwrap(), 0.0);
        // (2, 0) and its projection (1, 1) both have loss 1
        let g = gamma_threshold(&m, swap, &[2.0, 0.0], &data).unwrap();
        assert!(g <= 0.0);
        assert!(gamma_threshold(&m, swap, &[0.5, 0.5], &data).is_err());
    }
}

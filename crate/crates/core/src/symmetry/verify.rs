use super::mirror::MirrorSymmetry;
use crate::error::{check_dim, Result};
use crate::models::PerSampleLoss;
use crate::numerics::{normal_vec, RngStream};

/// Outcome of a numeric symmetry certification. Failure is data, not an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub mirror: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Draws `samples` random `(w, x)` pairs and compares `ℓ0(w, x)` with
/// `ℓ0(Rw, x)`. Parameters are standard normal; inputs come from the model's
/// own random sample generator. Deviations are measured relative to
/// `max(1, |ℓ0(w, x)|)`.
pub fn verify_loss_symmetry(
    loss: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    samples: usize,
    rng: RngStream,
    tol: f64,
) -> Result<SymmetryReport> {
    check_dim("mirror vs model dimension", loss.dim(), sym.dim())?;
    let mut rng = rng.rng();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let w = normal_vec(&mut rng, loss.dim(), 1.0);
        let x = loss.random_sample(&mut rng);
        let rw = sym.reflect(&w)?;
        let l = loss.loss(&w, &x);
        let dev = (l - loss.loss(&rw, &x)).abs() / l.abs().max(1.0);
        worst = if dev.is_nan() {
            f64::INFINITY
        } else {
            worst.max(dev)
        };
    }
    Ok(SymmetryReport {
        mirror: sym.label().to_string(),
        samples,
        max_deviation: worst,
        tolerance: tol,
        passed: worst <= tol,
    })
}

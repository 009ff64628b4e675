use crate::error::{check_dim, Error, Result};
use crate::models::{mean_loss, PerSampleLoss, Sample};
use crate::numerics::norm;
use crate::symmetry::MirrorSymmetry;

#[derive(Debug, Clone, PartialEq)]
pub struct L1Report {
    /// Right-derivative of `L̃(z) = L(θ0 + √z·n)` at `z = 0⁺` (Richardson
    /// extrapolated).
    pub slope: f64,
    /// `q(s) = (L(θ0 + sn) − L(θ0)) / s²` on the grid.
    pub quotients: Vec<f64>,
    /// Successive differences `q(s_k) − q(s_{k+1})`: the residual of the
    /// linear-in-z fit.
    pub residuals: Vec<f64>,
    /// `residual_k / residual_{k+1}`; 4 when the residual is `O(z²)`.
    pub ratios: Vec<f64>,
    /// `max |L(θ0 + sn) − L(θ0 − sn)|`
    pub odd_part: f64,
    pub passed: bool,
}

/// Checks that the loss along `n ∈ im(P)` from a symmetric θ0 is a smooth
/// function of `z = s²`. `s_grid` must halve at each step.
pub fn l1_equivalence_check(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    theta0: &[f64],
    n: &[f64],
    s_grid: &[f64],
    data: &[Sample],
) -> Result<L1Report> {
    check_dim("l1 check θ0", model.dim(), theta0.len())?;
    check_dim("l1 check direction", model.dim(), n.len())?;
    if sym.mirror_residual(theta0)? > super::SYMMETRIC_TOL {
        return Err(Error::Precondition("θ0 is not a symmetric point".into()));
    }
    if (norm(n) - 1.0).abs() > 1e-10 {
        return Err(Error::contract("direction must have unit norm"));
    }
    if s_grid.len() < 3
        || s_grid
            .windows(2)
            .any(|w| (w[1] - 0.5 * w[0]).abs() > 1e-12 * w[0])
    {
        return Err(Error::contract(
            "s_grid needs >= 3 entries, each half the previous",
        ));
    }
    let l0 = mean_loss(model, theta0, data);
    let at = |s: f64| -> f64 {
        let t: Vec<f64> = theta0.iter().zip(n).map(|(a, b)| a + s * b).collect();
        mean_loss(model, &t, data)
    };
    let quotients: Vec<f64> = s_grid.iter().map(|&s| (at(s) - l0) / (s * s)).collect();
    let odd_part = s_grid
        .iter()
        .map(|&s| (at(s) - at(-s)).abs())
        .fold(0.0, f64::max);
    let residuals: Vec<f64> = quotients.windows(2).map(|w| w[0] - w[1]).collect();
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let last_q = *quotients.last().expect("grid is nonempty");
    let slope = last_q - residuals.last().expect("grid has >= 2 entries") / 3.0;

    let scale = 1.0 + l0.abs() + last_q.abs();
    let even = odd_part <= 1e-10 * scale;
    let exact = residuals.iter().all(|r| r.abs() <= 1e-9 * scale);
    let quartic = ratios.iter().all(|r| (3.0..=5.0).contains(r));
    Ok(L1Report {
        slope,
        quotients,
        residuals,
        ratios,
        odd_part,
        passed: even && (exact || quartic),
    })
}

/// `s0, s0/2, …` with `len` entries.
pub fn halving_grid(s0: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| s0 / f64::powi(2.0, k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        swap_quadratic, hadamard_regression, linear_regression, two_layer_tanh,
    };
    use crate::numerics::{Matrix, RngStream};
    use crate::symmetry::make_mirror;

    #[test]
    fn tanh_unit_direction() {
        let m = two_layer_tanh(2);
        let sym = &m.mirrors()[0];
        let n = sym.o().column(0);
        let data = [Sample::scalar(1.0, 2.0), Sample::scalar(-0.5, 1.0)];
        let r = l1_equivalence_check(&m, sym, &[0.0; 4], &n, &halving_grid(0.2, 6), &data).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.slope.is_finite());
    }

    #[test]
    fn hadamard_pair_is_exactly_quadratic_in_z() {
        let m = hadamard_regression(2);
        let mut rng = RngStream::new(0, 0).rng();
        let data: Vec<Sample> = (0..5).map(|_| m.random_sample(&mut rng)).collect();
        for sym in m.mirrors().iter().skip(1) {
            let n = sym.o().column(0);
            let r =
                l1_equivalence_check(&m, sym, &[0.0; 4], &n, &halving_grid(0.5, 5), &data).unwrap();
            assert!(r.passed, "{} {r:?}", sym.label());
            for ratio in &r.ratios {
                assert!((ratio - 4.0).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn exact_linearity_in_z() {
        // moving along (1, −1) keeps w1 + w2 = 1, so L̃ is flat
        let m = swap_quadratic();
        let sym = &m.mirrors()[0];
        let n = sym.o().column(0);
        let data = [Sample::new(vec![], vec![])];
        let r =
            l1_equivalence_check(&m, sym, &[0.5, 0.5], &n, &halving_grid(1.0, 4), &data).unwrap();
        assert!(r.passed);
        assert_eq!(r.slope, 0.0);
    }

    #[test]
    fn fake_mirror_fails() {
        let m = linear_regression(2);
        let fake = make_mirror(&Matrix::from_columns(2, &[vec![1.0, 0.0]])).unwrap();
        let data = [Sample::new(vec![1.0, 0.5], vec![1.0])];
        let r = l1_equivalence_check(
            &m,
            &fake,
            &[0.0, 0.3],
            &[1.0, 0.0],
            &halving_grid(0.2, 5),
            &data,
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.odd_part > 1e-3);
    }
}

use super::matrix::{norm_inf, Matrix};
use crate::error::{Error, Result};

/// Default step: `1e-4 · max(1, ‖w‖∞)`.
pub fn default_step(w: &[f64]) -> f64 {
    1e-4 * norm_inf(w).max(1.0)
}

fn eval(f: &impl Fn(&[f64]) -> f64, w: &[f64]) -> Result<f64> {
    let v = f(w);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericalDomain(format!(
            "non-finite function value {v}"
        )))
    }
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, w: &[f64], h: Option<f64>) -> Result<Vec<f64>> {
    let h = step(w, h)?;
    let mut p = w.to_vec();
    let mut grad = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        p[i] = w[i] + h;
        let fp = eval(&f, &p)?;
        p[i] = w[i] - h;
        let fm = eval(&f, &p)?;
        p[i] = w[i];
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

/// Second-order central-difference Hessian, symmetrized.
pub fn fd_hessian(f: impl Fn(&[f64]) -> f64, w: &[f64], h: Option<f64>) -> Result<Matrix> {
    let h = step(w, h)?;
    let n = w.len();
    let f0 = eval(&f, w)?;
    let mut p = w.to_vec();
    let mut hess = Matrix::zeros(n, n);
    for i in 0..n {
        p[i] = w[i] + h;
        let fp = eval(&f, &p)?;
        p[i] = w[i] - h;
        let fm = eval(&f, &p)?;
        p[i] = w[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..n {
            let mut corner = |si: f64, sj: f64| {
                p[i] = w[i] + si * h;
                p[j] = w[j] + sj * h;
                let v = eval(&f, &p);
                p[i] = w[i];
                p[j] = w[j];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                + corner(-1.0, -1.0)?)
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess.symmetrized())
}

/// Gradient and Hessian by central differences at `w`.
pub fn finite_diff(
    f: impl Fn(&[f64]) -> f64,
    w: &[f64],
    h: Option<f64>,
) -> Result<(Vec<f64>, Matrix)> {
    let g = fd_gradient(&f, w, h)?;
    let hess = fd_hessian(&f, w, h)?;
    Ok((g, hess))
}

fn step(w: &[f64], h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| default_step(w));
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(Error::contract(format!(
            "finite-difference step must be positive, got {h}"
        )))
    }
}

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

/// Thin singular value decomposition `A = U·diag(s)·Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m×k, orthonormal columns, k = min(m, n).
    pub u: Matrix,
    /// Nonnegative, descending.
    pub singular_values: Vec<f64>,
    /// n×k, orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let (m, n, k) = (self.u.rows(), self.v.rows(), self.singular_values.len());
        Matrix::from_fn(m, n, |i, j| {
            (0..k)
                .map(|l| self.u[(i, l)] * self.singular_values[l] * self.v[(j, l)])
                .sum()
        })
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Matrix) -> Result<SvdResult> {
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDomain(
            "non-finite entry in svd input".into(),
        ));
    }
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (m, n) = (a.rows(), a.cols());
    // Rows of `cols` are the columns of A; rotations act on pairs of rows.
    let mut cols: Vec<Vec<f64>> = a.columns();
    let mut vt: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, i, j, c, s);
                rotate_pair(&mut vt, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let smax = order.first().map_or(0.0, |&i| sigma[i]);

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &idx in &order {
        let s = sigma[idx];
        let mut u = if s > 0.0 {
            cols[idx].iter().map(|x| x / s).collect()
        } else {
            vec![0.0; m]
        };
        // Re-orthogonalize; columns belonging to negligible singular values are
        // replaced by a completion vector.
        for b in &u_cols {
            let p = dot(b, &u);
            u.iter_mut().zip(b).for_each(|(x, bi)| *x -= p * bi);
        }
        let r = norm(&u);
        if s <= smax * f64::EPSILON * (m as f64) || r < 0.5 {
            u = completion_vector(&u_cols, m);
        } else {
            u.iter_mut().for_each(|x| *x /= r);
        }
        u_cols.push(u);
        v_cols.push(vt[idx].clone());
        values.push(s);
    }

    Ok(SvdResult {
        u: Matrix::from_columns(m, &u_cols),
        singular_values: values,
        v: Matrix::from_columns(n, &v_cols),
    })
}

fn rotate_pair(rows: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = rows.split_at_mut(j);
    let (ri, rj) = (&mut head[i], &mut tail[0]);
    for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

fn completion_vector(existing: &[Vec<f64>], m: usize) -> Vec<f64> {
    for e in 0..m {
        let mut c = vec![0.0; m];
        c[e] = 1.0;
        for _ in 0..2 {
            for b in existing {
                let p = dot(b, &c);
                c.iter_mut().zip(b).for_each(|(x, bi)| *x -= p * bi);
            }
        }
        let r = norm(&c);
        if r > 1e-6 {
            c.iter_mut().for_each(|x| *x /= r);
            return c;
        }
    }
    unreachable!("fewer than m orthonormal columns always admit a completion")
}

/// Number of singular values strictly above `rel_tol · s[0]`.
pub fn numerical_rank(s: &[f64], rel_tol: f64) -> Result<usize> {
    if rel_tol < 0.0 || rel_tol.is_nan() {
        return Err(Error::contract(
            "numerical_rank tolerance must be nonnegative",
        ));
    }
    if s.iter().any(|v| *v < 0.0) || s.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::contract(
            "singular values must be nonnegative and descending",
        ));
    }
    let Some(&top) = s.first() else { return Ok(0) };
    let cut = rel_tol * top;
    Ok(s.iter().filter(|v| **v > cut && **v > 0.0).count())
}

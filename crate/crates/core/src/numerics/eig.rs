use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix,
}

impl SymEigResult {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `V·diag(λ)·Vᵀ`
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let v = &self.vectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)]).sum()
        })
    }
}

const SYMMETRY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Symmetric eigensolver (cyclic Jacobi).
pub fn sym_eig(a: &Matrix) -> Result<SymEigResult> {
    if !a.is_square() {
        return Err(Error::contract(format!(
            "sym_eig needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.asymmetry() > SYMMETRY_TOL {
        return Err(Error::contract("sym_eig input is not symmetric"));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalDomain(
            "non-finite entry in sym_eig input".into(),
        ));
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigResult { values, vectors })
}

/// Orthonormal basis of the span of `cols`' columns (modified Gram-Schmidt
/// with one reorthogonalization pass). Dependent columns are an error.
pub fn orthonormalize(cols: &Matrix) -> Result<Matrix> {
    let n = cols.rows();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols.cols());
    for j in 0..cols.cols() {
        let mut c = cols.column(j);
        let original = norm(&c);
        if original == 0.0 || !original.is_finite() {
            return Err(Error::DependentColumns(j));
        }
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= proj * bi;
                }
            }
        }
        let r = norm(&c);
        if r <= 1e-10 * original {
            return Err(Error::DependentColumns(j));
        }
        c.iter_mut().for_each(|x| *x /= r);
        basis.push(c);
    }
    Ok(Matrix::from_columns(n, &basis))
}

/// Orthonormal basis of the orthogonal complement of the span of `basis`'
/// (orthonormal) columns, obtained by sweeping the standard basis.
pub fn orthogonal_complement(basis: &Matrix) -> Matrix {
    let n = basis.rows();
    let mut found: Vec<Vec<f64>> = basis.columns();
    let start = found.len();
    for e in 0..n {
        if found.len() == n {
            break;
        }
        let mut c = vec![0.0; n];
        c[e] = 1.0;
        for _ in 0..2 {
            for b in &found {
                let proj = dot(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= proj * bi;
                }
            }
        }
        let r = norm(&c);
        if r > 1e-8 {
            c.iter_mut().for_each(|x| *x /= r);
            found.push(c);
        }
    }
    Matrix::from_columns(n, &found[start..])
}

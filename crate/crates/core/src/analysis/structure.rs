use crate::error::{check_dim, Result};
use crate::models::{PerSampleLoss, Sample};
use crate::numerics::{norm, numerical_rank, svd, sym_eig, Matrix};
use crate::optimize::{dead_neurons, DEAD_THRESHOLD};

/// Magnitude below which a parameter counts as zero.
pub const SPARSITY_THRESHOLD: f64 = 1e-6;
/// Default relative tolerance for the rank of a product matrix.
pub const RANK_TOL: f64 = 1e-6;
/// Relative distance below which two hidden units are merged.
pub const CLUSTER_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureMetrics {
    pub sparsity: f64,
    pub rank: Option<usize>,
    pub dead_neurons: Option<usize>,
    pub cluster_count: Option<usize>,
}

/// Fraction of entries with `|θ_i| < 1e−6`.
pub fn sparsity(theta: &[f64]) -> f64 {
    if theta.is_empty() {
        return 0.0;
    }
    theta
        .iter()
        .filter(|v| v.abs() < SPARSITY_THRESHOLD)
        .count() as f64
        / theta.len() as f64
}

/// Connected components of the graph linking units `a, b` with
/// `‖θ_a − θ_b‖ < 1e−3·(1 + max(‖θ_a‖, ‖θ_b‖))`.
pub fn cluster_count(units: &[Vec<f64>]) -> usize {
    let n = units.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let norms: Vec<f64> = units.iter().map(|u| norm(u)).collect();
    for a in 0..n {
        for b in (a + 1)..n {
            let dist = units[a]
                .iter()
                .zip(&units[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            if dist < CLUSTER_TOL * (1.0 + norms[a].max(norms[b])) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Sparsity of θ, rank of the product matrix, dead parameters over `data`
/// and hidden-unit clusters, whichever the model supports.
pub fn structure_metrics(
    model: &dyn PerSampleLoss,
    theta: &[f64],
    data: Option<&[Sample]>,
    rank_tol: f64,
) -> Result<StructureMetrics> {
    check_dim("structure metrics θ", model.dim(), theta.len())?;
    let rank = match model.product_matrix(theta) {
        Some(p) => Some(numerical_rank(&svd(&p)?.singular_values, rank_tol)?),
        None => None,
    };
    Ok(StructureMetrics {
        sparsity: sparsity(theta),
        rank,
        dead_neurons: data.map(|d| dead_neurons(model, theta, d, DEAD_THRESHOLD)),
        cluster_count: model.hidden_units(theta).map(|u| cluster_count(&u)),
    })
}

/// Pearson correlation of hidden pre-activations over `inputs`, with units
/// reordered by their entry in the leading eigenvector. Constant units get
/// zero correlation with the others. Returns the matrix and the order.
pub fn preactivation_correlation(
    model: &dyn PerSampleLoss,
    theta: &[f64],
    inputs: &[Vec<f64>],
) -> Result<(Matrix, Vec<usize>)> {
    let acts: Vec<Vec<f64>> = inputs
        .iter()
        .map(|x| {
            model.hidden_preactivations(theta, x).ok_or_else(|| {
                crate::Error::contract(format!("model {} has no hidden units", model.spec()))
            })
        })
        .collect::<Result<_>>()?;
    let width = acts.first().map_or(0, Vec::len);
    let n = acts.len() as f64;
    let mean: Vec<f64> = (0..width)
        .map(|a| acts.iter().map(|r| r[a]).sum::<f64>() / n)
        .collect();
    let sd: Vec<f64> = (0..width)
        .map(|a| (acts.iter().map(|r| (r[a] - mean[a]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let corr = Matrix::from_fn(width, width, |a, b| {
        if a == b {
            1.0
        } else if sd[a] == 0.0 || sd[b] == 0.0 {
            0.0
        } else {
            acts.iter()
                .map(|r| (r[a] - mean[a]) * (r[b] - mean[b]))
                .sum::<f64>()
                / (n * sd[a] * sd[b])
        }
    });
    let eig = sym_eig(&corr.symmetrized())?;
    let lead = eig.vector(width.saturating_sub(1));
    let mut order: Vec<usize> = (0..width).collect();
    order.sort_by(|&i, &j| lead[i].total_cmp(&lead[j]).then(i.cmp(&j)));
    let sorted = Matrix::from_fn(width, width, |i, j| corr[(order[i], order[j])]);
    Ok((sorted, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{matrix_factorization, permutation_mlp};
    use crate::numerics::{normal_vec, RngStream};

    #[test]
    fn zero_and_identity() {
        let m = matrix_factorization(3, false);
        let z = structure_metrics(&m, &[0.0; 18], None, RANK_TOL).unwrap();
        assert_eq!(z.sparsity, 1.0);
        assert_eq!(z.rank, Some(0));
        let id = Matrix::identity(3);
        let theta = [id.as_slice(), id.as_slice()].concat();
        let s = structure_metrics(&m, &theta, None, RANK_TOL).unwrap();
        assert_eq!(s.rank, Some(3));
        assert!((s.sparsity - 12.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn constructed_rank_k() {
        let m = matrix_factorization(6, false);
        let mut rng = RngStream::new(0, 0).rng();
        for k in 0..=6 {
            // W keeps k columns and U keeps the matching k rows
            let mut theta = normal_vec(&mut rng, 72, 1.0);
            for i in 0..6 {
                for j in k..6 {
                    theta[i * 6 + j] = 0.0;
                    theta[36 + j * 6 + i] = 0.0;
                }
            }
            let s = structure_metrics(&m, &theta, None, 1e-9).unwrap();
            assert_eq!(s.rank, Some(k));
        }
    }

    #[test]
    fn clusters() {
        let units = vec![
            vec![1.0, 2.0],
            vec![1.0 + 1e-5, 2.0],
            vec![0.0, 0.0],
            vec![0.0, 1e-4],
            vec![5.0, 5.0],
        ];
        assert_eq!(cluster_count(&units), 3);
        let m = permutation_mlp(4, 2);
        let theta: Vec<f64> = (0..12).map(f64::from).collect();
        let s = structure_metrics(&m, &theta, None, RANK_TOL).unwrap();
        assert_eq!(s.cluster_count, Some(4));
        assert_eq!(s.rank, None);
    }

    #[test]
    fn correlation_of_tied_units() {
        let m = permutation_mlp(3, 2);
        let theta = [1.0, 0.5, 1.0, 1.0, 0.5, 1.0, -0.3, 2.0, 1.0];
        let mut rng = RngStream::new(1, 0).rng();
        let xs: Vec<Vec<f64>> = (0..200).map(|_| normal_vec(&mut rng, 2, 1.0)).collect();
        let (c, order) = preactivation_correlation(&m, &theta, &xs).unwrap();
        assert_eq!(order.len(), 3);
        // units 0 and 1 are identical, so their correlation is one
        let p0 = order.iter().position(|&u| u == 0).unwrap();
        let p1 = order.iter().position(|&u| u == 1).unwrap();
        assert!((c[(p0, p1)] - 1.0).abs() < 1e-12);
    }
}

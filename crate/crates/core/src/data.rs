//! Seeded synthetic data generators.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::models::Sample;
use crate::numerics::{normal, normal_vec, Rng, RngStream};

/// A fixed, ordered set of samples together with the recipe that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub generator_tag: String,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `x_0,…,x_{d−1},y_0,…`.
    pub fn to_csv(&self) -> String {
        let (nx, ny) = self
            .samples
            .first()
            .map_or((0, 0), |s| (s.x.len(), s.y.len()));
        let header: Vec<String> = (0..nx)
            .map(|i| format!("x_{i}"))
            .chain((0..ny).map(|i| format!("y_{i}")))
            .collect();
        let mut out = header.join(",");
        out.push('\n');
        for s in &self.samples {
            let row: Vec<String> = s.x.iter().chain(&s.y).map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// A target rule that can emit fresh samples on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `x ~ N(0, I_d)`, `y = mean(x) + ε`, `ε ~ N(0, noise_sd²)`.
    SparseRegression { d: usize, noise_sd: f64 },
    /// `x ~ N(0, I_d)`, `y_i = μx_i + (1 − μ)ε_i`, `ε_i ~ N(0, 2/i)` with 1-based i.
    MatFac { d: usize, mu: f64 },
    /// `x ~ N(0, I_d)`, `y = Σ_a c_a tanh(t_aᵀx) + ε`.
    Teacher {
        weights: Vec<Vec<f64>>,
        readout: Vec<f64>,
        noise_sd: f64,
    },
}

impl Generator {
    pub fn sparse_regression(d: usize, noise_sd: f64) -> Result<Self> {
        if d == 0 || noise_sd.is_nan() || noise_sd < 0.0 {
            return Err(Error::contract(
                "sparse regression needs d >= 1 and noise_sd >= 0",
            ));
        }
        Ok(Generator::SparseRegression { d, noise_sd })
    }

    pub fn matfac(d: usize, mu: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::contract("matfac data needs d >= 1"));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::contract(format!("mu must lie in [0, 1], got {mu}")));
        }
        Ok(Generator::MatFac { d, mu })
    }

    /// A random teacher network with `units` hidden tanh units.
    pub fn teacher(in_dim: usize, units: usize, noise_sd: f64, rng: RngStream) -> Result<Self> {
        if in_dim == 0 || units == 0 {
            return Err(Error::contract("teacher needs in_dim >= 1 and units >= 1"));
        }
        let mut r = rng.rng();
        let scale = 1.0 / (in_dim as f64).sqrt();
        let weights = (0..units)
            .map(|_| normal_vec(&mut r, in_dim, scale))
            .collect();
        let readout = normal_vec(&mut r, units, 1.0);
        Ok(Generator::Teacher {
            weights,
            readout,
            noise_sd,
        })
    }

    pub fn tag(&self) -> String {
        match self {
            Generator::SparseRegression { d, noise_sd } => {
                format!("sparse_regression(d={d},noise_sd={noise_sd})")
            }
            Generator::MatFac { d, mu } => format!("matfac(d={d},mu={mu})"),
            Generator::Teacher {
                weights, noise_sd, ..
            } => format!(
                "teacher(in={},units={},noise_sd={noise_sd})",
                weights.first().map_or(0, Vec::len),
                weights.len()
            ),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> Sample {
        match self {
            Generator::SparseRegression { d, noise_sd } => {
                let x = normal_vec(rng, *d, 1.0);
                let y = x.iter().sum::<f64>() / *d as f64 + noise_sd * normal(rng);
                Sample::new(x, vec![y])
            }
            Generator::MatFac { d, mu } => {
                let x = normal_vec(rng, *d, 1.0);
                let y = (0..*d)
                    .map(|i| {
                        let eps = (2.0 / (i + 1) as f64).sqrt() * normal(rng);
                        mu * x[i] + (1.0 - mu) * eps
                    })
                    .collect();
                Sample::new(x, y)
            }
            Generator::Teacher {
                weights,
                readout,
                noise_sd,
            } => {
                let x = normal_vec(rng, weights[0].len(), 1.0);
                let f: f64 = weights
                    .iter()
                    .zip(readout)
                    .map(|(t, c)| c * t.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().tanh())
                    .sum();
                Sample::new(x, vec![f + noise_sd * normal(rng)])
            }
        }
    }

    /// `n` samples drawn from a fresh generator seeded by `rng`.
    pub fn dataset(&self, n: usize, rng: RngStream) -> Dataset {
        let mut r = rng.rng();
        Dataset {
            samples: (0..n).map(|_| self.sample(&mut r)).collect(),
            generator_tag: self.tag(),
            seed: rng.seed,
        }
    }
}

/// Where a trainer gets its minibatches from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// With-replacement minibatches from a fixed set (or the full set under GD).
    Fixed(Dataset),
    /// Fresh samples every step.
    Stream(Generator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSequence {
    pub tasks: Vec<Dataset>,
}

pub fn gen_sparse_regression(d: usize, n: usize, noise_sd: f64, rng: RngStream) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::contract("dataset size must be >= 1"));
    }
    Ok(Generator::sparse_regression(d, noise_sd)?.dataset(n, rng))
}

pub fn gen_matfac(d: usize, n: usize, mu: f64, rng: RngStream) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::contract("dataset size must be >= 1"));
    }
    Ok(Generator::matfac(d, mu)?.dataset(n, rng))
}

/// Task `k` is an independent sparse-regression draw on stream `rng.derive(k)`.
pub fn gen_continual_tasks(
    d: usize,
    n_per_task: usize,
    tasks: usize,
    noise_sd: f64,
    rng: RngStream,
) -> Result<TaskSequence> {
    if tasks == 0 {
        return Err(Error::contract("need at least one task"));
    }
    let tasks = (0..tasks)
        .map(|k| gen_sparse_regression(d, n_per_task, noise_sd, rng.derive(k as u64)))
        .collect::<Result<_>>()?;
    Ok(TaskSequence { tasks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (
            m,
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0),
        )
    }

    #[test]
    fn sparse_formula_and_moments() {
        let mut rng = RngStream::new(0, 0).rng();
        let g = Generator::sparse_regression(4, 0.0).unwrap();
        let s = g.sample(&mut rng);
        let expected = s.x.iter().sum::<f64>() / 4.0;
        assert!((s.y[0] - expected).abs() < 1e-15);

        let ds = gen_sparse_regression(200, 10_000, 0.5, RngStream::new(1, 0)).unwrap();
        let ys: Vec<f64> = ds.samples.iter().map(|s| s.y[0]).collect();
        let (m, v) = moments(&ys);
        let var: f64 = 1.0 / 200.0 + 0.25;
        assert!(m.abs() < 3.0 * (var / 1e4).sqrt());
        assert!((v - var).abs() / var < 0.05);
        let again = gen_sparse_regression(200, 10_000, 0.5, RngStream::new(1, 0)).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn matfac_noise_profile() {
        let ds = gen_matfac(3, 5, 1.0, RngStream::new(2, 0)).unwrap();
        assert!(ds.samples.iter().all(|s| s.x == s.y));
        let ds = gen_matfac(3, 20_000, 0.0, RngStream::new(3, 0)).unwrap();
        for (i, target) in [(0, 2.0), (1, 1.0), (2, 2.0 / 3.0)] {
            let col: Vec<f64> = ds.samples.iter().map(|s| s.y[i]).collect();
            let (_, v) = moments(&col);
            assert!((v - target).abs() / target < 0.1, "var(y_{i}) = {v}");
        }
        assert!(gen_matfac(3, 5, 1.5, RngStream::new(0, 0)).is_err());
        let a = gen_matfac(4, 10, 0.5, RngStream::new(9, 9)).unwrap();
        assert_eq!(a, gen_matfac(4, 10, 0.5, RngStream::new(9, 9)).unwrap());
    }

    #[test]
    fn continual_tasks_are_independent() {
        let seq = gen_continual_tasks(10, 20, 3, 1.0, RngStream::new(4, 0)).unwrap();
        assert_eq!(seq.tasks.len(), 3);
        assert_ne!(seq.tasks[0].samples, seq.tasks[1].samples);
        assert_ne!(seq.tasks[1].samples, seq.tasks[2].samples);
        let single = gen_continual_tasks(10, 20, 1, 1.0, RngStream::new(4, 0)).unwrap();
        let direct = gen_sparse_regression(10, 20, 1.0, RngStream::new(4, 0).derive(0)).unwrap();
        assert_eq!(single.tasks[0], direct);
    }

    #[test]
    fn csv_header() {
        let ds = gen_matfac(2, 1, 1.0, RngStream::new(0, 0)).unwrap();
        let csv = ds.to_csv();
        assert!(csv.starts_with("x_0,x_1,y_0,y_1\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}

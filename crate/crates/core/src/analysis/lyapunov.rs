use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{normal, Rng, RngStream};

/// Distribution of the per-sample curvature ξ along one symmetry direction.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureDist {
    /// Finite support with probabilities summing to one.
    Discrete {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// Equally weighted observed curvatures.
    Empirical(Vec<f64>),
}

impl CurvatureDist {
    pub fn point(h: f64) -> Self {
        CurvatureDist::Discrete {
            values: vec![h],
            probs: vec![1.0],
        }
    }

    /// Equiprobable `{a, b}`.
    pub fn two_point(a: f64, b: f64) -> Self {
        CurvatureDist::Discrete {
            values: vec![a, b],
            probs: vec![0.5, 0.5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CurvatureDist::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::contract(
                        "discrete curvature needs matching, nonempty values and probs",
                    ));
                }
                if probs.iter().any(|p| p.is_nan() || *p < 0.0)
                    || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9
                {
                    return Err(Error::contract(
                        "curvature probabilities must be >= 0 and sum to 1",
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::contract("curvature values must be finite"));
                }
            }
            CurvatureDist::Gaussian { mean, sd } => {
                if !mean.is_finite() || !(*sd >= 0.0 && sd.is_finite()) {
                    return Err(Error::contract(
                        "gaussian curvature needs finite mean and sd >= 0",
                    ));
                }
            }
            CurvatureDist::Empirical(v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::contract("empirical curvature needs finite samples"));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match self {
            CurvatureDist::Discrete { values, probs } => {
                let u: f64 = rand::Rng::random(rng);
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated nonempty")
            }
            CurvatureDist::Gaussian { mean, sd } => mean + sd * normal(rng),
            CurvatureDist::Empirical(v) => v[rand::Rng::random_range(rng, 0..v.len())],
        }
    }

    /// `(E[ξ + γ], E[(ξ + γ)²])`
    pub fn moments(&self, gamma: f64) -> (f64, f64) {
        match self {
            CurvatureDist::Discrete { values, probs } => values
                .iter()
                .zip(probs)
                .fold((0.0, 0.0), |(m1, m2), (v, p)| {
                    (m1 + p * (v + gamma), m2 + p * (v + gamma) * (v + gamma))
                }),
            CurvatureDist::Gaussian { mean, sd } => {
                let m = mean + gamma;
                (m, m * m + sd * sd)
            }
            CurvatureDist::Empirical(v) => {
                let n = v.len() as f64;
                (
                    v.iter().map(|x| x + gamma).sum::<f64>() / n,
                    v.iter().map(|x| (x + gamma) * (x + gamma)).sum::<f64>() / n,
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Collapse,
    Escape,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Collapse => "collapse",
            Verdict::Escape => "escape",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl Verdict {
    pub fn from_estimate(lambda: f64, stderr: f64) -> Self {
        if lambda + 2.0 * stderr < 0.0 {
            Verdict::Collapse
        } else if lambda - 2.0 * stderr > 0.0 {
            Verdict::Escape
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// `Λ = E[log|1 − λ(ξ + γ)|]`
    pub lambda_exponent: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Samples with `1 − λ(ξ + γ) = 0`, left out of Λ. For a discrete
    /// distribution, the count of such atoms; any one of them makes Λ = −∞.
    pub excluded: usize,
    pub verdict: Verdict,
}

/// Estimates Λ. Discrete distributions are enumerated exactly (stderr 0);
/// empirical sets are averaged exactly with the standard error of the mean;
/// Gaussians are sampled `n` times.
pub fn lyapunov_estimate(
    dist: &CurvatureDist,
    lr: f64,
    gamma: f64,
    n: usize,
    rng: RngStream,
) -> Result<LyapunovEstimate> {
    dist.validate()?;
    if lr.is_nan() || lr <= 0.0 {
        return Err(Error::contract("learning rate must be > 0"));
    }
    let log_factor = |h: f64| {
        let f = (1.0 - lr * (h + gamma)).abs();
        (f > 0.0).then(|| f.ln())
    };
    let (mean, stderr, count, excluded) = match dist {
        CurvatureDist::Discrete { values, probs } => {
            let mut acc = 0.0;
            let mut mass = 0.0;
            let mut excluded = 0;
            for (v, p) in values.iter().zip(probs) {
                match log_factor(*v) {
                    Some(l) => {
                        acc += p * l;
                        mass += p;
                    }
                    None if *p > 0.0 => excluded += 1,
                    None => {}
                }
            }
            // an atom with a zero factor sends z to 0 with positive probability
            let mean = if mass > 0.0 && excluded == 0 {
                acc / mass
            } else {
                f64::NEG_INFINITY
            };
            (mean, 0.0, values.len(), excluded)
        }
        CurvatureDist::Empirical(v) => mean_stderr(v.iter().map(|h| log_factor(*h))),
        CurvatureDist::Gaussian { .. } => {
            if n < 2 {
                return Err(Error::contract("Monte Carlo estimate needs n >= 2"));
            }
            let mut r = rng.rng();
            let draws: Vec<Option<f64>> = (0..n).map(|_| log_factor(dist.sample(&mut r))).collect();
            mean_stderr(draws.into_iter())
        }
    };
    Ok(LyapunovEstimate {
        lambda_exponent: mean,
        stderr,
        n_samples: count,
        excluded,
        verdict: Verdict::from_estimate(mean, stderr),
    })
}

fn mean_stderr(it: impl Iterator<Item = Option<f64>>) -> (f64, f64, usize, usize) {
    let mut vals = Vec::new();
    let mut excluded = 0;
    let mut total = 0;
    for v in it {
        total += 1;
        match v {
            Some(x) => vals.push(x),
            None => excluded += 1,
        }
    }
    if vals.is_empty() {
        return (f64::NEG_INFINITY, 0.0, total, excluded);
    }
    let n = vals.len() as f64;
    let m = vals.iter().sum::<f64>() / n;
    let var = if vals.len() > 1 {
        vals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, (var / n).sqrt(), total, excluded)
}

/// Second-order critical learning rate `−2E[ξ + γ] / E[(ξ + γ)²]`. This is the
/// small-λ expansion of the exact criterion `Λ < 0`.
pub fn critical_lr_second_order(dist: &CurvatureDist, gamma: f64) -> Result<f64> {
    dist.validate()?;
    let (m1, m2) = dist.moments(gamma);
    if m2 == 0.0 {
        return Err(Error::NumericalDomain(
            "second moment of ξ + γ is zero".into(),
        ));
    }
    Ok(-2.0 * m1 / m2)
}

/// First λ in `(0, lr_max]` at which the exact Λ changes sign, located on a
/// grid of `grid` points and refined by bisection. Gaussian distributions use
/// one fixed set of `n` draws for every λ.
pub fn exact_critical_lr(
    dist: &CurvatureDist,
    gamma: f64,
    lr_max: f64,
    grid: usize,
    n: usize,
    rng: RngStream,
) -> Result<Option<f64>> {
    dist.validate()?;
    if lr_max.is_nan() || lr_max <= 0.0 || grid < 2 {
        return Err(Error::contract("need lr_max > 0 and grid >= 2"));
    }
    let fixed = match dist {
        CurvatureDist::Gaussian { .. } => {
            let mut r = rng.rng();
            CurvatureDist::Empirical((0..n.max(2)).map(|_| dist.sample(&mut r)).collect())
        }
        other => other.clone(),
    };
    // A support point with an exactly zero factor collapses z outright.
    let collapses = |lr: f64| -> Result<bool> {
        let e = lyapunov_estimate(&fixed, lr, gamma, 0, rng)?;
        Ok(e.lambda_exponent < 0.0
            || (e.excluded > 0 && matches!(fixed, CurvatureDist::Discrete { .. })))
    };
    let step = lr_max / grid as f64;
    let mut prev_lr = step;
    let mut prev = collapses(prev_lr)?;
    for k in 2..=grid {
        let lr = step * k as f64;
        let cur = collapses(lr)?;
        if prev != cur {
            let (mut lo, mut hi) = (prev_lr, lr);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if collapses(mid)? == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_lr = lr;
        prev = cur;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub collapsed: bool,
    pub escaped: bool,
    /// `|z_t|` for `t = 0..=steps_run`.
    pub trajectory: Vec<f64>,
    pub steps_run: usize,
    /// `(log|z_T| − log|z_0|) / T`
    pub empirical_exponent: f64,
}

impl Simulation {
    pub fn verdict(&self) -> Verdict {
        if self.collapsed {
            Verdict::Collapse
        } else if self.escaped {
            Verdict::Escape
        } else if self.empirical_exponent < 0.0 {
            Verdict::Collapse
        } else if self.empirical_exponent > 0.0 {
            Verdict::Escape
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Iterates `z_{t+1} = (1 − λ(h_t + γ)) z_t` in log space. Stops on collapse
/// (`|z| < 1e−12·|z0|`, or an exactly zero factor) or escape
/// (`|z| > 1e12·|z0|`).
pub fn simulate_linearized(
    dist: &CurvatureDist,
    lr: f64,
    gamma: f64,
    z0: f64,
    steps: usize,
    rng: RngStream,
) -> Result<Simulation> {
    dist.validate()?;
    if z0 == 0.0 || !z0.is_finite() {
        return Err(Error::contract("z0 must be finite and nonzero"));
    }
    let mut r = rng.rng();
    let bound = 1e12f64.ln();
    let log0 = z0.abs().ln();
    let mut log_z = log0;
    let mut trajectory = vec![z0.abs()];
    let (mut collapsed, mut escaped) = (false, false);
    let mut steps_run = 0;
    for _ in 0..steps {
        let factor = (1.0 - lr * (dist.sample(&mut r) + gamma)).abs();
        steps_run += 1;
        if factor == 0.0 {
            trajectory.push(0.0);
            collapsed = true;
            break;
        }
        log_z += factor.ln();
        trajectory.push(log_z.exp());
        if log_z - log0 < -bound {
            collapsed = true;
            break;
        }
        if log_z - log0 > bound {
            escaped = true;
            break;
        }
    }
    let empirical_exponent = if collapsed && trajectory.last() == Some(&0.0) {
        f64::NEG_INFINITY
    } else if steps_run > 0 {
        (log_z - log0) / steps_run as f64
    } else {
        0.0
    };
    Ok(Simulation {
        collapsed,
        escaped,
        trajectory,
        steps_run,
        empirical_exponent,
    })
}

/// Bisects `[lo, hi]` on the simulated verdict, assuming collapse on one side
/// and escape on the other. Each probe runs `steps` iterations on its own
/// stream.
pub fn simulated_critical_lr(
    dist: &CurvatureDist,
    gamma: f64,
    lo: f64,
    hi: f64,
    steps: usize,
    iters: usize,
    rng: RngStream,
) -> Result<f64> {
    let probe = |lr: f64, k: u64| -> Result<Verdict> {
        Ok(simulate_linearized(dist, lr, gamma, 1.0, steps, rng.derive(k))?.verdict())
    };
    let lo_v = probe(lo, 0)?;
    let hi_v = probe(hi, 1)?;
    if lo_v == hi_v {
        return Err(Error::Precondition(format!(
            "simulated verdict is {lo_v} at both ends of [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    for k in 0..iters {
        let mid = 0.5 * (a + b);
        if probe(mid, 2 + k as u64)? == lo_v {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(d: &CurvatureDist, lr: f64) -> LyapunovEstimate {
        lyapunov_estimate(d, lr, 0.0, 10_000, RngStream::new(0, 0)).unwrap()
    }

    #[test]
    fn deterministic_examples() {
        let d = CurvatureDist::point(1.0);
        let e = est(&d, 0.5);
        assert!((e.lambda_exponent - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(e.verdict, Verdict::Collapse);
        let e = est(&d, 2.5);
        assert!((e.lambda_exponent - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(e.verdict, Verdict::Escape);
    }

    #[test]
    fn two_point_closed_form() {
        let d = CurvatureDist::two_point(2.0, 0.0);
        for lr in [0.1, 0.3, 0.7, 0.9, 1.2, 3.0] {
            let e = est(&d, lr);
            let exact = 0.5 * (1.0 - 2.0 * lr).abs().ln();
            assert!((e.lambda_exponent - exact).abs() < 1e-14);
        }
        let root = exact_critical_lr(&d, 0.0, 3.0, 300, 0, RngStream::new(0, 0))
            .unwrap()
            .unwrap();
        assert!((root - 1.0).abs() < 1e-9, "{root}");
        let e = est(&d, 0.5);
        assert_eq!(e.excluded, 1);
    }

    #[test]
    fn second_order_examples() {
        let c = critical_lr_second_order(&CurvatureDist::point(-0.5), 0.0).unwrap();
        assert!((c - 4.0).abs() < 1e-15);
        assert!(critical_lr_second_order(&CurvatureDist::point(0.7), 0.0).unwrap() < 0.0);
        let zero_mean = CurvatureDist::two_point(1.0, -1.0);
        assert_eq!(critical_lr_second_order(&zero_mean, 0.0).unwrap(), 0.0);
        assert!(critical_lr_second_order(&CurvatureDist::point(0.0), 0.0).is_err());
    }

    #[test]
    fn simulation_examples() {
        let s = simulate_linearized(
            &CurvatureDist::point(1.0),
            0.5,
            0.0,
            3.0,
            10,
            RngStream::new(0, 0),
        )
        .unwrap();
        for (t, z) in s.trajectory.iter().enumerate() {
            assert!((z - 3.0 * 0.5f64.powi(t as i32)).abs() < 1e-12);
        }
        let d = CurvatureDist::two_point(2.0, 0.0);
        let s = simulate_linearized(&d, 0.5, 0.0, 1.0, 1000, RngStream::new(1, 0)).unwrap();
        assert!(s.collapsed);
        let s = simulate_linearized(&d, 1.5, 0.0, 1.0, 100_000, RngStream::new(2, 0)).unwrap();
        assert!(s.escaped);
    }

    #[test]
    fn gaussian_monte_carlo_has_error_bars() {
        let d = CurvatureDist::Gaussian {
            mean: -0.1,
            sd: 1.0,
        };
        let e = lyapunov_estimate(&d, 0.1, 0.0, 20_000, RngStream::new(3, 0)).unwrap();
        assert!(e.stderr > 0.0 && e.stderr < 0.01);
        assert_eq!(e.n_samples, 20_000);
    }

    #[test]
    fn gaussian_second_order_threshold_near_exact() {
        let d = CurvatureDist::Gaussian {
            mean: -0.2,
            sd: 1.0,
        };
        let approx = critical_lr_second_order(&d, 0.0).unwrap();
        assert!((approx - 0.4 / 1.04).abs() < 1e-12);
        let exact = exact_critical_lr(&d, 0.0, 2.0, 200, 50_000, RngStream::new(4, 0))
            .unwrap()
            .unwrap();
        assert!((approx - exact).abs() / exact < 0.25, "{approx} vs {exact}");
    }
}

//! The theorem-check suite behind the `verify` command. Each check returns a
//! [`Check`] row; failures are data.

use std::fmt;

use crate::analysis::{
    critical_lr_second_order, exact_critical_lr, gamma_threshold, halving_grid,
    hessian_block_check, l1_equivalence_check, regularized_loss, simulated_critical_lr,
    CurvatureDist,
};
use crate::data::{DataSource, Dataset};
use crate::dcs::{dcs_wrap, DcsConfig};
use crate::error::Result;
use crate::models::zoo::{zoo, ZooEntry};
use crate::models::{linear_regression, mean_loss, two_layer_tanh, PerSampleLoss, Sample};
use crate::numerics::{
    fd_gradient, fd_hessian, norm, normal_vec, sym_eig, Matrix, RngStream,
};
use crate::optimize::{train, Init, Metric, MetricSpec, Optimizer, TrainerConfig};
use crate::symmetry::{verify_loss_symmetry, MirrorSymmetry, ParamLayout};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `residual ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
        }
    }

    /// Passes when `residual > tolerance`.
    pub fn above(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual > tolerance,
            residual,
            tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (residual {:e}, tolerance {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

/// Deliberate defects for exercising the suite itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Every analytic gradient is negated.
    GradientSign,
}

impl std::str::FromStr for Fault {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Fault::None),
            "gradient_sign" => Ok(Fault::GradientSign),
            other => Err(crate::Error::contract(format!(
                "unknown fault {other:?} (expected none or gradient_sign)"
            ))),
        }
    }
}

#[derive(Debug)]
struct NegatedGradient(Box<dyn PerSampleLoss>);

impl PerSampleLoss for NegatedGradient {
    fn spec(&self) -> String {
        self.0.spec()
    }

    fn layout(&self) -> &ParamLayout {
        self.0.layout()
    }

    fn sample_shape(&self) -> (usize, usize) {
        self.0.sample_shape()
    }

    fn loss(&self, theta: &[f64], sample: &Sample) -> f64 {
        self.0.loss(theta, sample)
    }

    fn accumulate_grad(&self, theta: &[f64], sample: &Sample, grad: &mut [f64]) -> f64 {
        let mut g = vec![0.0; grad.len()];
        let l = self.0.accumulate_grad(theta, sample, &mut g);
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a -= b);
        l
    }

    fn mirrors(&self) -> Vec<MirrorSymmetry> {
        self.0.mirrors()
    }
}

/// The model zoo with `fault` applied to every model.
pub fn faulty_zoo(rng: RngStream, fault: Fault) -> Vec<ZooEntry> {
    let mut entries = zoo(rng);
    if fault == Fault::GradientSign {
        for e in &mut entries {
            let m = std::mem::replace(&mut e.model, Box::new(linear_regression(1)));
            e.model = Box::new(NegatedGradient(m));
        }
    }
    entries
}

fn dataset(model: &dyn PerSampleLoss, n: usize, rng: RngStream) -> Vec<Sample> {
    let mut r = rng.rng();
    (0..n).map(|_| model.random_sample(&mut r)).collect()
}

fn random_symmetric(sym: &MirrorSymmetry, rng: &mut crate::numerics::Rng) -> Vec<f64> {
    sym.project_symmetric(&normal_vec(rng, sym.dim(), 1.0))
        .expect("dimension agrees")
}

/// `max ‖g − g_fd‖ / (1 + ‖g‖)` over `points` random parameters and samples.
pub fn gradient_error(model: &dyn PerSampleLoss, points: usize, rng: RngStream) -> Result<f64> {
    let mut r = rng.rng();
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let theta = normal_vec(&mut r, model.dim(), 0.7);
        let s = model.random_sample(&mut r);
        let g = crate::models::grad(model, &theta, &s);
        let fd = fd_gradient(|t| model.loss(t, &s), &theta, None)?;
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff) / (1.0 + norm(&g)));
    }
    Ok(worst)
}

/// `max ‖Oᵀ∇ℓ_γ(θ, x)‖` over `points` random symmetric θ and samples, for each
/// `γ` in `gammas`.
pub fn stationary_residual(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    gammas: &[f64],
    points: usize,
    rng: RngStream,
) -> Result<f64> {
    let mut r = rng.rng();
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let theta = random_symmetric(sym, &mut r);
        let s = model.random_sample(&mut r);
        let g0 = crate::models::grad(model, &theta, &s);
        for &gamma in gammas {
            let g: Vec<f64> = g0.iter().zip(&theta).map(|(g, t)| g + 2.0 * gamma * t).collect();
            worst = worst.max(norm(&sym.order_parameter(&g)?));
        }
    }
    Ok(worst)
}

/// `max |mᵀHn| / (1 + ‖H‖_F)` over `points` random symmetric θ.
pub fn hessian_block_residual(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    points: usize,
    rng: RngStream,
) -> Result<f64> {
    let mut r = rng.rng();
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let theta = random_symmetric(sym, &mut r);
        let s = model.random_sample(&mut r);
        let rep = hessian_block_check(model, sym, &theta, &s)?;
        worst = worst.max(rep.block_residual / (1.0 + rep.frobenius()));
    }
    Ok(worst)
}

/// Smallest weight decay used by [`threshold_failures`]. Without it a loss
/// that is flat along `Pθ` has `γ0 = 0` and would be tested at `γ = γ0`.
pub const THRESHOLD_FLOOR: f64 = 1e-8;

/// Number of random non-symmetric θ (out of `points`) for which
/// `γ = max(1.01·max(0, γ0), THRESHOLD_FLOOR)` fails to make the symmetric
/// projection strictly better. The loss averages `n` random samples.
pub fn threshold_failures(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    points: usize,
    n: usize,
    rng: RngStream,
) -> Result<usize> {
    let data = dataset(model, n, rng.derive(0));
    let mut r = rng.derive(1).rng();
    let mut failures = 0;
    for _ in 0..points {
        let theta = normal_vec(&mut r, model.dim(), 1.0);
        let gamma =
            (1.01 * gamma_threshold(model, sym, &theta, &data)?.max(0.0)).max(THRESHOLD_FLOOR);
        let u = sym.project_symmetric(&theta)?;
        if regularized_loss(model, &u, &data, gamma)
            >= regularized_loss(model, &theta, &data, gamma)
        {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Largest mirror residual along an SGD run from an exactly symmetric start,
/// with injected gradient noise of standard deviation `sigma`.
pub fn persistence_residual(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    sigma: f64,
    steps: usize,
    rng: RngStream,
) -> Result<f64> {
    let samples = dataset(model, 32, rng.derive(0));
    let mut r = rng.derive(1).rng();
    let theta0: Vec<f64> = sym.project_symmetric(&normal_vec(&mut r, model.dim(), 0.5))?;
    let cfg = TrainerConfig {
        learning_rate: 0.05,
        optimizer: Optimizer::Sgd,
        batch_size: 1,
        steps,
        grad_noise_sd: sigma,
        seed: rng.seed,
        stream_id: rng.derive(2).stream_id,
        record_every: 1,
        init: Init::Explicit(theta0),
        ..TrainerConfig::default()
    };
    let ds = Dataset {
        samples,
        generator_tag: "random_samples".into(),
        seed: rng.seed,
    };
    let metrics = MetricSpec::new(vec![Metric::MirrorResidual(sym.clone())]);
    let tr = train(model, &DataSource::Fixed(ds), &cfg, &metrics)?;
    Ok(tr.max(&metrics.names()[0]).unwrap_or(f64::NAN))
}

/// Deviation of the finite-difference Hessian of the `d`-unit tanh network at
/// θ = 0, x = 1, y = 2 from its predicted block form.
#[derive(Debug, Clone, PartialEq)]
pub struct TanhHessianReport {
    /// Largest `|H_ij|` outside the `(w_i, u_i)` pairs' off-diagonal entries.
    pub off_block: f64,
    /// Largest deviation of the pair coupling from `−xy`.
    pub coupling: f64,
    /// Largest deviation of a per-pair eigenvalue from `±xy`.
    pub eigenvalue: f64,
    /// Largest deviation of a per-pair eigenvector from `(1, ±1)/√2` up to
    /// sign.
    pub eigenvector: f64,
}

pub fn tanh_hessian_check(d: usize) -> Result<TanhHessianReport> {
    let (x, y) = (1.0, 2.0);
    let m = two_layer_tanh(d);
    let s = Sample::scalar(x, y);
    let h = fd_hessian(|t| m.loss(t, &s), &vec![0.0; 2 * d], None)?;
    let mut rep = TanhHessianReport {
        off_block: 0.0,
        coupling: 0.0,
        eigenvalue: 0.0,
        eigenvector: 0.0,
    };
    for i in 0..2 * d {
        for j in 0..2 * d {
            if i.abs_diff(j) == d {
                rep.coupling = rep.coupling.max((h[(i, j)] + x * y).abs());
            } else {
                rep.off_block = rep.off_block.max(h[(i, j)].abs());
            }
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let block = Matrix::from_fn(2, 2, |a, b| h[(a * d + i, b * d + i)]);
        let e = sym_eig(&block)?;
        // ascending: −xy with (1, 1)/√2, then +xy with (1, −1)/√2
        let want = [(-x * y, [r, r]), (x * y, [r, -r])];
        for (k, (val, vec)) in want.iter().enumerate() {
            rep.eigenvalue = rep.eigenvalue.max((e.values[k] - val).abs());
            let v = e.vector(k);
            let plus = (v[0] - vec[0]).abs().max((v[1] - vec[1]).abs());
            let minus = (v[0] + vec[0]).abs().max((v[1] + vec[1]).abs());
            rep.eigenvector = rep.eigenvector.max(plus.min(minus));
        }
    }
    Ok(rep)
}

/// Relative gap between the simulated and exact collapse thresholds for
/// equiprobable curvature `{2, 0}`, whose exact threshold is λ* = 1.
pub fn two_point_threshold_gap(rng: RngStream) -> Result<f64> {
    let dist = CurvatureDist::two_point(2.0, 0.0);
    let sim = simulated_critical_lr(&dist, 0.0, 0.5, 1.5, 20_000, 24, rng)?;
    Ok((sim - 1.0).abs())
}

/// Relative gap between the second-order threshold and the exact one for a
/// two-point curvature whose threshold lies in the small-step regime, along
/// with `max |λ*(h + γ)|` at the exact threshold.
pub fn second_order_threshold_gap(rng: RngStream) -> Result<(f64, f64)> {
    let dist = CurvatureDist::two_point(1.0, -1.2);
    let approx = critical_lr_second_order(&dist, 0.0)?;
    let exact = exact_critical_lr(&dist, 0.0, 1.0, 200, 0, rng)?
        .ok_or_else(|| crate::Error::NumericalDomain("no exact threshold found".into()))?;
    Ok(((approx - exact).abs() / exact, exact * 1.2))
}

/// `|min L(T(w, u, v)) − min L(θ)|` for a noisy least-squares problem in
/// `d = 4` with a two-coordinate DCS projection and `α = 0`. The wrapped
/// minimum is reached by gradient descent; the base minimum is solved
/// exactly.
pub fn dcs_faithfulness_gap(rng: RngStream) -> Result<f64> {
    let d = 4;
    let base = linear_regression(d);
    let mut r = rng.rng();
    let truth = [1.5, -0.8, 0.0, 0.6];
    let samples: Vec<Sample> = (0..40)
        .map(|_| {
            let x = normal_vec(&mut r, d, 1.0);
            let y = x.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>()
                + 0.3 * crate::numerics::normal(&mut r);
            Sample::new(x, vec![y])
        })
        .collect();
    // normal equations through the eigendecomposition of XᵀX
    let n = samples.len() as f64;
    let xtx = Matrix::from_fn(d, d, |i, j| {
        samples.iter().map(|s| s.x[i] * s.x[j]).sum::<f64>() / n
    });
    let xty: Vec<f64> = (0..d)
        .map(|i| samples.iter().map(|s| s.x[i] * s.y[0]).sum::<f64>() / n)
        .collect();
    let e = sym_eig(&xtx)?;
    let mut theta = vec![0.0; d];
    for k in 0..d {
        let v = e.vector(k);
        let c = v.iter().zip(&xty).map(|(a, b)| a * b).sum::<f64>() / e.values[k];
        theta.iter_mut().zip(&v).for_each(|(t, vi)| *t += c * vi);
    }
    let base_min = mean_loss(&base, &theta, &samples);

    let p = Matrix::diag(&[1.0, 1.0, 0.0, 0.0]);
    let wrapped = dcs_wrap(Box::new(base), DcsConfig::new(p, 0.0)?)?;
    let cfg = TrainerConfig {
        learning_rate: 0.05,
        optimizer: Optimizer::Gd,
        steps: 20_000,
        seed: rng.seed,
        stream_id: rng.derive(1).stream_id,
        record_every: 20_000,
        ..TrainerConfig::default()
    };
    let ds = Dataset {
        samples: samples.clone(),
        generator_tag: "least_squares".into(),
        seed: rng.seed,
    };
    let tr = train(&wrapped, &DataSource::Fixed(ds), &cfg, &MetricSpec::default())?;
    let wrapped_min = mean_loss(&wrapped, &tr.final_theta, &samples);
    Ok((wrapped_min - base_min).abs())
}

/// Runs the L1 check for `sym` from a random symmetric point along the
/// normalized sum of the columns of O. The loss averages `n` random samples.
pub fn l1_check(
    model: &dyn PerSampleLoss,
    sym: &MirrorSymmetry,
    n: usize,
    rng: RngStream,
) -> Result<crate::analysis::L1Report> {
    let data = dataset(model, n, rng.derive(0));
    let mut r = rng.derive(1).rng();
    let theta0 = random_symmetric(sym, &mut r);
    let mut dir = vec![0.0; sym.dim()];
    for c in sym.o().columns() {
        crate::numerics::axpy(1.0, &c, &mut dir);
    }
    let len = norm(&dir);
    dir.iter_mut().for_each(|x| *x /= len);
    l1_equivalence_check(model, sym, &theta0, &dir, &halving_grid(0.05, 6), &data)
}

/// Every check, in a fixed order.
pub fn run_suite(samples: usize, fault: Fault, rng: RngStream) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let entries = faulty_zoo(rng.derive(0), fault);
    let mut k = 0u64;
    let mut next = || {
        k += 1;
        rng.derive(1000 + k)
    };

    for e in &entries {
        out.push(Check::at_most(
            format!("gradient[{}]", e.name),
            gradient_error(e.model.as_ref(), 10, next())?,
            1e-5,
        ));
        for m in &e.mirrors {
            let id = format!("{}/{}", e.name, m.label());
            let rep = verify_loss_symmetry(e.model.as_ref(), m, samples, next(), 1e-12)?;
            out.push(Check::at_most(
                format!("symmetry[{id}]"),
                rep.max_deviation,
                rep.tolerance,
            ));
            out.push(Check::at_most(
                format!("stationary[{id}]"),
                stationary_residual(e.model.as_ref(), m, &[0.0, 0.1, 1.0], samples, next())?,
                1e-10,
            ));
            out.push(Check::at_most(
                format!("hessian_blocks[{id}]"),
                hessian_block_residual(e.model.as_ref(), m, 3, next())?,
                1e-6,
            ));
            out.push(Check::at_most(
                format!("gamma_threshold[{id}]"),
                threshold_failures(e.model.as_ref(), m, samples, 8, next())? as f64,
                0.0,
            ));
        }
        for m in &e.negative_controls {
            let rep = verify_loss_symmetry(e.model.as_ref(), m, samples, next(), 1e-12)?;
            out.push(Check::above(
                format!("negative_control[{}/{}]", e.name, m.label()),
                rep.max_deviation,
                rep.tolerance,
            ));
        }
    }

    let t = tanh_hessian_check(10)?;
    out.push(Check::at_most("tanh_hessian_off_block", t.off_block.max(t.coupling), 1e-4));
    out.push(Check::at_most("tanh_hessian_eigenvalues", t.eigenvalue, 1e-4));
    out.push(Check::at_most("tanh_hessian_eigenvectors", t.eigenvector, 1e-3));

    out.push(Check::at_most(
        "lyapunov_two_point_threshold",
        two_point_threshold_gap(next())?,
        0.05,
    ));
    let (gap, _) = second_order_threshold_gap(next())?;
    out.push(Check::at_most("lyapunov_second_order_threshold", gap, 0.25));

    out.push(Check::at_most("dcs_faithfulness", dcs_faithfulness_gap(next())?, 1e-6));

    for e in entries.iter().filter(|e| e.name == "tanh" || e.name == "hadamard") {
        for m in &e.mirrors {
            let rep = l1_check(e.model.as_ref(), m, 8, next())?;
            out.push(Check {
                name: format!("l1_equivalence[{}/{}]", e.name, m.label()),
                passed: rep.passed,
                residual: rep.odd_part,
                tolerance: 1e-10,
            });
        }
    }
    for e in entries.iter().filter(|e| e.name == "linear") {
        for m in &e.negative_controls {
            let rep = l1_check(e.model.as_ref(), m, 8, next())?;
            out.push(Check {
                name: format!("l1_negative_control[{}/{}]", e.name, m.label()),
                passed: !rep.passed,
                residual: rep.odd_part,
                tolerance: 1e-10,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_hessian_matches_block_form() {
        let r = tanh_hessian_check(3).unwrap();
        assert!(r.off_block < 1e-4 && r.coupling < 1e-4, "{r:?}");
        assert!(r.eigenvalue < 1e-4 && r.eigenvector < 1e-3, "{r:?}");
    }

    #[test]
    fn negated_gradient_is_caught() {
        let m = NegatedGradient(Box::new(two_layer_tanh(2)));
        assert!(gradient_error(&m, 3, RngStream::new(0, 0)).unwrap() > 0.5);
        let ok = two_layer_tanh(2);
        assert!(gradient_error(&ok, 3, RngStream::new(0, 0)).unwrap() < 1e-6);
    }

    #[test]
    fn second_order_threshold_in_small_step_regime() {
        // exact threshold solves (1 − λ)(1 + 1.2λ) = 1, i.e. λ* = 1/6
        let (gap, reach) = second_order_threshold_gap(RngStream::new(0, 0)).unwrap();
        assert!(reach <= 0.5);
        let approx = 2.0 * 0.1 / 1.22;
        assert!((gap - (approx - 1.0 / 6.0f64).abs() * 6.0).abs() < 1e-6);
    }
}

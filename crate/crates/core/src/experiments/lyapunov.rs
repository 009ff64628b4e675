use super::ExperimentConfig;
use crate::analysis::{
    critical_lr_second_order, lyapunov_estimate, simulate_linearized, Verdict,
};
use crate::error::Result;
use crate::numerics::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovRow {
    pub learning_rate: f64,
    pub gamma: f64,
    pub lambda_exponent: f64,
    pub stderr: f64,
    pub verdict: Verdict,
    /// NaN when the second moment of `ξ + γ` vanishes.
    pub second_order_threshold: f64,
    pub simulated: Verdict,
}

impl LyapunovRow {
    pub const HEADER: &'static [&'static str] = &[
        "lr",
        "gamma",
        "lambda_exp",
        "stderr",
        "verdict",
        "second_order_threshold",
        "sim_verdict",
    ];

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.learning_rate.to_string(),
            self.gamma.to_string(),
            self.lambda_exponent.to_string(),
            self.stderr.to_string(),
            self.verdict.to_string(),
            self.second_order_threshold.to_string(),
            self.simulated.to_string(),
        ]
    }
}

/// Stability of a symmetric point over a grid of learning rates and weight
/// decays: the Lyapunov exponent with its verdict, the second-order threshold
/// for reference, and the verdict of a direct simulation.
pub fn lyapunov(cfg: &ExperimentConfig) -> Result<Vec<LyapunovRow>> {
    let dist = cfg.curvature("distribution", "h");
    let n = cfg.count("distribution", "samples");
    let steps = cfg.count("simulation", "steps");
    let z0 = cfg.real("simulation", "z0");
    let root = RngStream::new(cfg.seed(), 0);
    let mut out = Vec::new();
    for &gamma in &cfg.reals("sweep", "gamma") {
        let threshold = critical_lr_second_order(&dist, gamma).unwrap_or(f64::NAN);
        for &lr in &cfg.reals("sweep", "learning_rate") {
            let k = out.len() as u64;
            let est = lyapunov_estimate(&dist, lr, gamma, n, root.derive(2 * k))?;
            let sim = simulate_linearized(&dist, lr, gamma, z0, steps, root.derive(2 * k + 1))?;
            out.push(LyapunovRow {
                learning_rate: lr,
                gamma,
                lambda_exponent: est.lambda_exponent,
                stderr: est.stderr,
                verdict: est.verdict,
                second_order_threshold: threshold,
                simulated: sim.verdict(),
            });
        }
    }
    Ok(out)
}

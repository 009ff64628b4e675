//! Stability of a symmetric point under noisy linearized SGD. The sign of
//! the Lyapunov exponent decides collapse or escape; the second-order
//! threshold approximates the exact one for small steps.
//!
//!     cargo run --example lyapunov_stability

use mirrorsym::analysis::{
    critical_lr_second_order, exact_critical_lr, lyapunov_estimate, simulate_linearized,
    simulated_critical_lr, CurvatureDist,
};
use mirrorsym::numerics::RngStream;

fn main() -> mirrorsym::Result<()> {
    let root = RngStream::new(0, 0);
    let dist = CurvatureDist::two_point(2.0, 0.0);
    println!("curvature {{2, 0}} equiprobable, gamma = 0");
    println!("{:>6} {:>12} {:>10} {:>10}", "lr", "Lambda", "verdict", "simulated");
    for (k, lr) in [0.25, 0.5, 0.9, 1.1, 1.5].into_iter().enumerate() {
        let est = lyapunov_estimate(&dist, lr, 0.0, 0, root.derive(k as u64))?;
        let sim = simulate_linearized(&dist, lr, 0.0, 1.0, 20_000, root.derive(100 + k as u64))?;
        println!(
            "{:>6} {:>12.4} {:>10} {:>10}",
            lr,
            est.lambda_exponent,
            est.verdict.to_string(),
            sim.verdict().to_string()
        );
    }
    let exact = exact_critical_lr(&dist, 0.0, 2.0, 200, 0, root)?;
    let sim = simulated_critical_lr(&dist, 0.0, 0.5, 1.5, 20_000, 24, root.derive(7))?;
    println!("exact threshold {exact:?}, simulated {sim:.4}");

    // small-step regime: the second-order formula is close
    let small = CurvatureDist::two_point(1.0, -1.2);
    let exact = exact_critical_lr(&small, 0.0, 1.0, 200, 0, root)?;
    let approx = critical_lr_second_order(&small, 0.0)?;
    println!("curvature {{1, -1.2}}: exact {exact:?}, second-order {approx:.4}");

    let gauss = CurvatureDist::Gaussian { mean: -0.2, sd: 1.0 };
    for gamma in [0.0, 0.1, 0.3] {
        let t = exact_critical_lr(&gauss, gamma, 2.0, 200, 20_000, root.derive(8))?;
        println!("gaussian(-0.2, 1), gamma {gamma}: verdict flips at lr {t:?}");
    }
    Ok(())
}

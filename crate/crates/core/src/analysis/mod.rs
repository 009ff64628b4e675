//! Theory checks: Hessian block structure, weight-decay thresholds,
//! stability of symmetric points under noisy updates, structural metrics and
//! the L1 equivalence test.

mod hessian;
mod l1;
mod lyapunov;
mod structure;
mod threshold;

pub use hessian::{hessian_block_check, HessianReport, SYMMETRIC_TOL};
pub use l1::{halving_grid, l1_equivalence_check, L1Report};
pub use lyapunov::{
    critical_lr_second_order, exact_critical_lr, lyapunov_estimate, simulate_linearized,
    simulated_critical_lr, CurvatureDist, LyapunovEstimate, Simulation, Verdict,
};
pub use structure::{
    cluster_count, preactivation_correlation, sparsity, structure_metrics, StructureMetrics,
    CLUSTER_TOL, RANK_TOL, SPARSITY_THRESHOLD,
};
pub use threshold::{gamma_threshold, regularized_loss};

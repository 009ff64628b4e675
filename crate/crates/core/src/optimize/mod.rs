//! Gradient-based training with coupled L2 regularization, minibatching,
//! gradient-noise injection and trajectory recording.

mod config;
mod metrics;
mod sweep;
mod train;

pub use config::{Init, Optimizer, TrainerConfig};
pub use metrics::{dead_neurons, Metric, MetricSpec, DEAD_THRESHOLD};
pub use sweep::{runs_to_csv, sweep, RunSummary, SweepCell};
pub use train::{train, train_continual, Record, Trajectory, DIVERGENCE_NORM};

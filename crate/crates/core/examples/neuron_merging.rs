//! Swapping two hidden units is a symmetry of an MLP. With weight decay some
//! units merge into identical copies; without it every unit stays distinct.
//!
//!     cargo run --release --example neuron_merging

use std::sync::Arc;

use mirrorsym::data::{DataSource, Generator};
use mirrorsym::models::{permutation_mlp, PerSampleLoss};
use mirrorsym::numerics::RngStream;
use mirrorsym::optimize::{sweep, Metric, MetricSpec, SweepCell, TrainerConfig};

fn main() -> mirrorsym::Result<()> {
    let width = 32;
    let steps = 20_000;
    let teacher = Generator::teacher(4, 2, 0.5, RngStream::new(0, 9))?;
    let model: Arc<dyn PerSampleLoss> = Arc::new(permutation_mlp(width, 4));
    let metrics = MetricSpec {
        metrics: vec![Metric::ClusterCount, Metric::Loss],
        eval_size: 200,
    };
    let cells: Vec<SweepCell> = [0.0, 1e-3, 1e-2]
        .iter()
        .map(|&gamma| SweepCell {
            label: format!("gamma={gamma}"),
            model: model.clone(),
            data: DataSource::Stream(teacher.clone()),
            config: TrainerConfig {
                learning_rate: 0.05,
                weight_decay: gamma,
                batch_size: 8,
                steps,
                record_every: steps / 4,
                ..TrainerConfig::default()
            },
            metrics: metrics.clone(),
        })
        .collect();

    for run in sweep(&cells, 2)? {
        let clusters: Vec<f64> = run
            .trajectory
            .series("cluster_count")
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        println!(
            "{:<12} replicate {}  distinct units over time {:?} of {width}, final loss {:.3}",
            run.label,
            run.replicate,
            clusters,
            run.trajectory.last("loss").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

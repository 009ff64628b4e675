//! Imposing a constraint by adding a symmetry. Wrapping a model as
//! T(w, u, v) = (I - P)v + (Pw)(Pu) keeps its minima, and with a penalty on
//! (w, u) pushes the coordinates in im(P) to exact zeros.
//!
//!     cargo run --release --example dcs_constraint

use mirrorsym::analysis::sparsity;
use mirrorsym::data::{DataSource, Generator};
use mirrorsym::dcs::{dcs_extract, dcs_preimage, dcs_wrap, DcsConfig, DcsParams};
use mirrorsym::experiments::verify::dcs_faithfulness_gap;
use mirrorsym::models::linear_regression;
use mirrorsym::numerics::{Matrix, RngStream};
use mirrorsym::optimize::{train, MetricSpec, TrainerConfig};

fn main() -> mirrorsym::Result<()> {
    println!(
        "min of the wrapped loss vs the original (alpha = 0): gap {:.1e}",
        dcs_faithfulness_gap(RngStream::new(0, 0))?
    );

    let cfg = DcsConfig::new(Matrix::diag(&[1.0, 1.0, 0.0]), 0.0)?;
    let theta = [2.0, -3.0, 0.7];
    let p = dcs_preimage(&theta, &cfg)?;
    let (back, penalty) = dcs_extract(&p, &cfg)?;
    println!("preimage of {theta:?} maps back to {back:?} (penalty {penalty})");
    let flat = DcsParams::from_flat(&p.to_flat())?;
    assert_eq!(flat, p);

    let d = 30;
    let steps = 20_000;
    let gen = Generator::sparse_regression(d, 1.0)?;
    for alpha in [0.0, 0.01, 0.05] {
        let wrapped = dcs_wrap(Box::new(linear_regression(d)), DcsConfig::identity(d, alpha))?;
        let tc = TrainerConfig {
            learning_rate: 0.02,
            steps,
            record_every: steps,
            ..TrainerConfig::default()
        };
        let tr = train(&wrapped, &DataSource::Stream(gen.clone()), &tc, &MetricSpec::default())?;
        let t = wrapped.transform(&tr.final_theta);
        println!(
            "alpha {alpha:<5} sparsity of T {:.2}  loss {:.3}",
            sparsity(&t),
            tr.last("loss").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

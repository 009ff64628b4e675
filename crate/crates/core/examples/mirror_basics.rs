//! Build mirrors from the standard symmetry kinds, check the projection and
//! reflection identities, and certify a loss against them.
//!
//!     cargo run --example mirror_basics

use mirrorsym::models::{hadamard_regression, linear_regression, PerSampleLoss};
use mirrorsym::numerics::{Matrix, RngStream};
use mirrorsym::symmetry::{
    make_standard_mirror, verify_loss_symmetry, PairSign, StandardMirrorKind,
};

fn main() -> mirrorsym::Result<()> {
    let model = hadamard_regression(3);
    let layout = model.layout();

    let flip = make_standard_mirror(
        &StandardMirrorKind::RescalingSignFlip {
            blocks: vec!["u".into(), "w".into()],
        },
        layout,
    )?;
    let pair = make_standard_mirror(
        &StandardMirrorKind::RescalingScalarPair {
            a: 0,
            b: 3,
            sign: PairSign::Minus,
        },
        layout,
    )?;

    for sym in [&flip, &pair] {
        let p = sym.projection();
        let r = sym.reflection();
        let eye = Matrix::identity(sym.dim());
        println!("{} (rank {})", sym.label(), sym.rank());
        println!("  |P^2 - P|  = {:.1e}", p.matmul(&p)?.sub(&p)?.max_abs());
        println!("  |R R - I|  = {:.1e}", r.matmul(&r)?.sub(&eye)?.max_abs());

        let theta = vec![0.3, -1.2, 0.8, 0.3, 0.5, -0.1];
        let sym_point = sym.project_symmetric(&theta)?;
        println!(
            "  residual of theta {:.3}, of its projection {:.1e}",
            sym.mirror_residual(&theta)?,
            sym.mirror_residual(&sym_point)?
        );

        let rep = verify_loss_symmetry(&model, sym, 200, RngStream::new(0, 1), 1e-10)?;
        println!("  loss symmetric: {} (max deviation {:.1e})", rep.passed, rep.max_deviation);
    }

    // a plain linear model does not respect a parameter swap
    let lin = linear_regression(2);
    let swap = make_standard_mirror(
        &StandardMirrorKind::RescalingScalarPair {
            a: 0,
            b: 1,
            sign: PairSign::Minus,
        },
        lin.layout(),
    )?;
    let rep = verify_loss_symmetry(&lin, &swap, 200, RngStream::new(0, 2), 1e-10)?;
    println!(
        "linear regression under a swap: symmetric {} (max deviation {:.3})",
        rep.passed, rep.max_deviation
    );
    println!("O columns are orthonormal: {:.1e}", {
        let o = swap.o();
        o.transpose().matmul(o)?.sub(&Matrix::identity(o.cols()))?.max_abs()
    });
    Ok(())
}

//! Registry of small models paired with their mirrors and with mirrors they
//! are known not to respect.

use super::{
    apply_symmetry_removal, swap_quadratic, hadamard_regression, linear_regression,
    matrix_factorization, permutation_mlp, two_layer_tanh, PerSampleLoss, SymmetryRemoval,
};
use crate::dcs::{dcs_wrap, DcsConfig};
use crate::numerics::{normal, orthonormalize, Matrix, RngStream};
use crate::symmetry::{
    make_mirror, make_standard_mirror, MirrorSymmetry, PairSign, RotationTarget, Side,
    StandardMirrorKind,
};

#[derive(Debug)]
pub struct ZooEntry {
    pub name: String,
    pub model: Box<dyn PerSampleLoss>,
    /// Mirrors the loss is symmetric under.
    pub mirrors: Vec<MirrorSymmetry>,
    /// Mirrors the loss breaks.
    pub negative_controls: Vec<MirrorSymmetry>,
}

impl ZooEntry {
    fn new(name: &str, model: Box<dyn PerSampleLoss>) -> Self {
        let mirrors = model.mirrors();
        ZooEntry {
            name: name.into(),
            model,
            mirrors,
            negative_controls: Vec::new(),
        }
    }
}

fn random_projection(n: usize, k: usize, rng: &mut crate::numerics::Rng) -> Matrix {
    let q = orthonormalize(&Matrix::from_fn(n, k, |_, _| normal(rng))).expect("generic columns");
    q.matmul(&q.transpose()).expect("shapes agree")
}

/// Every model family at a small size. `rng` drives the random rotation
/// projections, the DCS projection and the random bias.
pub fn zoo(rng: RngStream) -> Vec<ZooEntry> {
    let mut r = rng.derive(0).rng();
    let mut out = Vec::new();

    let mut lin = ZooEntry::new("linear", Box::new(linear_regression(3)));
    lin.negative_controls.push(
        make_standard_mirror(
            &StandardMirrorKind::RescalingScalarPair {
                a: 0,
                b: 1,
                sign: PairSign::Minus,
            },
            lin.model.layout(),
        )
        .expect("valid pair")
        .with_label("fake_swap(v0,v1)"),
    );
    out.push(lin);

    out.push(ZooEntry::new("hadamard", Box::new(hadamard_regression(3))));

    let mf = matrix_factorization(3, false);
    let mut entry = ZooEntry::new("matfac", Box::new(mf.clone()));
    entry.mirrors.push(
        mf.rotation_mirror(&random_projection(3, 1, &mut r))
            .expect("valid projection"),
    );
    entry.mirrors.push(
        mf.rotation_mirror(&random_projection(3, 2, &mut r))
            .expect("valid projection"),
    );
    let mut e0 = vec![0.0; 3];
    e0[0] = 1.0;
    entry.negative_controls.push(
        make_standard_mirror(
            &StandardMirrorKind::RotationReflection {
                projection: Matrix::outer(&e0, &e0),
                targets: vec![RotationTarget {
                    block: "W".into(),
                    side: Side::Cols,
                }],
            },
            mf.layout(),
        )
        .expect("valid single-sided rotation"),
    );
    out.push(entry);

    let res = matrix_factorization(3, true);
    let mut entry = ZooEntry::new("matfac_residual", Box::new(res));
    entry.negative_controls.push(
        mf.rotation_mirror(&Matrix::outer(&e0, &e0))
            .expect("valid projection"),
    );
    out.push(entry);

    out.push(ZooEntry::new("tanh", Box::new(two_layer_tanh(3))));
    out.push(ZooEntry::new("perm_mlp", Box::new(permutation_mlp(3, 2))));
    out.push(ZooEntry::new("swap_quadratic", Box::new(swap_quadratic())));

    let had = hadamard_regression(3);
    let flip = had.mirrors().remove(0);
    let biased = apply_symmetry_removal(
        Box::new(had),
        SymmetryRemoval::RandomBias(1e-2),
        rng.derive(1),
    )
    .expect("positive scale");
    let mut entry = ZooEntry::new("hadamard_biased", biased);
    entry.negative_controls.push(flip);
    out.push(entry);

    let q = orthonormalize(&Matrix::from_fn(4, 2, |_, _| normal(&mut r))).expect("generic");
    let sym = make_mirror(&q).expect("orthonormal");
    let cfg = DcsConfig::from_mirror(&sym, 0.1).expect("valid projection");
    let wrapped = dcs_wrap(Box::new(linear_regression(4)), cfg).expect("dims agree");
    out.push(ZooEntry::new("dcs_linear", Box::new(wrapped)));

    out
}

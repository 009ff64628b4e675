//! Mirror symmetries: construction, application, and certification against a
//! loss.

mod layout;
mod mirror;
mod verify;

pub use layout::{ParamBlock, ParamLayout};
pub use mirror::{
    is_orthonormal, make_mirror, make_standard_mirror, MirrorSymmetry, PairSign, RotationTarget,
    Side, StandardMirrorKind,
};
pub use verify::{verify_loss_symmetry, SymmetryReport};

//! Dense linear algebra and numerical differentiation kernels.

mod diff;
mod eig;
mod matrix;
mod rng;
mod svd;

pub use diff::{default_step, fd_gradient, fd_hessian, finite_diff};
pub use eig::{orthogonal_complement, orthonormalize, sym_eig, SymEigResult};
pub use matrix::{axpy, dot, norm, norm_inf, Matrix};
pub use rng::{normal, normal_vec, Rng, RngStream};
pub use svd::{numerical_rank, svd, SvdResult};

//! Mirror-reflection symmetries of loss functions and the structure they
//! impose on training.
//!
//! A loss has an O-mirror symmetry when `ℓ(θ) = ℓ((I − 2OOᵀ)θ)`. Its fixed
//! points `Oᵀθ = 0` are where sparsity, low rank and merged neurons come
//! from. This crate provides:
//!
//! - [`symmetry`]: mirrors built from rescaling, rotation and permutation
//!   symmetries, with projection, reflection and certification.
//! - [`models`]: small differentiable losses with their mirrors registered.
//! - [`analysis`]: Hessian block structure, the weight-decay threshold, the
//!   Lyapunov stability of symmetric points, the L1 check and structure
//!   metrics.
//! - [`optimize`]: seeded GD, SGD and adaptive trainers and parallel sweeps.
//! - [`dcs`]: imposing a linear constraint by wrapping a model in an
//!   artificial symmetry.
//! - [`experiments`]: config-driven experiments that emit CSV, and the check
//!   suite behind `mirrorsym verify`.
//!
//! Runnable examples live in `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `mirror_basics` | building mirrors and certifying a loss |
//! | `hessian_blocks` | the Hessian split at symmetric points |
//! | `stationary_condition` | zero mirror gradient and SGD persistence |
//! | `weight_decay_threshold` | the critical weight decay |
//! | `lyapunov_stability` | collapse vs escape under noisy SGD |
//! | `sparsity_sweep` | sparsity vs learning rate |
//! | `low_rank_factorization` | rank vs weight decay |
//! | `continual_plasticity` | dead parameters across tasks and two fixes |
//! | `neuron_merging` | hidden units merging under weight decay |
//! | `dcs_constraint` | constraints through an added symmetry |
//! | `l1_equivalence` | the loss along a mirror direction is linear in `s²` |
//! | `verify_suite` | every theorem check, with optional fault injection |
//! | `config_files` | config parsing, echo and in-process runs |

pub mod analysis;
pub mod data;
pub mod dcs;
pub mod experiments;
mod error;
pub mod models;
pub mod numerics;
pub mod optimize;
pub mod symmetry;

pub use error::{Error, Result};

//! Physics-informed network for `u_t + H(u)_x = eps u_xx`.
//!
//! The network maps `(x, t)` to `u` through nine `tanh` hidden layers and a
//! linear output. Training minimises the mean-square PDE residual at
//! interior collocation points plus the mean-square mismatch with the
//! initial datum; no boundary term is used.

pub mod batch;
pub mod collocation;
pub mod mlp;
pub mod residual;
pub mod train;

pub use batch::{loss_and_gradient, loss_f, loss_u, LossBreakdown};
pub use collocation::{equispaced, sample_collocation, CollocationSet};
pub use mlp::{init_params, InputBounds, MlpParams, HIDDEN_LAYERS};
pub use residual::{residual_f, taped_loss_gradient};
pub use train::{train, train_with_progress, Adam, AdamConfig, TrainingConfig, TrainingOutcome};

//! Contrastive alignment and latent diffusion mathematics: losses with
//! analytic gradients, the forward noising process, a reference
//! epsilon-predictor and a toy two-modality alignment trainer.

mod contrastive;
mod diffusion;
mod toy;

use thiserror::Error;

pub use contrastive::{cosine_similarity, infonce_gradient, infonce_loss, ContrastiveBatch};
pub use diffusion::{
    diffuse_forward, diffusion_loss, diffusion_loss_and_grad, EpsilonPredictor, NoiseSchedule, ResidualMlp,
};
pub use toy::{synthetic_alignment_task, toy_align_train, LinearEncoder, ToyConfig, ToyResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatentError {
    #[error("zero vector")]
    ZeroVector,
    #[error("batch needs at least two pairs of equal dimension and a positive temperature")]
    BadBatch,
    #[error("noise schedule must be non-increasing within (0, 1]")]
    BadSchedule,
    #[error("loss became non-finite at epoch {0}")]
    NonFiniteLoss(usize),
    #[error("need at least {need} pairs, got {got}")]
    TooFewPairs { need: usize, got: usize },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

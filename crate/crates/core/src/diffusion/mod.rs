//! Diffusion sampling on x0-predicting denoisers.
//!
//! Timesteps run `1..=T`; index 0 is the clean boundary where
//! `alpha_bar(0) = 1`. Denoisers always return a prediction of the clean
//! sequence, and the reverse steps derive the implied noise from it.

mod denoiser;
mod ema;
mod guidance;
mod loss;
mod sampler;
mod schedule;
mod sequence;
mod step;

use thiserror::Error;

pub use denoiser::{Denoiser, Exclusive, GaussianOracle};
pub use ema::EmaWeights;
pub use guidance::{cfg_combine, cond_dropout};
pub use loss::{masked_l2_loss, FrameMask};
pub use sampler::{sample, sample_sequence, timestep_grid, SampleOutput, SamplerConfig, Scheduler};
pub use schedule::NoiseSchedule;
pub use sequence::Sequence;
pub use step::{ddim_step, ddpm_coefficients, ddpm_step, forward_noise, DdpmCoefficients};

#[derive(Debug, Error)]
pub enum DiffusionError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid timestep: {0}")]
    Timestep(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scheduler {0} is not supported")]
    Unsupported(&'static str),
    #[error("denoiser failed: {0}")]
    Denoiser(String),
    #[error(transparent)]
    Motion(#[from] crate::motion::MotionError),
}

pub type Result<T, E = DiffusionError> = std::result::Result<T, E>;

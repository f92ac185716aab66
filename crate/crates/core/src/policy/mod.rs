//! Reward and loss terms used to train the whole-body tracker.
//!
//! Everything here is a pure function over plain vectors; no simulator or
//! learning framework is involved.

mod evidential;
mod filter;
mod randomization;
mod reward;
mod symmetry;

pub use evidential::{evidential_loss, evidential_nll, evidential_reg, Evidence, NIGParams, DEFAULT_LAMBDA_REG};
pub use filter::{ema_action_filter, ActionFilter};
pub use randomization::{
    sample_randomization, sample_randomization_with, RandomizationEntry, RandomizationSample,
    RandomizationSpec, RangeKind, DEFAULT_RANDOMIZATION,
};
pub use reward::{
    feet_air_time_reward, feet_air_time_per_foot, impact_penalty, tracking_reward, AirTimeMode,
    FeatureMap, FeetAirTime, RegularizationWeights, RewardConfig, TrackingReward, TrackingTerm,
};
pub use symmetry::{symmetry_loss, MirrorMap, SymmetrySpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("missing feature `{0}`")]
    MissingFeature(String),
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    Dimension {
        what: String,
        expected: usize,
        actual: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = PolicyError> = std::result::Result<T, E>;

pub(crate) fn check_dim(what: &str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(PolicyError::Dimension {
            what: what.to_string(),
            expected,
            actual,
        });
    }
    Ok(())
}

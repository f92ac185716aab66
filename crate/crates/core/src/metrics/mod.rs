//! Motion quality metrics.
//!
//! The robot-centric scores ([`safety`], [`rtc`]) work directly on clips.
//! The distributional scores ([`fid`], [`retrieval`]) consume precomputed
//! motion/text embeddings; nothing here computes embeddings.

pub mod embedding;
pub mod fid;
pub mod mpjpe;
pub mod retrieval;
pub mod rtc;
pub mod safety;

use thiserror::Error;

use crate::motion::MotionError;

pub use embedding::{EmbeddingRole, EmbeddingSet};
pub use fid::{fid, frechet_distance, gaussian_fit};
pub use mpjpe::{mpjpe, MpjpeResult};
pub use retrieval::{diversity, mm_dist, r_precision, RPrecision};
pub use rtc::{resample_arc_length, root_trajectory_consistency, rtc_paths, RtcConfig, RtcScore};
pub use safety::{motion_safety_score, Aggregation, SafetyLimits, SafetyScore};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not enough samples: need {required}, got {actual}")]
    TooFew { required: usize, actual: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("embedding format error: {0}")]
    Format(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;

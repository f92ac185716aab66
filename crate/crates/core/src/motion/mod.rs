//! The 38D motion representation and its conversions.
//!
//! Frame layout (fixed order):
//!
//! | index   | content                                   | unit      |
//! |---------|-------------------------------------------|-----------|
//! | 0..29   | joint angles, G1 order (see [`joints`])   | rad       |
//! | 29..31  | planar root displacement since last frame | m / frame |
//! | 31      | root height                               | m         |
//! | 32..38  | 6D root rotation (first two matrix cols)  | -         |

pub(crate) mod clip;
mod diff;
pub mod io;
pub mod joints;
mod norm;
mod rotation;

use thiserror::Error;

pub use clip::{decode_clip, encode_clip, AbsoluteTrajectory, MotionClip, MotionFrame};
pub use diff::{finite_diff, DiffOrder};
pub use norm::{denormalize, fit_norm_stats, normalize, NormStats, STD_FLOOR};
pub use rotation::{rot6d_to_matrix, rot_matrix_to_6d, DEGENERATE_TOL};

/// Number of actuated joints on the G1 (29-DoF EDU).
pub const NUM_JOINTS: usize = 29;
/// Scalars per frame.
pub const FRAME_DIM: usize = 38;
/// Default frame rate of generated motion.
pub const DEFAULT_FPS: u8 = 50;

pub(crate) const VEL_OFFSET: usize = 29;
pub(crate) const HEIGHT_OFFSET: usize = 31;
pub(crate) const ROT_OFFSET: usize = 32;

#[derive(Debug, Error)]
pub enum MotionError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("degenerate 6D rotation: Gram-Schmidt norm {norm:e} below tolerance")]
    DegenerateRotation { norm: f64 },
    #[error("clip too short: need at least {required} frames, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("empty input")]
    Empty,
    #[error("invalid frame rate {0}")]
    InvalidFps(f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MotionError> = std::result::Result<T, E>;

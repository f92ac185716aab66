//! Fall detection from IMU gravity readings and retrieval of a recovery
//! clip from a pre-built library.

mod detect;
mod library;
mod retrieve;

pub use detect::{detect_fall, FallDetector, NOMINAL_GRAVITY};
pub use library::{build_index, load_index, write_index, RecoveryEntry, RecoveryLibrary, INDEX_FILE};
pub use retrieve::{angle_deg, retrieve_recovery, Retrieval};

use thiserror::Error;

use crate::motion::MotionError;

/// Tolerance on the norm of gravity readings.
pub const UNIT_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("recovery library is empty")]
    EmptyLibrary,
    #[error("gravity vector is not unit length (norm {norm})")]
    NonUnit { norm: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("index line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = RecoveryError> = std::result::Result<T, E>;

pub(crate) fn check_unit(v: &[f64; 3], tol: f64) -> Result<()> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > tol {
        return Err(RecoveryError::NonUnit { norm });
    }
    Ok(())
}

//! Humanoid motion toolkit built around a compact, robot-native 38D frame.
//!
//! Each frame holds 29 joint angles of a Unitree G1 (29-DoF), the planar root
//! displacement since the previous frame, the root height and a continuous 6D
//! root orientation. On top of that representation the crate provides:
//!
//! - [`motion`]: rotation conversions, trajectory encode/decode, normalization,
//!   finite differences and the `.emc` / CSV clip formats.
//! - [`metrics`]: Motion Safety Score, Root Trajectory Consistency, FID,
//!   R-Precision, Diversity, MM-Dist and (g-)MPJPE.
//! - [`diffusion`]: noise schedule, forward noising, DDPM/DDIM reverse steps on
//!   x0-predicting denoisers, classifier-free guidance, masked loss and EMA.
//! - [`policy`]: tracking reward, impact penalty, feet air time, symmetry loss,
//!   evidential NIG loss, domain randomization and action smoothing.
//! - [`recovery`]: IMU fall detection and two-stage recovery clip retrieval.

pub mod diffusion;
pub mod metrics;
pub mod motion;
pub mod policy;
pub mod recovery;

pub use motion::{
    AbsoluteTrajectory, MotionClip, MotionError, MotionFrame, NormStats, FRAME_DIM, NUM_JOINTS,
};

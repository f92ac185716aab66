use super::{MotionClip, MotionError, Result, NUM_JOINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    /// rad/s
    Velocity,
    /// rad/s^2
    Acceleration,
}

/// Joint-space finite differences.
///
/// Interior frames use central differences. Endpoints use one-sided
/// differences: first-order forward/backward for velocity, and the
/// neighbouring interior value's stencil shifted by one frame for
/// acceleration (`q2 - 2 q1 + q0` at frame 0, mirrored at the end).
pub fn finite_diff(clip: &MotionClip, order: DiffOrder) -> Result<Vec<[f64; NUM_JOINTS]>> {
    let q = clip.joint_rows();
    let n = q.len();
    let fps = clip.fps_f64();
    let required = match order {
        DiffOrder::Velocity => 2,
        DiffOrder::Acceleration => 3,
    };
    if n < required {
        return Err(MotionError::TooShort {
            required,
            actual: n,
        });
    }

    let mut out = vec![[0.0; NUM_JOINTS]; n];
    match order {
        DiffOrder::Velocity => {
            for j in 0..NUM_JOINTS {
                out[0][j] = (q[1][j] - q[0][j]) * fps;
                out[n - 1][j] = (q[n - 1][j] - q[n - 2][j]) * fps;
                for t in 1..n - 1 {
                    out[t][j] = (q[t + 1][j] - q[t - 1][j]) * fps / 2.0;
                }
            }
        }
        DiffOrder::Acceleration => {
            let fps2 = fps * fps;
            let second = |t: usize, j: usize| (q[t + 1][j] - 2.0 * q[t][j] + q[t - 1][j]) * fps2;
            for j in 0..NUM_JOINTS {
                for t in 1..n - 1 {
                    out[t][j] = second(t, j);
                }
                out[0][j] = second(1, j);
                out[n - 1][j] = second(n - 2, j);
            }
        }
    }
    Ok(out)
}

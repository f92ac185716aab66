use nalgebra::Matrix3;

use super::rotation::{rot6d_to_matrix, rot_matrix_to_6d};
use super::{
    MotionError, Result, DEFAULT_FPS, FRAME_DIM, HEIGHT_OFFSET, NUM_JOINTS, ROT_OFFSET, VEL_OFFSET,
};

/// One 38D frame: joints, planar root displacement (m/frame), root height and
/// 6D root orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionFrame {
    pub joint_pos: [f64; NUM_JOINTS],
    pub root_vel_xy: [f64; 2],
    pub root_height: f64,
    pub root_rot6d: [f64; 6],
}

impl Default for MotionFrame {
    /// Upright, zero pose at the origin height.
    fn default() -> Self {
        Self {
            joint_pos: [0.0; NUM_JOINTS],
            root_vel_xy: [0.0; 2],
            root_height: 0.0,
            root_rot6d: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        }
    }
}

impl MotionFrame {
    pub fn from_array(v: &[f64; FRAME_DIM]) -> Self {
        let mut joint_pos = [0.0; NUM_JOINTS];
        joint_pos.copy_from_slice(&v[..VEL_OFFSET]);
        let mut root_rot6d = [0.0; 6];
        root_rot6d.copy_from_slice(&v[ROT_OFFSET..]);
        Self {
            joint_pos,
            root_vel_xy: [v[VEL_OFFSET], v[VEL_OFFSET + 1]],
            root_height: v[HEIGHT_OFFSET],
            root_rot6d,
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: &[f64; FRAME_DIM] = v.try_into().map_err(|_| MotionError::LengthMismatch {
            expected: FRAME_DIM,
            actual: v.len(),
        })?;
        Ok(Self::from_array(arr))
    }

    pub fn to_array(&self) -> [f64; FRAME_DIM] {
        let mut out = [0.0; FRAME_DIM];
        out[..VEL_OFFSET].copy_from_slice(&self.joint_pos);
        out[VEL_OFFSET] = self.root_vel_xy[0];
        out[VEL_OFFSET + 1] = self.root_vel_xy[1];
        out[HEIGHT_OFFSET] = self.root_height;
        out[ROT_OFFSET..].copy_from_slice(&self.root_rot6d);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn root_rotation(&self) -> Result<Matrix3<f64>> {
        rot6d_to_matrix(&self.root_rot6d)
    }
}

/// A timed sequence of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionClip {
    pub frames: Vec<MotionFrame>,
    pub fps: u8,
    pub prompt: Option<String>,
}

impl MotionClip {
    /// Builds a clip, checking `fps > 0`, non-empty and finite.
    pub fn new(frames: Vec<MotionFrame>, fps: u8) -> Result<Self> {
        let clip = Self {
            frames,
            fps,
            prompt: None,
        };
        clip.validate()?;
        Ok(clip)
    }

    pub fn with_prompt(mut self, prompt: impl Into<String>) -> Self {
        self.prompt = Some(prompt.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.fps == 0 {
            return Err(MotionError::InvalidFps(0.0));
        }
        if self.frames.is_empty() {
            return Err(MotionError::Empty);
        }
        if !self.frames.iter().all(MotionFrame::is_finite) {
            return Err(MotionError::NonFinite("motion clip"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps_f64(&self) -> f64 {
        f64::from(self.fps)
    }

    pub fn duration_secs(&self) -> f64 {
        self.frames.len() as f64 / self.fps_f64()
    }

    /// Row-major `len x 38` copy of the frame data.
    pub fn to_flat(&self) -> Vec<f64> {
        self.frames.iter().flat_map(|f| f.to_array()).collect()
    }

    pub fn from_flat(data: &[f64], fps: u8) -> Result<Self> {
        if data.len() % FRAME_DIM != 0 {
            return Err(MotionError::LengthMismatch {
                expected: (data.len() / FRAME_DIM + 1) * FRAME_DIM,
                actual: data.len(),
            });
        }
        let frames = data
            .chunks_exact(FRAME_DIM)
            .map(MotionFrame::from_slice)
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, fps)
    }

    /// Per-frame joint angle rows.
    pub fn joint_rows(&self) -> Vec<[f64; NUM_JOINTS]> {
        self.frames.iter().map(|f| f.joint_pos).collect()
    }
}

/// Decoded, world-frame form of a clip.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsoluteTrajectory {
    pub root_pos: Vec<[f64; 3]>,
    pub root_rot: Vec<Matrix3<f64>>,
    pub joint_pos: Vec<[f64; NUM_JOINTS]>,
    pub fps: u8,
}

impl AbsoluteTrajectory {
    pub fn len(&self) -> usize {
        self.root_pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root_pos.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.root_pos.len();
        for len in [self.root_rot.len(), self.joint_pos.len()] {
            if len != n {
                return Err(MotionError::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let finite = self.root_pos.iter().flatten().all(|v| v.is_finite())
            && self.root_rot.iter().all(|r| r.iter().all(|v| v.is_finite()))
            && self.joint_pos.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(MotionError::NonFinite("trajectory"));
        }
        if self.fps == 0 {
            return Err(MotionError::InvalidFps(0.0));
        }
        Ok(())
    }
}

/// World trajectory -> 38D clip. Frame 0 gets zero planar velocity.
pub fn encode_clip(traj: &AbsoluteTrajectory) -> Result<MotionClip> {
    if traj.len() < 2 {
        return Err(MotionError::TooShort {
            required: 2,
            actual: traj.len(),
        });
    }
    traj.check()?;

    let frames = (0..traj.len())
        .map(|t| {
            let p = traj.root_pos[t];
            let root_vel_xy = if t == 0 {
                [0.0, 0.0]
            } else {
                let prev = traj.root_pos[t - 1];
                [p[0] - prev[0], p[1] - prev[1]]
            };
            Ok(MotionFrame {
                joint_pos: traj.joint_pos[t],
                root_vel_xy,
                root_height: p[2],
                root_rot6d: rot_matrix_to_6d(&traj.root_rot[t])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MotionClip::new(frames, traj.fps)
}

/// 38D clip -> world trajectory, integrating planar velocity from `origin_xy`.
///
/// Frame 0's stored velocity is ignored: `p_xy[0] = origin_xy`.
pub fn decode_clip(clip: &MotionClip, origin_xy: [f64; 2]) -> Result<AbsoluteTrajectory> {
    clip.validate()?;
    let n = clip.len();
    let mut root_pos = Vec::with_capacity(n);
    let mut root_rot = Vec::with_capacity(n);
    let mut joint_pos = Vec::with_capacity(n);

    let mut xy = origin_xy;
    for (t, frame) in clip.frames.iter().enumerate() {
        if t > 0 {
            xy[0] += frame.root_vel_xy[0];
            xy[1] += frame.root_vel_xy[1];
        }
        root_pos.push([xy[0], xy[1], frame.root_height]);
        root_rot.push(frame.root_rotation()?);
        joint_pos.push(frame.joint_pos);
    }
    Ok(AbsoluteTrajectory {
        root_pos,
        root_rot,
        joint_pos,
        fps: clip.fps,
    })
}

/// Planar root path integrated from `(0, 0)`; skips rotation decoding.
pub(crate) fn root_xy_path(clip: &MotionClip) -> Vec<[f64; 2]> {
    let mut xy = [0.0, 0.0];
    clip.frames
        .iter()
        .enumerate()
        .map(|(t, f)| {
            if t > 0 {
                xy[0] += f.root_vel_xy[0];
                xy[1] += f.root_vel_xy[1];
            }
            xy
        })
        .collect()
}

impl Default for MotionClip {
    fn default() -> Self {
        Self {
            frames: vec![MotionFrame::default()],
            fps: DEFAULT_FPS,
            prompt: None,
        }
    }
}

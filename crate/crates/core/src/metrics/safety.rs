//! Motion Safety Score.
//!
//! For each constraint `k` in {position, velocity, acceleration} every
//! frame x joint sample gets a normalized violation
//! `max(0, |x| - limit) / limit`; these are averaged (or maxed) into `v_k`,
//! mapped to `S_k = exp(-sharpness * v_k)` and combined as
//! `S_pos^0.5 * S_vel^0.3 * S_acc^0.2`.
//!
//! Position limits are soft: `soft_fraction` of the half-range, measured
//! from the centre of each joint's range, so `|x|` there is the distance
//! from the range centre.

use crate::motion::joints::{g1_joint_limits, JointRange};
use crate::motion::{finite_diff, DiffOrder, MotionClip, NUM_JOINTS};

use super::{MetricsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyLimits {
    pub joints: Vec<JointRange>,
    pub soft_fraction: f64,
    /// rad/s
    pub vel_limit: f64,
    /// rad/s^2
    pub acc_limit: f64,
    pub sharpness: f64,
    pub w_pos: f64,
    pub w_vel: f64,
    pub w_acc: f64,
    pub aggregation: Aggregation,
}

impl Default for SafetyLimits {
    fn default() -> Self {
        Self::with_joints(g1_joint_limits())
    }
}

impl SafetyLimits {
    pub fn with_joints(joints: Vec<JointRange>) -> Self {
        Self {
            joints,
            soft_fraction: 0.90,
            vel_limit: 10.0,
            acc_limit: 100.0,
            sharpness: 100.0,
            w_pos: 0.5,
            w_vel: 0.3,
            w_acc: 0.2,
            aggregation: Aggregation::Mean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: &str| Err(MetricsError::Config(m.to_string()));
        if self.joints.len() != NUM_JOINTS {
            return Err(MetricsError::Config(format!(
                "need {NUM_JOINTS} joint limits, got {}",
                self.joints.len()
            )));
        }
        if self.joints.iter().any(|j| !(j.lower < j.upper)) {
            return cfg("joint range must have lower < upper");
        }
        if !(self.soft_fraction > 0.0 && self.soft_fraction <= 1.0) {
            return cfg("soft_fraction must be in (0, 1]");
        }
        if !(self.vel_limit > 0.0 && self.acc_limit > 0.0 && self.sharpness > 0.0) {
            return cfg("limits and sharpness must be positive");
        }
        let weights = [self.w_pos, self.w_vel, self.w_acc];
        if weights.iter().any(|w| *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return cfg("sub-score exponents must be non-negative and sum to 1");
        }
        Ok(())
    }

    /// Distance from range centre at which the soft limit starts, per joint.
    fn soft_half_range(&self, j: usize) -> (f64, f64) {
        let r = &self.joints[j];
        let centre = 0.5 * (r.lower + r.upper);
        (centre, self.soft_fraction * 0.5 * (r.upper - r.lower))
    }

    /// Combines aggregated violations into the score.
    pub fn score_from_violations(&self, v_pos: f64, v_vel: f64, v_acc: f64) -> SafetyScore {
        let s_pos = (-self.sharpness * v_pos).exp();
        let s_vel = (-self.sharpness * v_vel).exp();
        let s_acc = (-self.sharpness * v_acc).exp();
        SafetyScore {
            mss: s_pos.powf(self.w_pos) * s_vel.powf(self.w_vel) * s_acc.powf(self.w_acc),
            s_pos,
            s_vel,
            s_acc,
            v_pos,
            v_vel,
            v_acc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyScore {
    pub mss: f64,
    pub s_pos: f64,
    pub s_vel: f64,
    pub s_acc: f64,
    pub v_pos: f64,
    pub v_vel: f64,
    pub v_acc: f64,
}

fn excess(value: f64, limit: f64) -> f64 {
    (value.abs() - limit).max(0.0) / limit
}

fn aggregate(values: impl Iterator<Item = f64>, how: Aggregation) -> f64 {
    let mut count = 0usize;
    let mut acc = 0.0f64;
    for v in values {
        count += 1;
        acc = match how {
            Aggregation::Mean => acc + v,
            Aggregation::Max => acc.max(v),
        };
    }
    match how {
        Aggregation::Mean if count > 0 => acc / count as f64,
        _ => acc,
    }
}

pub fn motion_safety_score(clip: &MotionClip, limits: &SafetyLimits) -> Result<SafetyScore> {
    limits.validate()?;
    if clip.len() < 3 {
        return Err(MetricsError::TooFew {
            required: 3,
            actual: clip.len(),
        });
    }
    clip.validate()?;
    let vel = finite_diff(clip, DiffOrder::Velocity)?;
    let acc = finite_diff(clip, DiffOrder::Acceleration)?;

    let v_pos = aggregate(
        clip.frames.iter().flat_map(|f| {
            f.joint_pos.iter().enumerate().map(|(j, &q)| {
                let (centre, half) = limits.soft_half_range(j);
                excess(q - centre, half)
            })
        }),
        limits.aggregation,
    );
    let v_vel = aggregate(
        vel.iter().flatten().map(|&v| excess(v, limits.vel_limit)),
        limits.aggregation,
    );
    let v_acc = aggregate(
        acc.iter().flatten().map(|&a| excess(a, limits.acc_limit)),
        limits.aggregation,
    );
    Ok(limits.score_from_violations(v_pos, v_vel, v_acc))
}

/// Mean per-clip MSS over a batch.
pub fn mean_safety_score<'a, I>(clips: I, limits: &SafetyLimits) -> Result<f64>
where
    I: IntoIterator<Item = &'a MotionClip>,
{
    let scores = clips
        .into_iter()
        .map(|c| motion_safety_score(c, limits).map(|s| s.mss))
        .collect::<Result<Vec<_>>>()?;
    if scores.is_empty() {
        return Err(MetricsError::TooFew {
            required: 1,
            actual: 0,
        });
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

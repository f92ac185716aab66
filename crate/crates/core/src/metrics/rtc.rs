//! Root Trajectory Consistency.
//!
//! Both root paths are integrated from the origin and resampled to `K`
//! points equally spaced in arc length, then compared:
//!
//! - shape: `D = mean_k |g_k - r_k| / max(L_gt, eps)`,
//!   `S_shape = exp(-D^2 / (2 sigma_shape^2))`
//! - extent: `S_extent = exp(-ln(max(L_gen, eps) / max(L_gt, eps))^2 / (2 sigma_extent^2))`
//! - `RTC = S_shape^0.7 * S_extent^0.3`
//!
//! The kernel forms are a reconstruction: only the sigmas, `K` and the two
//! exponents are fixed by the metric's definition. Alignment is by
//! translation only, so heading errors count against the shape score.

use crate::motion::clip::root_xy_path;
use crate::motion::MotionClip;

use super::{MetricsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RtcConfig {
    pub num_waypoints: usize,
    pub shape_sigma: f64,
    pub extent_sigma: f64,
    pub shape_weight: f64,
    pub extent_weight: f64,
    /// Metres; guards length ratios and normalization for stationary paths.
    pub epsilon: f64,
}

impl Default for RtcConfig {
    fn default() -> Self {
        Self {
            num_waypoints: 50,
            shape_sigma: 0.35,
            extent_sigma: 0.8,
            shape_weight: 0.7,
            extent_weight: 0.3,
            epsilon: 1e-6,
        }
    }
}

impl RtcConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.num_waypoints >= 2
            && self.shape_sigma > 0.0
            && self.extent_sigma > 0.0
            && self.epsilon > 0.0
            && self.shape_weight >= 0.0
            && self.extent_weight >= 0.0
            && (self.shape_weight + self.extent_weight - 1.0).abs() < 1e-9;
        if ok {
            Ok(())
        } else {
            Err(MetricsError::Config(format!("invalid RTC config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtcScore {
    pub rtc: f64,
    pub s_shape: f64,
    pub s_extent: f64,
    /// Normalized mean waypoint distance `D`.
    pub shape_error: f64,
    pub len_gen: f64,
    pub len_gt: f64,
}

fn path_length(path: &[[f64; 2]]) -> f64 {
    path.windows(2).map(|w| dist(w[0], w[1])).sum()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Resamples a polyline to `k` points equally spaced in arc length.
///
/// The first and last points coincide with the path's endpoints. A path of
/// zero length collapses to `k` copies of its first point.
pub fn resample_arc_length(path: &[[f64; 2]], k: usize) -> Vec<[f64; 2]> {
    assert!(!path.is_empty() && k >= 2);
    let total = path_length(path);
    if total <= 0.0 {
        return vec![path[0]; k];
    }
    let mut out = Vec::with_capacity(k);
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    for i in 0..k {
        let target = total * i as f64 / (k - 1) as f64;
        if i == k - 1 {
            out.push(*path.last().unwrap());
            break;
        }
        loop {
            let seg_len = dist(path[seg], path[seg + 1]);
            if seg_start + seg_len >= target || seg + 2 >= path.len() {
                let u = if seg_len > 0.0 {
                    ((target - seg_start) / seg_len).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (a, b) = (path[seg], path[seg + 1]);
                out.push([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]);
                break;
            }
            seg_start += seg_len;
            seg += 1;
        }
    }
    out
}

/// RTC over raw planar paths.
pub fn rtc_paths(gen: &[[f64; 2]], gt: &[[f64; 2]], cfg: &RtcConfig) -> Result<RtcScore> {
    cfg.validate()?;
    if gen.is_empty() || gt.is_empty() {
        return Err(MetricsError::TooFew {
            required: 1,
            actual: 0,
        });
    }
    if gen.iter().chain(gt).flatten().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite("root path"));
    }
    let k = cfg.num_waypoints;
    let anchor = |p: Vec<[f64; 2]>| {
        let o = p[0];
        p.into_iter()
            .map(|q| [q[0] - o[0], q[1] - o[1]])
            .collect::<Vec<_>>()
    };
    let wg = anchor(resample_arc_length(gen, k));
    let wr = anchor(resample_arc_length(gt, k));

    let len_gen = path_length(gen);
    let len_gt = path_length(gt);
    let mean_err = wg.iter().zip(&wr).map(|(a, b)| dist(*a, *b)).sum::<f64>() / k as f64;
    let shape_error = mean_err / len_gt.max(cfg.epsilon);
    let s_shape = (-shape_error.powi(2) / (2.0 * cfg.shape_sigma.powi(2))).exp();
    let log_ratio = (len_gen.max(cfg.epsilon) / len_gt.max(cfg.epsilon)).ln();
    let s_extent = (-log_ratio.powi(2) / (2.0 * cfg.extent_sigma.powi(2))).exp();

    Ok(RtcScore {
        rtc: s_shape.powf(cfg.shape_weight) * s_extent.powf(cfg.extent_weight),
        s_shape,
        s_extent,
        shape_error,
        len_gen,
        len_gt,
    })
}

pub fn root_trajectory_consistency(
    gen: &MotionClip,
    gt: &MotionClip,
    cfg: &RtcConfig,
) -> Result<RtcScore> {
    gen.validate()?;
    gt.validate()?;
    rtc_paths(&root_xy_path(gen), &root_xy_path(gt), cfg)
}

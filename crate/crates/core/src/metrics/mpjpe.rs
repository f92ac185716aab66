//! Keypoint position errors. Inputs are metres, outputs millimetres.

use super::{MetricsError, Result};

/// Per-frame keypoint positions.
pub type KeypointFrames = [Vec<[f64; 3]>];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpjpeResult {
    /// World-frame mean per-joint error.
    pub global_mm: f64,
    /// Error after subtracting each frame's root keypoint.
    pub local_mm: f64,
}

fn norm3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Global and root-relative MPJPE. `root` indexes the root keypoint in
/// every frame; it is included in the average (with zero local error).
pub fn mpjpe(actual: &KeypointFrames, reference: &KeypointFrames, root: usize) -> Result<MpjpeResult> {
    if actual.len() != reference.len() || actual.is_empty() {
        return Err(MetricsError::Shape(format!(
            "{} vs {} frames",
            actual.len(),
            reference.len()
        )));
    }
    let mut global = 0.0;
    let mut local = 0.0;
    let mut count = 0usize;
    for (a, r) in actual.iter().zip(reference) {
        if a.len() != r.len() || root >= a.len() {
            return Err(MetricsError::Shape(format!(
                "frame keypoint counts {} vs {} (root {root})",
                a.len(),
                r.len()
            )));
        }
        let (ra, rr) = (a[root], r[root]);
        for (p, q) in a.iter().zip(r) {
            if p.iter().chain(q).any(|v| !v.is_finite()) {
                return Err(MetricsError::NonFinite("keypoints"));
            }
            global += norm3(*p, *q);
            let pl = [p[0] - ra[0], p[1] - ra[1], p[2] - ra[2]];
            let ql = [q[0] - rr[0], q[1] - rr[1], q[2] - rr[2]];
            local += norm3(pl, ql);
            count += 1;
        }
    }
    let n = count as f64;
    Ok(MpjpeResult {
        global_mm: 1000.0 * global / n,
        local_mm: 1000.0 * local / n,
    })
}

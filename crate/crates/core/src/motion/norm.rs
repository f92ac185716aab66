use super::{MotionClip, MotionError, MotionFrame, Result, FRAME_DIM};

/// Lower bound applied to every per-dimension standard deviation.
pub const STD_FLOOR: f64 = 1e-6;

/// Per-dimension z-score statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mean: [f64; FRAME_DIM],
    pub std: [f64; FRAME_DIM],
}

impl NormStats {
    /// Statistics that leave data unchanged.
    pub fn identity() -> Self {
        Self {
            mean: [0.0; FRAME_DIM],
            std: [1.0; FRAME_DIM],
        }
    }

    /// Builds stats from raw vectors, flooring the standard deviations.
    pub fn new(mean: [f64; FRAME_DIM], std: [f64; FRAME_DIM]) -> Result<Self> {
        if mean.iter().chain(&std).any(|v| !v.is_finite()) {
            return Err(MotionError::NonFinite("norm stats"));
        }
        Ok(Self {
            mean,
            std: std.map(|s| s.max(STD_FLOOR)),
        })
    }

    pub fn normalize_row(&self, row: &mut [f64]) {
        for (i, v) in row.iter_mut().enumerate() {
            *v = (*v - self.mean[i]) / self.std[i];
        }
    }

    pub fn denormalize_row(&self, row: &mut [f64]) {
        for (i, v) in row.iter_mut().enumerate() {
            *v = *v * self.std[i] + self.mean[i];
        }
    }
}

/// Population mean/std over every frame of every clip.
pub fn fit_norm_stats<'a, I>(clips: I) -> Result<NormStats>
where
    I: IntoIterator<Item = &'a MotionClip>,
{
    let mut count = 0usize;
    let mut sum = [0.0; FRAME_DIM];
    let rows: Vec<[f64; FRAME_DIM]> = clips
        .into_iter()
        .flat_map(|c| c.frames.iter().map(MotionFrame::to_array))
        .collect();
    for row in &rows {
        count += 1;
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    if count == 0 {
        return Err(MotionError::Empty);
    }
    let n = count as f64;
    let mean = sum.map(|s| s / n);
    let mut var = [0.0; FRAME_DIM];
    for row in &rows {
        for i in 0..FRAME_DIM {
            let d = row[i] - mean[i];
            var[i] += d * d;
        }
    }
    NormStats::new(mean, var.map(|v| (v / n).sqrt()))
}

fn map_frames(clip: &MotionClip, f: impl Fn(&mut [f64])) -> MotionClip {
    let frames = clip
        .frames
        .iter()
        .map(|frame| {
            let mut row = frame.to_array();
            f(&mut row);
            MotionFrame::from_array(&row)
        })
        .collect();
    MotionClip {
        frames,
        fps: clip.fps,
        prompt: clip.prompt.clone(),
    }
}

pub fn normalize(clip: &MotionClip, stats: &NormStats) -> MotionClip {
    map_frames(clip, |row| stats.normalize_row(row))
}

pub fn denormalize(clip: &MotionClip, stats: &NormStats) -> MotionClip {
    map_frames(clip, |row| stats.denormalize_row(row))
}

use super::{DiffusionError, Result, Sequence};

/// Per-frame validity for variable-length batches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMask(pub Vec<bool>);

impl FrameMask {
    pub fn all_valid(frames: usize) -> Self {
        Self(vec![true; frames])
    }

    /// First `valid` frames valid, the rest padding.
    pub fn prefix(frames: usize, valid: usize) -> Self {
        Self((0..frames).map(|t| t < valid).collect())
    }

    pub fn valid_count(&self) -> usize {
        self.0.iter().filter(|v| **v).count()
    }
}

/// Mean squared error over valid frames: sum of squared differences on
/// valid frames divided by `valid_frames x dim`.
pub fn masked_l2_loss(pred: &Sequence, target: &Sequence, mask: &FrameMask) -> Result<f64> {
    pred.check_same(target, "masked_l2_loss")?;
    if mask.0.len() != pred.frames() {
        return Err(DiffusionError::Shape(format!(
            "mask length {} for {} frames",
            mask.0.len(),
            pred.frames()
        )));
    }
    let valid = mask.valid_count();
    if valid == 0 {
        return Err(DiffusionError::Shape("mask has no valid frames".into()));
    }
    let sum: f64 = (0..pred.frames())
        .filter(|&t| mask.0[t])
        .flat_map(|t| pred.row(t).iter().zip(target.row(t)))
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / (valid * pred.dim()) as f64)
}

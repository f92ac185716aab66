use rand::Rng;

use super::{Result, Sequence};

/// Classifier-free guidance: `uncond + s (cond - uncond)`.
///
/// `s = 0` and `s = 1` return `uncond` / `cond` exactly.
pub fn cfg_combine(cond: &Sequence, uncond: &Sequence, scale: f64) -> Result<Sequence> {
    cond.check_same(uncond, "cfg_combine")?;
    if scale == 0.0 {
        return Ok(uncond.clone());
    }
    if scale == 1.0 {
        return Ok(cond.clone());
    }
    uncond.zip_map(cond, |u, c| u + scale * (c - u))
}

/// Training-side condition dropout: returns `None` with probability `p_uncond`.
pub fn cond_dropout<T, R: Rng + ?Sized>(cond: T, p_uncond: f64, rng: &mut R) -> Option<T> {
    assert!((0.0..=1.0).contains(&p_uncond), "p_uncond must be in [0, 1]");
    let drop = rng.random::<f64>() < p_uncond;
    (!drop).then_some(cond)
}

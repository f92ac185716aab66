use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    cfg_combine, ddim_step, ddpm_step, Denoiser, DiffusionError, NoiseSchedule, Result, Sequence,
};
use crate::motion::{MotionClip, MotionFrame, NormStats, DEFAULT_FPS, FRAME_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    Ddpm,
    Ddim,
    /// Reserved; sampling with it fails with [`DiffusionError::Unsupported`].
    DpmSolver,
}

impl std::str::FromStr for Scheduler {
    type Err = DiffusionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ddpm" => Ok(Self::Ddpm),
            "ddim" => Ok(Self::Ddim),
            "dpm" | "dpm-solver" | "dpmsolver" => Ok(Self::DpmSolver),
            other => Err(DiffusionError::Config(format!("unknown scheduler {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub scheduler: Scheduler,
    pub num_steps: usize,
    pub cfg_scale: f64,
    /// DDIM stochasticity; 0 is deterministic.
    pub eta: f64,
    pub seed: u64,
    /// Condition dropout probability used on the training side.
    pub p_uncond: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            scheduler: Scheduler::Ddim,
            num_steps: 10,
            cfg_scale: 2.5,
            eta: 0.0,
            seed: 0,
            p_uncond: 0.1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self, sched: &NoiseSchedule) -> Result<()> {
        if self.scheduler == Scheduler::DpmSolver {
            return Err(DiffusionError::Unsupported("DPM-Solver"));
        }
        if self.num_steps < 1 || self.num_steps > sched.num_timesteps() {
            return Err(DiffusionError::Config(format!(
                "num_steps {} must be in 1..={}",
                self.num_steps,
                sched.num_timesteps()
            )));
        }
        if !(self.cfg_scale >= 0.0 && self.cfg_scale.is_finite()) {
            return Err(DiffusionError::Config("cfg_scale must be >= 0".into()));
        }
        if !(self.eta >= 0.0) || !(0.0..=1.0).contains(&self.p_uncond) {
            return Err(DiffusionError::Config("eta must be >= 0, p_uncond in [0, 1]".into()));
        }
        Ok(())
    }
}

/// `num_steps + 1` timesteps evenly spaced from `T` down to 0, inclusive.
pub fn timestep_grid(num_timesteps: usize, num_steps: usize) -> Vec<usize> {
    (0..=num_steps)
        .map(|i| {
            let frac = (num_steps - i) as f64 / num_steps as f64;
            (num_timesteps as f64 * frac).round() as usize
        })
        .collect()
}

fn guided_prediction<D: Denoiser + ?Sized>(
    denoiser: &D,
    x: &Sequence,
    t: usize,
    cond: Option<&str>,
    scale: f64,
) -> Result<Sequence> {
    let uncond = denoiser.predict_x0(x, t, None)?;
    if scale == 0.0 {
        return Ok(uncond);
    }
    let cond = denoiser.predict_x0(x, t, cond)?;
    if cond.shape() != x.shape() || uncond.shape() != x.shape() {
        return Err(DiffusionError::Denoiser(format!(
            "denoiser changed shape {:?}",
            x.shape()
        )));
    }
    cfg_combine(&cond, &uncond, scale)
}

/// Runs the reverse process from seeded standard normal noise.
///
/// Every step queries the denoiser unconditionally and (unless
/// `cfg_scale == 0`) conditionally, combines with guidance, then applies the
/// scheduler update. DDPM with fewer than `T` steps uses the exact Gaussian
/// posterior between grid points (DDIM with `eta = 1`).
pub fn sample_sequence<D: Denoiser + ?Sized>(
    denoiser: &D,
    cond: Option<&str>,
    frames: usize,
    dim: usize,
    cfg: &SamplerConfig,
    sched: &NoiseSchedule,
) -> Result<Sequence> {
    cfg.validate(sched)?;
    if frames == 0 || dim == 0 {
        return Err(DiffusionError::Shape("empty sample shape".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = Sequence::standard_normal(frames, dim, &mut rng);
    let grid = timestep_grid(sched.num_timesteps(), cfg.num_steps);

    for pair in grid.windows(2) {
        let (t, t_prev) = (pair[0], pair[1]);
        if t == t_prev {
            continue;
        }
        let x0 = guided_prediction(denoiser, &x, t, cond, cfg.cfg_scale)?;
        x = match cfg.scheduler {
            Scheduler::Ddim => {
                let noise = (cfg.eta > 0.0 && t_prev > 0)
                    .then(|| Sequence::standard_normal(frames, dim, &mut rng));
                ddim_step(&x, t, t_prev, &x0, cfg.eta, sched, noise.as_ref())?
            }
            Scheduler::Ddpm => {
                let noise =
                    (t_prev > 0).then(|| Sequence::standard_normal(frames, dim, &mut rng));
                if t_prev + 1 == t {
                    ddpm_step(&x, t, &x0, sched, noise.as_ref())?
                } else {
                    ddim_step(&x, t, t_prev, &x0, 1.0, sched, noise.as_ref())?
                }
            }
            Scheduler::DpmSolver => unreachable!("rejected by validate"),
        };
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct SampleOutput {
    pub clip: MotionClip,
    /// Wall-clock time spent in the reverse process and denormalization.
    pub elapsed: Duration,
}

/// Samples a normalized 38D sequence and maps it back through `norm`.
pub fn sample<D: Denoiser + ?Sized>(
    denoiser: &D,
    cond: Option<&str>,
    length: usize,
    cfg: &SamplerConfig,
    sched: &NoiseSchedule,
    norm: &NormStats,
) -> Result<SampleOutput> {
    let start = Instant::now();
    let seq = sample_sequence(denoiser, cond, length, FRAME_DIM, cfg, sched)?;
    let frames = (0..length)
        .map(|t| {
            let mut row = [0.0; FRAME_DIM];
            row.copy_from_slice(seq.row(t));
            norm.denormalize_row(&mut row);
            MotionFrame::from_array(&row)
        })
        .collect();
    let mut clip = MotionClip::new(frames, DEFAULT_FPS)?;
    clip.prompt = cond.map(str::to_string);
    Ok(SampleOutput {
        clip,
        elapsed: start.elapsed(),
    })
}

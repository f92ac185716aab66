use super::{DiffusionError, Result};

/// Variance schedule with cumulative products.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    /// `betas[t - 1]` is beta_t.
    betas: Vec<f64>,
    /// `alpha_bars[t]`, with `alpha_bars[0] = 1`.
    alpha_bars: Vec<f64>,
}

impl Default for NoiseSchedule {
    /// T = 1000, linear betas from 1e-4 to 0.02.
    fn default() -> Self {
        Self::linear(1000, 1e-4, 0.02).expect("default schedule is valid")
    }
}

impl NoiseSchedule {
    pub fn linear(num_timesteps: usize, beta_start: f64, beta_end: f64) -> Result<Self> {
        if num_timesteps == 0 {
            return Err(DiffusionError::Config("need at least one timestep".into()));
        }
        let betas = if num_timesteps == 1 {
            vec![beta_start]
        } else {
            let span = (num_timesteps - 1) as f64;
            (0..num_timesteps)
                .map(|i| beta_start + (beta_end - beta_start) * i as f64 / span)
                .collect()
        };
        Self::from_betas(betas)
    }

    pub fn from_betas(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            return Err(DiffusionError::Config("betas must lie in (0, 1)".into()));
        }
        let mut alpha_bars = Vec::with_capacity(betas.len() + 1);
        alpha_bars.push(1.0);
        let mut acc = 1.0;
        for b in &betas {
            acc *= 1.0 - b;
            alpha_bars.push(acc);
        }
        Ok(Self { betas, alpha_bars })
    }

    /// T.
    pub fn num_timesteps(&self) -> usize {
        self.betas.len()
    }

    pub fn beta(&self, t: usize) -> f64 {
        assert!(t >= 1 && t <= self.num_timesteps(), "timestep {t} out of range");
        self.betas[t - 1]
    }

    pub fn alpha(&self, t: usize) -> f64 {
        1.0 - self.beta(t)
    }

    /// Cumulative product `prod_{s <= t} (1 - beta_s)`; 1 at `t = 0`.
    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bars[t]
    }

    pub(crate) fn check_t(&self, t: usize) -> Result<()> {
        if t > self.num_timesteps() {
            return Err(DiffusionError::Timestep(format!(
                "t = {t} exceeds T = {}",
                self.num_timesteps()
            )));
        }
        Ok(())
    }
}

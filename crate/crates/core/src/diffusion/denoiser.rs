use std::sync::Mutex;

use super::{DiffusionError, NoiseSchedule, Result, Sequence};

/// An x0-predictor: `(M_t, t, condition) -> M0_hat`, shape-preserving.
///
/// `cond = None` is the unconditional (null) query. Implementations must be
/// deterministic in their inputs and callable from several threads.
pub trait Denoiser: Send + Sync {
    fn predict_x0(&self, x_t: &Sequence, t: usize, cond: Option<&str>) -> Result<Sequence>;
}

impl<F> Denoiser for F
where
    F: Fn(&Sequence, usize, Option<&str>) -> Result<Sequence> + Send + Sync,
{
    fn predict_x0(&self, x_t: &Sequence, t: usize, cond: Option<&str>) -> Result<Sequence> {
        self(x_t, t, cond)
    }
}

/// Wraps a denoiser that needs exclusive access (e.g. it holds scratch
/// buffers); calls are serialized through a mutex.
pub struct Exclusive<F>(Mutex<F>);

impl<F> Exclusive<F>
where
    F: FnMut(&Sequence, usize, Option<&str>) -> Result<Sequence> + Send,
{
    pub fn new(f: F) -> Self {
        Self(Mutex::new(f))
    }
}

impl<F> Denoiser for Exclusive<F>
where
    F: FnMut(&Sequence, usize, Option<&str>) -> Result<Sequence> + Send,
{
    fn predict_x0(&self, x_t: &Sequence, t: usize, cond: Option<&str>) -> Result<Sequence> {
        let mut f = self
            .0
            .lock()
            .map_err(|_| DiffusionError::Denoiser("exclusive denoiser poisoned".into()))?;
        (f)(x_t, t, cond)
    }
}

/// Exact posterior-mean denoiser for independent Gaussian data
/// `M0 ~ N(mean, diag(var))`, per dimension:
///
/// `E[M0 | M_t] = (sqrt(abar) var M_t + (1 - abar) mean) / (abar var + 1 - abar)`.
///
/// The condition is ignored, so conditional and unconditional queries agree.
#[derive(Debug, Clone)]
pub struct GaussianOracle {
    mean: Vec<f64>,
    var: Vec<f64>,
    sched: NoiseSchedule,
}

impl GaussianOracle {
    pub fn new(mean: Vec<f64>, var: Vec<f64>, sched: NoiseSchedule) -> Result<Self> {
        if mean.len() != var.len() || mean.is_empty() {
            return Err(DiffusionError::Shape(format!(
                "oracle mean has {} dims, variance {}",
                mean.len(),
                var.len()
            )));
        }
        if var.iter().any(|v| !(*v > 0.0 && v.is_finite())) || mean.iter().any(|m| !m.is_finite()) {
            return Err(DiffusionError::Config("oracle variance must be positive".into()));
        }
        Ok(Self { mean, var, sched })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn schedule(&self) -> &NoiseSchedule {
        &self.sched
    }

    /// Posterior mean at a given `alpha_bar`.
    pub fn posterior_mean(&self, x_t: &Sequence, alpha_bar: f64) -> Result<Sequence> {
        if x_t.dim() != self.dim() {
            return Err(DiffusionError::Shape(format!(
                "oracle has {} dims, input {}",
                self.dim(),
                x_t.dim()
            )));
        }
        let sa = alpha_bar.sqrt();
        Ok(x_t.map_with_dim(|d, x| {
            let (mu, var) = (self.mean[d], self.var[d]);
            (sa * var * x + (1.0 - alpha_bar) * mu) / (alpha_bar * var + 1.0 - alpha_bar)
        }))
    }
}

impl Denoiser for GaussianOracle {
    fn predict_x0(&self, x_t: &Sequence, t: usize, _cond: Option<&str>) -> Result<Sequence> {
        self.sched.check_t(t)?;
        self.posterior_mean(x_t, self.sched.alpha_bar(t))
    }
}

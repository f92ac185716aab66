use super::{DiffusionError, NoiseSchedule, Result, Sequence};

/// `M_t = sqrt(abar_t) M0 + sqrt(1 - abar_t) eps`.
pub fn forward_noise(
    m0: &Sequence,
    t: usize,
    noise: &Sequence,
    sched: &NoiseSchedule,
) -> Result<Sequence> {
    sched.check_t(t)?;
    let ab = sched.alpha_bar(t);
    let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
    m0.zip_map(noise, |x, e| a * x + b * e)
}

/// Deterministic-capable DDIM update from `t` to `t_prev` given an x0 prediction.
///
/// `eps = (M_t - sqrt(abar_t) x0) / sqrt(1 - abar_t)`,
/// `M_prev = sqrt(abar_prev) x0 + sqrt(1 - abar_prev - s^2) eps + s noise`,
/// `s = eta sqrt((1 - abar_prev) / (1 - abar_t)) sqrt(1 - abar_t / abar_prev)`.
pub fn ddim_step(
    m_t: &Sequence,
    t: usize,
    t_prev: usize,
    x0_pred: &Sequence,
    eta: f64,
    sched: &NoiseSchedule,
    noise: Option<&Sequence>,
) -> Result<Sequence> {
    if t <= t_prev {
        return Err(DiffusionError::Timestep(format!(
            "DDIM needs t > t_prev, got {t} -> {t_prev}"
        )));
    }
    sched.check_t(t)?;
    m_t.check_same(x0_pred, "ddim_step")?;
    let ab_t = sched.alpha_bar(t);
    let ab_prev = sched.alpha_bar(t_prev);
    let sigma = eta * ((1.0 - ab_prev) / (1.0 - ab_t)).sqrt() * (1.0 - ab_t / ab_prev).sqrt();
    let dir = (1.0 - ab_prev - sigma * sigma).max(0.0).sqrt();
    let (sa_t, sa_prev, s1_t) = (ab_t.sqrt(), ab_prev.sqrt(), (1.0 - ab_t).sqrt());

    let mut out = m_t.zip_map(x0_pred, |x, x0| {
        let eps = (x - sa_t * x0) / s1_t;
        sa_prev * x0 + dir * eps
    })?;
    if sigma > 0.0 {
        let noise = noise.ok_or_else(|| {
            DiffusionError::Shape("stochastic DDIM step needs a noise sample".into())
        })?;
        out = out.zip_map(noise, |m, z| m + sigma * z)?;
    }
    Ok(out)
}

/// Posterior `q(M_{t-1} | M_t, x0)` coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdpmCoefficients {
    pub x0: f64,
    pub x_t: f64,
    pub sigma: f64,
}

pub fn ddpm_coefficients(t: usize, sched: &NoiseSchedule) -> Result<DdpmCoefficients> {
    if t < 1 {
        return Err(DiffusionError::Timestep("DDPM step needs t >= 1".into()));
    }
    sched.check_t(t)?;
    let beta = sched.beta(t);
    let ab_t = sched.alpha_bar(t);
    let ab_prev = sched.alpha_bar(t - 1);
    let var = beta * (1.0 - ab_prev) / (1.0 - ab_t);
    Ok(DdpmCoefficients {
        x0: ab_prev.sqrt() * beta / (1.0 - ab_t),
        x_t: sched.alpha(t).sqrt() * (1.0 - ab_prev) / (1.0 - ab_t),
        sigma: var.sqrt(),
    })
}

/// Ancestral DDPM step `t -> t - 1`. The final step (`t = 1`) adds no noise.
pub fn ddpm_step(
    m_t: &Sequence,
    t: usize,
    x0_pred: &Sequence,
    sched: &NoiseSchedule,
    noise: Option<&Sequence>,
) -> Result<Sequence> {
    let c = ddpm_coefficients(t, sched)?;
    m_t.check_same(x0_pred, "ddpm_step")?;
    let mean = m_t.zip_map(x0_pred, |x, x0| c.x0 * x0 + c.x_t * x)?;
    if t == 1 {
        return Ok(mean);
    }
    let noise =
        noise.ok_or_else(|| DiffusionError::Shape("DDPM step needs a noise sample".into()))?;
    mean.zip_map(noise, |m, z| m + c.sigma * z)
}

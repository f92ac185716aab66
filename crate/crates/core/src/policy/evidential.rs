use statrs::function::gamma::ln_gamma;

use super::{check_dim, PolicyError, Result};

/// Weight of the evidence regularizer in the adaptation loss.
pub const DEFAULT_LAMBDA_REG: f64 = 0.2;

/// Evidence parameters `(nu, alpha, beta)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    /// One triple shared by all dimensions.
    Shared { nu: f64, alpha: f64, beta: f64 },
    /// One triple per dimension.
    PerDim {
        nu: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
    },
}

/// Normal-Inverse-Gamma prediction over a latent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NIGParams {
    pub mu: Vec<f64>,
    pub evidence: Evidence,
}

fn check_triple(nu: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(nu > 0.0 && alpha > 1.0 && beta > 0.0) || !(nu.is_finite() && alpha.is_finite() && beta.is_finite()) {
        return Err(PolicyError::Config(format!(
            "NIG needs nu > 0, alpha > 1, beta > 0; got ({nu}, {alpha}, {beta})"
        )));
    }
    Ok(())
}

impl NIGParams {
    pub fn shared(mu: Vec<f64>, nu: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            mu,
            evidence: Evidence::Shared { nu, alpha, beta },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn per_dim(mu: Vec<f64>, nu: Vec<f64>, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let p = Self {
            mu,
            evidence: Evidence::PerDim { nu, alpha, beta },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_empty() || self.mu.iter().any(|m| !m.is_finite()) {
            return Err(PolicyError::Config("NIG mean must be non-empty and finite".into()));
        }
        match &self.evidence {
            Evidence::Shared { nu, alpha, beta } => check_triple(*nu, *alpha, *beta),
            Evidence::PerDim { nu, alpha, beta } => {
                for v in [nu, alpha, beta] {
                    check_dim("NIG evidence", self.dim(), v.len())?;
                }
                (0..self.dim()).try_for_each(|i| check_triple(nu[i], alpha[i], beta[i]))
            }
        }
    }

    /// `(nu, alpha, beta)` of dimension `i`.
    pub fn triple(&self, i: usize) -> (f64, f64, f64) {
        match &self.evidence {
            Evidence::Shared { nu, alpha, beta } => (*nu, *alpha, *beta),
            Evidence::PerDim { nu, alpha, beta } => (nu[i], alpha[i], beta[i]),
        }
    }
}

/// Negative log-likelihood of `z` under the Student-t marginal of the NIG,
/// summed over dimensions.
pub fn evidential_nll(z: &[f64], p: &NIGParams) -> Result<f64> {
    p.validate()?;
    check_dim("evidential target", p.dim(), z.len())?;
    let mut total = 0.0;
    for (i, (&zi, &mi)) in z.iter().zip(&p.mu).enumerate() {
        let (nu, alpha, beta) = p.triple(i);
        let omega = 2.0 * beta * (1.0 + nu);
        total += 0.5 * (std::f64::consts::PI / nu).ln() - alpha * omega.ln()
            + (alpha + 0.5) * ((zi - mi).powi(2) * nu + omega).ln()
            + ln_gamma(alpha)
            - ln_gamma(alpha + 0.5);
    }
    Ok(total)
}

/// Evidence regularizer `lambda |z - mu| (2 nu + alpha)`.
///
/// With shared evidence the norm is the Euclidean norm of the whole error
/// vector; with per-dimension evidence each dimension contributes
/// `lambda |z_i - mu_i| (2 nu_i + alpha_i)`.
pub fn evidential_reg(z: &[f64], p: &NIGParams, lambda_reg: f64) -> Result<f64> {
    p.validate()?;
    check_dim("evidential target", p.dim(), z.len())?;
    if !(lambda_reg >= 0.0) {
        return Err(PolicyError::Config("lambda_reg must be >= 0".into()));
    }
    Ok(match &p.evidence {
        Evidence::Shared { nu, alpha, .. } => {
            let norm = z.iter().zip(&p.mu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            lambda_reg * norm * (2.0 * nu + alpha)
        }
        Evidence::PerDim { nu, alpha, .. } => {
            z.iter()
                .zip(&p.mu)
                .enumerate()
                .map(|(i, (a, b))| lambda_reg * (a - b).abs() * (2.0 * nu[i] + alpha[i]))
                .sum()
        }
    })
}

pub fn evidential_loss(z: &[f64], p: &NIGParams, lambda_reg: f64) -> Result<f64> {
    Ok(evidential_nll(z, p)? + evidential_reg(z, p, lambda_reg)?)
}

use std::collections::BTreeMap;

use super::{check_dim, PolicyError, Result};

/// Named feature vectors, e.g. `"joint_pos" -> 29 angles`.
pub type FeatureMap = BTreeMap<String, Vec<f64>>;

/// One tracked feature: contributes `weight * exp(-|x - x*|^2 / sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingTerm {
    pub name: String,
    pub weight: f64,
    pub sigma: f64,
}

impl TrackingTerm {
    pub fn new(name: &str, weight: f64, sigma: f64) -> Self {
        Self {
            name: name.to_string(),
            weight,
            sigma,
        }
    }
}

/// Regularization weights of the locomotion terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationWeights {
    pub survival: f64,
    pub feet_air_time_ref: f64,
    pub feet_air_time_dense: f64,
    pub joint_vel_penalty: f64,
    pub joint_acc_penalty: f64,
    pub action_rate_penalty: f64,
    pub joint_pos_limits: f64,
    pub joint_torque_limits: f64,
}

impl Default for RegularizationWeights {
    fn default() -> Self {
        Self {
            survival: 3.0,
            feet_air_time_ref: 5.0,
            feet_air_time_dense: 1.0,
            joint_vel_penalty: 5.0e-4,
            joint_acc_penalty: 2.0e-8,
            action_rate_penalty: 0.01,
            joint_pos_limits: 1.0,
            joint_torque_limits: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardConfig {
    pub terms: Vec<TrackingTerm>,
    pub regularization: RegularizationWeights,
}

impl Default for RewardConfig {
    /// Tracking weights of the reference tracker. Kernel scales are not
    /// published; the values below are sensible per-unit choices.
    fn default() -> Self {
        Self {
            terms: vec![
                TrackingTerm::new("root_pos", 0.5, 0.25),
                TrackingTerm::new("root_rot", 0.5, 0.5),
                TrackingTerm::new("root_lin_vel", 1.0, 1.0),
                TrackingTerm::new("root_ang_vel", 1.0, 1.0),
                TrackingTerm::new("keypoint", 1.0, 0.5),
                TrackingTerm::new("upper_keypoint", 0.5, 0.5),
                TrackingTerm::new("lower_keypoint", 0.5, 0.5),
                TrackingTerm::new("joint_pos", 1.0, 1.0),
                TrackingTerm::new("joint_vel", 0.5, 10.0),
            ],
            regularization: RegularizationWeights::default(),
        }
    }
}

impl RewardConfig {
    /// Default configuration restricted to the named features.
    pub fn only(names: &[&str]) -> Result<Self> {
        let all = Self::default();
        let mut terms = Vec::with_capacity(names.len());
        for name in names {
            let term = all
                .terms
                .iter()
                .find(|t| t.name == *name)
                .ok_or_else(|| PolicyError::MissingFeature(name.to_string()))?;
            terms.push(term.clone());
        }
        Ok(Self {
            terms,
            regularization: all.regularization,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !(t.weight >= 0.0 && t.weight.is_finite()) || !(t.sigma > 0.0 && t.sigma.is_finite()) {
                return Err(PolicyError::Config(format!(
                    "term {}: need weight >= 0 and sigma > 0",
                    t.name
                )));
            }
        }
        Ok(())
    }

    pub fn max_reward(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReward {
    pub total: f64,
    /// `(feature, weighted term)` in configuration order.
    pub terms: Vec<(String, f64)>,
}

/// Sum of exponential kernels over squared feature errors.
pub fn tracking_reward(
    actual: &FeatureMap,
    reference: &FeatureMap,
    cfg: &RewardConfig,
) -> Result<TrackingReward> {
    cfg.validate()?;
    let mut terms = Vec::with_capacity(cfg.terms.len());
    for term in &cfg.terms {
        let missing = || PolicyError::MissingFeature(term.name.clone());
        let a = actual.get(&term.name).ok_or_else(missing)?;
        let r = reference.get(&term.name).ok_or_else(missing)?;
        check_dim(&term.name, r.len(), a.len())?;
        let sq: f64 = a.iter().zip(r).map(|(x, y)| (x - y) * (x - y)).sum();
        terms.push((term.name.clone(), term.weight * (-sq / term.sigma).exp()));
    }
    Ok(TrackingReward {
        total: terms.iter().map(|(_, v)| v).sum(),
        terms,
    })
}

/// `-sum min(v_z, 0)^2` over contact points that are in contact.
pub fn impact_penalty(contacts: &[(f64, bool)]) -> f64 {
    -contacts
        .iter()
        .filter(|(_, c)| *c)
        .map(|(vz, _)| vz.min(0.0).powi(2))
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AirTimeMode {
    /// Credit paid at touchdown for the completed swing.
    Touchdown,
    /// Credit accrued every swing frame until the target is reached.
    Dense,
}

/// Feet air-time shaping.
///
/// Touchdown: every swing-to-stance transition adds
/// `min(air, target) - over_penalty * max(0, air - 2 target)`.
/// Dense: each swing frame adds `1/fps` while the running air time is at most
/// `target`, and the over-penalty is charged per frame beyond `2 target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeetAirTime {
    pub target: f64,
    pub over_penalty: f64,
    pub mode: AirTimeMode,
}

impl Default for FeetAirTime {
    fn default() -> Self {
        Self {
            target: 0.4,
            over_penalty: 1.0,
            mode: AirTimeMode::Touchdown,
        }
    }
}

/// Per-foot air-time reward. `contacts[f][t]` is foot `f` at frame `t`.
pub fn feet_air_time_per_foot(contacts: &[Vec<bool>], fps: f64, cfg: &FeetAirTime) -> Result<Vec<f64>> {
    if !(fps > 0.0 && fps.is_finite()) || !(cfg.target > 0.0) || !(cfg.over_penalty >= 0.0) {
        return Err(PolicyError::Config(
            "need fps > 0, target > 0, over_penalty >= 0".into(),
        ));
    }
    let frames = contacts.first().map_or(0, Vec::len);
    if frames == 0 {
        return Err(PolicyError::Config("air time needs at least one frame".into()));
    }
    let dt = 1.0 / fps;
    let mut out = Vec::with_capacity(contacts.len());
    for foot in contacts {
        check_dim("foot contact series", frames, foot.len())?;
        let mut total = 0.0;
        let mut swing = 0usize;
        for &in_contact in foot {
            match (cfg.mode, in_contact) {
                (AirTimeMode::Touchdown, true) => {
                    if swing > 0 {
                        let air = swing as f64 / fps;
                        total += air.min(cfg.target) - cfg.over_penalty * (air - 2.0 * cfg.target).max(0.0);
                    }
                    swing = 0;
                }
                (AirTimeMode::Touchdown, false) => swing += 1,
                (AirTimeMode::Dense, true) => swing = 0,
                (AirTimeMode::Dense, false) => {
                    swing += 1;
                    let air = swing as f64 / fps;
                    if air <= cfg.target {
                        total += dt;
                    } else if air > 2.0 * cfg.target {
                        total -= cfg.over_penalty * dt;
                    }
                }
            }
        }
        out.push(total);
    }
    Ok(out)
}

/// Total air-time reward summed over feet.
pub fn feet_air_time_reward(contacts: &[Vec<bool>], fps: f64, cfg: &FeetAirTime) -> Result<f64> {
    Ok(feet_air_time_per_foot(contacts, fps, cfg)?.iter().sum())
}

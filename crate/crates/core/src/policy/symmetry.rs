use super::{check_dim, PolicyError, Result};
use crate::motion::joints::{config_fields, G1_MIRROR};

/// Signed index permutation: `out[i] = sign[i] * x[perm[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorMap {
    perm: Vec<usize>,
    sign: Vec<f64>,
}

impl MirrorMap {
    /// Builds and validates a map; it must be an involution.
    pub fn new(perm: Vec<usize>, sign: Vec<f64>) -> Result<Self> {
        check_dim("mirror signs", perm.len(), sign.len())?;
        let n = perm.len();
        for (i, (&p, &s)) in perm.iter().zip(&sign).enumerate() {
            if p >= n {
                return Err(PolicyError::Config(format!("mirror index {p} out of range at {i}")));
            }
            if s != 1.0 && s != -1.0 {
                return Err(PolicyError::Config(format!("mirror sign {s} at {i} is not +-1")));
            }
            if perm[p] != i || sign[p] * s != 1.0 {
                return Err(PolicyError::Config(format!("mirror map is not an involution at {i}")));
            }
        }
        Ok(Self { perm, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            sign: vec![1.0; n],
        }
    }

    /// Parses `index, mirrored_index, sign` rows.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let Some(fields) = config_fields(line) else {
                continue;
            };
            let bad = |msg: &str| PolicyError::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            if fields.len() != 3 {
                return Err(bad("expected `index, mirrored_index, sign`"));
            }
            let i: usize = fields[0].parse().map_err(|_| bad("bad index"))?;
            let j: usize = fields[1].parse().map_err(|_| bad("bad mirrored index"))?;
            let s: f64 = fields[2].parse().map_err(|_| bad("bad sign"))?;
            rows.push((i, j, s));
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(k, r)| r.0 != k) {
            return Err(PolicyError::Config("mirror rows must cover 0..n exactly once".into()));
        }
        Self::new(rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.2).collect())
    }

    /// Bundled action-space map for the G1 29-DoF ordering.
    pub fn g1_actions() -> Self {
        Self::parse(G1_MIRROR).expect("bundled G1 mirror map is valid")
    }

    /// Block-diagonal composition, e.g. `[joint_pos, joint_vel, last_action]`.
    pub fn concat(maps: &[&MirrorMap]) -> Self {
        let mut perm = Vec::new();
        let mut sign = Vec::new();
        for m in maps {
            let off = perm.len();
            perm.extend(m.perm.iter().map(|p| p + off));
            sign.extend_from_slice(&m.sign);
        }
        Self { perm, sign }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("mirrored vector", self.len(), x.len())?;
        Ok(self.perm.iter().zip(&self.sign).map(|(&p, &s)| s * x[p]).collect())
    }

    /// Permutation only, for magnitudes such as standard deviations.
    pub fn permute(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("mirrored vector", self.len(), x.len())?;
        Ok(self.perm.iter().map(|&p| x[p]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySpec {
    pub obs: MirrorMap,
    pub act: MirrorMap,
    pub c_mu: f64,
    pub c_sigma: f64,
}

impl SymmetrySpec {
    pub fn new(obs: MirrorMap, act: MirrorMap, c_mu: f64, c_sigma: f64) -> Result<Self> {
        if !(c_mu >= 0.0 && c_sigma >= 0.0) {
            return Err(PolicyError::Config("symmetry coefficients must be >= 0".into()));
        }
        Ok(Self { obs, act, c_mu, c_sigma })
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `c_mu |mu(o) - T_act mu(T_obs o)|^2 + c_sigma |sigma(o) - P_act sigma(T_obs o)|^2`,
/// where `P_act` is the sign-free permutation of `T_act`.
pub fn symmetry_loss<P>(policy: P, obs: &[f64], spec: &SymmetrySpec) -> Result<f64>
where
    P: Fn(&[f64]) -> (Vec<f64>, Vec<f64>),
{
    let mirrored_obs = spec.obs.apply(obs)?;
    let (mu, sigma) = policy(obs);
    let (mu_m, sigma_m) = policy(&mirrored_obs);
    for v in [&mu, &sigma, &mu_m, &sigma_m] {
        check_dim("policy output", spec.act.len(), v.len())?;
    }
    let mu_term = sq_dist(&mu, &spec.act.apply(&mu_m)?);
    let sigma_term = sq_dist(&sigma, &spec.act.permute(&sigma_m)?);
    Ok(spec.c_mu * mu_term + spec.c_sigma * sigma_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g1_spec() -> SymmetrySpec {
        let act = MirrorMap::g1_actions();
        let obs = MirrorMap::concat(&[&act, &act]);
        SymmetrySpec::new(obs, act, 1.0, 0.5).unwrap()
    }

    #[test]
    fn bundled_map_is_involution() {
        let m = MirrorMap::g1_actions();
        assert_eq!(m.len(), 29);
        let x: Vec<f64> = (0..29).map(|i| i as f64 * 0.1 - 1.0).collect();
        assert_eq!(m.apply(&m.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn rejects_non_involutions() {
        assert!(MirrorMap::new(vec![1, 2, 0], vec![1.0; 3]).is_err());
        assert!(MirrorMap::new(vec![1, 0], vec![1.0, -1.0]).is_err());
        assert!(MirrorMap::new(vec![0], vec![0.5]).is_err());
        assert!(MirrorMap::parse("0, 1, 1\n1, 0, 1\n1, 0, 1").is_err());
        assert!(MirrorMap::parse("0, 0, 1\n1, x, 1").is_err());
    }

    /// mu(o) = W o with W commuting with the mirrors: W = A + T_act A T_obs.
    fn equivariant_policy(spec: &SymmetrySpec) -> impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + '_ {
        move |o: &[f64]| {
            let a = |x: &[f64]| -> Vec<f64> {
                (0..29)
                    .map(|i| x.iter().enumerate().map(|(j, v)| v * ((i * 7 + j * 3) % 11) as f64 * 0.01).sum())
                    .collect()
            };
            let direct = a(o);
            let mirrored = spec.act.apply(&a(&spec.obs.apply(o).unwrap())).unwrap();
            let mu: Vec<f64> = direct.iter().zip(&mirrored).map(|(x, y)| x + y).collect();
            let sigma = vec![0.3; 29];
            (mu, sigma)
        }
    }

    #[test]
    fn equivariant_policy_has_zero_loss() {
        let spec = g1_spec();
        let obs: Vec<f64> = (0..58).map(|i| ((i * 37) % 13) as f64 * 0.1 - 0.6).collect();
        let loss = symmetry_loss(equivariant_policy(&spec), &obs, &spec).unwrap();
        assert!(loss < 1e-24, "{loss}");
    }

    #[test]
    fn constant_policy_hand_value() {
        let act = MirrorMap::new(vec![1, 0, 2], vec![1.0, 1.0, -1.0]).unwrap();
        let spec = SymmetrySpec::new(MirrorMap::identity(2), act, 2.0, 3.0).unwrap();
        let policy = |_: &[f64]| (vec![1.0, 3.0, 0.5], vec![0.1, 0.4, 0.2]);
        // mu - T mu = (1-3, 3-1, 0.5+0.5) -> 4 + 4 + 1 = 9
        // sigma - P sigma = (-0.3, 0.3, 0) -> 0.18
        let loss = symmetry_loss(policy, &[0.0, 0.0], &spec).unwrap();
        assert!((loss - (2.0 * 9.0 + 3.0 * 0.18)).abs() < 1e-12);
        let doubled = SymmetrySpec { c_mu: 4.0, ..spec.clone() };
        let loss2 = symmetry_loss(policy, &[0.0, 0.0], &doubled).unwrap();
        assert!((loss2 - loss - 18.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let spec = g1_spec();
        assert!(symmetry_loss(|_: &[f64]| (vec![0.0; 29], vec![0.0; 29]), &[0.0; 3], &spec).is_err());
        assert!(symmetry_loss(|_: &[f64]| (vec![0.0; 3], vec![0.0; 29]), &[0.0; 58], &spec).is_err());
    }

    proptest! {
        #[test]
        fn loss_nonnegative_and_swap_invariant(obs in prop::collection::vec(-2.0f64..2.0, 58)) {
            let spec = g1_spec();
            let policy = |o: &[f64]| {
                let mu: Vec<f64> = (0..29).map(|i| (o[i] * 1.3 + o[i + 29] * 0.2 + i as f64 * 0.01).sin()).collect();
                let sigma: Vec<f64> = (0..29).map(|i| o[i].abs() + 0.1).collect();
                (mu, sigma)
            };
            let l = symmetry_loss(policy, &obs, &spec).unwrap();
            let mirrored = spec.obs.apply(&obs).unwrap();
            let lm = symmetry_loss(policy, &mirrored, &spec).unwrap();
            prop_assert!(l >= 0.0);
            prop_assert!((l - lm).abs() <= 1e-9 * (1.0 + l));
        }
    }
}

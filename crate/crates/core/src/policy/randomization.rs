use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PolicyError, Result};
use crate::motion::joints::config_fields;

/// Bundled physical-parameter ranges.
pub const DEFAULT_RANDOMIZATION: &str = include_str!("../../data/randomization.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    /// Multiplier on the nominal value.
    Scale,
    /// Added to the nominal value.
    Offset,
    /// Used as the value itself.
    Absolute,
}

impl std::str::FromStr for RangeKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scale" => Ok(Self::Scale),
            "offset" => Ok(Self::Offset),
            "absolute" => Ok(Self::Absolute),
            other => Err(PolicyError::Config(format!("unknown range kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationEntry {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub kind: RangeKind,
}

impl RandomizationEntry {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationSpec {
    pub entries: Vec<RandomizationEntry>,
}

impl Default for RandomizationSpec {
    fn default() -> Self {
        Self::parse(DEFAULT_RANDOMIZATION).expect("bundled randomization spec is valid")
    }
}

impl RandomizationSpec {
    /// Parses `name, low, high[, kind]` rows; kind defaults to `absolute`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<RandomizationEntry> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let Some(fields) = config_fields(line) else {
                continue;
            };
            let bad = |msg: String| PolicyError::Parse {
                line: lineno + 1,
                msg,
            };
            if !(3..=4).contains(&fields.len()) {
                return Err(bad("expected `name, low, high[, kind]`".into()));
            }
            let low: f64 = fields[1].parse().map_err(|_| bad("bad low".into()))?;
            let high: f64 = fields[2].parse().map_err(|_| bad("bad high".into()))?;
            let kind = match fields.get(3) {
                Some(k) => k.parse().map_err(|e: PolicyError| bad(e.to_string()))?,
                None => RangeKind::Absolute,
            };
            if entries.iter().any(|e| e.name == fields[0]) {
                return Err(bad(format!("duplicate entry {}", fields[0])));
            }
            entries.push(RandomizationEntry {
                name: fields[0].to_string(),
                low,
                high,
                kind,
            });
        }
        let spec = Self { entries };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.entries {
            if !(e.low.is_finite() && e.high.is_finite()) || e.low > e.high {
                return Err(PolicyError::Config(format!("entry {}: need low <= high", e.name)));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&RandomizationEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// One draw of every entry, in spec order.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationSample {
    pub values: Vec<(String, f64)>,
}

impl RandomizationSample {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub fn sample_randomization_with<R: Rng + ?Sized>(
    spec: &RandomizationSpec,
    rng: &mut R,
) -> Result<RandomizationSample> {
    spec.validate()?;
    let values = spec
        .entries
        .iter()
        .map(|e| (e.name.clone(), rng.random_range(e.low..=e.high)))
        .collect();
    Ok(RandomizationSample { values })
}

/// Independent uniform draw per entry from a seeded generator.
pub fn sample_randomization(spec: &RandomizationSpec, seed: u64) -> Result<RandomizationSample> {
    sample_randomization_with(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

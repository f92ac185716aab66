use super::{DiffusionError, Result};

/// Shadow copy of a parameter vector, `shadow <- decay * shadow + (1 - decay) * current`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmaWeights {
    pub decay: f64,
    pub shadow: Vec<f64>,
}

impl EmaWeights {
    pub const DEFAULT_DECAY: f64 = 0.999;

    /// Starts the shadow at `current`.
    pub fn init(current: &[f64], decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&decay) {
            return Err(DiffusionError::Config(format!("EMA decay {decay} not in [0, 1)")));
        }
        Ok(Self {
            decay,
            shadow: current.to_vec(),
        })
    }

    pub fn update(&mut self, current: &[f64]) -> Result<()> {
        if current.len() != self.shadow.len() {
            return Err(DiffusionError::Shape(format!(
                "EMA over {} params, got {}",
                self.shadow.len(),
                current.len()
            )));
        }
        let d = self.decay;
        for (s, c) in self.shadow.iter_mut().zip(current) {
            *s = d * *s + (1.0 - d) * c;
        }
        Ok(())
    }
}

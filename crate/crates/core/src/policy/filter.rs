/// One EMA smoothing step: `beta * prev + (1 - beta) * new`, or `new` when
/// there is no previous action yet.
///
/// # Panics
/// If `beta` is outside `[0, 1)` or the lengths differ.
pub fn ema_action_filter(prev: Option<&[f64]>, new: &[f64], beta: f64) -> Vec<f64> {
    assert!((0.0..1.0).contains(&beta), "beta must be in [0, 1)");
    match prev {
        None => new.to_vec(),
        Some(prev) => {
            assert_eq!(prev.len(), new.len(), "action length mismatch");
            prev.iter().zip(new).map(|(p, n)| beta * p + (1.0 - beta) * n).collect()
        }
    }
}

/// Stateful wrapper around [`ema_action_filter`].
#[derive(Debug, Clone, PartialEq)]
pub struct ActionFilter {
    beta: f64,
    state: Option<Vec<f64>>,
}

impl ActionFilter {
    pub const DEFAULT_BETA: f64 = 0.5;

    pub fn new(beta: f64) -> Self {
        assert!((0.0..1.0).contains(&beta), "beta must be in [0, 1)");
        Self { beta, state: None }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn apply(&mut self, action: &[f64]) -> Vec<f64> {
        let out = ema_action_filter(self.state.as_deref(), action, self.beta);
        self.state = Some(out.clone());
        out
    }

    pub fn reset(&mut self) {
        self.state = None;
    }
}

impl Default for ActionFilter {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BETA)
    }
}

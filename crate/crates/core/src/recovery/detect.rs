use super::{angle_deg, check_unit, RecoveryLibrary, Result, UNIT_TOL};

/// Gravity direction seen by an upright pelvis.
pub const NOMINAL_GRAVITY: [f64; 3] = [0.0, 0.0, -1.0];

/// Debounced tilt detector.
///
/// The flag is raised once the tilt exceeds the threshold for `persist`
/// consecutive frames and cleared after `persist` consecutive frames at or
/// below it.
#[derive(Debug, Clone)]
pub struct FallDetector {
    threshold_deg: f64,
    persist: usize,
    fallen: bool,
    streak: usize,
}

impl FallDetector {
    pub fn new(threshold_deg: f64, persist: usize) -> Self {
        assert!(threshold_deg > 0.0 && threshold_deg < 180.0, "threshold must be in (0, 180)");
        assert!(persist >= 1, "persistence must be at least one frame");
        Self {
            threshold_deg,
            persist,
            fallen: false,
            streak: 0,
        }
    }

    pub fn from_library(lib: &RecoveryLibrary) -> Self {
        Self::new(lib.fall_threshold_deg, lib.fall_persist_frames)
    }

    pub fn is_fallen(&self) -> bool {
        self.fallen
    }

    /// Feeds one body-frame gravity reading and returns the current flag.
    pub fn update(&mut self, gravity_in_body: &[f64; 3]) -> Result<bool> {
        check_unit(gravity_in_body, UNIT_TOL)?;
        let tilted = angle_deg(gravity_in_body, &NOMINAL_GRAVITY) > self.threshold_deg;
        if tilted != self.fallen {
            self.streak += 1;
            if self.streak >= self.persist {
                self.fallen = tilted;
                self.streak = 0;
            }
        } else {
            self.streak = 0;
        }
        Ok(self.fallen)
    }

    pub fn reset(&mut self) {
        self.fallen = false;
        self.streak = 0;
    }
}

/// Runs a fresh detector over a stream, returning the flag per frame.
pub fn detect_fall(gravity_in_body: &[[f64; 3]], lib: &RecoveryLibrary) -> Result<Vec<bool>> {
    let mut det = FallDetector::from_library(lib);
    gravity_in_body.iter().map(|g| det.update(g)).collect()
}

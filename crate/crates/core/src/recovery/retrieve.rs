use super::{check_unit, RecoveryError, RecoveryLibrary, Result, UNIT_TOL};
use crate::motion::NUM_JOINTS;

/// Angle between two vectors in degrees, in `[0, 180]`.
pub fn angle_deg(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retrieval {
    /// Index of the selected entry.
    pub best: usize,
    /// Gravity-filter survivors as `(entry index, joint distance)`, best first.
    pub ranked: Vec<(usize, f64)>,
    /// True when no entry passed the gravity filter and the nearest-gravity
    /// entry was used instead.
    pub fallback: bool,
}

fn joint_distance(a: &[f64; NUM_JOINTS], b: &[f64; NUM_JOINTS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Two-stage retrieval: gravity-alignment filter, then joint-space ranking.
pub fn retrieve_recovery(
    query_gravity: &[f64; 3],
    query_joints: &[f64; NUM_JOINTS],
    lib: &RecoveryLibrary,
) -> Result<Retrieval> {
    if lib.entries.is_empty() {
        return Err(RecoveryError::EmptyLibrary);
    }
    check_unit(query_gravity, UNIT_TOL)?;
    lib.validate()?;

    let angles: Vec<f64> = lib
        .entries
        .iter()
        .map(|e| angle_deg(query_gravity, &e.initial_gravity))
        .collect();
    let mut survivors: Vec<usize> = (0..angles.len())
        .filter(|&i| angles[i] <= lib.gravity_threshold_deg)
        .collect();
    let fallback = survivors.is_empty();
    if fallback {
        let nearest = (0..angles.len())
            .min_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)))
            .expect("library is non-empty");
        survivors.push(nearest);
    }

    let mut ranked: Vec<(usize, f64)> = survivors
        .into_iter()
        .map(|i| (i, joint_distance(query_joints, &lib.entries[i].initial_joints)))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(Retrieval {
        best: ranked[0].0,
        ranked,
        fallback,
    })
}

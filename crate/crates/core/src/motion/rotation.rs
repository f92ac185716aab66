use nalgebra::{Matrix3, Vector3};

use super::{MotionError, Result};

/// Smallest norm accepted by the Gram-Schmidt normalizations.
pub const DEGENERATE_TOL: f64 = 1e-8;

/// Packs the first two columns of a rotation matrix, column-major:
/// `(r11, r21, r31, r12, r22, r32)`.
pub fn rot_matrix_to_6d(r: &Matrix3<f64>) -> Result<[f64; 6]> {
    if r.iter().any(|v| !v.is_finite()) {
        return Err(MotionError::NonFinite("rotation matrix"));
    }
    Ok([
        r[(0, 0)],
        r[(1, 0)],
        r[(2, 0)],
        r[(0, 1)],
        r[(1, 1)],
        r[(2, 1)],
    ])
}

/// Maps any non-degenerate 6D vector to a proper rotation via Gram-Schmidt.
///
/// `b1 = normalize(a)`, `b2 = normalize(b - (b1.b) b1)`, `b3 = b1 x b2`.
/// The result has determinant +1 by construction.
pub fn rot6d_to_matrix(v: &[f64; 6]) -> Result<Matrix3<f64>> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(MotionError::NonFinite("6D rotation"));
    }
    let a = Vector3::new(v[0], v[1], v[2]);
    let b = Vector3::new(v[3], v[4], v[5]);

    let a_norm = a.norm();
    if a_norm < DEGENERATE_TOL {
        return Err(MotionError::DegenerateRotation { norm: a_norm });
    }
    let b1 = a / a_norm;
    let residual = b - b1 * b1.dot(&b);
    let r_norm = residual.norm();
    if r_norm < DEGENERATE_TOL {
        return Err(MotionError::DegenerateRotation { norm: r_norm });
    }
    let b2 = residual / r_norm;
    let b3 = b1.cross(&b2);
    Ok(Matrix3::from_columns(&[b1, b2, b3]))
}

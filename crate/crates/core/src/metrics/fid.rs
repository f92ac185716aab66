//! Fréchet distance between Gaussians fitted to two embedding sets.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{EmbeddingSet, MetricsError, Result};

/// Eigenvalues below this are treated as zero when taking square roots.
pub const EIGEN_CLIP: f64 = 1e-10;

/// Sample mean and unbiased (`N - 1`) covariance.
pub fn gaussian_fit(set: &EmbeddingSet) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = set.len();
    if n < 2 {
        return Err(MetricsError::TooFew {
            required: 2,
            actual: n,
        });
    }
    let d = set.dim();
    let mut mean = DVector::zeros(d);
    for row in set.iter_rows() {
        mean += DVector::from_column_slice(row);
    }
    mean /= n as f64;
    let mut centred = DMatrix::zeros(n, d);
    for (i, row) in set.iter_rows().enumerate() {
        for j in 0..d {
            centred[(i, j)] = row[j] - mean[j];
        }
    }
    let cov = centred.transpose() * &centred / (n as f64 - 1.0);
    Ok((mean, cov))
}

fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let roots = eig
        .eigenvalues
        .map(|l| if l < EIGEN_CLIP { 0.0 } else { l.sqrt() });
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// `|mu_a - mu_b|^2 + Tr(A + B - 2 (A B)^{1/2})`.
///
/// The cross term uses `Tr((A^{1/2} B A^{1/2})^{1/2})`, which has the same
/// eigenvalues as `(A B)^{1/2}` but stays symmetric.
pub fn frechet_distance(
    mu_a: &DVector<f64>,
    cov_a: &DMatrix<f64>,
    mu_b: &DVector<f64>,
    cov_b: &DMatrix<f64>,
) -> Result<f64> {
    let d = mu_a.len();
    if mu_b.len() != d || cov_a.shape() != (d, d) || cov_b.shape() != (d, d) {
        return Err(MetricsError::Shape("mean/covariance dimensions differ".into()));
    }
    let sqrt_a = sym_sqrt(cov_a);
    let inner = &sqrt_a * cov_b * &sqrt_a;
    let cross = (&inner + inner.transpose()) * 0.5;
    let cross_trace: f64 = SymmetricEigen::new(cross)
        .eigenvalues
        .iter()
        .map(|&l| if l < EIGEN_CLIP { 0.0 } else { l.sqrt() })
        .sum();
    let mean_term = (mu_a - mu_b).norm_squared();
    let value = mean_term + cov_a.trace() + cov_b.trace() - 2.0 * cross_trace;
    Ok(value.max(0.0))
}

pub fn fid(a: &EmbeddingSet, b: &EmbeddingSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(MetricsError::Shape(format!(
            "embedding dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let (mu_a, cov_a) = gaussian_fit(a)?;
    let (mu_b, cov_b) = gaussian_fit(b)?;
    frechet_distance(&mu_a, &cov_a, &mu_b, &cov_b)
}

/// True when either set has fewer rows than dimensions, so its covariance is singular.
pub fn underdetermined(a: &EmbeddingSet, b: &EmbeddingSet) -> bool {
    a.len() < a.dim() || b.len() < b.dim()
}

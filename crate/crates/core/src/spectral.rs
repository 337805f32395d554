use nalgebra::{DMatrix, SymmetricEigen};

use crate::basis::AngularBasis;
use crate::error::{OrientError, Result};
use crate::operators::BandedSymmetricOperator;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenpairs of a real symmetric operator, eigenvalues ascending,
/// eigenvectors stored as the columns of an orthogonal matrix.
#[derive(Debug, Clone)]
pub struct SpectralFactors {
    basis: AngularBasis,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralFactors {
    pub fn basis(&self) -> &AngularBasis {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues));
        v * d * v.transpose()
    }

    /// Largest entry of `|V Vᵀ − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.eigenvalues.len();
        let vvt = &self.eigenvectors * self.eigenvectors.transpose();
        (vvt - DMatrix::identity(n, n)).amax()
    }
}

pub fn spectral_decompose(op: &BandedSymmetricOperator) -> Result<SpectralFactors> {
    let eig = SymmetricEigen::try_new(op.to_dense(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        OrientError::NoConvergence {
            fingerprint: op.fingerprint(),
        }
    })?;
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralFactors {
        basis: *op.basis(),
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_cos2_theta, build_cos_theta, build_j_squared};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_level_cos() {
        let b = AngularBasis::new(0, 1).unwrap();
        let f = spectral_decompose(&build_cos_theta(&b)).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(f.eigenvalues()[0], -r, epsilon = 1e-14);
        assert_abs_diff_eq!(f.eigenvalues()[1], r, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_input() {
        let b = AngularBasis::new(0, 6).unwrap();
        let f = spectral_decompose(&build_j_squared(&b)).unwrap();
        assert_eq!(f.eigenvalues(), &[0.0, 2.0, 6.0, 12.0, 20.0, 30.0, 42.0]);
        let v = f.eigenvectors();
        for r in 0..7 {
            for c in 0..7 {
                assert_abs_diff_eq!(v[(r, c)].abs(), if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        for m in [0, 1, -2] {
            let b = AngularBasis::new(m, 9 + m.unsigned_abs()).unwrap();
            for op in [build_cos_theta(&b), build_cos2_theta(&b)] {
                let f = spectral_decompose(&op).unwrap();
                assert!(f.orthogonality_error() < 1e-10);
                assert!((f.reconstruct() - op.to_dense()).amax() < 1e-10);
                assert!(f.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn cos_spectrum_inside_unit_interval() {
        let b = AngularBasis::new(0, 40).unwrap();
        let f = spectral_decompose(&build_cos_theta(&b)).unwrap();
        assert!(f.eigenvalues().iter().all(|x| x.abs() < 1.0));
    }
}

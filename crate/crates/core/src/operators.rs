//! Matrix representations of `cos θ`, `cos² θ` and `J²` on a truncated
//! rotational ladder at fixed `m`.
//!
//! All three are real symmetric and banded; only the diagonal and the upper
//! bands are stored.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::AngularBasis;
use crate::error::{OrientError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandedSymmetricOperator {
    basis: AngularBasis,
    /// `bands[k][i]` is the element `(i, i + k)`.
    bands: Vec<Vec<f64>>,
}

impl BandedSymmetricOperator {
    pub fn from_bands(basis: AngularBasis, bands: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.dim();
        if bands.is_empty() || bands.len() > 3 {
            return Err(OrientError::param("bands", "bandwidth must be 0, 1 or 2"));
        }
        for (k, band) in bands.iter().enumerate() {
            if band.len() != n.saturating_sub(k) {
                return Err(OrientError::DimensionMismatch(format!(
                    "band {k} has length {}, expected {}",
                    band.len(),
                    n.saturating_sub(k)
                )));
            }
        }
        Ok(Self { basis, bands })
    }

    pub fn basis(&self) -> &AngularBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn band(&self, offset: usize) -> Option<&[f64]> {
        self.bands.get(offset).map(Vec::as_slice)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (lo, hi) = if row <= col { (row, col) } else { (col, row) };
        self.bands
            .get(hi - lo)
            .and_then(|b| b.get(lo))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |r, c| self.get(r, c))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match operator dimension");
        let mut out: Vec<Complex64> = self.bands[0].iter().zip(v).map(|(d, x)| x * d).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &a) in band.iter().enumerate() {
                out[i] += v[i + k] * a;
                out[i + k] += v[i] * a;
            }
        }
        out
    }

    /// Nonzero entries as `(j_row, j_col, value)`, both triangles, row-major.
    pub fn entries(&self) -> Vec<(u32, u32, f64)> {
        let n = self.dim();
        let w = self.bandwidth();
        let mut out = Vec::new();
        for r in 0..n {
            for c in r.saturating_sub(w)..(r + w + 1).min(n) {
                let v = self.get(r, c);
                if v != 0.0 {
                    out.push((self.basis.j_of(r), self.basis.j_of(c), v));
                }
            }
        }
        out
    }

    /// Short description used in diagnostics.
    pub fn fingerprint(&self) -> String {
        let frob: f64 = self
            .bands
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let s: f64 = b.iter().map(|x| x * x).sum();
                if k == 0 {
                    s
                } else {
                    2.0 * s
                }
            })
            .sum::<f64>()
            .sqrt();
        let trace: f64 = self.bands[0].iter().sum();
        format!(
            "m={} j_max={} bandwidth={} trace={:.6e} frobenius={:.6e}",
            self.basis.m(),
            self.basis.j_max(),
            self.bandwidth(),
            trace,
            frob
        )
    }
}

/// `<j, m| cos θ |j+1, m>`.
pub fn cos_coupling(j: u32, m: i32) -> f64 {
    let j = f64::from(j);
    let m = f64::from(m);
    (((j + 1.0).powi(2) - m * m) / ((2.0 * j + 1.0) * (2.0 * j + 3.0))).sqrt()
}

pub fn build_cos_theta(basis: &AngularBasis) -> BandedSymmetricOperator {
    let n = basis.dim();
    let off = (0..n - 1)
        .map(|k| cos_coupling(basis.j_of(k), basis.m()))
        .collect();
    BandedSymmetricOperator {
        basis: *basis,
        bands: vec![vec![0.0; n], off],
    }
}

/// Square of `cos θ` built on a ladder two levels taller, truncated back to
/// `basis`. Every retained element is exact.
pub fn build_cos2_theta(basis: &AngularBasis) -> BandedSymmetricOperator {
    let n = basis.dim();
    let m = basis.m();
    let d: Vec<f64> = (0..n + 1)
        .map(|k| cos_coupling(basis.j_of(k), m))
        .collect();
    let diag = (0..n)
        .map(|k| {
            let below = if k > 0 { d[k - 1] * d[k - 1] } else { 0.0 };
            below + d[k] * d[k]
        })
        .collect();
    let second = (0..n.saturating_sub(2)).map(|k| d[k] * d[k + 1]).collect();
    BandedSymmetricOperator {
        basis: *basis,
        bands: vec![diag, vec![0.0; n - 1], second],
    }
}

/// `J²` in units of the rotational constant.
pub fn build_j_squared(basis: &AngularBasis) -> BandedSymmetricOperator {
    let diag = basis
        .levels()
        .map(|j| f64::from(j) * f64::from(j + 1))
        .collect();
    BandedSymmetricOperator {
        basis: *basis,
        bands: vec![diag],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis(m: i32, j_max: u32) -> AngularBasis {
        AngularBasis::new(m, j_max).unwrap()
    }

    #[test]
    fn low_lying_m0_couplings() {
        let c = build_cos_theta(&basis(0, 5));
        let d = c.band(1).unwrap();
        assert_abs_diff_eq!(d[0], (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 2.0 / 15f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], 3.0 / 35f64.sqrt(), epsilon = 1e-15);
        assert!((d[0] - 0.58).abs() < 0.005);
        assert!((d[1] - 0.52).abs() < 0.005);
        assert!((d[2] - 0.51).abs() < 0.005);
    }

    #[test]
    fn cos_diagonal_vanishes() {
        for m in -3..=3 {
            let c = build_cos_theta(&basis(m, 8));
            assert!(c.band(0).unwrap().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn m1_coupling() {
        let c = build_cos_theta(&basis(1, 4));
        assert_abs_diff_eq!(c.get(0, 1), (3.0f64 / 15.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(0, 1), 0.4472, epsilon = 1e-4);
    }

    #[test]
    fn couplings_decrease_to_half() {
        let d: Vec<f64> = (0..200).map(|j| cos_coupling(j, 0)).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]));
        assert!(d.iter().all(|&x| x > 0.5));
        assert!((d[199] - 0.5).abs() < 1e-5);
        assert!((cos_coupling(400, 3) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn cos2_low_elements() {
        let c2 = build_cos2_theta(&basis(0, 6));
        assert_abs_diff_eq!(c2.get(0, 0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c2.get(0, 2), 2.0 / (3.0 * 5f64.sqrt()), epsilon = 1e-15);
        assert_eq!(c2.get(0, 1), 0.0);
        assert_eq!(c2.bandwidth(), 2);
    }

    #[test]
    fn cos2_diagonal_tends_to_half() {
        // (2j² + 2j − 1) / ((2j − 1)(2j + 3)): 1/3 at j = 0, 3/5 at j = 1, then down to 1/2
        let c2 = build_cos2_theta(&basis(0, 60));
        let diag = c2.band(0).unwrap();
        assert_abs_diff_eq!(diag[1], 0.6, epsilon = 1e-15);
        assert!(diag[1..].windows(2).all(|w| w[1] < w[0]));
        assert!(diag[1..].iter().all(|&x| x > 0.5));
        assert_abs_diff_eq!(diag[20], 839.0 / (39.0 * 43.0), epsilon = 1e-15);
    }

    #[test]
    fn cos2_matches_square_away_from_edge() {
        for m in [0, 2, -1] {
            let b = basis(m, 12);
            let c = build_cos_theta(&b).to_dense();
            let sq = &c * &c;
            let c2 = build_cos2_theta(&b).to_dense();
            let n = b.dim();
            for r in 0..n - 2 {
                for col in 0..n {
                    assert_abs_diff_eq!(sq[(r, col)], c2[(r, col)], epsilon = 1e-15);
                }
            }
            // the last row misses the coupling to j_max + 1
            assert!((sq[(n - 1, n - 1)] - c2[(n - 1, n - 1)]).abs() > 1e-3);
        }
    }

    #[test]
    fn j_squared_diagonal() {
        let j2 = build_j_squared(&basis(0, 4));
        assert_eq!(j2.band(0).unwrap(), &[0.0, 2.0, 6.0, 12.0, 20.0]);
        assert_eq!(j2.bandwidth(), 0);
        let j2 = build_j_squared(&basis(2, 4));
        assert_eq!(j2.get(0, 0), 6.0);
    }

    #[test]
    fn apply_matches_dense() {
        let b = basis(1, 9);
        let op = build_cos2_theta(&b);
        let v: Vec<Complex64> = (0..b.dim())
            .map(|k| Complex64::new(k as f64 * 0.3 - 1.0, 0.1 * k as f64))
            .collect();
        let got = op.apply(&v);
        let dense = op.to_dense();
        for r in 0..b.dim() {
            let want: Complex64 = (0..b.dim()).map(|c| v[c] * dense[(r, c)]).sum();
            assert_abs_diff_eq!(got[r].re, want.re, epsilon = 1e-14);
            assert_abs_diff_eq!(got[r].im, want.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn entries_carry_j_labels() {
        let e = build_cos_theta(&basis(2, 4)).entries();
        assert_eq!(e[0].0, 2);
        assert_eq!(e[0].1, 3);
        assert_eq!(e.len(), 4);
    }

    #[test]
    fn from_bands_checks_lengths() {
        let b = basis(0, 3);
        assert!(BandedSymmetricOperator::from_bands(b, vec![vec![0.0; 4], vec![0.0; 2]]).is_err());
        assert!(BandedSymmetricOperator::from_bands(b, vec![vec![0.0; 4], vec![0.0; 3]]).is_ok());
    }
}

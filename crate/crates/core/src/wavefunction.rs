use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::AngularBasis;
use crate::error::{OrientError, Result};

/// The two dimensionless pulse areas of a hybrid kick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickAreas {
    a_hcp: f64,
    a_l: f64,
}

impl KickAreas {
    pub fn new(a_hcp: f64, a_l: f64) -> Result<Self> {
        if !a_hcp.is_finite() {
            return Err(OrientError::param("a_hcp", "must be finite"));
        }
        if !(a_l.is_finite() && a_l >= 0.0) {
            return Err(OrientError::param("a_l", format!("must be finite and >= 0, got {a_l}")));
        }
        Ok(Self { a_hcp, a_l })
    }

    pub fn zero() -> Self {
        Self { a_hcp: 0.0, a_l: 0.0 }
    }

    pub fn a_hcp(&self) -> f64 {
        self.a_hcp
    }

    pub fn a_l(&self) -> f64 {
        self.a_l
    }

    pub fn flipped_hcp(&self) -> Self {
        Self { a_hcp: -self.a_hcp, a_l: self.a_l }
    }
}

/// Complex amplitudes `c_j` on a fixed-`m` rotational ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorWavefunction {
    basis: AngularBasis,
    amplitudes: Vec<Complex64>,
}

impl RotorWavefunction {
    pub fn from_amplitudes(basis: AngularBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(OrientError::DimensionMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(basis: AngularBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_amplitudes(basis, amplitudes)?;
        let n = s.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(OrientError::param("amplitudes", "cannot normalize a zero vector"));
        }
        s.amplitudes.iter_mut().for_each(|c| *c /= n);
        Ok(s)
    }

    /// The pure level `|j, m>`.
    pub fn level(basis: AngularBasis, j: u32) -> Result<Self> {
        let k = basis.index_of(j).ok_or_else(|| {
            OrientError::param("j", format!("level {j} outside basis j = {}..={}", basis.j_min(), basis.j_max()))
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &AngularBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, j: u32) -> Complex64 {
        self.basis
            .index_of(j)
            .map_or(Complex64::new(0.0, 0.0), |k| self.amplitudes[k])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `<self|other>`; zero-padded where the ladders differ in height.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.basis.m() != other.basis.m() {
            return Err(OrientError::DimensionMismatch(format!(
                "inner product across m = {} and m = {}",
                self.basis.m(),
                other.basis.m()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|²`, insensitive to global phase.
    pub fn overlap_probability(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Copy onto a taller or shorter ladder at the same `m`; dropped levels are discarded.
    pub fn resized(&self, j_max: u32) -> Result<Self> {
        let basis = self.basis.with_j_max(j_max)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        let n = amplitudes.len().min(self.amplitudes.len());
        amplitudes[..n].copy_from_slice(&self.amplitudes[..n]);
        Ok(Self { basis, amplitudes })
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{OrientError, Result};

/// Truncated spherical-harmonic ladder `{|j, m> : j = |m| ..= j_max}` at fixed `m`.
///
/// Basis index `k` labels `j = |m| + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularBasis {
    m: i32,
    j_max: u32,
}

impl AngularBasis {
    pub fn new(m: i32, j_max: u32) -> Result<Self> {
        if j_max < m.unsigned_abs() + 1 {
            return Err(OrientError::InvalidBasis { m, j_max });
        }
        Ok(Self { m, j_max })
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn j_min(&self) -> u32 {
        self.m.unsigned_abs()
    }

    pub fn dim(&self) -> usize {
        (self.j_max - self.j_min() + 1) as usize
    }

    /// Rotational quantum number carried by basis index `k`.
    pub fn j_of(&self, k: usize) -> u32 {
        self.j_min() + k as u32
    }

    pub fn index_of(&self, j: u32) -> Option<usize> {
        (self.j_min()..=self.j_max)
            .contains(&j)
            .then(|| (j - self.j_min()) as usize)
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.j_min()..=self.j_max
    }

    pub(crate) fn with_j_max(&self, j_max: u32) -> Result<Self> {
        Self::new(self.m, j_max)
    }
}

//! Optimal oriented target states in the subspace of the `N` lowest
//! rotational levels (`m = 0`): the extremal eigenvectors of the projected
//! orientation operator, their closed-form approximants with all couplings set
//! to 1/2, and the second-order estimate of their revival duration.

use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::AngularBasis;
use crate::error::{OrientError, Result};
use crate::operators::build_cos_theta;
use crate::spectral::spectral_decompose;
use crate::wavefunction::RotorWavefunction;

/// Largest subspace kept in the precomputed table.
pub const MAX_TABLE_DIM: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minus,
    Plus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Minus => -1.0,
            Direction::Plus => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Minus => "minus",
            Direction::Plus => "plus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalState {
    pub n_dim: usize,
    pub direction: Direction,
    /// Real amplitudes on `j = 0 .. n_dim`.
    pub amplitudes: Vec<f64>,
    /// Orientation `<cos θ>` carried by the state.
    pub eigenvalue: f64,
}

impl OptimalState {
    pub fn to_wavefunction(&self) -> Result<RotorWavefunction> {
        let basis = AngularBasis::new(0, self.n_dim as u32 - 1)?;
        RotorWavefunction::from_amplitudes(
            basis,
            self.amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }
}

fn check_dim(n_dim: usize) -> Result<()> {
    if n_dim < 2 {
        return Err(OrientError::param("n_dim", format!("subspace dimension must be >= 2, got {n_dim}")));
    }
    Ok(())
}

fn sine_profile(n_dim: usize, direction: Direction) -> Vec<f64> {
    let np1 = (n_dim + 1) as f64;
    let norm = (2.0 / np1).sqrt();
    let sign = direction.sign();
    (0..n_dim)
        .map(|j| {
            let parity = if (j + 1) % 2 == 0 { 1.0 } else { sign };
            norm * parity * (PI * (j + 1) as f64 / np1).sin()
        })
        .collect()
}

/// Extremal eigenvectors of `Π_N cos θ Π_N` with exact couplings, returned as
/// `(minus, plus)`. Each is phased to overlap positively with the sine profile
/// of the same direction.
pub fn exact_optimal_states(n_dim: usize) -> Result<(OptimalState, OptimalState)> {
    check_dim(n_dim)?;
    let basis = AngularBasis::new(0, n_dim as u32 - 1)?;
    let factors = spectral_decompose(&build_cos_theta(&basis))?;
    let pick = |col: usize, direction: Direction| {
        let v: Vec<f64> = factors.eigenvectors().column(col).iter().copied().collect();
        let reference = sine_profile(n_dim, direction);
        let dot: f64 = v.iter().zip(&reference).map(|(a, b)| a * b).sum();
        let flip = if dot < 0.0 { -1.0 } else { 1.0 };
        OptimalState {
            n_dim,
            direction,
            amplitudes: v.iter().map(|a| a * flip).collect(),
            eigenvalue: factors.eigenvalues()[col],
        }
    };
    Ok((pick(0, Direction::Minus), pick(n_dim - 1, Direction::Plus)))
}

/// Closed-form sine-profile state; normalized exactly by construction.
pub fn approx_optimal_state(n_dim: usize, direction: Direction) -> Result<OptimalState> {
    check_dim(n_dim)?;
    Ok(OptimalState {
        n_dim,
        direction,
        amplitudes: sine_profile(n_dim, direction),
        eigenvalue: approx_optimal_value(n_dim, direction)?,
    })
}

/// `±cos(π / (N + 1))`.
pub fn approx_optimal_value(n_dim: usize, direction: Direction) -> Result<f64> {
    check_dim(n_dim)?;
    Ok(direction.sign() * (PI / (n_dim + 1) as f64).cos())
}

/// Second-order estimate of the time spent above `gamma` by the revival of an
/// optimal state, in units of the rotational period. Zero when the state never
/// reaches `gamma`.
pub fn optimal_duration(n_dim: usize, gamma: f64) -> Result<f64> {
    check_dim(n_dim)?;
    let peak = (PI / (n_dim + 1) as f64).cos();
    let excess = 1.0 - gamma / peak;
    if excess <= 0.0 {
        return Ok(0.0);
    }
    let alpha = 2.0 / 3.0 - 1.0 / (PI * PI);
    let np1 = (n_dim + 1) as f64;
    let curvature = alpha * np1 * np1 - np1;
    Ok(2.0 / PI * (excess / curvature).sqrt())
}

/// `|<target|state>|²` over the first `N` levels of an `m = 0` state.
pub fn projection_probability(state: &RotorWavefunction, target: &OptimalState) -> Result<f64> {
    if state.basis().m() != 0 {
        return Err(OrientError::DimensionMismatch(format!(
            "optimal targets live at m = 0, state has m = {}",
            state.basis().m()
        )));
    }
    if target.n_dim > state.basis().dim() {
        return Err(OrientError::DimensionMismatch(format!(
            "target dimension {} exceeds state dimension {}",
            target.n_dim,
            state.basis().dim()
        )));
    }
    let overlap: Complex64 = target
        .amplitudes
        .iter()
        .zip(state.amplitudes())
        .map(|(t, c)| c * *t)
        .sum();
    Ok(overlap.norm_sqr())
}

pub fn subspace_population(state: &RotorWavefunction, n_dim: usize) -> f64 {
    state.amplitudes().iter().take(n_dim).map(|c| c.norm_sqr()).sum()
}

/// Exact optimal states for `N = 2 ..= MAX_TABLE_DIM`, built once.
pub fn optimal_table() -> &'static [(OptimalState, OptimalState)] {
    static TABLE: OnceLock<Vec<(OptimalState, OptimalState)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (2..=MAX_TABLE_DIM)
            .map(|n| exact_optimal_states(n).expect("small tridiagonal eigenproblem"))
            .collect()
    })
}

pub fn exact_optimal_state(n_dim: usize, direction: Direction) -> Result<OptimalState> {
    check_dim(n_dim)?;
    let pair = if n_dim <= MAX_TABLE_DIM {
        optimal_table()[n_dim - 2].clone()
    } else {
        exact_optimal_states(n_dim)?
    };
    Ok(match direction {
        Direction::Minus => pair.0,
        Direction::Plus => pair.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetMatch {
    pub n_dim: usize,
    pub direction: Direction,
    pub probability: f64,
}

/// The exact optimal state with the largest projection; ties go to the smaller `N`.
pub fn best_target(state_at_smax: &RotorWavefunction, n_range: RangeInclusive<usize>) -> Result<TargetMatch> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 2 || hi > MAX_TABLE_DIM || lo > hi {
        return Err(OrientError::param(
            "n_range",
            format!("{lo}..={hi} must lie within 2..={MAX_TABLE_DIM}"),
        ));
    }
    let mut best: Option<TargetMatch> = None;
    for n in n_range {
        let (minus, plus) = &optimal_table()[n - 2];
        for target in [minus, plus] {
            if target.n_dim > state_at_smax.basis().dim() {
                continue;
            }
            let p = projection_probability(state_at_smax, target)?;
            if best.is_none_or(|b| p > b.probability) {
                best = Some(TargetMatch {
                    n_dim: n,
                    direction: target.direction,
                    probability: p,
                });
            }
        }
    }
    best.ok_or_else(|| OrientError::DimensionMismatch("no target fits inside the state's ladder".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_dimensional_states() {
        let (minus, plus) = exact_optimal_states(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(minus.eigenvalue, -r, epsilon = 1e-14);
        assert_abs_diff_eq!(plus.eigenvalue, r, epsilon = 1e-14);
        let approx = approx_optimal_state(2, Direction::Plus).unwrap();
        assert_abs_diff_eq!(approx.amplitudes[0], 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(approx.amplitudes[1], 0.5f64.sqrt(), epsilon = 1e-15);
        let approx = approx_optimal_state(2, Direction::Minus).unwrap();
        assert!(approx.amplitudes[0] < 0.0 && approx.amplitudes[1] > 0.0);
    }

    #[test]
    fn sine_profile_normalized_exactly() {
        for n in 2..=14 {
            for d in [Direction::Minus, Direction::Plus] {
                let s = approx_optimal_state(n, d).unwrap();
                let norm: f64 = s.amplitudes.iter().map(|a| a * a).sum();
                assert!((norm - 1.0).abs() < 1e-12, "N = {n}: {norm}");
            }
        }
    }

    #[test]
    fn spectrum_symmetric() {
        for n in 2..=8 {
            let b = AngularBasis::new(0, n as u32 - 1).unwrap();
            let ev = spectral_decompose(&build_cos_theta(&b)).unwrap();
            let e = ev.eigenvalues();
            for k in 0..n {
                assert_abs_diff_eq!(e[k], -e[n - 1 - k], epsilon = 1e-13);
            }
            if n % 2 == 1 {
                assert_abs_diff_eq!(e[n / 2], 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn exact_exceeds_approximate_magnitude() {
        for n in 2..=10 {
            let (minus, plus) = exact_optimal_states(n).unwrap();
            let approx = approx_optimal_value(n, Direction::Plus).unwrap();
            assert!(plus.eigenvalue > approx);
            assert_abs_diff_eq!(minus.eigenvalue, -plus.eigenvalue, epsilon = 1e-13);
            assert!(plus.eigenvalue < 1.0);
        }
    }

    #[test]
    fn sign_convention() {
        for n in 2..=14 {
            let (minus, plus) = exact_optimal_states(n).unwrap();
            for s in [&minus, &plus] {
                let reference = sine_profile(n, s.direction);
                let dot: f64 = s.amplitudes.iter().zip(&reference).map(|(a, b)| a * b).sum();
                assert!(dot > 0.0);
                assert_eq!(s.eigenvalue.signum(), s.direction.sign());
            }
        }
    }

    #[test]
    fn approximate_and_exact_agree_at_five() {
        let (minus, _) = exact_optimal_states(5).unwrap();
        let approx = approx_optimal_state(5, Direction::Minus).unwrap();
        let dot: f64 = minus.amplitudes.iter().zip(&approx.amplitudes).map(|(a, b)| a * b).sum();
        assert!(dot * dot > 0.99);
    }

    #[test]
    fn approximate_values() {
        assert_abs_diff_eq!(approx_optimal_value(2, Direction::Plus).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(approx_optimal_value(5, Direction::Minus).unwrap(), -0.8660254037844387, epsilon = 1e-15);
        let v: Vec<f64> = (2..60).map(|n| approx_optimal_value(n, Direction::Plus).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]) && v.last().unwrap() < &1.0);
    }

    #[test]
    fn duration_formula() {
        assert_abs_diff_eq!(optimal_duration(2, 0.5).unwrap(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(optimal_duration(5, 0.5).unwrap(), 0.1092, epsilon = 1e-4);
        assert_abs_diff_eq!(optimal_duration(3, 0.5).unwrap(), 0.1534, epsilon = 1e-4);
        assert_eq!(optimal_duration(2, 0.6).unwrap(), 0.0);
        let d: Vec<f64> = (3..15).map(|n| optimal_duration(n, 0.5).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn self_identification() {
        let target = exact_optimal_state(4, Direction::Minus).unwrap();
        let state = target.to_wavefunction().unwrap().resized(20).unwrap();
        let m = best_target(&state, 2..=14).unwrap();
        assert_eq!((m.n_dim, m.direction), (4, Direction::Minus));
        assert_abs_diff_eq!(m.probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_is_phase_blind() {
        let target = exact_optimal_state(5, Direction::Plus).unwrap();
        let b = AngularBasis::new(0, 9).unwrap();
        let amps: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(1.0 / (1.0 + k as f64), 0.4 * k as f64)).collect();
        let s = RotorWavefunction::normalized(b, amps.clone()).unwrap();
        let phase = Complex64::from_polar(1.0, 2.1);
        let rotated = RotorWavefunction::normalized(b, amps.iter().map(|c| c * phase).collect()).unwrap();
        assert_abs_diff_eq!(
            projection_probability(&s, &target).unwrap(),
            projection_probability(&rotated, &target).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn restricted_state_projection_equals_subspace_population() {
        let b = AngularBasis::new(0, 9).unwrap();
        let amps: Vec<f64> = (0..10).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let s = RotorWavefunction::normalized(b, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect()).unwrap();
        let n = 4;
        let norm: f64 = amps[..n].iter().map(|a| a * a).sum::<f64>().sqrt();
        let target = OptimalState {
            n_dim: n,
            direction: Direction::Plus,
            amplitudes: amps[..n].iter().map(|a| a / norm).collect(),
            eigenvalue: 0.0,
        };
        assert_abs_diff_eq!(projection_probability(&s, &target).unwrap(), subspace_population(&s, n), epsilon = 1e-14);
        assert_abs_diff_eq!(subspace_population(&s, 10), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn errors() {
        assert!(exact_optimal_states(1).is_err());
        let b = AngularBasis::new(1, 9).unwrap();
        let s = RotorWavefunction::level(b, 1).unwrap();
        let t = exact_optimal_state(3, Direction::Plus).unwrap();
        assert!(projection_probability(&s, &t).is_err());
        let small = RotorWavefunction::level(AngularBasis::new(0, 2).unwrap(), 0).unwrap();
        let t = exact_optimal_state(5, Direction::Plus).unwrap();
        assert!(projection_probability(&small, &t).is_err());
        assert!(best_target(&small, 1..=5).is_err());
        assert!(best_target(&small, 2..=15).is_err());
    }
}

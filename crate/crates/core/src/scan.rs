//! Sweeps over the `(A_L, A_HCP)` plane and along lines `A_L = A_HCP / ratio`.
//!
//! Points are independent and run through [`map_indexed`]; rows come back in
//! index order so the output does not depend on the worker count.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{OrientError, Result};
use crate::exec::{map_indexed, Execution};
use crate::observables::{revival_stats, OrientationSeries, OrientationTrace, RevivalStats, DEFAULT_GAMMA, DEFAULT_RESOLUTION};
use crate::optimal::{best_target, Direction, MAX_TABLE_DIM};
use crate::propagator::{free_evolve, kick_level_converged, KickCache, DEFAULT_AUDIT_TOL};
use crate::thermal::{thermal_series, ThermalConfig};
use crate::wavefunction::{KickAreas, RotorWavefunction};

pub const DEFAULT_RATIO: f64 = 2.5;

/// Inclusive, uniformly spaced axis `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(OrientError::param("axis", format!("count must be >= 2, got {count}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(OrientError::param("axis", format!("need min < max, got {min}:{max}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

impl FromStr for Axis {
    type Err = OrientError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || OrientError::param("axis", format!("`{s}` is not of the form min:max:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Axis::new(min, max, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSpec {
    pub al_axis: Axis,
    pub ahcp_axis: Axis,
    pub t_tilde: Option<f64>,
    pub gamma: f64,
    pub resolution: usize,
}

impl ScanSpec {
    pub fn new(al_axis: Axis, ahcp_axis: Axis) -> Result<Self> {
        if al_axis.min < 0.0 {
            return Err(OrientError::param("al_axis", "laser areas must be nonnegative"));
        }
        Ok(Self {
            al_axis,
            ahcp_axis,
            t_tilde: None,
            gamma: DEFAULT_GAMMA,
            resolution: DEFAULT_RESOLUTION,
        })
    }

    /// 121 × 121 over `A_L ∈ [0, 6]`, `A_HCP ∈ [0, 10]`.
    pub fn default_grid() -> Self {
        Self::new(Axis::new(0.0, 6.0, 121).unwrap(), Axis::new(0.0, 10.0, 121).unwrap()).unwrap()
    }

    pub fn with_temperature(mut self, t_tilde: Option<f64>) -> Self {
        self.t_tilde = t_tilde.filter(|&t| t > 0.0);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineScanSpec {
    pub ahcp_axis: Axis,
    pub ratio: f64,
    pub t_tilde: Option<f64>,
    pub gamma: f64,
    pub resolution: usize,
}

impl LineScanSpec {
    pub fn new(ahcp_axis: Axis, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(OrientError::param("ratio", format!("must be positive, got {ratio}")));
        }
        Ok(Self {
            ahcp_axis,
            ratio,
            t_tilde: None,
            gamma: DEFAULT_GAMMA,
            resolution: DEFAULT_RESOLUTION,
        })
    }

    pub fn with_temperature(mut self, t_tilde: Option<f64>) -> Self {
        self.t_tilde = t_tilde.filter(|&t| t > 0.0);
        self
    }
}

/// Revival of one parameter point, cold or thermal.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub stats: RevivalStats,
    pub trace: OrientationTrace,
    /// Post-pulse state of the cold molecule; `None` in thermal mode.
    pub cold_state: Option<RotorWavefunction>,
    /// Largest ladder used by any channel.
    pub j_max: u32,
}

pub fn evaluate_point(
    areas: KickAreas,
    t_tilde: Option<f64>,
    gamma: f64,
    resolution: usize,
    cache: &KickCache,
) -> Result<PointResult> {
    let (series, cold_state, j_max) = match t_tilde.filter(|&t| t > 0.0) {
        None => {
            let kick = kick_level_converged(areas, 0, 0, DEFAULT_AUDIT_TOL, cache)?;
            let j_max = kick.j_max();
            (OrientationSeries::from_state(&kick.state), Some(kick.state), j_max)
        }
        Some(t) => {
            let cfg = ThermalConfig::new(t)?;
            let (series, _, used) = thermal_series(areas, &cfg, Execution::Sequential, cache)?;
            (series, None, used.into_iter().max().unwrap_or(0))
        }
    };
    let trace = OrientationTrace::from_series(series, resolution)?;
    let stats = revival_stats(&trace, gamma)?;
    Ok(PointResult {
        stats,
        trace,
        cold_state,
        j_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub a_l: f64,
    pub a_hcp: f64,
    pub max_abs: f64,
    pub signed_value: f64,
    pub s_at_max: f64,
    pub duration: f64,
    pub j_max: u32,
    pub error: Option<String>,
}

pub fn scan_max_orientation(spec: &ScanSpec, exec: Execution, cache: &KickCache) -> Vec<GridRow> {
    let n_hcp = spec.ahcp_axis.count;
    let total = spec.al_axis.count * n_hcp;
    map_indexed(total, exec, |idx| {
        let a_l = spec.al_axis.value(idx / n_hcp);
        let a_hcp = spec.ahcp_axis.value(idx % n_hcp);
        let result = KickAreas::new(a_hcp, a_l)
            .and_then(|areas| evaluate_point(areas, spec.t_tilde, spec.gamma, spec.resolution, cache));
        match result {
            Ok(p) => GridRow {
                a_l,
                a_hcp,
                max_abs: p.stats.max_abs,
                signed_value: p.stats.signed_value,
                s_at_max: p.stats.s_at_max,
                duration: p.stats.duration,
                j_max: p.j_max,
                error: None,
            },
            Err(e) => GridRow {
                a_l,
                a_hcp,
                max_abs: f64::NAN,
                signed_value: f64::NAN,
                s_at_max: f64::NAN,
                duration: f64::NAN,
                j_max: 0,
                error: Some(e.to_string()),
            },
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineRow {
    pub a_hcp: f64,
    pub a_l: f64,
    pub max_abs: f64,
    pub signed_value: f64,
    pub s_at_max: f64,
    pub max_abs_hcp_only: f64,
    pub duration: f64,
    /// Best-matching optimal subspace; cold molecule only.
    pub best_n: Option<usize>,
    pub best_sign: Option<Direction>,
    pub p_n: f64,
    pub j_max: u32,
    pub error: Option<String>,
}

fn line_point(a_hcp: f64, spec: &LineScanSpec, cache: &KickCache) -> Result<LineRow> {
    let areas = KickAreas::new(a_hcp, a_hcp / spec.ratio)?;
    let hybrid = evaluate_point(areas, spec.t_tilde, spec.gamma, spec.resolution, cache)?;
    let hcp_only = evaluate_point(KickAreas::new(a_hcp, 0.0)?, spec.t_tilde, spec.gamma, spec.resolution, cache)?;
    let target = match &hybrid.cold_state {
        Some(state) => Some(best_target(&free_evolve(state, hybrid.stats.s_at_max), 2..=MAX_TABLE_DIM)?),
        None => None,
    };
    Ok(LineRow {
        a_hcp,
        a_l: areas.a_l(),
        max_abs: hybrid.stats.max_abs,
        signed_value: hybrid.stats.signed_value,
        s_at_max: hybrid.stats.s_at_max,
        max_abs_hcp_only: hcp_only.stats.max_abs,
        duration: hybrid.stats.duration,
        best_n: target.map(|t| t.n_dim),
        best_sign: target.map(|t| t.direction),
        p_n: target.map_or(f64::NAN, |t| t.probability),
        j_max: hybrid.j_max.max(hcp_only.j_max),
        error: None,
    })
}

pub fn line_scan(spec: &LineScanSpec, exec: Execution, cache: &KickCache) -> Vec<LineRow> {
    map_indexed(spec.ahcp_axis.count, exec, |i| {
        let a_hcp = spec.ahcp_axis.value(i);
        line_point(a_hcp, spec, cache).unwrap_or_else(|e| LineRow {
            a_hcp,
            a_l: a_hcp / spec.ratio,
            max_abs: f64::NAN,
            signed_value: f64::NAN,
            s_at_max: f64::NAN,
            max_abs_hcp_only: f64::NAN,
            duration: f64::NAN,
            best_n: None,
            best_sign: None,
            p_n: f64::NAN,
            j_max: 0,
            error: Some(e.to_string()),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: Axis = "0:6:121".parse().unwrap();
        assert_eq!((a.min, a.max, a.count), (0.0, 6.0, 121));
        assert_eq!(a.value(120), 6.0);
        assert!((a.value(60) - 3.0).abs() < 1e-15);
        assert!("6:0:10".parse::<Axis>().is_err());
        assert!("0:1:1".parse::<Axis>().is_err());
        assert!("0:1".parse::<Axis>().is_err());
        assert!("a:1:3".parse::<Axis>().is_err());
    }

    #[test]
    fn spec_validation() {
        let neg = Axis::new(-1.0, 1.0, 3).unwrap();
        let ok = Axis::new(0.0, 1.0, 3).unwrap();
        assert!(ScanSpec::new(neg, ok).is_err());
        assert!(ScanSpec::new(ok, neg).is_ok());
        assert!(LineScanSpec::new(ok, 0.0).is_err());
    }

    #[test]
    fn grid_is_al_major() {
        let spec = ScanSpec::new(Axis::new(0.0, 1.0, 2).unwrap(), Axis::new(0.0, 2.0, 3).unwrap()).unwrap();
        let rows = scan_max_orientation(&spec, Execution::Sequential, &KickCache::new());
        let coords: Vec<(f64, f64)> = rows.iter().map(|r| (r.a_l, r.a_hcp)).collect();
        assert_eq!(coords, vec![(0.0, 0.0), (0.0, 1.0), (0.0, 2.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0)]);
        assert_eq!(rows[0].max_abs, 0.0);
        assert!(rows.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn failing_points_recorded_in_row() {
        // negative laser areas cannot pass KickAreas validation; bypass ScanSpec::new
        let spec = ScanSpec {
            al_axis: Axis::new(-1.0, 0.0, 2).unwrap(),
            ahcp_axis: Axis::new(0.0, 1.0, 2).unwrap(),
            t_tilde: None,
            gamma: 0.5,
            resolution: 256,
        };
        let rows = scan_max_orientation(&spec, Execution::Sequential, &KickCache::new());
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_some() && rows[0].max_abs.is_nan());
        assert!(rows[2].error.is_none());
    }

    #[test]
    fn line_rows() {
        let spec = LineScanSpec::new(Axis::new(1.0, 3.0, 3).unwrap(), 2.5).unwrap();
        let rows = line_scan(&spec, Execution::Sequential, &KickCache::new());
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.error.is_none());
            assert!((r.a_l - r.a_hcp / 2.5).abs() < 1e-15);
            assert!(r.max_abs > r.max_abs_hcp_only);
            assert!(r.best_n.is_some());
        }
    }
}

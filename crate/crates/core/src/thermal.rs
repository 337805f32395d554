//! Boltzmann average of the orientation over initial levels `|j0, m0>` at
//! dimensionless temperature `T~ = kT/B`.
//!
//! Fields depend on θ only, so every `m0` ladder evolves on its own and the
//! ensemble trace is the weighted sum of the per-channel series.

use serde::Serialize;

use crate::error::{OrientError, Result};
use crate::exec::{map_indexed, Execution};
use crate::observables::{revival_stats, OrientationSeries, OrientationTrace, RevivalStats};
use crate::propagator::{kick_level_converged, KickCache, DEFAULT_AUDIT_TOL};
use crate::wavefunction::KickAreas;

pub const DEFAULT_WEIGHT_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalConfig {
    pub t_tilde: f64,
    /// Channels are dropped once the retained weight reaches `1 − weight_cutoff`.
    pub weight_cutoff: f64,
    /// Reuse the `+m0` series for `−m0` instead of recomputing it.
    pub mirror_negative_m: bool,
}

impl ThermalConfig {
    pub fn new(t_tilde: f64) -> Result<Self> {
        if !(t_tilde.is_finite() && t_tilde >= 0.0) {
            return Err(OrientError::param("t_tilde", format!("must be finite and >= 0, got {t_tilde}")));
        }
        Ok(Self {
            t_tilde,
            weight_cutoff: DEFAULT_WEIGHT_CUTOFF,
            mirror_negative_m: false,
        })
    }

    pub fn cold() -> Self {
        Self::new(0.0).expect("zero temperature is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    pub j0: u32,
    pub m0: i32,
    pub weight: f64,
}

fn level_factor(j: u32, t_tilde: f64) -> f64 {
    let e = f64::from(j) * f64::from(j + 1);
    (-e / t_tilde).exp()
}

/// Initial levels with their Boltzmann weights, `j0` ascending then `m0`
/// ascending. Each `m0` is its own channel.
pub fn boltzmann_channels(config: &ThermalConfig) -> Vec<Channel> {
    if config.t_tilde == 0.0 {
        return vec![Channel { j0: 0, m0: 0, weight: 1.0 }];
    }
    let t = config.t_tilde;
    // partition sum, until terms underflow relative to the total
    let mut z = 0.0;
    let mut j = 0u32;
    loop {
        let term = f64::from(2 * j + 1) * level_factor(j, t);
        z += term;
        if term < z * 1e-18 {
            break;
        }
        j += 1;
    }
    let mut out = Vec::new();
    let mut kept = 0.0;
    let mut j0 = 0u32;
    while kept < 1.0 - config.weight_cutoff {
        let w = level_factor(j0, t) / z;
        let j0i = j0 as i32;
        out.extend((-j0i..=j0i).map(|m0| Channel { j0, m0, weight: w }));
        kept += f64::from(2 * j0 + 1) * w;
        j0 += 1;
    }
    out
}

/// Ensemble trace plus the ladder heights the channels needed.
#[derive(Debug, Clone)]
pub struct ThermalTrace {
    pub trace: OrientationTrace,
    pub channels: Vec<Channel>,
    pub j_max_used: Vec<u32>,
}

pub fn thermal_series(
    areas: KickAreas,
    config: &ThermalConfig,
    exec: Execution,
    cache: &KickCache,
) -> Result<(OrientationSeries, Vec<Channel>, Vec<u32>)> {
    let channels = boltzmann_channels(config);
    let per_channel = map_indexed(channels.len(), exec, |i| {
        let ch = channels[i];
        if config.mirror_negative_m && ch.m0 < 0 {
            return Ok(None);
        }
        kick_level_converged(areas, ch.m0, ch.j0, DEFAULT_AUDIT_TOL, cache)
            .map(|k| Some((OrientationSeries::from_state(&k.state), k.j_max())))
    });
    let per_channel: Vec<Option<(OrientationSeries, u32)>> = per_channel.into_iter().collect::<Result<_>>()?;
    let mut total = OrientationSeries::default();
    let mut j_max_used = Vec::with_capacity(channels.len());
    for (i, ch) in channels.iter().enumerate() {
        let (series, j_max) = match &per_channel[i] {
            Some((s, j)) => (s, *j),
            None => {
                let mirror = channels
                    .iter()
                    .position(|c| c.j0 == ch.j0 && c.m0 == -ch.m0)
                    .expect("channel list holds both signs of m0");
                let (s, j) = per_channel[mirror].as_ref().expect("positive m0 computed");
                (s, *j)
            }
        };
        total.add_scaled(series, ch.weight);
        j_max_used.push(j_max);
    }
    Ok((total, channels, j_max_used))
}

pub fn thermal_orientation_trace_with(
    areas: KickAreas,
    config: &ThermalConfig,
    resolution: usize,
    exec: Execution,
    cache: &KickCache,
) -> Result<ThermalTrace> {
    let (series, channels, j_max_used) = thermal_series(areas, config, exec, cache)?;
    Ok(ThermalTrace {
        trace: OrientationTrace::from_series(series, resolution)?,
        channels,
        j_max_used,
    })
}

pub fn thermal_orientation_trace(areas: KickAreas, config: &ThermalConfig, resolution: usize) -> Result<OrientationTrace> {
    thermal_orientation_trace_with(areas, config, resolution, Execution::default(), KickCache::shared()).map(|t| t.trace)
}

pub fn thermal_revival_stats(trace: &OrientationTrace, gamma: f64) -> Result<RevivalStats> {
    revival_stats(trace, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{orientation_trace, DEFAULT_RESOLUTION};
    use crate::propagator::kick_ground_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cold_single_channel() {
        assert_eq!(boltzmann_channels(&ThermalConfig::cold()), vec![Channel { j0: 0, m0: 0, weight: 1.0 }]);
    }

    #[test]
    fn weights_at_five() {
        let cfg = ThermalConfig::new(5.0).unwrap();
        let ch = boltzmann_channels(&cfg);
        let w0 = ch[0].weight;
        for c in ch.iter().filter(|c| c.j0 == 1) {
            assert_abs_diff_eq!(c.weight / w0, (-0.4f64).exp(), epsilon = 1e-14);
        }
        let total: f64 = ch.iter().map(|c| c.weight).sum();
        assert!(total <= 1.0 + 1e-14 && total >= 1.0 - cfg.weight_cutoff);
        for c in &ch {
            let mirror = ch.iter().find(|d| d.j0 == c.j0 && d.m0 == -c.m0).unwrap();
            assert_eq!(mirror.weight, c.weight);
        }
    }

    #[test]
    fn cold_matches_single_molecule() {
        let areas = KickAreas::new(2.0, 0.8).unwrap();
        let thermal = thermal_orientation_trace(areas, &ThermalConfig::cold(), DEFAULT_RESOLUTION).unwrap();
        let cold = orientation_trace(&kick_ground_state(areas).unwrap().state, DEFAULT_RESOLUTION).unwrap();
        assert_eq!(thermal.values(), cold.values());
        assert_eq!(thermal_revival_stats(&thermal, 0.5).unwrap(), revival_stats(&cold, 0.5).unwrap());
    }

    #[test]
    fn isotropic_without_kick() {
        let t = thermal_orientation_trace(KickAreas::zero(), &ThermalConfig::new(5.0).unwrap(), 256).unwrap();
        assert!(t.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mirror_shortcut_matches_direct() {
        let areas = KickAreas::new(1.5, 2.0).unwrap();
        let mut cfg = ThermalConfig::new(3.0).unwrap();
        let direct = thermal_orientation_trace(areas, &cfg, 512).unwrap();
        cfg.mirror_negative_m = true;
        let mirrored = thermal_orientation_trace(areas, &cfg, 512).unwrap();
        for (a, b) in direct.values().iter().zip(mirrored.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn near_zero_temperature_is_cold() {
        let areas = KickAreas::new(3.0, 1.2).unwrap();
        let warm = thermal_orientation_trace(areas, &ThermalConfig::new(0.01).unwrap(), 2048).unwrap();
        let cold = thermal_orientation_trace(areas, &ThermalConfig::cold(), 2048).unwrap();
        let a = revival_stats(&warm, 0.5).unwrap().max_abs;
        let b = revival_stats(&cold, 0.5).unwrap().max_abs;
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn rejects_negative_temperature() {
        assert!(ThermalConfig::new(-1.0).is_err());
    }
}

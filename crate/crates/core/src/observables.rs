//! Orientation `<cos θ>(s)` after the kick and its revival statistics.
//!
//! With the post-pulse amplitudes fixed, free rotation only adds phases, so
//! the trace is a finite Fourier series in `s`:
//!
//! ```text
//! <cos θ>(s) = Re Σ_k a_k e^{-2πiks},   a_{j+1} = 2 d_j c_j* c_{j+1}
//! ```
//!
//! and is evaluated analytically at any `s` instead of by propagation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{OrientError, Result};
use crate::operators::cos_coupling;
use crate::wavefunction::RotorWavefunction;

pub const DEFAULT_RESOLUTION: usize = 2048;
pub const MIN_RESOLUTION: usize = 64;
pub const DEFAULT_GAMMA: f64 = 0.5;
/// Bisection stops once the bracket is this narrow in `s`.
const CROSSING_TOL: f64 = 1e-7;

/// `<j|cos θ|j+1>` used when building the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    #[default]
    Exact,
    /// Every coupling replaced by 1/2; diagnostic only.
    Half,
}

/// Fourier coefficients of an orientation trace. `coeffs[k]` multiplies
/// `e^{-2πiks}`; index 0 is always zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrientationSeries {
    coeffs: Vec<Complex64>,
}

impl OrientationSeries {
    pub fn from_state(state: &RotorWavefunction) -> Self {
        Self::from_state_with(state, Coupling::Exact)
    }

    pub fn from_state_with(state: &RotorWavefunction, coupling: Coupling) -> Self {
        let basis = state.basis();
        let c = state.amplitudes();
        let top = basis.j_max() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); top + 1];
        for k in 0..c.len().saturating_sub(1) {
            let j = basis.j_of(k);
            let d = match coupling {
                Coupling::Exact => cos_coupling(j, basis.m()),
                Coupling::Half => 0.5,
            };
            coeffs[j as usize + 1] = c[k].conj() * c[k + 1] * (2.0 * d);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// `self += weight · other`.
    pub fn add_scaled(&mut self, other: &Self, weight: f64) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Complex64::new(0.0, 0.0));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * weight;
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Value at `s`; only `s mod 1` matters.
    pub fn value(&self, s: f64) -> f64 {
        let (sin, cos) = (2.0 * PI * s.rem_euclid(1.0)).sin_cos();
        self.eval_at(Complex64::new(cos, -sin))
    }

    fn eval_at(&self, z: Complex64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc.re
    }

    /// Values at `s = i / resolution`, `i = 0 .. resolution`.
    pub fn sample(&self, resolution: usize) -> Vec<f64> {
        (0..resolution)
            .map(|i| {
                let (sin, cos) = (2.0 * PI * i as f64 / resolution as f64).sin_cos();
                self.eval_at(Complex64::new(cos, -sin))
            })
            .collect()
    }
}

pub fn expectation_cos_theta(state: &RotorWavefunction) -> f64 {
    let basis = state.basis();
    state
        .amplitudes()
        .windows(2)
        .enumerate()
        .map(|(k, w)| 2.0 * cos_coupling(basis.j_of(k), basis.m()) * (w[0].conj() * w[1]).re)
        .sum()
}

/// Uniformly sampled orientation over one rotational period together with the
/// series it was sampled from.
#[derive(Debug, Clone)]
pub struct OrientationTrace {
    series: OrientationSeries,
    values: Vec<f64>,
}

impl OrientationTrace {
    pub fn from_series(series: OrientationSeries, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(OrientError::param(
                "resolution",
                format!("{resolution} samples per period; at least {MIN_RESOLUTION} required"),
            ));
        }
        let values = series.sample(resolution);
        Ok(Self { series, values })
    }

    pub fn series(&self) -> &OrientationSeries {
        &self.series
    }

    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn s_at(&self, i: usize) -> f64 {
        i as f64 / self.values.len() as f64
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.s_at(i), v))
    }

    pub fn value_at(&self, s: f64) -> f64 {
        self.series.value(s)
    }
}

pub fn orientation_trace(post_kick_state: &RotorWavefunction, resolution: usize) -> Result<OrientationTrace> {
    OrientationTrace::from_series(OrientationSeries::from_state(post_kick_state), resolution)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalStats {
    pub max_abs: f64,
    pub s_at_max: f64,
    pub signed_value: f64,
    pub duration: f64,
    pub threshold: f64,
    /// Start of the main revival interval (may be negative when it wraps past `s = 0`).
    pub interval_start: f64,
    /// Other intervals with `|value| >= threshold`, `(start, end)`.
    pub other_intervals: Vec<(f64, f64)>,
}

/// Largest `|value|` over the period and where it occurs.
fn locate_peak(trace: &OrientationTrace) -> (f64, f64) {
    let vals = trace.values();
    let n = vals.len();
    let (best, _) = vals
        .iter()
        .enumerate()
        .fold((0usize, -1.0), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    let y0 = vals[best].abs();
    let ym = vals[(best + n - 1) % n].abs();
    let yp = vals[(best + 1) % n].abs();
    let curvature = ym - 2.0 * y0 + yp;
    let coarse_s = trace.s_at(best);
    if curvature < 0.0 {
        let delta = (0.5 * (ym - yp) / curvature).clamp(-1.0, 1.0);
        let s = (coarse_s + delta / n as f64).rem_euclid(1.0);
        let refined = trace.value_at(s);
        if refined.abs() > y0 {
            return (s, refined);
        }
    }
    (coarse_s, vals[best])
}

/// First crossing of `|f| = gamma` from `inside` toward `outside`.
fn bisect_crossing(series: &OrientationSeries, gamma: f64, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > CROSSING_TOL {
        let mid = 0.5 * (inside + outside);
        if series.value(mid).abs() >= gamma {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Edge of the above-threshold interval that contains `s0`, walking along
/// the sample grid in direction `dir` (±1).
fn interval_edge(trace: &OrientationTrace, gamma: f64, s0: f64, dir: i64) -> Option<f64> {
    let n = trace.resolution() as i64;
    let base = (s0 * n as f64).floor() as i64;
    let first = if dir > 0 { base + 1 } else if (base as f64) < s0 * n as f64 { base } else { base - 1 };
    let mut prev = s0;
    for step in 0..n {
        let idx = first + dir * step;
        let s = idx as f64 / n as f64;
        let v = trace.values()[idx.rem_euclid(n) as usize];
        if v.abs() < gamma {
            return Some(bisect_crossing(trace.series(), gamma, prev, s));
        }
        prev = s;
    }
    None
}

pub fn revival_stats(trace: &OrientationTrace, gamma: f64) -> Result<RevivalStats> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(OrientError::param("gamma", format!("threshold must lie in (0, 1], got {gamma}")));
    }
    let (s_at_max, signed_value) = locate_peak(trace);
    let max_abs = signed_value.abs();
    let mut stats = RevivalStats {
        max_abs,
        s_at_max,
        signed_value,
        duration: 0.0,
        threshold: gamma,
        interval_start: s_at_max,
        other_intervals: Vec::new(),
    };
    if max_abs < gamma {
        return Ok(stats);
    }
    let (Some(end), Some(start)) = (
        interval_edge(trace, gamma, s_at_max, 1),
        interval_edge(trace, gamma, s_at_max, -1),
    ) else {
        // never below threshold: cannot happen for a zero-mean series
        stats.duration = 1.0;
        return Ok(stats);
    };
    stats.duration = end - start;
    stats.interval_start = start;
    stats.other_intervals = other_intervals(trace, gamma, start, end);
    Ok(stats)
}

fn other_intervals(trace: &OrientationTrace, gamma: f64, main_start: f64, main_end: f64) -> Vec<(f64, f64)> {
    let n = trace.resolution();
    let vals = trace.values();
    let in_main = |s: f64| {
        let rel = (s - main_start).rem_euclid(1.0);
        rel <= main_end - main_start
    };
    // scan from the end of the main interval
    let offset = ((main_end * n as f64).ceil() as i64).rem_euclid(n as i64) as usize;
    let mut out = Vec::new();
    let mut run: Option<usize> = None;
    for step in 0..=n {
        let i = offset + step;
        let above = step < n && vals[i % n].abs() >= gamma && !in_main(trace.s_at(i % n));
        match (run, above) {
            (None, true) => run = Some(i),
            (Some(first), false) => {
                let s_first = first as f64 / n as f64;
                let s_last = (i - 1) as f64 / n as f64;
                let start = bisect_crossing(trace.series(), gamma, s_first, s_first - 1.0 / n as f64);
                let end = bisect_crossing(trace.series(), gamma, s_last, s_last + 1.0 / n as f64);
                out.push((start.rem_euclid(1.0), end.rem_euclid(1.0)));
                run = None;
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxOrientation {
    pub max_abs: f64,
    pub s_at_max: f64,
    pub signed_value: f64,
}

pub fn max_orientation(post_kick_state: &RotorWavefunction) -> Result<MaxOrientation> {
    let trace = orientation_trace(post_kick_state, DEFAULT_RESOLUTION)?;
    let (s_at_max, signed_value) = locate_peak(&trace);
    Ok(MaxOrientation {
        max_abs: signed_value.abs(),
        s_at_max,
        signed_value,
    })
}

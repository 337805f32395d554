//! Conversion from laboratory pulse parameters to dimensionless kick areas.
//!
//! `A_HCP = μ0 ∫E_HCP dt / ħ`, `A_L = Δα ∫E_L² dt / (4ħ)` with `E_L` the
//! carrier envelope, and `τ_rot = πħ/B`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{OrientError, Result};
use crate::wavefunction::KickAreas;

/// CODATA 2018 values, SI.
pub mod constants {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    /// 1 D = 1e-21 / c  C·m.
    pub const DEBYE: f64 = 3.335_640_951_98e-30;
    pub const ANGSTROM3: f64 = 1e-30;
    pub const PICOSECOND: f64 = 1e-12;
    pub const KV_PER_CM: f64 = 1e5;
    pub const W_PER_CM2: f64 = 1e4;
    pub const PER_CM: f64 = 1e2;
}

use constants::*;

/// Temporal shape of a pulse of nominal duration `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    /// Constant over `T`.
    #[default]
    FlatTop,
    /// `sin²(πt/T)` over `[0, T]`.
    SineSquared,
    /// Gaussian with full width at half maximum `T`.
    Gaussian,
}

impl Envelope {
    /// `∫ shape dt / (peak · T)`.
    pub fn area_factor(self) -> f64 {
        match self {
            Envelope::FlatTop => 1.0,
            Envelope::SineSquared => 0.5,
            Envelope::Gaussian => (PI / (4.0 * std::f64::consts::LN_2)).sqrt(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "flat-top" | "flattop" | "flat" => Some(Envelope::FlatTop),
            "sine-squared" | "sin2" => Some(Envelope::SineSquared),
            "gaussian" => Some(Envelope::Gaussian),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Envelope::FlatTop => "flat-top",
            Envelope::SineSquared => "sine-squared",
            Envelope::Gaussian => "gaussian",
        }
    }
}

/// Laboratory parameters in customary units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPulse {
    pub b_cm1: f64,
    pub mu0_debye: f64,
    pub e_hcp_kv_cm: f64,
    pub hcp_duration_ps: f64,
    pub hcp_envelope: Envelope,
    /// Polarizability anisotropy as a volume; `None` skips `A_L`.
    pub delta_alpha_a3: Option<f64>,
    pub laser_intensity_w_cm2: f64,
    pub laser_duration_ps: f64,
    /// Shape of the intensity envelope.
    pub laser_envelope: Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conversion {
    pub tau_rot_ps: f64,
    pub a_hcp: f64,
    pub a_l: Option<f64>,
    pub hcp_duration_rel: f64,
    pub laser_duration_rel: f64,
}

impl Conversion {
    pub fn areas(&self) -> Result<KickAreas> {
        KickAreas::new(self.a_hcp, self.a_l.unwrap_or(0.0))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(OrientError::param(name, format!("must be positive, got {v}")));
    }
    Ok(())
}

/// `τ_rot = πħ/B = 1 / (2cB)` for `B` in wavenumbers.
pub fn rotational_period_ps(b_cm1: f64) -> Result<f64> {
    positive("b_cm1", b_cm1)?;
    let b_joule = PLANCK * SPEED_OF_LIGHT * b_cm1 * PER_CM;
    Ok(PI * HBAR / b_joule / PICOSECOND)
}

pub fn hcp_area(mu0_debye: f64, e_kv_cm: f64, duration_ps: f64, envelope: Envelope) -> Result<f64> {
    positive("mu0_debye", mu0_debye)?;
    positive("e_hcp_kv_cm", e_kv_cm)?;
    positive("hcp_duration_ps", duration_ps)?;
    let field_time = e_kv_cm * KV_PER_CM * duration_ps * PICOSECOND * envelope.area_factor();
    Ok(mu0_debye * DEBYE * field_time / HBAR)
}

/// `Δα ∫E² dt / 4ħ` with `E² = 2I/(cε0)` and `Δα_SI = 4πε0 Δα_vol`,
/// i.e. `2π Δα_vol ∫I dt / (cħ)`.
pub fn laser_area(delta_alpha_a3: f64, intensity_w_cm2: f64, duration_ps: f64, envelope: Envelope) -> Result<f64> {
    positive("delta_alpha_a3", delta_alpha_a3)?;
    positive("laser_intensity_w_cm2", intensity_w_cm2)?;
    positive("laser_duration_ps", duration_ps)?;
    let fluence = intensity_w_cm2 * W_PER_CM2 * duration_ps * PICOSECOND * envelope.area_factor();
    let delta_alpha_si = 4.0 * PI * VACUUM_PERMITTIVITY * delta_alpha_a3 * ANGSTROM3;
    let e2_time = 2.0 * fluence / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY);
    Ok(delta_alpha_si * e2_time / (4.0 * HBAR))
}

/// Anisotropy (Å³) that yields `a_l` for the given laser pulse.
pub fn implied_delta_alpha(a_l: f64, intensity_w_cm2: f64, duration_ps: f64, envelope: Envelope) -> Result<f64> {
    positive("a_l", a_l)?;
    let unit = laser_area(1.0, intensity_w_cm2, duration_ps, envelope)?;
    Ok(a_l / unit)
}

pub fn convert_physical_to_areas(p: &PhysicalPulse) -> Result<Conversion> {
    let tau_rot_ps = rotational_period_ps(p.b_cm1)?;
    let a_hcp = hcp_area(p.mu0_debye, p.e_hcp_kv_cm, p.hcp_duration_ps, p.hcp_envelope)?;
    let a_l = match p.delta_alpha_a3 {
        Some(da) => Some(laser_area(da, p.laser_intensity_w_cm2, p.laser_duration_ps, p.laser_envelope)?),
        None => None,
    };
    Ok(Conversion {
        tau_rot_ps,
        a_hcp,
        a_l,
        hcp_duration_rel: p.hcp_duration_ps / tau_rot_ps,
        laser_duration_rel: p.laser_duration_ps / tau_rot_ps,
    })
}

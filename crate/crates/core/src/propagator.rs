//! Impulsive propagator `U(s, 0) = e^{-iπJ²s} e^{iA_HCP cosθ} e^{iA_L cos²θ}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::AngularBasis;
use crate::error::{OrientError, Result};
use crate::operators::{build_cos2_theta, build_cos_theta, BandedSymmetricOperator};
use crate::spectral::{spectral_decompose, SpectralFactors};
use crate::wavefunction::{KickAreas, RotorWavefunction};

pub const DEFAULT_AUDIT_TOL: f64 = 1e-10;
/// Adaptive ladders stop doubling here.
pub const MAX_ADAPTIVE_JMAX: u32 = 2048;

impl SpectralFactors {
    /// `e^{i·area·A} ψ` through `V diag(e^{i·area·λ}) Vᵀ`.
    pub fn exp_apply(&self, amplitudes: &[Complex64], area: f64) -> Vec<Complex64> {
        let v = self.eigenvectors();
        let n = amplitudes.len();
        let mut projected = vec![Complex64::new(0.0, 0.0); n];
        for (k, p) in projected.iter_mut().enumerate() {
            let col = v.column(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, c) in col.iter().zip(amplitudes) {
                acc += c * *x;
            }
            *p = acc * Complex64::from_polar(1.0, area * self.eigenvalues()[k]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, p) in projected.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(v.column(k).iter()) {
                *o += p * *x;
            }
        }
        out
    }
}

fn check_basis(state: &RotorWavefunction, basis: &AngularBasis) -> Result<()> {
    if state.basis() != basis {
        return Err(OrientError::BasisMismatch {
            state_m: state.basis().m(),
            state_jmax: state.basis().j_max(),
            op_m: basis.m(),
            op_jmax: basis.j_max(),
        });
    }
    Ok(())
}

pub fn kick_operator_apply(
    state: &RotorWavefunction,
    op: &BandedSymmetricOperator,
    area: f64,
) -> Result<RotorWavefunction> {
    check_basis(state, op.basis())?;
    if area == 0.0 {
        return Ok(state.clone());
    }
    let factors = spectral_decompose(op)?;
    RotorWavefunction::from_amplitudes(*state.basis(), factors.exp_apply(state.amplitudes(), area))
}

/// Eigendecompositions of both kick operators on one ladder.
#[derive(Debug, Clone)]
pub struct KickFactors {
    basis: AngularBasis,
    cos: SpectralFactors,
    cos2: SpectralFactors,
}

impl KickFactors {
    pub fn new(basis: AngularBasis) -> Result<Self> {
        Ok(Self {
            basis,
            cos: spectral_decompose(&build_cos_theta(&basis))?,
            cos2: spectral_decompose(&build_cos2_theta(&basis))?,
        })
    }

    pub fn basis(&self) -> &AngularBasis {
        &self.basis
    }

    pub fn cos(&self) -> &SpectralFactors {
        &self.cos
    }

    pub fn cos2(&self) -> &SpectralFactors {
        &self.cos2
    }
}

/// Which kick factor acts on the state first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KickOrder {
    /// `e^{iA_HCP cosθ} e^{iA_L cos²θ} ψ`: laser factor first.
    #[default]
    LaserFirst,
    HcpFirst,
}

pub fn apply_hybrid_kick_with(
    state: &RotorWavefunction,
    areas: KickAreas,
    factors: &KickFactors,
    order: KickOrder,
) -> Result<RotorWavefunction> {
    check_basis(state, factors.basis())?;
    let amps = state.amplitudes().to_vec();
    let laser = |a: Vec<Complex64>| {
        if areas.a_l() == 0.0 { a } else { factors.cos2.exp_apply(&a, areas.a_l()) }
    };
    let hcp = |a: Vec<Complex64>| {
        if areas.a_hcp() == 0.0 { a } else { factors.cos.exp_apply(&a, areas.a_hcp()) }
    };
    let amps = match order {
        KickOrder::LaserFirst => hcp(laser(amps)),
        KickOrder::HcpFirst => laser(hcp(amps)),
    };
    RotorWavefunction::from_amplitudes(*state.basis(), amps)
}

/// Post-pulse state `e^{iA_HCP cosθ} e^{iA_L cos²θ} ψ` on the state's own ladder.
pub fn apply_hybrid_kick(state: &RotorWavefunction, areas: KickAreas) -> Result<RotorWavefunction> {
    let factors = KickCache::shared().get(*state.basis())?;
    apply_hybrid_kick_with(state, areas, &factors, KickOrder::LaserFirst)
}

/// Free rotation `e^{-iπJ²s}`; exact identity for integer `s`.
pub fn free_evolve(state: &RotorWavefunction, s: f64) -> RotorWavefunction {
    let basis = *state.basis();
    let mut out = state.clone();
    for (k, c) in out.amplitudes_mut().iter_mut().enumerate() {
        let j = u64::from(basis.j_of(k));
        // phase π·(j(j+1)·s mod 2)
        let turns = ((j * (j + 1)) as f64 * s).rem_euclid(2.0);
        *c *= Complex64::from_polar(1.0, -PI * turns);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditReport {
    pub ok: bool,
    pub tail_population: f64,
    pub j_max: u32,
    pub tol: f64,
}

/// Population of the two highest levels of the ladder.
pub fn truncation_audit(state: &RotorWavefunction, tol: f64) -> AuditReport {
    let pops = state.populations();
    let tail: f64 = pops.iter().rev().take(2).sum();
    AuditReport {
        ok: tail < tol,
        tail_population: tail,
        j_max: state.basis().j_max(),
        tol,
    }
}

/// Initial ladder height for adaptive kicks from level `j0`.
pub fn initial_jmax(areas: &KickAreas, j0: u32) -> u32 {
    let reach = (4.0 * (areas.a_hcp().abs() + 2.0 * areas.a_l())).ceil() as u32;
    j0 + reach.max(16)
}

/// Read-mostly cache of kick eigendecompositions keyed by ladder.
#[derive(Debug, Default)]
pub struct KickCache {
    entries: RwLock<HashMap<AngularBasis, Arc<KickFactors>>>,
}

impl KickCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn shared() -> &'static KickCache {
        static CACHE: OnceLock<KickCache> = OnceLock::new();
        CACHE.get_or_init(KickCache::new)
    }

    pub fn get(&self, basis: AngularBasis) -> Result<Arc<KickFactors>> {
        if let Some(f) = self.entries.read().expect("kick cache poisoned").get(&basis) {
            return Ok(Arc::clone(f));
        }
        let built = Arc::new(KickFactors::new(basis)?);
        let mut w = self.entries.write().expect("kick cache poisoned");
        Ok(Arc::clone(w.entry(basis).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("kick cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A kicked state whose ladder passed the truncation audit.
#[derive(Debug, Clone)]
pub struct ConvergedKick {
    pub state: RotorWavefunction,
    pub audit: AuditReport,
}

impl ConvergedKick {
    pub fn j_max(&self) -> u32 {
        self.audit.j_max
    }
}

/// Kick `|j0, m>`, doubling `j_max` until the audit passes.
pub fn kick_level_converged(
    areas: KickAreas,
    m: i32,
    j0: u32,
    tol: f64,
    cache: &KickCache,
) -> Result<ConvergedKick> {
    let mut j_max = initial_jmax(&areas, j0).max(m.unsigned_abs() + 1);
    loop {
        let basis = AngularBasis::new(m, j_max)?;
        let factors = cache.get(basis)?;
        let start = RotorWavefunction::level(basis, j0)?;
        let state = apply_hybrid_kick_with(&start, areas, &factors, KickOrder::LaserFirst)?;
        let audit = truncation_audit(&state, tol);
        if audit.ok {
            return Ok(ConvergedKick { state, audit });
        }
        if j_max >= MAX_ADAPTIVE_JMAX {
            return Err(OrientError::TruncationInsufficient {
                j_max,
                tail: audit.tail_population,
            });
        }
        j_max = (2 * j_max).min(MAX_ADAPTIVE_JMAX);
    }
}

/// Cold-molecule post-pulse state from `|0, 0>`.
pub fn kick_ground_state(areas: KickAreas) -> Result<ConvergedKick> {
    kick_level_converged(areas, 0, 0, DEFAULT_AUDIT_TOL, KickCache::shared())
}

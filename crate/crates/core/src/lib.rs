//! Field-free orientation of a linear rigid rotor kicked by a half-cycle
//! pulse combined with a short nonresonant laser pulse.
//!
//! The post-pulse state is `e^{iA_HCP cosθ} e^{iA_L cos²θ} |j0, m0>`; free
//! rotation afterwards is analytic, so orientation traces, revival statistics,
//! projections on optimal target states, Boltzmann averages and parameter
//! scans are all built on the kicked amplitudes.
//!
//! Scans and thermal channel sums run on rayon when the `parallel` feature is
//! on (the default) and sequentially otherwise.

pub mod basis;
pub mod error;
pub mod exec;
pub mod observables;
pub mod operators;
pub mod optimal;
pub mod oracle;
pub mod propagator;
pub mod scan;
pub mod spectral;
pub mod table;
pub mod thermal;
pub mod units;
pub mod wavefunction;

pub use basis::AngularBasis;
pub use error::{OrientError, Result};
pub use exec::Execution;
pub use observables::{
    expectation_cos_theta, max_orientation, orientation_trace, revival_stats, OrientationSeries, OrientationTrace,
    RevivalStats,
};
pub use operators::{build_cos2_theta, build_cos_theta, build_j_squared, BandedSymmetricOperator};
pub use optimal::{Direction, OptimalState};
pub use propagator::{apply_hybrid_kick, free_evolve, kick_ground_state, truncation_audit, KickCache};
pub use scan::{Axis, LineScanSpec, ScanSpec};
pub use spectral::{spectral_decompose, SpectralFactors};
pub use thermal::ThermalConfig;
pub use wavefunction::{KickAreas, RotorWavefunction};

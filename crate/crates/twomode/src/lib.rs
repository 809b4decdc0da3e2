//! Quantum backaction noise engine for a two-mode optomechanical cavity
//! with asymmetric dissipation.
//!
//! A membrane inside a driven optical cavity splits it into two tunnel-coupled
//! modes; the membrane position modulates the splitting. When the two ports
//! decay at different rates the optical normal modes see *correlated* noise,
//! and the backaction force spectrum S_FF[omega] develops Fano-style
//! interference that can null the heating sideband completely.
//!
//! The crate computes this spectrum along four independent routes and
//! cross-certifies them:
//!
//! * [`noise::amplitudes_exact`] — closed two-pole form of the noise
//!   amplitudes, valid at any mode splitting,
//! * [`noise::amplitudes_large_j`] — the adiabatic (large-splitting) limit,
//! * [`noise::amplitudes_generic`] — the generic dissipation-channel form
//!   (driven port + internal loss),
//! * [`oracle::freq_solve`] — direct frequency-domain inversion of the
//!   Langevin equations, sharing no algebra with the closed forms, plus a
//!   time-domain stochastic integrator with Welch transfer-function
//!   estimation.
//!
//! On top of the spectrum sit the physical figures of merit: optical damping
//! and effective occupancy ([`backaction::cooling_figures`]), the cooling
//! detuning [`backaction::delta_cold`], measurement/backaction timescales for
//! QND phonon detection, and a quantum-jump telegraph simulator.
//!
//! # Conventions
//!
//! All rates are energy decay rates in one shared frequency unit (amplitudes
//! decay at kappa/2). Fourier transforms use `X[w] = ∫ e^{iwt} X(t) dt`, so
//! `d/dt -> -iw` and `X†[w] = (X[-w])†`. The unsymmetrized spectrum is never
//! symmetrized: positive frequencies cool, negative frequencies heat.

pub mod backaction;
pub mod export;
pub mod measurement;
pub mod noise;
pub mod optimize;
pub mod oracle;
pub mod params;
pub mod steady_state;
pub mod validation;

pub use params::{DerivedParams, DriveConfig, GenericDerived, GenericDissipation, SystemParams};

use thiserror::Error;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Error type for every operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
    #[error("negative decay rate: {0}")]
    NegativeRate(&'static str),
    #[error("zero mode splitting (J must be > 0)")]
    ZeroModeSplitting,
    #[error("zero mechanical frequency (omega_m must be > 0)")]
    ZeroMechanicalFrequency,
    #[error("negative thermal occupancy")]
    NegativeOccupancy,
    #[error("all ports closed (kappa_L + kappa_R must be > 0)")]
    AllPortsClosed,
    #[error("zero drive: at least one input amplitude must be nonzero")]
    ZeroDrive,
    #[error("degenerate steady state (singular response matrix)")]
    DegenerateSteadyState,
    #[error("undriven symmetric mode (<a_+> = 0)")]
    UndrivenSymmetricMode,
    #[error("undriven + channel (kappa_dr+ = 0)")]
    UndrivenPlusChannel,
    #[error("one-port form requires kappa_R = 0")]
    KappaRNotZero,
    #[error("no net optical damping (Gamma = 0, n_eff undefined)")]
    NoNetOpticalDamping,
    #[error("empty frequency grid")]
    EmptyGrid,
    #[error("non-monotone frequency grid")]
    NonMonotoneGrid,
    #[error("duration must be positive")]
    ZeroDuration,
    #[error("timestep too large: trajectory diverging")]
    TimestepTooLarge,
    #[error("record too short for requested spectral resolution")]
    InsufficientRecord,
    #[error("causality violated: tau must be >= 0")]
    NegativeTau,
    #[error("objective undefined over the whole scan range: {0}")]
    ObjectiveUndefined(&'static str),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

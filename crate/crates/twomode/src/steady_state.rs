//! Classical driven steady state of the two coupled normal modes, the
//! drive-dependent coupling scalars, and the adiabatic-mode quantities.
//!
//! With kappa_bar = (kL+kR)/2, dk = (kL-kR)/2 and detuning delta measured
//! upward from the symmetric-mode resonance, the noise-free equations of
//! motion integrated here are
//!
//! ```text
//! d<a+>/dt = -(kbar/2 - i delta) <a+> - dk/2 <a-> + sqrt(kL/2) aL + sqrt(kR/2) aR
//! d<a->/dt = -(kbar/2 - i delta + 2iJ) <a-> - dk/2 <a+> + sqrt(kL/2) aL - sqrt(kR/2) aR
//! ```
//!
//! The rotating-frame phase signs go with the transform convention
//! `X[w] = ∫ e^{iwt} X(t) dt`; this pairing is what reproduces the
//! downstream checkpoints (heating-noise null at negative frequency for the
//! cooling detuning, second cavity resonance at +2J).

use crate::params::{validate, DriveConfig, SystemParams};
use crate::{C64, Error, Result};

/// Steady-state amplitudes and the scalars every spectral formula consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Symmetric-mode amplitude <a+>.
    pub a_plus: C64,
    /// Antisymmetric-mode amplitude <a->.
    pub a_minus: C64,
    /// Many-photon coupling G = g |<a+>|.
    pub g_drive: f64,
    /// Mode imbalance eps_m, defined through eps_m*/2J = <a->/<a+>.
    pub eps_m: C64,
    /// Drive imbalance Lambda; +1 for left-only, -1 for right-only drive.
    pub lambda: C64,
}

impl SteadyState {
    /// Complex coupling g <a+>*: carries the drive phase that the scalar
    /// `g_drive` drops. Noise amplitudes built with this prefactor agree with
    /// the direct Langevin solution for arbitrary drive phases.
    pub fn g_complex(&self, p: &SystemParams) -> C64 {
        p.g * self.a_plus.conj()
    }
}

/// Drift-matrix entries of the coupled-mode equations. Shared definitional
/// constants; each consumer assembles its own solution from them.
pub(crate) struct Drift {
    /// Decay+detuning of the + mode: kbar/2 - i delta.
    pub d_plus: C64,
    /// Same for the - mode, offset by the 2J splitting.
    pub d_minus: C64,
    /// Cross-coupling dk/2 induced by asymmetric decay.
    pub cross: C64,
}

pub(crate) fn drift(p: &SystemParams, delta: f64) -> Drift {
    let kbar = p.kappa_bar();
    Drift {
        d_plus: C64::new(0.5 * kbar, -delta),
        d_minus: C64::new(0.5 * kbar, 2.0 * p.j - delta),
        cross: C64::new(0.5 * p.delta_kappa(), 0.0),
    }
}

/// Input couplings into the (+, -) equations: b± = sqrt(kL/2) aL ± sqrt(kR/2) aR.
pub(crate) fn drive_inputs(p: &SystemParams, d: &DriveConfig) -> (C64, C64) {
    let l = (0.5 * p.kappa_l).sqrt() * d.alpha_l;
    let r = (0.5 * p.kappa_r).sqrt() * d.alpha_r;
    (l + r, l - r)
}

/// Solve the 2x2 linear system for the driven steady state.
pub fn solve_steady_state(p: &SystemParams, d: &DriveConfig) -> Result<SteadyState> {
    let p = validate(&p)?;
    if !d.is_driven() {
        return Err(Error::ZeroDrive);
    }
    let dr = drift(&p, d.delta);
    let (b_plus, b_minus) = drive_inputs(&p, d);
    let det = dr.d_plus * dr.d_minus - dr.cross * dr.cross;
    if det.norm() == 0.0 {
        return Err(Error::DegenerateSteadyState);
    }
    let a_plus = (dr.d_minus * b_plus - dr.cross * b_minus) / det;
    let a_minus = (dr.d_plus * b_minus - dr.cross * b_plus) / det;
    let (g_drive, eps_m, lambda) = scalars_from(a_plus, a_minus, &p, d)?;
    Ok(SteadyState {
        a_plus,
        a_minus,
        g_drive,
        eps_m,
        lambda,
    })
}

fn scalars_from(
    a_plus: C64,
    a_minus: C64,
    p: &SystemParams,
    d: &DriveConfig,
) -> Result<(f64, C64, C64)> {
    if a_plus.norm() == 0.0 {
        return Err(Error::UndrivenSymmetricMode);
    }
    let g_drive = p.g * a_plus.norm();
    let eps_m = 2.0 * p.j * (a_minus / a_plus).conj();
    Ok((g_drive, eps_m, d.lambda(p)))
}

/// Extract (G, eps_m, Lambda) from a steady state.
pub fn coupling_scalars(
    ss: &SteadyState,
    p: &SystemParams,
    d: &DriveConfig,
) -> Result<(f64, C64, C64)> {
    scalars_from(ss.a_plus, ss.a_minus, p, d)
}

/// Residual of the zero-derivative equations at (a+, a-), relative to the
/// drive magnitude. A correct solution sits at machine precision.
pub fn steady_state_residual(ss: &SteadyState, p: &SystemParams, d: &DriveConfig) -> f64 {
    let dr = drift(p, d.delta);
    let (b_plus, b_minus) = drive_inputs(p, d);
    let r_plus = dr.d_plus * ss.a_plus + dr.cross * ss.a_minus - b_plus;
    let r_minus = dr.d_minus * ss.a_minus + dr.cross * ss.a_plus - b_minus;
    let scale = b_plus.norm().max(b_minus.norm());
    (r_plus.norm().max(r_minus.norm())) / scale
}

/// Lower adiabatic mode at frozen (dimensionless) displacement x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticMode {
    /// Mixing angle: pi/4 at x = 0, -> 0 as the mode localizes left.
    pub theta: f64,
    /// Frequency omega_c - sqrt(J^2 + (g x)^2); even in x.
    pub omega_plus: f64,
    /// Damping cos^2(theta) kL + sin^2(theta) kR; linear in x near 0.
    pub kappa_plus: f64,
}

/// Evaluate the adiabatic mixing angle, frequency and damping at x.
///
/// The x-linear slope of `kappa_plus` at the origin is the dissipative
/// coupling that drives all interference physics in this model.
pub fn adiabatic_mode(x: f64, p: &SystemParams) -> AdiabaticMode {
    let u = p.g * x / p.j;
    // cot(2 theta) = u with 2 theta in (0, pi).
    let theta = 0.5 * (std::f64::consts::FRAC_PI_2 - u.atan());
    let root = (p.j * p.j + (p.g * x) * (p.g * x)).sqrt();
    AdiabaticMode {
        theta,
        omega_plus: p.omega_c - root,
        kappa_plus: p.kappa_bar() + p.g * x * p.delta_kappa() / root,
    }
}

/// x^2-coupling coefficient g^2/2J of the adiabatically eliminated model.
pub fn quad_coupling(p: &SystemParams) -> f64 {
    p.g * p.g / (2.0 * p.j)
}

//! Backaction noise amplitudes and the force noise spectral density.
//!
//! The optical force on the membrane, linearized about the driven steady
//! state, is a sum over the vacuum noise entering each port:
//!
//! ```text
//! F[w] = sum_i  A_i[w] xi_i[w] + A_i*[-w] xi_i†[w],      i = L, R
//! S_FF[w] = |A_L[w]|^2 + |A_R[w]|^2
//! ```
//!
//! Each amplitude is a two-pole object: the noise can excite the near-resonant
//! symmetric mode or the far-detuned antisymmetric mode, and the two paths
//! interfere. Everything in this module evaluates that interference along a
//! different route:
//!
//! * [`amplitudes_exact`] — closed two-pole form, any splitting;
//! * [`amplitudes_large_j`] — adiabatic limit, where each amplitude collapses
//!   to a Fano lineshape (resonant pole against a flat background);
//! * [`amplitudes_generic`] — generic driven + internal-loss channels;
//! * closed spectral densities [`sff_large_j_closed`], [`sff_oneport_closed`]
//!   (exact at kappa_R = 0), [`sff_generic_closed`].
//!
//! The amplitudes carry the steady-state drive phase via g <a+>* so that all
//! routes agree with the direct Langevin solution in phase, not just in
//! modulus. The mode-imbalance scalar enters unconjugated: with
//! eps_m = 2J (<a->/<a+>)*, the closed two-pole form consumes eps_m itself
//! (the opposite choice fails the inversion oracle for complex drives).
//! It is fed from the exact steady state by default;
//! [`EpsilonSource::LargeJLimit`] switches to its leading-order form for
//! reproducing the bare adiabatic limits.

use crate::params::{
    derive, derive_generic, DriveConfig, FlatConfig, GenericDissipation, SystemParams,
};
use crate::steady_state::{solve_steady_state, SteadyState};
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn i_c(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// Which route produced a set of amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeVariant {
    Exact,
    LargeJ,
    Generic,
}

/// Complex force-noise amplitudes at one frequency.
///
/// For the two-port forms `a_l`/`a_r` are the port amplitudes; for the
/// generic form they are the driven/internal channel amplitudes in that
/// order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseAmplitudes {
    pub a_l: C64,
    pub a_r: C64,
    pub omega: f64,
    pub variant: AmplitudeVariant,
}

impl NoiseAmplitudes {
    /// |A_L|^2 + |A_R|^2: the unsymmetrized spectral density sample.
    pub fn sff(&self) -> f64 {
        self.a_l.norm_sqr() + self.a_r.norm_sqr()
    }
}

/// Where the eps_m scalar entering the exact amplitudes comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonSource {
    /// Exact steady state (default).
    #[default]
    ExactSteadyState,
    /// Leading order in 1/J: eps_m = Lambda*(-delta + i kbar/2) - i dk/2.
    LargeJLimit,
}

/// Precomputed state for evaluating amplitudes over many frequencies.
pub struct AmplitudeEngine {
    p: SystemParams,
    delta: f64,
    kappa_bar: f64,
    delta_kappa: f64,
    j_tilde: C64,
    delta_j: C64,
    g_complex: C64,
    eps_m: C64,
    lambda: C64,
}

impl AmplitudeEngine {
    pub fn new(p: &SystemParams, d: &DriveConfig) -> Result<Self> {
        Self::with_epsilon(p, d, EpsilonSource::ExactSteadyState)
    }

    pub fn with_epsilon(p: &SystemParams, d: &DriveConfig, src: EpsilonSource) -> Result<Self> {
        let dp = derive(p)?;
        let ss = solve_steady_state(p, d)?;
        Ok(Self::from_steady_state(p, d, &dp_tuple(&dp), &ss, src))
    }

    fn from_steady_state(
        p: &SystemParams,
        d: &DriveConfig,
        dp: &(f64, f64, C64, C64),
        ss: &SteadyState,
        src: EpsilonSource,
    ) -> Self {
        let (kappa_bar, delta_kappa, j_tilde, delta_j) = *dp;
        let eps_m = match src {
            EpsilonSource::ExactSteadyState => ss.eps_m,
            EpsilonSource::LargeJLimit => {
                ss.lambda.conj() * C64::new(-d.delta, 0.5 * kappa_bar) - i_c(0.5 * delta_kappa)
            }
        };
        Self {
            p: *p,
            delta: d.delta,
            kappa_bar,
            delta_kappa,
            j_tilde,
            delta_j,
            g_complex: ss.g_complex(p),
            eps_m,
            lambda: ss.lambda,
        }
    }

    /// Closed two-pole amplitudes, valid at any splitting.
    pub fn exact(&self, omega: f64) -> NoiseAmplitudes {
        let j2 = 2.0 * self.p.j;
        let idk = i_c(0.5 * self.delta_kappa);
        let p1 = C64::new(omega + self.delta, 0.5 * self.kappa_bar) - self.delta_j;
        let p2 = p1 - 2.0 * self.j_tilde;
        let pref = i_c(1.0 / SQRT_2) * self.g_complex / (2.0 * self.j_tilde);
        let mut out = [C64::new(0.0, 0.0); 2];
        for (slot, (sign, kappa)) in out
            .iter_mut()
            .zip([(1.0, self.p.kappa_l), (-1.0, self.p.kappa_r)])
        {
            let weight = C64::new(1.0, 0.0) + sign * self.eps_m / j2;
            let n1 = self.eps_m + (idk - sign * self.delta_j) * weight;
            let n2 = C64::new(-sign * j2, 0.0) + (idk + sign * self.delta_j) * weight;
            *slot = pref * kappa.sqrt() * (n1 / p1 - n2 / p2);
        }
        NoiseAmplitudes {
            a_l: out[0],
            a_r: out[1],
            omega,
            variant: AmplitudeVariant::Exact,
        }
    }

    /// Leading order in 1/J: a single Fano lineshape per port, with the
    /// antisymmetric path reduced to the flat background ∓1.
    pub fn large_j(&self, omega: f64) -> NoiseAmplitudes {
        let resonant = C64::new(-self.delta, 0.5 * self.kappa_bar)
            / C64::new(omega + self.delta, 0.5 * self.kappa_bar)
            * self.lambda.conj();
        let pref = i_c(1.0 / SQRT_2) * self.g_complex / (2.0 * self.p.j);
        NoiseAmplitudes {
            a_l: pref * self.p.kappa_l.sqrt() * (resonant - 1.0),
            a_r: pref * self.p.kappa_r.sqrt() * (resonant + 1.0),
            omega,
            variant: AmplitudeVariant::LargeJ,
        }
    }
}

fn dp_tuple(dp: &crate::params::DerivedParams) -> (f64, f64, C64, C64) {
    (dp.kappa_bar, dp.delta_kappa, dp.j_tilde, dp.delta_j)
}

/// Exact noise amplitudes at one frequency.
pub fn amplitudes_exact(omega: f64, p: &SystemParams, d: &DriveConfig) -> Result<NoiseAmplitudes> {
    Ok(AmplitudeEngine::new(p, d)?.exact(omega))
}

/// Large-splitting noise amplitudes at one frequency.
pub fn amplitudes_large_j(
    omega: f64,
    p: &SystemParams,
    d: &DriveConfig,
) -> Result<NoiseAmplitudes> {
    Ok(AmplitudeEngine::new(p, d)?.large_j(omega))
}

/// Generic-channel steady state: the + / - amplitudes under a drive through
/// the driven channel only.
pub fn generic_steady_state(
    gd: &GenericDissipation,
    j: f64,
    delta: f64,
    alpha_in: C64,
) -> Result<(C64, C64)> {
    let der = derive_generic(gd, j)?;
    if alpha_in.norm_sqr() == 0.0 {
        return Err(Error::ZeroDrive);
    }
    let sp_dr = gd.kappa_dr_plus.sqrt();
    let sm_dr = gd.kappa_dr_minus.sqrt();
    let c = C64::new(0.5 * der.delta_kappa, 0.0);
    let u_plus = C64::new(0.5 * der.kappa_plus, -delta);
    let u_minus = C64::new(0.5 * der.kappa_minus, 2.0 * j - delta);
    let det = u_plus * u_minus - c * c;
    if det.norm() == 0.0 {
        return Err(Error::DegenerateSteadyState);
    }
    let a_plus = (u_minus * sp_dr - c * sm_dr) * alpha_in / det;
    let a_minus = (u_plus * sm_dr - c * sp_dr) * alpha_in / det;
    Ok((a_plus, a_minus))
}

/// Generic-channel noise amplitudes, labeled (driven, internal).
///
/// The drive is applied through the driven channel with amplitude
/// `d.alpha_l` (`alpha_r` has no meaning here and is ignored).
pub fn amplitudes_generic(
    omega: f64,
    gd: &GenericDissipation,
    j: f64,
    d: &DriveConfig,
    g: f64,
) -> Result<NoiseAmplitudes> {
    let der = derive_generic(gd, j)?;
    let (a_plus, a_minus) = generic_steady_state(gd, j, d.delta, d.alpha_l)?;
    if a_plus.norm() == 0.0 {
        return Err(Error::UndrivenSymmetricMode);
    }
    let eps = 2.0 * j * (a_minus / a_plus).conj();
    let g_complex = g * a_plus.conj();
    let j2 = 2.0 * j;
    let c = C64::new(0.5 * der.delta_kappa, 0.0);
    let dlk = der.delta_kappa_modes;
    // Root values of the mode responses: at the first pole the + response
    // collapses to -i dJ, at the second the - response does.
    let u_plus_r1 = -i_c(1.0) * der.delta_j;
    let u_minus_r1 = C64::new(-dlk, j2) - i_c(1.0) * der.delta_j;
    let u_plus_r2 = C64::new(dlk, -j2) + i_c(1.0) * der.delta_j;
    let u_minus_r2 = i_c(1.0) * der.delta_j;
    let p1 = C64::new(omega + d.delta, 0.5 * der.kappa_plus) - der.delta_j;
    let p2 = p1 - 2.0 * der.j_tilde;
    let pref = g_complex / (2.0 * der.j_tilde);

    let mut out = [C64::new(0.0, 0.0); 2];
    let channels = [
        (1.0, gd.kappa_dr_plus.sqrt(), gd.kappa_dr_minus.sqrt()),
        (-1.0, gd.kappa_int_plus.sqrt(), gd.kappa_int_minus.sqrt()),
    ];
    for (slot, (sign, sp, sm)) in out.iter_mut().zip(channels) {
        // Numerators of the chi-combination  sign*(u+ sm) - c sp
        //   + (eps/2J)(u- sp - sign*c sm), evaluated at the two roots.
        let n1 = sign * u_plus_r1 * sm - c * sp + eps / j2 * (u_minus_r1 * sp - sign * c * sm);
        let n2 = sign * u_plus_r2 * sm - c * sp + eps / j2 * (u_minus_r2 * sp - sign * c * sm);
        *slot = pref * (n1 / p1 - n2 / p2);
    }
    Ok(NoiseAmplitudes {
        a_l: out[0],
        a_r: out[1],
        omega,
        variant: AmplitudeVariant::Generic,
    })
}

/// Spectral-density backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SffVariant {
    /// |A|^2 sum over the exact amplitudes.
    Exact,
    /// |A|^2 sum over the large-J amplitudes.
    LargeJ,
    /// Closed one-port expression (requires kappa_R = 0, exact in J).
    OnePort,
    /// Closed generic-channel expression via the two-port channel mapping
    /// (leading order in 1/J, small internal loss).
    Generic,
}

impl std::fmt::Display for SffVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SffVariant::Exact => "exact",
            SffVariant::LargeJ => "large-j",
            SffVariant::OnePort => "one-port",
            SffVariant::Generic => "generic",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SffVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SffVariant::Exact),
            "large-j" => Ok(SffVariant::LargeJ),
            "one-port" => Ok(SffVariant::OnePort),
            "generic" => Ok(SffVariant::Generic),
            other => Err(Error::BadConfig(format!("unknown variant `{other}`"))),
        }
    }
}

/// S_FF[omega] through the selected backend.
pub fn sff(omega: f64, p: &SystemParams, d: &DriveConfig, variant: SffVariant) -> Result<f64> {
    match variant {
        SffVariant::Exact => Ok(amplitudes_exact(omega, p, d)?.sff()),
        SffVariant::LargeJ => Ok(amplitudes_large_j(omega, p, d)?.sff()),
        SffVariant::OnePort => sff_oneport_closed(omega, p, d),
        SffVariant::Generic => {
            sff_generic_closed(omega, &GenericDissipation::from_two_port(p), p.j, d, p.g)
        }
    }
}

/// Closed leading-order spectral density: a flat floor kL kR / kbar^2 plus
/// one Fano lineshape whose numerator the drive detuning can null.
pub fn sff_large_j_closed(omega: f64, p: &SystemParams, d: &DriveConfig) -> Result<f64> {
    let ss = solve_steady_state(p, d)?;
    let kbar = p.kappa_bar();
    let dk = p.delta_kappa();
    let g2 = ss.g_drive * ss.g_drive;
    let lam = ss.lambda;
    let x = C64::new(dk / kbar * (omega + 2.0 * d.delta), 0.0)
        + C64::new(d.delta, 0.5 * kbar) * (lam - dk / kbar);
    let y = C64::new(omega + d.delta, 0.5 * kbar);
    Ok(g2 / (4.0 * p.j * p.j)
        * kbar
        * (p.kappa_l * p.kappa_r / (kbar * kbar) + x.norm_sqr() / y.norm_sqr()))
}

/// Closed one-port spectral density (kappa_R = 0), exact at any splitting.
pub fn sff_oneport_closed(omega: f64, p: &SystemParams, d: &DriveConfig) -> Result<f64> {
    if p.kappa_r != 0.0 {
        return Err(Error::KappaRNotZero);
    }
    let ss = solve_steady_state(p, d)?;
    let g2 = ss.g_drive * ss.g_drive;
    let (j, dl, kl) = (p.j, d.delta, p.kappa_l);
    let num = j * (omega + 2.0 * dl) - dl * (omega + dl);
    let den = 2.0 * j * C64::new(omega + dl, 0.25 * kl)
        - (omega + dl) * C64::new(omega + dl, 0.5 * kl);
    Ok(2.0 * g2 * kl / ((2.0 * j - dl) * (2.0 * j - dl)) * (num * num) / den.norm_sqr())
}

/// Closed generic-channel spectral density, leading order in 1/J and in the
/// internal loss.
pub fn sff_generic_closed(
    omega: f64,
    gd: &GenericDissipation,
    j: f64,
    d: &DriveConfig,
    g: f64,
) -> Result<f64> {
    let der = derive_generic(gd, j)?;
    let (a_plus, _) = generic_steady_state(gd, j, d.delta, d.alpha_l)?;
    let g2 = (g * a_plus.norm()).powi(2);
    // t_dr/t_int -> 0 when the internal channel only opens on the - side.
    let ratio = if gd.kappa_int_minus == 0.0 || der.t_int.is_infinite() {
        0.0
    } else if gd.kappa_int_plus == 0.0 {
        0.0
    } else {
        der.t_dr / der.t_int
    };
    let driven = gd.kappa_dr_minus * (omega + 2.0 * d.delta).powi(2);
    let internal = gd.kappa_int_minus
        * C64::new(
            omega + d.delta * (1.0 - ratio),
            0.5 * der.kappa_plus * (1.0 + ratio),
        )
        .norm_sqr();
    let y = C64::new(omega + d.delta, 0.5 * der.kappa_plus);
    Ok(g2 / (4.0 * j * j) * (driven + internal) / y.norm_sqr())
}

/// Sampled spectrum with full provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub params_snapshot: FlatConfig,
    pub variant: SffVariant,
}

/// Sample the selected S_FF over a monotone frequency grid.
pub fn spectrum_series(
    grid: &[f64],
    p: &SystemParams,
    d: &DriveConfig,
    variant: SffVariant,
) -> Result<SpectrumSeries> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneGrid);
    }
    // One steady-state solve for the whole grid; closed forms are cheap
    // enough to go point by point.
    let values: Vec<f64> = match variant {
        SffVariant::Exact => {
            let eng = AmplitudeEngine::new(p, d)?;
            grid.iter().map(|&w| eng.exact(w).sff()).collect()
        }
        SffVariant::LargeJ => {
            let eng = AmplitudeEngine::new(p, d)?;
            grid.iter().map(|&w| eng.large_j(w).sff()).collect()
        }
        SffVariant::OnePort | SffVariant::Generic => grid
            .iter()
            .map(|&w| sff(w, p, d, variant))
            .collect::<Result<_>>()?,
    };
    Ok(SpectrumSeries {
        omegas: grid.to_vec(),
        values,
        params_snapshot: FlatConfig::from_parts(p, d),
        variant,
    })
}

//! Physical parameters, derived scalars and the generic dissipation-channel
//! parameterization.
//!
//! Everything is stored in one user-chosen frequency unit; the model only
//! ever consumes ratios. `omega_c` is bookkeeping (all dynamics live in the
//! frame rotating at the drive), and the decay rates are *energy* rates:
//! an isolated port mode loses amplitude at kappa/2.

use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

/// Physical constants of the two-port membrane-in-the-middle model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Optical carrier frequency (never enters the rotating-frame dynamics).
    #[serde(default)]
    pub omega_c: f64,
    /// Tunnel coupling between the left and right modes; normal modes split by 2J.
    #[serde(rename = "J")]
    pub j: f64,
    /// Left port energy decay rate.
    #[serde(rename = "kappa_L")]
    pub kappa_l: f64,
    /// Right port energy decay rate.
    #[serde(rename = "kappa_R")]
    pub kappa_r: f64,
    /// Single-photon optomechanical coupling.
    pub g: f64,
    /// Mechanical frequency.
    pub omega_m: f64,
    /// Mechanical energy damping rate.
    #[serde(default)]
    pub gamma: f64,
    /// Thermal occupancy of the mechanical bath (used only by the jump simulator).
    #[serde(default)]
    pub n_th: f64,
}

impl SystemParams {
    /// Mean port decay rate, kappa_bar = (kappa_L + kappa_R)/2.
    pub fn kappa_bar(&self) -> f64 {
        0.5 * (self.kappa_l + self.kappa_r)
    }

    /// Port decay asymmetry, delta_kappa = (kappa_L - kappa_R)/2.
    pub fn delta_kappa(&self) -> f64 {
        0.5 * (self.kappa_l - self.kappa_r)
    }
}

/// Drive detuning and classical input amplitudes at the two ports.
///
/// `delta` is measured from the symmetric-mode resonance:
/// delta = omega_drive - (omega_c - J).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub delta: f64,
    pub alpha_l: C64,
    pub alpha_r: C64,
}

impl DriveConfig {
    /// Left-only drive with real amplitude.
    pub fn left(delta: f64, alpha_l: f64) -> Self {
        Self {
            delta,
            alpha_l: C64::new(alpha_l, 0.0),
            alpha_r: C64::new(0.0, 0.0),
        }
    }

    pub fn is_driven(&self) -> bool {
        self.alpha_l.norm_sqr() > 0.0 || self.alpha_r.norm_sqr() > 0.0
    }

    /// Drive imbalance Lambda = (√kL aL - √kR aR)/(√kL aL + √kR aR).
    /// +1 for a left-only drive, -1 for a right-only drive.
    pub fn lambda(&self, p: &SystemParams) -> C64 {
        let l = p.kappa_l.sqrt() * self.alpha_l;
        let r = p.kappa_r.sqrt() * self.alpha_r;
        (l - r) / (l + r)
    }
}

/// Scalars derived from the two-port rates.
///
/// `j_tilde` is kept complex everywhere: the main-text regime J > dk/2 makes
/// it purely real, while strongly lopsided decay (J < dk/2) moves it onto the
/// imaginary axis. One representation serves both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub kappa_bar: f64,
    pub delta_kappa: f64,
    /// Dressed splitting sqrt(J^2 - (delta_kappa/2)^2).
    pub j_tilde: C64,
    /// Dissipative correction to the splitting, J - j_tilde.
    pub delta_j: C64,
}

/// Reject a parameter set that violates any physical invariant.
pub fn validate(p: &SystemParams) -> Result<SystemParams> {
    let fields = [
        (p.omega_c, "omega_c"),
        (p.j, "J"),
        (p.kappa_l, "kappa_L"),
        (p.kappa_r, "kappa_R"),
        (p.g, "g"),
        (p.omega_m, "omega_m"),
        (p.gamma, "gamma"),
        (p.n_th, "n_th"),
    ];
    for (v, name) in fields {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if p.kappa_l < 0.0 {
        return Err(Error::NegativeRate("kappa_L"));
    }
    if p.kappa_r < 0.0 {
        return Err(Error::NegativeRate("kappa_R"));
    }
    if p.gamma < 0.0 {
        return Err(Error::NegativeRate("gamma"));
    }
    if p.j <= 0.0 {
        return Err(Error::ZeroModeSplitting);
    }
    if p.omega_m <= 0.0 {
        return Err(Error::ZeroMechanicalFrequency);
    }
    if p.n_th < 0.0 {
        return Err(Error::NegativeOccupancy);
    }
    if p.kappa_l + p.kappa_r <= 0.0 {
        return Err(Error::AllPortsClosed);
    }
    Ok(*p)
}

/// Compute the derived two-port scalars.
pub fn derive(p: &SystemParams) -> Result<DerivedParams> {
    let p = validate(p)?;
    let kappa_bar = p.kappa_bar();
    let delta_kappa = p.delta_kappa();
    let j_tilde = C64::new(p.j * p.j - 0.25 * delta_kappa * delta_kappa, 0.0).sqrt();
    Ok(DerivedParams {
        kappa_bar,
        delta_kappa,
        j_tilde,
        delta_j: C64::new(p.j, 0.0) - j_tilde,
    })
}

/// Couplings of the +/- normal modes to a single driven channel and a single
/// internal-loss channel. The two-port cavity is the special case
/// kappa_dr± = kappa_L/2, kappa_int± = kappa_R/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericDissipation {
    pub kappa_dr_plus: f64,
    pub kappa_dr_minus: f64,
    pub kappa_int_plus: f64,
    pub kappa_int_minus: f64,
}

impl GenericDissipation {
    /// Map the two-port model onto the generic channel picture: the driven
    /// channel is the left port, the internal channel the right port.
    pub fn from_two_port(p: &SystemParams) -> Self {
        Self {
            kappa_dr_plus: 0.5 * p.kappa_l,
            kappa_dr_minus: 0.5 * p.kappa_l,
            kappa_int_plus: 0.5 * p.kappa_r,
            kappa_int_minus: 0.5 * p.kappa_r,
        }
    }
}

/// Scalars derived from a generic channel configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericDerived {
    /// Total decay of the + mode, kappa_dr+ + kappa_int+.
    pub kappa_plus: f64,
    /// Total decay of the - mode.
    pub kappa_minus: f64,
    /// Total driven-channel coupling, kappa_dr+ + kappa_dr-.
    pub kappa_dr: f64,
    /// Total internal-channel coupling.
    pub kappa_int: f64,
    /// (kappa_dr + kappa_int)/2.
    pub kappa_bar: f64,
    /// Mode decay asymmetry (kappa_plus - kappa_minus)/2.
    pub delta_kappa_modes: f64,
    /// Channel interference scale sqrt(kdr+ kdr-) - sqrt(kint+ kint-).
    pub delta_kappa: f64,
    /// sqrt(kappa_dr-/kappa_dr+).
    pub t_dr: f64,
    /// sqrt(kappa_int-/kappa_int+); infinite if only the - side of the
    /// internal channel is open, zero if the channel is closed.
    pub t_int: f64,
    /// Complex dressed splitting sqrt((J + i dk_modes/2)^2 - (delta_kappa/2)^2).
    pub j_tilde: C64,
    /// J + i dk_modes/2 - j_tilde.
    pub delta_j: C64,
}

/// Compute the generic-channel scalars for mode splitting `j`.
pub fn derive_generic(gd: &GenericDissipation, j: f64) -> Result<GenericDerived> {
    let rates = [
        (gd.kappa_dr_plus, "kappa_dr+"),
        (gd.kappa_dr_minus, "kappa_dr-"),
        (gd.kappa_int_plus, "kappa_int+"),
        (gd.kappa_int_minus, "kappa_int-"),
    ];
    for (v, name) in rates {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
        if v < 0.0 {
            return Err(Error::NegativeRate(name));
        }
    }
    if !j.is_finite() {
        return Err(Error::NonFinite("J"));
    }
    if j <= 0.0 {
        return Err(Error::ZeroModeSplitting);
    }
    let kappa_plus = gd.kappa_dr_plus + gd.kappa_int_plus;
    let kappa_minus = gd.kappa_dr_minus + gd.kappa_int_minus;
    if kappa_plus <= 0.0 && kappa_minus <= 0.0 {
        return Err(Error::AllPortsClosed);
    }
    // The drive enters through sqrt(kappa_dr+); without it there is no
    // steady + amplitude and t_dr is a division by zero.
    if gd.kappa_dr_plus <= 0.0 {
        return Err(Error::UndrivenPlusChannel);
    }
    let t_dr = (gd.kappa_dr_minus / gd.kappa_dr_plus).sqrt();
    let t_int = if gd.kappa_int_plus > 0.0 {
        (gd.kappa_int_minus / gd.kappa_int_plus).sqrt()
    } else if gd.kappa_int_minus > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let kappa_dr = gd.kappa_dr_plus + gd.kappa_dr_minus;
    let kappa_int = gd.kappa_int_plus + gd.kappa_int_minus;
    let delta_kappa_modes = 0.5 * (kappa_plus - kappa_minus);
    let delta_kappa = (gd.kappa_dr_plus * gd.kappa_dr_minus).sqrt()
        - (gd.kappa_int_plus * gd.kappa_int_minus).sqrt();
    let j_eff = C64::new(j, 0.5 * delta_kappa_modes);
    let j_tilde = (j_eff * j_eff - 0.25 * delta_kappa * delta_kappa).sqrt();
    Ok(GenericDerived {
        kappa_plus,
        kappa_minus,
        kappa_dr,
        kappa_int,
        kappa_bar: 0.5 * (kappa_dr + kappa_int),
        delta_kappa_modes,
        delta_kappa,
        t_dr,
        t_int,
        j_tilde,
        delta_j: j_eff - j_tilde,
    })
}

/// Flat JSON configuration: parameter and drive keys exactly as documented.
///
/// Required keys: `J`, `kappa_L`, `kappa_R`, `g`, `omega_m`, `delta`,
/// `alpha_L_re`. Optional with defaults: `omega_c = 0`, `gamma = 0`,
/// `n_th = 0`, `alpha_L_im = 0`, `alpha_R_re = 0`, `alpha_R_im = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlatConfig {
    #[serde(default)]
    pub omega_c: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "kappa_L")]
    pub kappa_l: f64,
    #[serde(rename = "kappa_R")]
    pub kappa_r: f64,
    pub g: f64,
    pub omega_m: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub n_th: f64,
    pub delta: f64,
    #[serde(rename = "alpha_L_re")]
    pub alpha_l_re: f64,
    #[serde(rename = "alpha_L_im", default)]
    pub alpha_l_im: f64,
    #[serde(rename = "alpha_R_re", default)]
    pub alpha_r_re: f64,
    #[serde(rename = "alpha_R_im", default)]
    pub alpha_r_im: f64,
}

impl FlatConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: FlatConfig =
            serde_json::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        Ok(cfg)
    }

    pub fn split(&self) -> Result<(SystemParams, DriveConfig)> {
        let p = validate(&SystemParams {
            omega_c: self.omega_c,
            j: self.j,
            kappa_l: self.kappa_l,
            kappa_r: self.kappa_r,
            g: self.g,
            omega_m: self.omega_m,
            gamma: self.gamma,
            n_th: self.n_th,
        })?;
        let d = DriveConfig {
            delta: self.delta,
            alpha_l: C64::new(self.alpha_l_re, self.alpha_l_im),
            alpha_r: C64::new(self.alpha_r_re, self.alpha_r_im),
        };
        Ok((p, d))
    }

    pub fn from_parts(p: &SystemParams, d: &DriveConfig) -> Self {
        Self {
            omega_c: p.omega_c,
            j: p.j,
            kappa_l: p.kappa_l,
            kappa_r: p.kappa_r,
            g: p.g,
            omega_m: p.omega_m,
            gamma: p.gamma,
            n_th: p.n_th,
            delta: d.delta,
            alpha_l_re: d.alpha_l.re,
            alpha_l_im: d.alpha_l.im,
            alpha_r_re: d.alpha_r.re,
            alpha_r_im: d.alpha_r.im,
        }
    }
}

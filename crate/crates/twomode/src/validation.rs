//! Cross-certification of every closed form against the independent
//! backends, emitted as a machine-readable report.
//!
//! Each check records its name, tolerance, the observed figure and a
//! pass/fail verdict. The tolerances here are the same constants the
//! acceptance suite asserts against.

use crate::backaction::{cooling_figures, cooling_small_kr, delta_cold};
use crate::measurement::{kernel_large_j, output_transfer};
use crate::noise::{
    amplitudes_exact, amplitudes_generic, sff, sff_large_j_closed, NoiseAmplitudes, SffVariant,
};
use crate::oracle::freq_solve;
use crate::params::{DriveConfig, GenericDissipation, SystemParams};
use crate::steady_state::solve_steady_state;
use crate::{C64, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tolerances shared between the validation report and the acceptance suite.
pub mod tolerances {
    /// Pairwise relative agreement of the three amplitude routes.
    pub const ORACLE_RING_REL: f64 = 1e-10;
    /// S_FF(-wm)/S_FF(+wm) bound for the one-port cooling null.
    pub const ONE_PORT_RATIO: f64 = 1e-16;
    /// Relative tolerance on the adiabatic heating floor G^2 kR / 2 J^2.
    pub const HEATING_FLOOR_REL: f64 = 0.05;
    /// Allowed deviation of the 1/J residual-decay exponent from -1.
    pub const HEATING_FLOOR_SLOPE_DEV: f64 = 0.35;
    /// Relative tolerance on the resonant dip depth against the closed form.
    pub const DIP_REL: f64 = 0.10;
    /// Dip-to-background bound for a closed right port.
    pub const CLOSED_PORT_DIP_RATIO: f64 = 1e-12;
    /// Spectral peak positions, relative to the inset frequency span 4J.
    /// (The asymmetric Fano humps sit a few linewidths off the pole, so the
    /// span is the scale on which "near 0 and 2J" is meaningful.)
    pub const PEAK_POS_REL: f64 = 0.05;
    /// Fock-lifetime closed form: relative error bound is this over J/kbar.
    pub const FOCK_LIFETIME_FACTOR: f64 = 3.0;
    /// Scattering unitarity defect bound.
    pub const UNITARITY: f64 = 1e-12;
    /// Kernel zero-frequency cancellation bound.
    pub const KERNEL_CANCEL: f64 = 1e-12;
    /// Kernel decay-rate fit tolerance (relative).
    pub const KERNEL_DECAY_REL: f64 = 1e-3;
    /// Welch agreement: per-bin sigma multiple and required coverage.
    pub const WELCH_SIGMA: f64 = 3.0;
    pub const WELCH_COVERAGE: f64 = 0.95;
}

/// One validation check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Bound the observation must stay below; informational checks omit it.
    pub tolerance: Option<f64>,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    fn bounded(name: &str, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance: Some(tolerance),
            observed,
            pass: observed <= tolerance,
        }
    }

    fn range(name: &str, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance: None,
            observed,
            pass: observed > lo && observed < hi,
        }
    }

    fn info(name: &str, observed: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance: None,
            observed,
            pass: observed.is_finite(),
        }
    }
}

/// Full validation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn base_params(j: f64, kl: f64, kr: f64, wm: f64) -> SystemParams {
    SystemParams {
        omega_c: 0.0,
        j,
        kappa_l: kl,
        kappa_r: kr,
        g: 0.05,
        omega_m: wm,
        gamma: 0.0,
        n_th: 0.0,
    }
}

/// Draw a parameter/drive/frequency triple spanning the certification ranges:
/// J/kbar in [0.1, 100], delta/kbar in [-5, 5], kR/kL in [0, 1]. The drive
/// enters through the left port only (with a random phase): the generic
/// channel decomposition models exactly one driven port, so a right-side
/// drive has no counterpart there.
fn ring_draw(rng: &mut ChaCha8Rng) -> (SystemParams, DriveConfig, f64) {
    let kl = 10f64.powf(rng.gen_range(-1.0..1.0));
    let kr = if rng.gen_range(0.0..1.0) < 0.1 {
        0.0
    } else {
        kl * rng.gen_range(0.0..1.0)
    };
    let kbar = 0.5 * (kl + kr);
    let p = base_params(kbar * 10f64.powf(rng.gen_range(-1.0..2.0)), kl, kr, 0.25);
    let d = DriveConfig {
        delta: kbar * rng.gen_range(-5.0..5.0),
        alpha_l: C64::new(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0)),
        alpha_r: C64::new(0.0, 0.0),
    };
    let w = kbar * rng.gen_range(-5.0..5.0);
    (p, d, w)
}

fn pairwise_dev(a: &NoiseAmplitudes, b: &NoiseAmplitudes) -> f64 {
    let scale = a
        .a_l
        .norm()
        .max(a.a_r.norm())
        .max(b.a_l.norm())
        .max(b.a_r.norm())
        .max(1e-300);
    ((a.a_l - b.a_l).norm().max((a.a_r - b.a_r).norm())) / scale
}

/// Three-way agreement of the exact closed form, the generic-channel closed
/// form specialized to two ports, and the direct matrix-inversion solver.
/// `amp_exact` is injectable so a deliberately broken formula can be shown
/// to trip the check.
pub fn oracle_ring_check_with<F>(amp_exact: F, draws: usize, seed: u64) -> Check
where
    F: Fn(f64, &SystemParams, &DriveConfig) -> Result<NoiseAmplitudes>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let (p, d, w) = ring_draw(&mut rng);
        let exact = match amp_exact(w, &p, &d) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let inv = freq_solve(w, &p, &d).expect("stable system");
        let gen = amplitudes_generic(w, &GenericDissipation::from_two_port(&p), p.j, &d, p.g)
            .expect("two-port mapping");
        worst = worst
            .max(pairwise_dev(&exact, &inv))
            .max(pairwise_dev(&exact, &gen))
            .max(pairwise_dev(&inv, &gen));
    }
    Check::bounded("oracle_ring_pairwise_rel", worst, tolerances::ORACLE_RING_REL)
}

pub fn oracle_ring_check(draws: usize, seed: u64) -> Check {
    oracle_ring_check_with(amplitudes_exact, draws, seed)
}

/// One-port heating null at delta_cold across four decades of splitting.
pub fn one_port_cancellation_check() -> Check {
    let mut worst: f64 = 0.0;
    for jr in [0.1, 0.3, 1.0, 3.0, 10.0, 100.0] {
        let p = base_params(jr, 1.0, 0.0, 0.25);
        let d = DriveConfig::left(delta_cold(p.omega_m, p.j), 1.0);
        let s_m = sff(-p.omega_m, &p, &d, SffVariant::Exact).unwrap();
        let s_p = sff(p.omega_m, &p, &d, SffVariant::Exact).unwrap();
        worst = worst.max(s_m / s_p);
    }
    Check::bounded(
        "one_port_cancellation_ratio",
        worst,
        tolerances::ONE_PORT_RATIO,
    )
}

/// Adiabatic heating floor at the half-sideband detuning, and the 1/J decay
/// of its residual.
pub fn heating_floor_checks() -> (Check, Check) {
    let kl = 1.0;
    let kr = 0.5;
    let kbar = 0.5 * (kl + kr);
    let wm = 0.2 * kbar;
    let mut rel_at_100 = f64::NAN;
    let mut pts = Vec::new();
    for jr in [30.0, 100.0, 300.0] {
        let p = base_params(jr * kbar, kl, kr, wm);
        let d = DriveConfig::left(0.5 * wm, 1.0);
        let ss = solve_steady_state(&p, &d).unwrap();
        let s_m = sff(-wm, &p, &d, SffVariant::Exact).unwrap();
        let floor = ss.g_drive * ss.g_drive * kr / (2.0 * p.j * p.j);
        let rel = (s_m - floor).abs() / floor;
        if jr == 100.0 {
            rel_at_100 = rel;
        }
        pts.push((jr.ln(), rel.ln()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (
        Check::bounded("heating_floor_rel_at_j100", rel_at_100, tolerances::HEATING_FLOOR_REL),
        Check::bounded(
            "heating_floor_residual_slope_dev",
            (slope + 1.0).abs(),
            tolerances::HEATING_FLOOR_SLOPE_DEV,
        ),
    )
}

/// Resonant-dip depth against the closed-form prediction, the closed-port
/// null, and the positions of the two spectral peaks.
pub fn spectrum_layout_checks() -> Vec<Check> {
    let kl = 1.0;
    let mut out = Vec::new();
    let mut worst_dip: f64 = 0.0;
    let mut worst_peak: f64 = 0.0;
    for kr in [kl, 0.25 * kl, 0.0] {
        let kbar = 0.5 * (kl + kr);
        let p = base_params(10.0 * kbar, kl, kr, 0.25);
        let d = DriveConfig::left(0.0, 1.0);
        let s0 = sff(0.0, &p, &d, SffVariant::Exact).unwrap();
        // Geometric mean over +-5 kbar: the second resonance at +2J tilts
        // the plateau linearly in w/2J, which the two-sided mean cancels.
        let sbg = (sff(5.0 * kbar, &p, &d, SffVariant::Exact).unwrap()
            * sff(-5.0 * kbar, &p, &d, SffVariant::Exact).unwrap())
        .sqrt();
        if kr == 0.0 {
            out.push(Check::bounded(
                "closed_port_dip_ratio",
                s0 / sbg,
                tolerances::CLOSED_PORT_DIP_RATIO,
            ));
        } else {
            // closed-form prediction for the same normalized dip
            let c0 = sff_large_j_closed(0.0, &p, &d).unwrap();
            let cbg = (sff_large_j_closed(5.0 * kbar, &p, &d).unwrap()
                * sff_large_j_closed(-5.0 * kbar, &p, &d).unwrap())
            .sqrt();
            let dev = ((s0 / sbg) / (c0 / cbg) - 1.0).abs();
            worst_dip = worst_dip.max(dev);
        }
        // two resonances: near 0 and near 2J
        let n_grid = 4096;
        let mut vals = Vec::with_capacity(n_grid);
        for i in 0..n_grid {
            let w = -p.j + 4.0 * p.j * i as f64 / (n_grid - 1) as f64;
            vals.push((w, sff(w, &p, &d, SffVariant::Exact).unwrap()));
        }
        let mut peaks: Vec<(f64, f64)> = Vec::new();
        for i in 1..n_grid - 1 {
            if vals[i].1 > vals[i - 1].1 && vals[i].1 > vals[i + 1].1 {
                peaks.push(vals[i]);
            }
        }
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut locs = [peaks[0].0, peaks[1].0];
        locs.sort_by(f64::total_cmp);
        let span = 4.0 * p.j;
        worst_peak = worst_peak
            .max(locs[0].abs() / span)
            .max((locs[1] - 2.0 * p.j).abs() / span);
    }
    out.push(Check::bounded(
        "resonant_dip_vs_closed_form",
        worst_dip,
        tolerances::DIP_REL,
    ));
    out.push(Check::bounded(
        "spectral_peak_positions_rel",
        worst_peak,
        tolerances::PEAK_POS_REL,
    ));
    out
}

/// Occupancy minimum sits in the crossover window 0.3 < J*/wm < 3.
pub fn occupancy_minimum_check(n_scan: usize) -> Check {
    let kl = 1.0;
    let wm = 0.25 * kl;
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..n_scan {
        let j = wm * 10f64.powf(-1.5 + 3.0 * i as f64 / (n_scan - 1) as f64);
        let p = base_params(j, kl, kl / 20.0, wm);
        let d = DriveConfig::left(delta_cold(wm, j), 1.0);
        let c = cooling_figures(&p, &d, SffVariant::Exact).unwrap();
        if c.n_eff < best.0 {
            best = (c.n_eff, j);
        }
    }
    Check::range("occupancy_minimum_j_over_wm", best.1 / wm, 0.3, 3.0)
}

/// Fock-lifetime closed form at the phonon-counting working point, plus the
/// symmetric-cavity prefactor window [kbar/2, kbar] of its bracketed factor.
pub fn fock_lifetime_checks() -> (Check, Check) {
    let kl = 1.0;
    let kr = 0.3;
    let kbar = 0.5 * (kl + kr);
    let mut worst = f64::MIN;
    for jr in [10.0, 30.0, 100.0] {
        for wm in [0.5 * kbar, 2.0 * kbar] {
            let p = base_params(jr * kbar, kl, kr, wm);
            let d = DriveConfig::left(0.0, 1.0);
            let ss = solve_steady_state(&p, &d).unwrap();
            for n in 0..3u32 {
                let t = crate::backaction::tau_ba(n, &p, &d, SffVariant::Exact).unwrap();
                let bracket = (0.5 * kbar * wm * wm + kr * 0.25 * kbar * kbar)
                    / (wm * wm + 0.25 * kbar * kbar);
                let closed = ss.g_drive * ss.g_drive / (p.j * p.j)
                    * bracket
                    * (n as f64 + 0.5);
                let rel = (1.0 / t - closed).abs() / closed;
                // normalized so that the bound is 1 for every J
                worst = worst.max(rel / (tolerances::FOCK_LIFETIME_FACTOR * kbar / p.j));
            }
        }
    }
    // bracket window for the symmetric cavity, straight from the closed form
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..400 {
        let wm = kbar * 10f64.powf(-2.0 + 4.0 * i as f64 / 399.0);
        let bracket = (0.5 * kbar * wm * wm + kbar * 0.25 * kbar * kbar)
            / (wm * wm + 0.25 * kbar * kbar);
        lo = lo.min(bracket);
        hi = hi.max(bracket);
    }
    let window_ok = lo >= 0.5 * kbar * (1.0 - 1e-12) && hi <= kbar * (1.0 + 1e-12);
    (
        Check::bounded("fock_lifetime_normalized_rel", worst, 1.0),
        Check {
            name: "fock_lifetime_symmetric_bracket_window".into(),
            tolerance: None,
            observed: hi / kbar,
            pass: window_ok,
        },
    )
}

/// Small-kR expansion: occupancy error shrinking linearly, damping deviation
/// reported as information.
pub fn small_kr_checks() -> Vec<Check> {
    let wm = 1.0;
    let kl = 0.5 * wm;
    let j = 2.0 * wm;
    let mut errs = Vec::new();
    let mut gamma_dev: f64 = 0.0;
    for krr in [1e-2, 1e-3, 1e-4] {
        let p = base_params(j, kl, kl * krr, wm);
        let d = DriveConfig::left(delta_cold(wm, j), 1.0);
        let exact = cooling_figures(&p, &d, SffVariant::Exact).unwrap();
        let approx = cooling_small_kr(&p, C64::new(1.0, 0.0)).unwrap();
        errs.push((approx.n_eff - exact.n_eff).abs() / exact.n_eff);
        gamma_dev = gamma_dev.max((approx.gamma_opt - exact.gamma_opt).abs() / exact.gamma_opt);
    }
    let r1 = errs[1] / errs[0];
    let r2 = errs[2] / errs[1];
    vec![
        Check {
            name: "small_kr_occupancy_linear_convergence".into(),
            tolerance: None,
            observed: r1.max(r2),
            pass: (0.03..0.3).contains(&r1) && (0.03..0.3).contains(&r2),
        },
        Check::info("small_kr_damping_expansion_rel", gamma_dev),
    ]
}

/// Scattering unitarity, kernel cancellation and kernel decay fit.
pub fn output_transfer_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_unitarity: f64 = 0.0;
    for _ in 0..100 {
        let kl = 10f64.powf(rng.gen_range(-1.0..1.0));
        let kr = kl * rng.gen_range(0.0..1.0);
        let kbar = 0.5 * (kl + kr);
        let p = base_params(kbar * 10f64.powf(rng.gen_range(-0.5..1.5)), kl, kr, 0.25);
        let d = DriveConfig::left(kbar * rng.gen_range(-3.0..3.0), 1.0);
        let w = kbar * rng.gen_range(-8.0..8.0);
        let ot = output_transfer(w, &p, &d).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += ot.b_matrix[r][k] * ot.b_matrix[c][k].conj();
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                worst_unitarity = worst_unitarity.max((s - expect).norm());
            }
        }
    }
    // kernel zero-integral cancellation by Simpson quadrature
    let p = base_params(50.0, 1.0, 0.4, 0.25);
    let d = DriveConfig::left(0.0, 1.0);
    let kbar = p.kappa_bar();
    let weight = kernel_large_j(0.0, &p, &d).unwrap().impulse_weight;
    let n = 40_000;
    let a = 0.0;
    let b = 80.0 / kbar;
    let h = (b - a) / n as f64;
    let f = |tau: f64| kernel_large_j(tau, &p, &d).unwrap().resonant;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    let integral = s * h / 3.0;
    let cancel = (integral + weight).abs() / weight.abs();
    // decay-rate fit
    let m = 200;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..m {
        let tau = 10.0 / kbar * i as f64 / (m - 1) as f64;
        let v = f(tau).ln();
        sx += tau;
        sy += v;
        sxx += tau * tau;
        sxy += tau * v;
    }
    let mf = m as f64;
    let slope = (mf * sxy - sx * sy) / (mf * sxx - sx * sx);
    let decay_dev = (-slope - 0.5 * kbar).abs() / (0.5 * kbar);
    vec![
        Check::bounded("output_transfer_unitarity", worst_unitarity, tolerances::UNITARITY),
        Check::bounded("kernel_zero_frequency_cancellation", cancel, tolerances::KERNEL_CANCEL),
        Check::bounded("kernel_decay_fit_rel", decay_dev, tolerances::KERNEL_DECAY_REL),
    ]
}

/// Run every deterministic certification check.
pub fn run_all(ring_draws: usize, seed: u64) -> ValidationReport {
    let mut checks = vec![oracle_ring_check(ring_draws, seed)];
    checks.push(one_port_cancellation_check());
    let (a, b) = heating_floor_checks();
    checks.push(a);
    checks.push(b);
    checks.extend(spectrum_layout_checks());
    checks.push(occupancy_minimum_check(4096));
    let (a, b) = fock_lifetime_checks();
    checks.push(a);
    checks.push(b);
    checks.extend(small_kr_checks());
    checks.extend(output_transfer_checks(seed ^ 0xa5a5));
    let pass = checks.iter().all(|c| c.pass);
    ValidationReport { checks, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_build_passes() {
        let report = run_all(200, 1);
        for c in &report.checks {
            assert!(c.pass, "check {} failed: observed {}", c.name, c.observed);
        }
        assert!(report.pass);
    }

    #[test]
    fn injected_sign_fault_trips_the_ring() {
        // flip the sign of the antisymmetric-path numerator term
        let faulty = |w: f64, p: &SystemParams, d: &DriveConfig| {
            let mut a = amplitudes_exact(w, p, d)?;
            // corrupt one port's amplitude by conjugating it: preserves |A|
            // pointwise but breaks the complex ring agreement
            a.a_l = a.a_l.conj();
            Ok(a)
        };
        let check = oracle_ring_check_with(faulty, 50, 2);
        assert!(!check.pass, "ring must detect the injected fault");
    }

    #[test]
    fn report_serializes_with_tolerances() {
        let report = run_all(50, 3);
        let json = report.to_json();
        let checks = json["checks"].as_array().unwrap();
        let ring = checks
            .iter()
            .find(|c| c["name"] == "oracle_ring_pairwise_rel")
            .unwrap();
        assert_eq!(
            ring["tolerance"].as_f64().unwrap(),
            tolerances::ORACLE_RING_REL
        );
    }
}

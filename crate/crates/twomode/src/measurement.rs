//! Output-field transfer functions and the position-information kernel.
//!
//! Input-output theory gives the fluctuating output at each port as
//!
//! ```text
//! xi_i_out[w] = sum_j B_ij[w] xi_j[w]  -  i A_i[w] x[w]
//! ```
//!
//! where the B matrix is the coupling-free scattering of the linear network
//! and the position kernel is, up to the factor -i, the same amplitude that
//! controls backaction: information leaking out and noise driving the
//! membrane are two faces of one object.

use crate::noise::amplitudes_exact;
use crate::params::{validate, DriveConfig, SystemParams};
use crate::steady_state::{drift, solve_steady_state};
use crate::{C64, Error, Result};

/// Scattering matrix and position kernel at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputTransfer {
    /// B[i][j]: input port j to output port i, ports ordered (L, R).
    pub b_matrix: [[C64; 2]; 2],
    /// (-i A_L, -i A_R): position to output-field response.
    pub x_kernel: (C64, C64),
}

/// Build the output transfer at frequency `omega`.
pub fn output_transfer(omega: f64, p: &SystemParams, d: &DriveConfig) -> Result<OutputTransfer> {
    let p = validate(p)?;
    let dr = drift(&p, d.delta);
    let u_plus = dr.d_plus - C64::new(0.0, omega);
    let u_minus = dr.d_minus - C64::new(0.0, omega);
    let c = dr.cross;
    let det = u_plus * u_minus - c * c;
    let sl = (0.5 * p.kappa_l).sqrt();
    let sr = (0.5 * p.kappa_r).sqrt();
    // mode susceptibilities to each port's noise
    let chi_p_l = sl * (u_minus - c) / det;
    let chi_p_r = sr * (u_minus + c) / det;
    let chi_m_l = sl * (u_plus - c) / det;
    let chi_m_r = -sr * (u_plus + c) / det;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let one = C64::new(1.0, 0.0);
    let b_matrix = [
        [
            one - p.kappa_l.sqrt() * inv_sqrt2 * (chi_p_l + chi_m_l),
            -p.kappa_l.sqrt() * inv_sqrt2 * (chi_p_r + chi_m_r),
        ],
        [
            -p.kappa_r.sqrt() * inv_sqrt2 * (chi_p_l - chi_m_l),
            one - p.kappa_r.sqrt() * inv_sqrt2 * (chi_p_r - chi_m_r),
        ],
    ];
    let amps = amplitudes_exact(omega, &p, d)?;
    let mi = C64::new(0.0, -1.0);
    Ok(OutputTransfer {
        b_matrix,
        x_kernel: (mi * amps.a_l, mi * amps.a_r),
    })
}

/// Time-domain position kernel in the adiabatic limit, for a resonant
/// left-only drive: a decaying resonant response against an instantaneous
/// counter-impulse of equal and opposite area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelLargeJ {
    /// Smooth part (G/2J) sqrt(kL/2) (kbar/2) e^{-kbar tau / 2} at `tau`.
    pub resonant: f64,
    /// Weight of the impulse at tau = 0+: -(G/2J) sqrt(kL/2). Carried
    /// symbolically so the zero-frequency cancellation stays exact.
    pub impulse_weight: f64,
}

/// Write the sampled resonant kernel to CSV (columns tau, resonant_value);
/// the impulse weight rides in the JSON header next to the parameter
/// snapshot, never discretized into a sample.
pub fn kernel_csv<P: AsRef<std::path::Path>>(
    path: P,
    p: &SystemParams,
    d: &DriveConfig,
    tau_grid: &[f64],
) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let weight = kernel_large_j(tau_grid[0], p, d)?.impulse_weight;
    let meta = serde_json::json!({
        "params": crate::params::FlatConfig::from_parts(p, d),
        "impulse_weight": weight,
    });
    let rows: Vec<Vec<f64>> = tau_grid
        .iter()
        .map(|&tau| kernel_large_j(tau, p, d).map(|k| vec![tau, k.resonant]))
        .collect::<Result<_>>()?;
    crate::export::csv_with_header(path, &meta, &["tau", "resonant_value"], rows.into_iter())
}

/// Evaluate the adiabatic kernel at lag `tau >= 0`.
///
/// Requires the interference working point: left-only drive (Lambda = 1) on the
/// symmetric-mode resonance (delta = 0).
pub fn kernel_large_j(tau: f64, p: &SystemParams, d: &DriveConfig) -> Result<KernelLargeJ> {
    if tau < 0.0 {
        return Err(Error::NegativeTau);
    }
    if d.delta != 0.0 || d.alpha_r.norm_sqr() != 0.0 || d.alpha_l.norm_sqr() == 0.0 {
        return Err(Error::BadConfig(
            "kernel requires a resonant left-only drive (Lambda = 1, delta = 0)".into(),
        ));
    }
    let ss = solve_steady_state(p, d)?;
    let kbar = p.kappa_bar();
    let scale = ss.g_drive / (2.0 * p.j) * (0.5 * p.kappa_l).sqrt();
    Ok(KernelLargeJ {
        resonant: scale * 0.5 * kbar * (-0.5 * kbar * tau).exp(),
        impulse_weight: -scale,
    })
}

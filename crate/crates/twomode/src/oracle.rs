//! Independent validation backends.
//!
//! Nothing here reuses the two-pole algebra of the `noise` module. The
//! frequency-domain route inverts the coupled-mode response matrix
//! numerically; the time-domain route integrates the same equations as a
//! stochastic process and recovers the noise amplitudes as measured transfer
//! functions. Agreement between the three paths is what certifies the closed
//! forms.
//!
//! The stochastic integrator comes in two flavors: plain Euler-Maruyama and
//! an exact exponential stepper. The exact stepper conditions the state
//! update on the recorded noise increments, so the cross-correlation between
//! the force record and the injected noise stays faithful at any step size;
//! the leftover within-step randomness is drawn with its exact residual
//! covariance.

use crate::noise::{AmplitudeVariant, NoiseAmplitudes};
use crate::params::{validate, DriveConfig, SystemParams};
use crate::steady_state::{drift, drive_inputs, solve_steady_state, SteadyState};
use crate::{C64, Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

type Mat2 = [[C64; 2]; 2];

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[zero(); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn matvec(a: &Mat2, v: [C64; 2]) -> [C64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// The coupled-mode Langevin system in matrix form: state (a+, a-), inputs
/// (xi_L, xi_R), d(state)/dt = drift * state + input_map * xi + drive.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub drift: Mat2,
    pub input_map: Mat2,
    drive: [C64; 2],
    steady: SteadyState,
    g: f64,
}

impl LinearSystem {
    pub fn new(p: &SystemParams, d: &DriveConfig) -> Result<Self> {
        let p = validate(p)?;
        let dr = drift(&p, d.delta);
        let m: Mat2 = [[-dr.d_plus, -dr.cross], [-dr.cross, -dr.d_minus]];
        let sl = (0.5 * p.kappa_l).sqrt();
        let sr = (0.5 * p.kappa_r).sqrt();
        let l: Mat2 = [
            [C64::new(sl, 0.0), C64::new(sr, 0.0)],
            [C64::new(sl, 0.0), C64::new(-sr, 0.0)],
        ];
        let (b_plus, b_minus) = drive_inputs(&p, d);
        let steady = solve_steady_state(&p, d)?;
        Ok(Self {
            drift: m,
            input_map: l,
            drive: [b_plus, b_minus],
            steady,
            g: p.g,
        })
    }

    /// Both eigenvalues must sit strictly in the left half plane.
    pub fn is_stable(&self) -> bool {
        let (l1, l2) = eig2(&self.drift);
        l1.re < 0.0 && l2.re < 0.0
    }

    /// Linearized force record for a fluctuation (da+, da-): the drive-enhanced
    /// part of g(a+†a- + a-†a+), which is real.
    fn force(&self, da_plus: C64, da_minus: C64) -> f64 {
        2.0 * (self.g * (self.steady.a_plus.conj() * da_minus + self.steady.a_minus.conj() * da_plus))
            .re
    }
}

fn eig2(m: &Mat2) -> (C64, C64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    (0.5 * (tr + disc), 0.5 * (tr - disc))
}

/// Noise amplitudes by direct inversion of the response matrix.
///
/// Solves (-iw I - drift) da = input_map xi column by column and collects
/// the xi coefficients of the linearized force.
pub fn freq_solve(omega: f64, p: &SystemParams, d: &DriveConfig) -> Result<NoiseAmplitudes> {
    let sys = LinearSystem::new(p, d)?;
    let m = &sys.drift;
    // response = (-iw I - M)^-1 via Cramer
    let a = C64::new(0.0, -omega) - m[0][0];
    let b = -m[0][1];
    let c = -m[1][0];
    let e = C64::new(0.0, -omega) - m[1][1];
    let det = a * e - b * c;
    let inv: Mat2 = [[e / det, -b / det], [-c / det, a / det]];
    let chi = matmul(&inv, &sys.input_map); // chi[mode][port]
    let ap = sys.steady.a_plus.conj();
    let am = sys.steady.a_minus.conj();
    let a_l = sys.g * (ap * chi[1][0] + am * chi[0][0]);
    let a_r = sys.g * (ap * chi[1][1] + am * chi[0][1]);
    Ok(NoiseAmplitudes {
        a_l,
        a_r,
        omega,
        variant: AmplitudeVariant::Exact,
    })
}

/// Integration scheme for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepper {
    /// First-order Euler-Maruyama.
    EulerMaruyama,
    /// Exact exponential stepping, conditioned on the recorded increments.
    Exact,
}

/// One stochastic trajectory of the driven modes with its injected noise and
/// the linearized force record.
#[derive(Debug, Clone)]
pub struct TrajectoryBundle {
    pub dt: f64,
    /// Mode amplitudes including the classical mean.
    pub a_plus: Vec<C64>,
    pub a_minus: Vec<C64>,
    /// Injected noise, recorded as increment/dt (unit two-sided flux PSD).
    pub xi_l: Vec<C64>,
    pub xi_r: Vec<C64>,
    /// Linearized backaction force (real).
    pub f_opt: Vec<f64>,
    pub seed: u64,
    pub params: SystemParams,
    pub drive: DriveConfig,
}

/// Exponential-stepper constants for one step size.
struct ExactStep {
    propagator: Mat2,
    /// Conditional-mean map from the step's noise increment to the state kick.
    mean_map: Mat2,
    /// Cholesky factor of the residual (within-step) noise covariance.
    resid_chol: Mat2,
}

fn projectors(m: &Mat2) -> (C64, C64, Mat2, Mat2) {
    let (mut l1, mut l2) = eig2(m);
    let scale_m = l1.norm().max(l2.norm()).max(1e-300);
    if (l1 - l2).norm() < 1e-9 * scale_m {
        // Near-degenerate pair: nudge the eigenvalues apart. The induced
        // error is far below every tolerance used downstream.
        let eps = 1e-8 * scale_m;
        l1 += eps;
        l2 -= eps;
    }
    let id: Mat2 = [[C64::new(1.0, 0.0), zero()], [zero(), C64::new(1.0, 0.0)]];
    let p1 = scale(&add(m, &scale(&id, -l2)), C64::new(1.0, 0.0) / (l1 - l2));
    let p2 = add(&id, &scale(&p1, C64::new(-1.0, 0.0)));
    (l1, l2, p1, p2)
}

impl ExactStep {
    fn build(m: &Mat2, l: &Mat2, dt: f64) -> Self {
        let (l1, l2, p1, p2) = projectors(m);
        let e1 = (l1 * dt).exp();
        let e2 = (l2 * dt).exp();
        let propagator = add(&scale(&p1, e1), &scale(&p2, e2));
        // phi1(lambda) = (e^{lambda dt} - 1)/lambda
        let phi1 = |lam: C64, e: C64| (e - 1.0) / lam;
        let int_exp = add(&scale(&p1, phi1(l1, e1)), &scale(&p2, phi1(l2, e2)));
        let mean_map = scale(&matmul(&int_exp, l), C64::new(1.0 / dt, 0.0));
        // Full covariance of int_0^dt e^{Mu} L dW: sum over projector pairs.
        let q = matmul(l, &adjoint(l));
        let lams = [l1, l2];
        let ps = [p1, p2];
        let mut cov = [[zero(); 2]; 2];
        for k in 0..2 {
            for j in 0..2 {
                let s = lams[k] + lams[j].conj();
                let c = if s.norm() < 1e-14 {
                    C64::new(dt, 0.0)
                } else {
                    ((s * dt).exp() - 1.0) / s
                };
                let term = scale(&matmul(&matmul(&ps[k], &q), &adjoint(&ps[j])), c);
                cov = add(&cov, &term);
            }
        }
        // Residual after subtracting what the recorded increment explains.
        let a_cov = scale(&matmul(&mean_map, &adjoint(&mean_map)), C64::new(dt, 0.0));
        let resid = add(&cov, &scale(&a_cov, C64::new(-1.0, 0.0)));
        // Cholesky of the 2x2 Hermitian positive-semidefinite residual.
        let r00 = resid[0][0].re.max(0.0).sqrt();
        let r10 = if r00 > 0.0 { resid[1][0] / r00 } else { zero() };
        let r11 = (resid[1][1].re - r10.norm_sqr()).max(0.0).sqrt();
        let resid_chol: Mat2 = [
            [C64::new(r00, 0.0), zero()],
            [r10, C64::new(r11, 0.0)],
        ];
        Self {
            propagator,
            mean_map,
            resid_chol,
        }
    }
}

/// Integrate the driven stochastic system.
///
/// `dt` must resolve the fastest rate: dt < 0.1/max(kbar, 2J, |delta|).
pub fn simulate(
    p: &SystemParams,
    d: &DriveConfig,
    dt: f64,
    n_steps: usize,
    seed: u64,
) -> Result<TrajectoryBundle> {
    simulate_with(p, d, dt, n_steps, seed, Stepper::EulerMaruyama, 1.0)
}

/// Integrate with an explicit scheme choice and noise scale (0 disables the
/// stochastic inputs, leaving the deterministic relaxation).
pub fn simulate_with(
    p: &SystemParams,
    d: &DriveConfig,
    dt: f64,
    n_steps: usize,
    seed: u64,
    stepper: Stepper,
    noise_scale: f64,
) -> Result<TrajectoryBundle> {
    let sys = LinearSystem::new(p, d)?;
    let max_rate = p.kappa_bar().max(2.0 * p.j).max(d.delta.abs());
    if dt >= 0.1 / max_rate {
        return Err(Error::TimestepTooLarge);
    }
    let exact = match stepper {
        Stepper::Exact => Some(ExactStep::build(&sys.drift, &sys.input_map, dt)),
        Stepper::EulerMaruyama => None,
    };
    // steady-state fixed point for the deterministic part
    let a_ss = [sys.steady.a_plus, sys.steady.a_minus];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = a_ss; // start at the fixed point
    let mut out = TrajectoryBundle {
        dt,
        a_plus: Vec::with_capacity(n_steps),
        a_minus: Vec::with_capacity(n_steps),
        xi_l: Vec::with_capacity(n_steps),
        xi_r: Vec::with_capacity(n_steps),
        f_opt: Vec::with_capacity(n_steps),
        seed,
        params: *p,
        drive: *d,
    };
    let sigma = (0.5 * dt).sqrt() * noise_scale;
    let diverged = a_ss[0].norm().max(a_ss[1].norm()).max(1.0) * 1e6;
    for _ in 0..n_steps {
        let mut gauss = || {
            // Box-Muller on ChaCha output keeps trajectories reproducible
            // across platforms.
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            (r * u2.cos(), r * u2.sin())
        };
        let (xl_re, xl_im) = gauss();
        let (xr_re, xr_im) = gauss();
        let dxi = [
            C64::new(xl_re, xl_im) * sigma,
            C64::new(xr_re, xr_im) * sigma,
        ];
        match &exact {
            None => {
                // Euler-Maruyama: drift on the full state, diffusion on the increment.
                let ma = matvec(&sys.drift, state);
                let lx = matvec(&sys.input_map, dxi);
                state = [
                    state[0] + dt * (ma[0] + sys.drive[0]) + lx[0],
                    state[1] + dt * (ma[1] + sys.drive[1]) + lx[1],
                ];
            }
            Some(ex) => {
                let dev = [state[0] - a_ss[0], state[1] - a_ss[1]];
                let prop = matvec(&ex.propagator, dev);
                let mean_kick = matvec(&ex.mean_map, dxi);
                let (z1r, z1i) = gauss();
                let (z2r, z2i) = gauss();
                let z = [
                    C64::new(z1r, z1i) * (0.5f64).sqrt() * noise_scale,
                    C64::new(z2r, z2i) * (0.5f64).sqrt() * noise_scale,
                ];
                let resid_kick = matvec(&ex.resid_chol, z);
                state = [
                    a_ss[0] + prop[0] + mean_kick[0] + resid_kick[0],
                    a_ss[1] + prop[1] + mean_kick[1] + resid_kick[1],
                ];
            }
        }
        if state[0].norm() > diverged || !state[0].norm().is_finite() {
            return Err(Error::TimestepTooLarge);
        }
        out.a_plus.push(state[0]);
        out.a_minus.push(state[1]);
        out.xi_l.push(dxi[0] / dt);
        out.xi_r.push(dxi[1] / dt);
        out.f_opt
            .push(sys.force(state[0] - a_ss[0], state[1] - a_ss[1]));
    }
    Ok(out)
}

/// Welch transfer-function estimate of the noise amplitudes from a recorded
/// trajectory.
#[derive(Debug, Clone)]
pub struct TransferEstimate {
    /// Bin frequencies under the e^{iwt} sign convention.
    pub omegas: Vec<f64>,
    pub a_l: Vec<C64>,
    pub a_r: Vec<C64>,
    /// Per-bin standard error of the complex estimates.
    pub sigma_l: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub segments: usize,
}

/// Estimate A_L[w], A_R[w] as cross-periodogram over auto-periodogram,
/// Hann-windowed with 50% overlap and at least 32 segments.
///
/// The classical record cannot produce the unsymmetrized spectrum directly,
/// but the transfer functions are ordering-free; S_FF is then reassembled
/// as |A_L|^2 + |A_R|^2.
pub fn estimate_transfer(bundle: &TrajectoryBundle) -> Result<TransferEstimate> {
    let n = bundle.f_opt.len();
    let kbar = bundle.params.kappa_bar();
    if (n as f64) * bundle.dt < 50.0 / kbar {
        return Err(Error::InsufficientRecord);
    }
    // Largest power-of-two segment that still yields >= 32 half-overlapped
    // segments.
    let mut seg = 1usize;
    while seg * 2 <= n / 17 {
        seg *= 2;
    }
    let hop = seg / 2;
    let n_segs = (n - seg) / hop + 1;
    if n_segs < 32 {
        return Err(Error::InsufficientRecord);
    }
    let window: Vec<f64> = (0..seg)
        .map(|i| 0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / seg as f64).cos()))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(seg);

    let spectrum = |series_re: Option<&[f64]>, series_c: Option<&[C64]>, s: usize| -> Vec<C64> {
        let mut buf: Vec<C64> = (0..seg)
            .map(|i| {
                let v = match (series_re, series_c) {
                    (Some(re), _) => C64::new(re[s + i], 0.0),
                    (_, Some(c)) => c[s + i],
                    _ => unreachable!(),
                };
                v * window[i]
            })
            .collect();
        fft.process(&mut buf);
        buf
    };

    let mut sxx_l = vec![0.0f64; seg];
    let mut sxx_r = vec![0.0f64; seg];
    let mut sxy_l = vec![zero(); seg];
    let mut sxy_r = vec![zero(); seg];
    let mut syy = vec![0.0f64; seg];
    for k in 0..n_segs {
        let s = k * hop;
        let y = spectrum(Some(&bundle.f_opt), None, s);
        let xl = spectrum(None, Some(&bundle.xi_l), s);
        let xr = spectrum(None, Some(&bundle.xi_r), s);
        for j in 0..seg {
            sxx_l[j] += xl[j].norm_sqr();
            sxx_r[j] += xr[j].norm_sqr();
            sxy_l[j] += y[j] * xl[j].conj();
            sxy_r[j] += y[j] * xr[j].conj();
            syy[j] += y[j].norm_sqr();
        }
    }
    // Forward-DFT bin j carries e^{-2 pi i j k / N}; under X[w] = int e^{iwt} X
    // that is w = -2 pi j / (N dt), folded to the principal range.
    let mut omegas = Vec::with_capacity(seg);
    for j in 0..seg {
        let jj = if j <= seg / 2 {
            -(j as f64)
        } else {
            seg as f64 - j as f64
        };
        omegas.push(std::f64::consts::TAU * jj / (seg as f64 * bundle.dt));
    }
    // 50% Hann overlap leaves mild inter-segment correlation; deflate the
    // effective segment count accordingly.
    let k_eff = n_segs as f64 / 1.1;
    let mut est = TransferEstimate {
        omegas,
        a_l: Vec::with_capacity(seg),
        a_r: Vec::with_capacity(seg),
        sigma_l: Vec::with_capacity(seg),
        sigma_r: Vec::with_capacity(seg),
        segments: n_segs,
    };
    for j in 0..seg {
        let h_l = sxy_l[j] / sxx_l[j];
        let h_r = sxy_r[j] / sxx_r[j];
        let resid_l = (syy[j] - sxy_l[j].norm_sqr() / sxx_l[j]).max(0.0);
        let resid_r = (syy[j] - sxy_r[j].norm_sqr() / sxx_r[j]).max(0.0);
        est.a_l.push(h_l);
        est.a_r.push(h_r);
        est.sigma_l.push((resid_l / sxx_l[j] / k_eff).sqrt());
        est.sigma_r.push((resid_r / sxx_r[j] / k_eff).sqrt());
    }
    Ok(est)
}

//! Command-line surface for the two-mode backaction engine.
//!
//! Every command reads one flat JSON parameter file (see README for the
//! schema), writes CSV/JSON outputs that embed the full run configuration,
//! and is deterministic given the same seed.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad configuration or I/O.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use twomode::backaction::{
    cooling_figures, cooling_small_kr, delta_cold, qnd_budget, regime_process, simulate_jumps,
    simulate_process, tau_meas, JumpRegime, JumpTrace,
};
use twomode::noise::{sff, spectrum_series, SffVariant};
use twomode::optimize::{scan2d_then_refine, scan_then_refine};
use twomode::params::{DriveConfig, FlatConfig, SystemParams};
use twomode::steady_state::solve_steady_state;
use twomode::{export, validation};

#[derive(Parser)]
#[command(
    name = "twomode",
    version,
    about = "Backaction noise spectra, cooling and QND budgets for a two-mode optomechanical cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat JSON parameter file (or a previous run's embedded config).
    #[arg(long)]
    config: PathBuf,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample S_FF over a frequency grid; optionally overlay several kappa_R.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Spectral backend: exact | large-j | one-port | generic.
        #[arg(long, default_value = "exact")]
        variant: String,
        /// Frequency grid min:max:n.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Comma-separated kappa_R overrides; one CSV per value.
        #[arg(long)]
        overlay_kappa_r: Option<String>,
    },
    /// Minimize S_FF(-omega_m) or n_eff over the drive detuning and/or J.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        objective: Objective,
        #[arg(long, value_enum)]
        variable: Variable,
        /// Scan range(s) min:max:n; give the flag twice (delta then J) for
        /// --variable both.
        #[arg(long, required = true, allow_hyphen_values = true)]
        grid: Vec<String>,
        /// Tie delta to delta_cold(J) while scanning J.
        #[arg(long)]
        delta_cold_tied: bool,
        #[arg(long, default_value = "exact")]
        variant: String,
    },
    /// Sweep an axis and tabulate tau_meas, tau_BA and their ratio.
    Qnd {
        #[command(flatten)]
        common: Common,
        /// Sweep axis.
        #[arg(long, value_enum, default_value = "omega-m")]
        axis: Axis,
        /// Sweep range min:max:n.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Space the sweep logarithmically.
        #[arg(long)]
        log: bool,
    },
    /// Cooling figures: exact, small-kappa_R expansion, and their difference.
    Cool {
        #[command(flatten)]
        common: Common,
    },
    /// Simulate the phonon-number telegraph with windowed readout.
    Jumps {
        #[command(flatten)]
        common: Common,
        /// Trace length in units of tau_meas.
        #[arg(long, default_value_t = 12.0)]
        windows: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rate model: physical spectrum or a pinned illustration regime.
        #[arg(long, value_enum, default_value = "physical")]
        regime: Regime,
    },
    /// Run the certification ring and closed-form cross-checks.
    Validate {
        /// Report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random draws for the amplitude ring.
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 20260810)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    /// S_FF(-omega_m)
    SMinus,
    /// effective occupancy (requires net cooling)
    NEff,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variable {
    Delta,
    J,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    OmegaM,
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Physical,
    NoBackaction,
    Slow,
    Fast,
}

/// Everything needed to reproduce a run, embedded in every output.
#[derive(Serialize, Deserialize)]
struct RunConfig {
    command: String,
    params: FlatConfig,
    options: serde_json::Value,
}

fn load_config(path: &Path) -> Result<FlatConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    // accept either the flat object or a previous run's embedded RunConfig
    let flat = if value.get("params").is_some() {
        value["params"].clone()
    } else {
        value
    };
    serde_json::from_value(flat).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_grid(spec: &str, log: bool) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{spec}` must be min:max:n"));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid min `{}`", parts[0]))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid max `{}`", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid count `{}`", parts[2]))?;
    if n < 2 || max <= min {
        return Err(format!("grid `{spec}` must have max > min and n >= 2"));
    }
    if log && min <= 0.0 {
        return Err("log grid requires min > 0".into());
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                min * (max / min).powf(t)
            } else {
                min + (max - min) * t
            }
        })
        .collect())
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    match cli.command {
        Command::Spectrum {
            common,
            variant,
            grid,
            overlay_kappa_r,
        } => {
            let cfg = load_config(&common.config).map_err(|e| (2, e))?;
            let variant: SffVariant = variant.parse().map_err(|e| (2, format!("{e}")))?;
            let omegas = parse_grid(&grid, false).map_err(|e| (2, e))?;
            let overlays: Vec<Option<f64>> = match &overlay_kappa_r {
                None => vec![None],
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map(Some)
                            .map_err(|_| (2u8, format!("bad kappa_R `{s}`")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            for kr in overlays {
                let mut cfg_i = cfg;
                if let Some(kr) = kr {
                    cfg_i.kappa_r = kr;
                }
                let (p, d) = cfg_i.split().map_err(|e| (2, e.to_string()))?;
                let series =
                    spectrum_series(&omegas, &p, &d, variant).map_err(|e| (2, e.to_string()))?;
                let run = RunConfig {
                    command: "spectrum".into(),
                    params: cfg_i,
                    options: serde_json::json!({
                        "variant": variant.to_string(),
                        "grid": grid,
                    }),
                };
                let path = match kr {
                    None => common.out.clone(),
                    Some(kr) => suffixed(&common.out, &format!("_kr{kr}")),
                };
                export::csv_with_header(
                    &path,
                    &serde_json::to_value(&run).unwrap(),
                    &["omega", "s_ff"],
                    series
                        .omegas
                        .iter()
                        .zip(&series.values)
                        .map(|(&w, &s)| vec![w, s]),
                )
                .map_err(|e| (2, e.to_string()))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Optimize {
            common,
            objective,
            variable,
            grid,
            delta_cold_tied,
            variant,
        } => {
            let cfg = load_config(&common.config).map_err(|e| (2, e))?;
            let variant: SffVariant = variant.parse().map_err(|e| (2, format!("{e}")))?;
            let (p, d) = cfg.split().map_err(|e| (2, e.to_string()))?;
            let eval = |p: &SystemParams, d: &DriveConfig| -> Option<f64> {
                match objective {
                    Objective::SMinus => sff(-p.omega_m, p, d, variant).ok(),
                    Objective::NEff => cooling_figures(p, d, variant)
                        .ok()
                        .filter(|c| c.gamma_opt > 0.0)
                        .map(|c| c.n_eff),
                }
            };
            let parse_axis = |spec: &str| -> Result<(f64, f64, usize), (u8, String)> {
                let g = parse_grid(spec, false).map_err(|e| (2, e))?;
                Ok((g[0], *g.last().unwrap(), g.len()))
            };
            let record = match variable {
                Variable::Delta => {
                    let (lo, hi, n) = parse_axis(&grid[0])?;
                    let m = scan_then_refine(
                        |delta| eval(&p, &DriveConfig { delta, ..d }),
                        lo,
                        hi,
                        n,
                        1e-8,
                    )
                    .map_err(|e| (1, e.to_string()))?;
                    serde_json::json!({"delta": m.x, "value": m.value})
                }
                Variable::J => {
                    let (lo, hi, n) = parse_axis(&grid[0])?;
                    let m = scan_then_refine(
                        |j| {
                            let pj = SystemParams { j, ..p };
                            let dj = if delta_cold_tied {
                                DriveConfig {
                                    delta: delta_cold(p.omega_m, j),
                                    ..d
                                }
                            } else {
                                d
                            };
                            eval(&pj, &dj)
                        },
                        lo,
                        hi,
                        n,
                        1e-8,
                    )
                    .map_err(|e| (1, e.to_string()))?;
                    serde_json::json!({"J": m.x, "value": m.value})
                }
                Variable::Both => {
                    if grid.len() < 2 {
                        return Err((2, "--variable both needs two --grid ranges".into()));
                    }
                    let (dlo, dhi, n1) = parse_axis(&grid[0])?;
                    let (jlo, jhi, n2) = parse_axis(&grid[1])?;
                    let (m, j) = scan2d_then_refine(
                        |delta, j| eval(&SystemParams { j, ..p }, &DriveConfig { delta, ..d }),
                        (dlo, jlo),
                        (dhi, jhi),
                        n1.max(n2).min(768),
                        1e-8,
                    )
                    .map_err(|e| (1, e.to_string()))?;
                    serde_json::json!({"delta": m.x, "J": j, "value": m.value})
                }
            };
            let run = RunConfig {
                command: "optimize".into(),
                params: cfg,
                options: serde_json::json!({
                    "variant": variant.to_string(),
                    "grid": grid,
                    "delta_cold_tied": delta_cold_tied,
                }),
            };
            export::json_record(
                &common.out,
                &serde_json::json!({"run": run, "result": record}),
            )
            .map_err(|e| (2, e.to_string()))?;
            println!("wrote {}", common.out.display());
            Ok(())
        }
        Command::Qnd {
            common,
            axis,
            grid,
            log,
        } => {
            let cfg = load_config(&common.config).map_err(|e| (2, e))?;
            let (p, d) = cfg.split().map_err(|e| (2, e.to_string()))?;
            let xs = parse_grid(&grid, log).map_err(|e| (2, e))?;
            let mut rows = Vec::with_capacity(xs.len());
            for &x in &xs {
                let px = match axis {
                    Axis::OmegaM => SystemParams { omega_m: x, ..p },
                    Axis::G => SystemParams { g: x, ..p },
                };
                let b = qnd_budget(&px, &d, 1).map_err(|e| (2, e.to_string()))?;
                rows.push(vec![x, b.tau_meas, b.tau_ba[0], b.tau_ba[1], b.ratio]);
            }
            let run = RunConfig {
                command: "qnd".into(),
                params: cfg,
                options: serde_json::json!({
                    "axis": match axis { Axis::OmegaM => "omega-m", Axis::G => "g" },
                    "grid": grid,
                    "log": log,
                }),
            };
            export::csv_with_header(
                &common.out,
                &serde_json::to_value(&run).unwrap(),
                &["axis_value", "tau_meas", "tau_ba_0", "tau_ba_1", "ratio"],
                rows.into_iter(),
            )
            .map_err(|e| (2, e.to_string()))?;
            println!("wrote {}", common.out.display());
            Ok(())
        }
        Command::Cool { common } => {
            let cfg = load_config(&common.config).map_err(|e| (2, e))?;
            let (p, d) = cfg.split().map_err(|e| (2, e.to_string()))?;
            // both the exact figures and the expansion are evaluated at the
            // cooling detuning, so their difference is pure expansion error
            let dc = delta_cold(p.omega_m, p.j);
            let d_cold = DriveConfig { delta: dc, ..d };
            let exact =
                cooling_figures(&p, &d_cold, SffVariant::Exact).map_err(|e| (1, e.to_string()))?;
            let expansion = cooling_small_kr(&p, d.alpha_l).map_err(|e| (1, e.to_string()))?;
            let run = RunConfig {
                command: "cool".into(),
                params: cfg,
                options: serde_json::json!({ "delta_cold": dc }),
            };
            export::json_record(
                &common.out,
                &serde_json::json!({
                    "run": run,
                    "exact": exact,
                    "small_kappa_r_expansion": expansion,
                    "difference": {
                        "n_eff": expansion.n_eff - exact.n_eff,
                        "gamma_opt": expansion.gamma_opt - exact.gamma_opt,
                    },
                }),
            )
            .map_err(|e| (2, e.to_string()))?;
            println!("wrote {}", common.out.display());
            Ok(())
        }
        Command::Jumps {
            common,
            windows,
            seed,
            regime,
        } => {
            let cfg = load_config(&common.config).map_err(|e| (2, e))?;
            let (p, d) = cfg.split().map_err(|e| (2, e.to_string()))?;
            if windows <= 0.0 {
                return Err((2, "duration must be positive".into()));
            }
            let ss = solve_steady_state(&p, &d).map_err(|e| (2, e.to_string()))?;
            let tm = tau_meas(&p, &ss);
            let trace: JumpTrace = match regime {
                Regime::Physical => simulate_jumps(&p, &d, windows * tm, seed),
                other => {
                    let r = match other {
                        Regime::NoBackaction => JumpRegime::NoBackaction,
                        Regime::Slow => JumpRegime::SlowBackaction,
                        Regime::Fast => JumpRegime::FastBackaction,
                        Regime::Physical => unreachable!(),
                    };
                    simulate_process(&regime_process(r, tm, p.gamma, p.n_th), windows * tm, 20, seed)
                }
            }
            .map_err(|e| (2, e.to_string()))?;
            let run = RunConfig {
                command: "jumps".into(),
                params: cfg,
                options: serde_json::json!({
                    "windows": windows,
                    "seed": seed,
                    "regime": match regime {
                        Regime::Physical => "physical",
                        Regime::NoBackaction => "no-backaction",
                        Regime::Slow => "slow",
                        Regime::Fast => "fast",
                    },
                    "window_len": trace.window_len,
                }),
            };
            export::csv_with_header(
                &common.out,
                &serde_json::to_value(&run).unwrap(),
                &["time", "n_true", "signal"],
                trace
                    .times
                    .iter()
                    .zip(&trace.n_true)
                    .zip(&trace.signal)
                    .map(|((&t, &n), &s)| vec![t, n as f64, s]),
            )
            .map_err(|e| (2, e.to_string()))?;
            println!("wrote {}", common.out.display());
            Ok(())
        }
        Command::Validate { out, draws, seed } => {
            let report = validation::run_all(draws, seed);
            let json = report.to_json();
            if let Some(path) = &out {
                export::json_record(path, &json).map_err(|e| (2, e.to_string()))?;
            }
            for c in &report.checks {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                match c.tolerance {
                    Some(tol) => println!(
                        "{verdict}  {}  observed {:.3e}  tolerance {:.3e}",
                        c.name, c.observed, tol
                    ),
                    None => println!("{verdict}  {}  observed {:.3e}", c.name, c.observed),
                }
            }
            if report.pass {
                println!("all checks passed");
                Ok(())
            } else {
                Err((1, "validation failed".into()))
            }
        }
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

//! Command-line front end: subcommand dispatch, config ingestion, CSV/JSON
//! emission. Exit codes: 0 success, 2 validation error, 3 numerical budget
//! error, 4 failed assertion in sweep/selftest.

use crate::error::Error;
use crate::flux::FluxProfile;
use crate::oscquad::{Cutoff, DyadicBump};
use crate::propagator::{self, KernelConfig};
use crate::resolvent::{self, PolarPoint, SIntegralSpec};
use crate::specfun::{self, Axis, Branch};
use crate::verify;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "abkernel",
    version,
    about = "Propagator and resolvent kernels of the 2D fourth-order magnetic Schrödinger operator, with bound-verification sweeps"
)]
pub struct Cli {
    /// Write the primary output to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps (env DK_THREADS overrides).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SpecFn {
    J0,
    Y0,
    K0,
    H0p,
    H0m,
    Omega,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    Real,
    Imag,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SweepMode {
    Decay,
    Envelope,
    Free,
    Vdc,
    Bl1,
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "+" | "plus" => Ok(Branch::Plus),
        "-" | "minus" => Ok(Branch::Minus),
        other => Err(format!("branch must be + or -, got {other}")),
    }
}

fn parse_polar(s: &str) -> Result<PolarPoint, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected r,theta, got {s}"));
    }
    let r: f64 = parts[0].trim().parse().map_err(|e| format!("bad radius: {e}"))?;
    let theta: f64 = parts[1].trim().parse().map_err(|e| format!("bad angle: {e}"))?;
    PolarPoint::new(r, theta).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one special function; prints the CSV row x,re,im.
    Specfun {
        #[arg(long = "fn", value_enum)]
        func: SpecFn,
        #[arg(long)]
        x: f64,
        #[arg(long, value_enum, default_value = "real")]
        axis: AxisArg,
        #[arg(long, value_parser = parse_branch, default_value = "+")]
        branch: Branch,
    },
    /// Evaluate a resolvent kernel; prints the CSV row lambda,re,im,abs.
    Resolvent {
        #[arg(long)]
        order: u8,
        #[arg(long, value_parser = parse_branch)]
        branch: Branch,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_parser = parse_polar)]
        x: PolarPoint,
        #[arg(long, value_parser = parse_polar)]
        y: PolarPoint,
        /// Flux profile: inline JSON or a file path.
        #[arg(long)]
        flux: String,
    },
    /// Evaluate the propagator kernel; prints t,re,im,abs,trunc_err.
    Kernel {
        #[arg(long)]
        t: f64,
        #[arg(long, value_parser = parse_polar)]
        x: PolarPoint,
        #[arg(long, value_parser = parse_polar)]
        y: PolarPoint,
        #[arg(long)]
        flux: String,
        /// Also emit one CSV row per dyadic term (l,branch,j,re,im,abs,envelope,ratio).
        #[arg(long)]
        dump_dyadic: bool,
    },
    /// Run a verification sweep; emits a JSON report (and optional CSV table).
    Sweep {
        #[arg(long, value_enum)]
        mode: SweepMode,
        #[arg(long)]
        flux: Option<String>,
        /// JSON config for the selected mode (inline or file path).
        #[arg(long)]
        config: Option<String>,
        /// Write the tabular data here as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fast internal consistency checks; exit 0 when everything passes.
    Selftest,
}

fn load_text(arg: &str) -> crate::error::Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {arg}: {e}")))
    }
}

fn load_flux(arg: &str) -> crate::error::Result<FluxProfile> {
    FluxProfile::from_json(&load_text(arg)?)
}

fn emit(out: &Option<PathBuf>, content: &str) -> crate::error::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// -------------------------------------------------------------------------
// sweep configs
// -------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeSweepConfig {
    pub draws_per_cell: usize,
    pub decades: usize,
    pub seed: u64,
    pub kernel: KernelConfig,
}

impl Default for EnvelopeSweepConfig {
    fn default() -> Self {
        EnvelopeSweepConfig {
            draws_per_cell: 20,
            decades: 5,
            seed: 0xD15C0,
            kernel: KernelConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FreeCheckConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub r_max: f64,
    pub r_points: usize,
    pub kernel: KernelConfig,
}

impl Default for FreeCheckConfig {
    fn default() -> Self {
        FreeCheckConfig {
            t_min: 0.1,
            t_max: 100.0,
            t_points: 20,
            r_max: 50.0,
            r_points: 25,
            kernel: KernelConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VdcConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

impl Default for VdcConfig {
    fn default() -> Self {
        VdcConfig {
            lambda_min: 1e2,
            lambda_max: 1e5,
            points: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bl1Config {
    pub alphas: Vec<f64>,
    pub n_grid: usize,
    pub spec: SIntegralSpec,
}

impl Default for Bl1Config {
    fn default() -> Self {
        Bl1Config {
            alphas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            n_grid: 64,
            spec: SIntegralSpec::default(),
        }
    }
}

fn parse_config<T: serde::de::DeserializeOwned + Default>(
    arg: &Option<String>,
) -> crate::error::Result<T> {
    match arg {
        None => Ok(T::default()),
        Some(text) => {
            let text = load_text(text)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("sweep config: {e}")))
        }
    }
}

fn json_report<C: Serialize, R: Serialize>(
    mode: &str,
    config: &C,
    result: &R,
    pass: bool,
) -> String {
    let report = serde_json::json!({
        "mode": mode,
        "config": config,
        "result": result,
        "pass": pass,
    });
    let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
    s.push('\n');
    s
}

fn fmt_complex_row(prefix: &str, v: num_complex::Complex64) -> String {
    format!("{prefix},{},{},{}\n", v.re, v.im, v.norm())
}

// -------------------------------------------------------------------------
// dispatch
// -------------------------------------------------------------------------

/// Parse argv and run; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exit codes
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprintln!("{e}");
            return 2;
        }
    };

    let threads = std::env::var("DK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match run_command(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_command(cli: &Cli) -> crate::error::Result<i32> {
    match &cli.command {
        Command::Specfun {
            func,
            x,
            axis,
            branch,
        } => {
            let x = *x;
            let v = match func {
                SpecFn::J0 => num_complex::Complex64::new(specfun::bessel_j0(x), 0.0),
                SpecFn::Y0 => num_complex::Complex64::new(specfun::bessel_y0(x)?, 0.0),
                SpecFn::K0 => num_complex::Complex64::new(specfun::bessel_k0(x)?, 0.0),
                SpecFn::H0p | SpecFn::H0m => {
                    let b = if matches!(func, SpecFn::H0p) {
                        Branch::Plus
                    } else {
                        Branch::Minus
                    };
                    let ax = match axis {
                        AxisArg::Real => Axis::Real,
                        AxisArg::Imag => Axis::Imaginary,
                    };
                    specfun::hankel0(b, ax, x)?
                }
                SpecFn::Omega => specfun::omega(*branch, x)?,
            };
            let mut s = String::from("x,re,im\n");
            let _ = writeln!(s, "{},{},{}", x, v.re, v.im);
            emit(&cli.out, &s)?;
            Ok(0)
        }

        Command::Resolvent {
            order,
            branch,
            lambda,
            x,
            y,
            flux,
        } => {
            let p = load_flux(flux)?;
            let spec = SIntegralSpec::default();
            let v = match order {
                2 => resolvent::resolvent2(*branch, &p, *lambda, x, y, &spec)?,
                4 => resolvent::resolvent4(*branch, &p, *lambda, x, y, &spec)?,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "--order must be 2 or 4, got {other}"
                    )))
                }
            };
            let mut s = String::from("lambda,re,im,abs\n");
            s.push_str(&fmt_complex_row(&format!("{lambda}"), v));
            emit(&cli.out, &s)?;
            Ok(0)
        }

        Command::Kernel {
            t,
            x,
            y,
            flux,
            dump_dyadic,
        } => {
            let p = load_flux(flux)?;
            let cfg = KernelConfig::default();
            let k = propagator::kernel(*t, x, y, &p, &cfg)?;
            let mut s = String::from("t,re,im,abs,trunc_err\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                t,
                k.value.re,
                k.value.im,
                k.value.norm(),
                k.trunc_err
            );
            if *dump_dyadic {
                s.push_str("l,branch,j,re,im,abs,envelope,ratio\n");
                for term in &k.terms {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        term.ell,
                        term.branch,
                        term.j,
                        term.value_re,
                        term.value_im,
                        term.value().norm(),
                        term.envelope,
                        term.ratio()
                    );
                }
            }
            emit(&cli.out, &s)?;
            Ok(0)
        }

        Command::Sweep {
            mode,
            flux,
            config,
            csv,
        } => run_sweep(cli, mode, flux, config, csv),

        Command::Selftest => run_selftest(),
    }
}

fn write_csv(csv: &Option<PathBuf>, content: &str) -> crate::error::Result<()> {
    if let Some(path) = csv {
        std::fs::write(path, content)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_sweep(
    cli: &Cli,
    mode: &SweepMode,
    flux: &Option<String>,
    config: &Option<String>,
    csv: &Option<PathBuf>,
) -> crate::error::Result<i32> {
    match mode {
        SweepMode::Decay => {
            let p = match flux {
                Some(f) => load_flux(f)?,
                None => FluxProfile::constant(0.5),
            };
            let cfg: verify::DecaySweepConfig = parse_config(config)?;
            let report = verify::decay_sweep(&p, &cfg)?;
            let pass = (report.slope + 0.5).abs() <= 0.1 && report.failures.is_empty();
            let mut table = String::from("t,sup_abs\n");
            for (t, s) in report.t_grid.iter().zip(&report.sup_abs) {
                let _ = writeln!(table, "{t},{s}");
            }
            write_csv(csv, &table)?;
            emit(&cli.out, &json_report("decay", &cfg, &report, pass))?;
            Ok(if pass { 0 } else { 4 })
        }
        SweepMode::Envelope => {
            let p = match flux {
                Some(f) => load_flux(f)?,
                None => FluxProfile::constant(0.3),
            };
            let cfg: EnvelopeSweepConfig = parse_config(config)?;
            let report =
                verify::envelope_sweep(&p, cfg.draws_per_cell, cfg.decades, cfg.seed, &cfg.kernel)?;
            let pass = envelope_pass(&report);
            let mut table = String::from("ell,j,j0,t,q,rx,ry,dtheta,ratio\n");
            for d in &report.draws {
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{},{},{},{}",
                    d.ell, d.j, d.j0, d.t, d.q, d.rx, d.ry, d.dtheta, d.ratio
                );
            }
            write_csv(csv, &table)?;
            emit(&cli.out, &json_report("envelope", &cfg, &report, pass))?;
            Ok(if pass { 0 } else { 4 })
        }
        SweepMode::Free => {
            let cfg: FreeCheckConfig = parse_config(config)?;
            let t_grid = verify::log_grid(cfg.t_min, cfg.t_max, cfg.t_points);
            let r_grid: Vec<f64> = (0..cfg.r_points)
                .map(|i| cfg.r_max * i as f64 / (cfg.r_points - 1) as f64)
                .collect();
            let report = verify::pointwise_free_check(&t_grid, &r_grid, &cfg.kernel)?;
            let pass = report.max_ratio.is_finite()
                && (report.sup_slope.slope + 0.5).abs() <= 0.03
                && report.r0_max_deviation <= 1e-3;
            emit(&cli.out, &json_report("free", &cfg, &report, pass))?;
            Ok(if pass { 0 } else { 4 })
        }
        SweepMode::Vdc => {
            let cfg: VdcConfig = parse_config(config)?;
            let lambdas = verify::log_grid(cfg.lambda_min, cfg.lambda_max, cfg.points);
            let s1 = verify::vdc_check(1, &lambdas)?;
            let s4 = verify::vdc_check(4, &lambdas)?;
            let pass = (s1 + 1.0).abs() <= 0.03 && (s4 + 0.25).abs() <= 0.03;
            let result = serde_json::json!({"slope_k1": s1, "slope_k4": s4});
            write_csv(csv, &format!("k,slope\n1,{s1}\n4,{s4}\n"))?;
            emit(&cli.out, &json_report("vdc", &cfg, &result, pass))?;
            Ok(if pass { 0 } else { 4 })
        }
        SweepMode::Bl1 => {
            let cfg: Bl1Config = parse_config(config)?;
            let report = verify::b_l1_sweep(&cfg.alphas, cfg.n_grid, &cfg.spec)?;
            let pass = report.max.is_finite();
            let mut table = String::from("alpha,max\n");
            for (a, m) in &report.per_alpha {
                let _ = writeln!(table, "{a},{m}");
            }
            write_csv(csv, &table)?;
            emit(&cli.out, &json_report("bl1", &cfg, &report, pass))?;
            Ok(if pass { 0 } else { 4 })
        }
    }
}

fn envelope_pass(report: &verify::EnvelopeSweepReport) -> bool {
    if !report.max_ratio.is_finite() {
        return false;
    }
    for maxima in [&report.window_decade_max, &report.regular_decade_max] {
        let filled: Vec<f64> = maxima.iter().cloned().filter(|&m| m > 0.0).collect();
        if filled.len() >= 2 {
            let hi = filled.iter().cloned().fold(f64::MIN, f64::max);
            let lo = filled.iter().cloned().fold(f64::MAX, f64::min);
            if hi / lo > 2.0 {
                return false;
            }
        }
    }
    true
}

fn run_selftest() -> crate::error::Result<i32> {
    let mut all_pass = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        all_pass &= ok;
    };

    // Wronskian of J₀, Y₀ across both regimes
    let mut worst = 0.0f64;
    let mut x = 0.1;
    while x <= 50.0 {
        let (j0, y0, j0p, y0p) = specfun::j0_y0_with_derivatives(x)?;
        let exact = 2.0 / (std::f64::consts::PI * x);
        worst = worst.max(((j0 * y0p - j0p * y0) - exact).abs() / exact);
        x *= 1.11;
    }
    check("wronskian", worst <= 1e-10, format!("max rel residual {worst:.2e}"));

    // dyadic partition of unity
    let bump = DyadicBump::new(Cutoff::default());
    let mut worst = 0.0f64;
    let mut s = 2.0f64.powi(-18);
    while s <= 2.0f64.powi(18) {
        let total: f64 = (-22..=22).map(|j| bump.phi_j(j, s)).sum();
        worst = worst.max((total - 1.0).abs());
        s *= 5.3;
    }
    check("partition_of_unity", worst <= 1e-14, format!("max deviation {worst:.2e}"));

    // Van der Corput scaling (short grids)
    let lambdas = verify::log_grid(1e2, 1e5, 5);
    let s1 = verify::vdc_check(1, &lambdas)?;
    let s4 = verify::vdc_check(4, &lambdas)?;
    check(
        "van_der_corput",
        (s1 + 1.0).abs() <= 0.03 && (s4 + 0.25).abs() <= 0.03,
        format!("slopes {s1:.4} (k=1), {s4:.4} (k=4)"),
    );

    // gauge invariance at integer flux
    let p = FluxProfile::constant(1.0);
    let cfg = KernelConfig::default();
    let mut worst = 0.0f64;
    for &(t, rx, tx, ry, ty) in &[(0.8, 1.0, 0.3, 1.4, 2.0), (2.5, 0.7, 4.0, 2.0, 1.1)] {
        let x = PolarPoint::new(rx, tx)?;
        let y = PolarPoint::new(ry, ty)?;
        let k = propagator::kernel(t, &x, &y, &p, &cfg)?;
        let f = propagator::free_kernel(t, x.distance(&y), &cfg)?;
        worst = worst.max((k.value.norm() - f.norm()).abs() / f.norm());
    }
    check("gauge_invariance", worst <= 1e-4, format!("max rel deviation {worst:.2e}"));

    Ok(if all_pass { 0 } else { 4 })
}

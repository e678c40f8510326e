//! Bound-verification harness: decay-slope fits against the |t|^{-1/2}
//! target, dyadic envelope ratio sweeps, Van der Corput scaling checks, and
//! ∫|B_α| ds sweeps. Every sweep is seeded and assembled deterministically,
//! so reports reproduce bit-for-bit for a fixed config.

use crate::error::{Error, Result};
use crate::flux::FluxProfile;
use crate::oscquad::{self, pow2, Cutoff, PhaseSpec};
use crate::propagator::{self, dyadic_envelope, KernelConfig};
use crate::resolvent::{b_l1, PolarPoint, SIntegralSpec};
use crate::specfun::Branch;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ordinary least-squares line fit on (x, y) pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope
    pub stderr: f64,
}

/// OLS fit of y = intercept + slope·x.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidConfig("line fit needs ≥ 3 paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("degenerate abscissa in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let resid = y - intercept - slope * x;
        ss_res += resid * resid;
    }
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        stderr,
    })
}

/// Min/max/mean of a nonempty sample.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl SummaryStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return SummaryStats::default();
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &s in samples {
            min = min.min(s);
            max = max.max(s);
            sum += s;
        }
        SummaryStats {
            min,
            max,
            mean: sum / samples.len() as f64,
            count: samples.len(),
        }
    }
}

/// Log-spaced grid of n points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (ll + (lh - ll) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Deterministic spatial sample set for the decay sweeps: a radial × angular
/// product spread plus near-diagonal pairs, all with r ≤ 20 and no antipodal
/// or coincident configurations.
pub fn default_sample_pairs() -> Vec<(PolarPoint, PolarPoint)> {
    let raw = [
        (1.0, 0.30, 1.13, 0.41),  // near-diagonal
        (3.0, 2.00, 3.20, 2.09),  // near-diagonal, larger radius
        (0.35, 1.00, 0.50, 1.60), // small separation
        (0.80, 4.00, 0.77, 4.90),
        (0.50, 0.00, 1.20, 2.20),
        (2.00, 1.00, 2.00, 3.40),
        (1.50, 5.50, 4.00, 1.10),
        (6.00, 0.70, 8.00, 3.90),
        (10.0, 4.40, 9.00, 1.90),
        (2.50, 0.20, 14.0, 2.80),
    ];
    raw.iter()
        .map(|&(rx, tx, ry, ty)| {
            (
                PolarPoint::new(rx, tx).expect("valid sample"),
                PolarPoint::new(ry, ty).expect("valid sample"),
            )
        })
        .collect()
}

/// Doubled-density variant used by the sampling-stability check.
pub fn dense_sample_pairs() -> Vec<(PolarPoint, PolarPoint)> {
    let mut pairs = default_sample_pairs();
    let extra = [
        (1.05, 0.36, 1.10, 0.38),
        (2.90, 2.05, 3.35, 2.02),
        (0.42, 1.25, 0.55, 1.72),
        (0.84, 4.42, 0.73, 4.66),
        (0.80, 0.90, 1.05, 2.50),
        (2.10, 1.15, 1.90, 3.15),
        (2.00, 5.80, 3.60, 1.30),
        (6.80, 1.00, 7.40, 3.50),
        (9.20, 4.00, 9.80, 2.30),
        (3.20, 0.55, 12.5, 2.50),
    ];
    pairs.extend(extra.iter().map(|&(rx, tx, ry, ty)| {
        (
            PolarPoint::new(rx, tx).expect("valid sample"),
            PolarPoint::new(ry, ty).expect("valid sample"),
        )
    }));
    pairs
}

// ---------------------------------------------------------------------------
// decay sweep
// ---------------------------------------------------------------------------

/// Configuration of a dispersive decay sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySweepConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// (r, θ) pairs; empty means the default deterministic sample set.
    pub sample_pairs: Vec<((f64, f64), (f64, f64))>,
    /// Include the coincident-point column via the free kernel (only
    /// meaningful for integer flux, where the kernel is gauge-free).
    pub include_origin: bool,
    pub kernel: KernelConfig,
    pub seed: u64,
}

impl Default for DecaySweepConfig {
    fn default() -> Self {
        DecaySweepConfig {
            t_min: 0.5,
            t_max: 50.0,
            t_points: 12,
            sample_pairs: Vec::new(),
            include_origin: false,
            kernel: KernelConfig::default(),
            seed: 0xD15C0,
        }
    }
}

/// Grid sweep result: sup-norms per t, the fitted log–log slope, and the
/// envelope-ratio statistics observed along the way.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub t_grid: Vec<f64>,
    pub sup_abs: Vec<f64>,
    pub slope: f64,
    pub slope_ci: f64,
    pub constant: f64,
    pub envelope_ratios: SummaryStats,
    pub seed: u64,
    pub failures: Vec<String>,
}

fn resolve_pairs(cfg: &DecaySweepConfig) -> Result<Vec<(PolarPoint, PolarPoint)>> {
    if cfg.sample_pairs.is_empty() {
        return Ok(default_sample_pairs());
    }
    cfg.sample_pairs
        .iter()
        .map(|&((rx, tx), (ry, ty))| Ok((PolarPoint::new(rx, tx)?, PolarPoint::new(ry, ty)?)))
        .collect()
}

/// Sup of |kernel| over the sample set per t, with the least-squares slope of
/// log sup|kernel| against log t.
pub fn decay_sweep(p: &FluxProfile, cfg: &DecaySweepConfig) -> Result<DecayReport> {
    if cfg.t_points < 8 {
        return Err(Error::InvalidConfig("decay sweep needs ≥ 8 time points".into()));
    }
    let pairs = resolve_pairs(cfg)?;
    for (x, y) in &pairs {
        if x.distance(y) == 0.0 {
            return Err(Error::InvalidConfig("sample set contains coincident points".into()));
        }
    }
    let t_grid = log_grid(cfg.t_min, cfg.t_max, cfg.t_points);
    let gauge_free = p.is_integer_flux();

    let per_t: Vec<(f64, Vec<f64>, Vec<String>)> = t_grid
        .par_iter()
        .map(|&t| {
            let mut sup = 0.0f64;
            let mut ratios = Vec::new();
            let mut failures = Vec::new();
            if gauge_free {
                // gauge-equivalent to the free kernel in magnitude
                if cfg.include_origin {
                    match propagator::free_kernel(t, 0.0, &cfg.kernel) {
                        Ok(v) => sup = sup.max(v.norm()),
                        Err(e) => failures.push(format!("t={t} r=0: {e}")),
                    }
                }
                for (x, y) in &pairs {
                    match propagator::free_kernel(t, x.distance(y), &cfg.kernel) {
                        Ok(v) => sup = sup.max(v.norm()),
                        Err(e) => failures.push(format!("t={t}: {e}")),
                    }
                }
            } else {
                for (x, y) in &pairs {
                    match propagator::kernel(t, x, y, p, &cfg.kernel) {
                        Ok(k) => {
                            sup = sup.max(k.value.norm());
                            ratios.extend(k.terms.iter().map(|term| term.ratio()));
                        }
                        Err(e) => failures.push(format!("t={t}: {e}")),
                    }
                }
            }
            (sup, ratios, failures)
        })
        .collect();

    let sup_abs: Vec<f64> = per_t.iter().map(|r| r.0).collect();
    let mut ratios = Vec::new();
    let mut failures = Vec::new();
    for (_, r, f) in per_t {
        ratios.extend(r);
        failures.extend(f);
    }
    if sup_abs.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidConfig(
            "decay sweep produced non-finite or zero sup-norms; nothing to fit".into(),
        ));
    }
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = sup_abs.iter().map(|s| s.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    Ok(DecayReport {
        t_grid,
        sup_abs,
        slope: fit.slope,
        slope_ci: fit.stderr,
        constant: fit.intercept.exp(),
        envelope_ratios: SummaryStats::from_samples(&ratios),
        seed: cfg.seed,
        failures,
    })
}

// ---------------------------------------------------------------------------
// free pointwise bound
// ---------------------------------------------------------------------------

/// Max of |K_free(t, r)|·t^{1/2}(1 + t^{-1/4} r)^{2/3} over a (t, r) grid.
#[derive(Clone, Debug, Serialize)]
pub struct FreePointwiseReport {
    pub max_ratio: f64,
    pub argmax_t: f64,
    pub argmax_r: f64,
    /// deviation of the r = 0 column from the Fresnel constant 1/(8√π)
    pub r0_max_deviation: f64,
    pub sup_slope: LineFit,
}

pub fn pointwise_free_check(
    t_grid: &[f64],
    r_grid: &[f64],
    cfg: &KernelConfig,
) -> Result<FreePointwiseReport> {
    let fresnel = 1.0 / (8.0 * std::f64::consts::PI.sqrt());
    let rows: Vec<(f64, f64, f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            let mut best = (0.0f64, 0.0f64);
            let mut r0_dev = 0.0f64;
            let mut sup_r = 0.0f64;
            for &r in r_grid {
                let v = propagator::free_kernel(t, r, cfg).expect("free kernel");
                let ratio = v.norm() * t.sqrt() * (1.0 + t.powf(-0.25) * r).powf(2.0 / 3.0);
                if ratio > best.0 {
                    best = (ratio, r);
                }
                sup_r = sup_r.max(v.norm());
                if r == 0.0 {
                    r0_dev = (v.norm() * t.sqrt() - fresnel).abs() / fresnel;
                }
            }
            (best.0, best.1, r0_dev, sup_r)
        })
        .collect();

    let mut max_ratio = 0.0;
    let mut argmax = (0.0, 0.0);
    let mut r0_max_deviation = 0.0f64;
    for (i, &(ratio, r, dev, _)) in rows.iter().enumerate() {
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = (t_grid[i], r);
        }
        r0_max_deviation = r0_max_deviation.max(dev);
    }
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.3.ln()).collect();
    let sup_slope = line_fit(&xs, &ys)?;
    Ok(FreePointwiseReport {
        max_ratio,
        argmax_t: argmax.0,
        argmax_r: argmax.1,
        r0_max_deviation,
        sup_slope,
    })
}

// ---------------------------------------------------------------------------
// Van der Corput scaling
// ---------------------------------------------------------------------------

/// Fitted log–log slope of |∫ e^{-iλφ(σ)} χ(σ) dσ| against λ, with
/// φ(σ) = σ (k = 1) or φ(σ) = σ⁴ (k = 4). The cutoff amplitude keeps the
/// k = 1 endpoint value nonzero and the k = 4 degenerate critical point
/// σ = 0 inside the support, which is what makes the λ^{-1/k} rates sharp.
pub fn vdc_check(k: u32, lambda_list: &[f64]) -> Result<f64> {
    if lambda_list.len() < 4 {
        return Err(Error::InvalidConfig("vdc check needs ≥ 4 frequencies".into()));
    }
    let span = lambda_list.iter().cloned().fold(f64::MIN, f64::max)
        / lambda_list.iter().cloned().fold(f64::MAX, f64::min);
    if span < 999.0 {
        return Err(Error::InvalidConfig("λ list must span ≥ 3 decades".into()));
    }
    let chi = Cutoff::default();
    let amp = |s: f64| num_complex::Complex64::new(chi.chi(s), 0.0);
    let mags: Vec<f64> = lambda_list
        .par_iter()
        .map(|&lam| {
            let phase = match k {
                1 => PhaseSpec { a: 0.0, b: lam },
                4 => PhaseSpec { a: lam, b: 0.0 },
                _ => return Err(Error::InvalidConfig(format!("vdc supports k ∈ {{1,4}}, got {k}"))),
            };
            let (v, _) = oscquad::integrate_oscillatory_on(
                &phase,
                (0.0, 1.0),
                &amp,
                1e-11,
                oscquad::PANEL_CAP,
            )?;
            Ok(v.norm())
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = lambda_list.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = mags.iter().map(|m| m.ln()).collect();
    Ok(line_fit(&xs, &ys)?.slope)
}

// ---------------------------------------------------------------------------
// ∫|B_α| ds sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Bl1Report {
    pub max: f64,
    pub per_alpha: Vec<(f64, f64)>,
    pub grid: usize,
}

/// Max of ∫₀^∞|B_α| ds over an n×n angle grid and a list of fluxes.
pub fn b_l1_sweep(alpha_list: &[f64], n_grid: usize, spec: &SIntegralSpec) -> Result<Bl1Report> {
    let mut per_alpha = Vec::with_capacity(alpha_list.len());
    for &alpha in alpha_list {
        let p = FluxProfile::constant(alpha);
        let cells: Vec<(usize, usize)> = (0..n_grid)
            .flat_map(|i| (0..n_grid).map(move |k| (i, k)))
            .collect();
        let vals = cells
            .par_iter()
            .map(|&(i, k)| {
                let tx = std::f64::consts::TAU * i as f64 / n_grid as f64;
                let ty = std::f64::consts::TAU * k as f64 / n_grid as f64;
                b_l1(&p, tx, ty, spec)
            })
            .collect::<Result<Vec<_>>>()?;
        let max = vals.iter().cloned().fold(0.0f64, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite ∫|B| at α = {alpha}")));
        }
        per_alpha.push((alpha, max));
    }
    let max = per_alpha.iter().map(|p| p.1).fold(0.0f64, f64::max);
    Ok(Bl1Report {
        max,
        per_alpha,
        grid: n_grid,
    })
}

// ---------------------------------------------------------------------------
// envelope ratio sweep
// ---------------------------------------------------------------------------

/// Ratio |K_{ℓ,j}^±| / envelope, maximized over the two branches.
pub fn envelope_check(
    ell: u8,
    t: f64,
    x: &PolarPoint,
    y: &PolarPoint,
    j: i32,
    p: &FluxProfile,
    cfg: &KernelConfig,
) -> Result<f64> {
    let j0 = oscquad::j_center(t.abs(), x.distance(y));
    let env = dyadic_envelope(j, j0, t);
    let mut worst = 0.0f64;
    for branch in [Branch::Plus, Branch::Minus] {
        let v = match ell {
            1 => propagator::k1j(branch, t, j, x, y, cfg)?,
            2 => propagator::k2j(branch, t, j, x, y, p, cfg)?,
            _ => return Err(Error::InvalidConfig(format!("ℓ must be 1 or 2, got {ell}"))),
        };
        worst = worst.max(v.norm() / env);
    }
    Ok(worst)
}

/// One draw of the envelope sweep.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeDraw {
    pub ell: u8,
    pub j: i32,
    pub j0: i32,
    pub t: f64,
    /// 2^{4j}·t, the block's oscillation strength
    pub q: f64,
    pub rx: f64,
    pub ry: f64,
    pub dtheta: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeSweepReport {
    pub seed: u64,
    pub draws: Vec<EnvelopeDraw>,
    /// per-decade maxima of the ratio, stationary window (|j−j₀| ≤ 2)
    pub window_decade_max: Vec<f64>,
    /// per-decade maxima, regular regime (|j−j₀| > 2)
    pub regular_decade_max: Vec<f64>,
    pub max_ratio: f64,
}

/// Seeded sweep of envelope ratios over random (ℓ, ±, t, j, x, y)
/// configurations, stratified so 2^{4j}t covers `decades` decades and both
/// |j − j₀| regimes appear in each of them.
pub fn envelope_sweep(
    p: &FluxProfile,
    draws_per_cell: usize,
    decades: usize,
    seed: u64,
    cfg: &KernelConfig,
) -> Result<EnvelopeSweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut configs = Vec::new();
    for decade in 0..decades {
        for window in [true, false] {
            for _ in 0..draws_per_cell {
                // q = 2^{4j} t in [10^decade · 0.1, 10^{decade+1} · 0.1)
                let q = 0.1 * 10f64.powf(decade as f64 + rng.random::<f64>());
                // pick geometry by rejection so the radii stay at desk scale
                let mut attempt = 0;
                loop {
                    attempt += 1;
                    let t: f64 = 0.05 * (5.0f64 / 0.05).powf(rng.random::<f64>());
                    let j = ((q / t).log2() / 4.0).round() as i32;
                    if j < -3 || j > 6 {
                        if attempt > 200 {
                            break;
                        }
                        continue;
                    }
                    let m: i32 = if window {
                        rng.random_range(0..3)
                    } else {
                        rng.random_range(3..5)
                    };
                    let below = rng.random::<f64>() < 0.7;
                    let j0 = if below { j - m } else { j + m };
                    let u: f64 = 0.1 + 0.8 * rng.random::<f64>();
                    let r = t * 8f64.powf(j0 as f64 + u);
                    if !(0.01..=40.0).contains(&r) {
                        if attempt > 200 {
                            break;
                        }
                        continue;
                    }
                    let dtheta: f64 = rng.random_range(0.4..2.6);
                    let rho = r / (2.0 * (0.5 * dtheta).sin());
                    if !(0.05..=30.0).contains(&rho) {
                        if attempt > 200 {
                            break;
                        }
                        continue;
                    }
                    let theta_c: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let ell = if p.is_integer_flux() || rng.random::<f64>() < 0.5 {
                        1
                    } else {
                        2
                    };
                    let q_exact = pow2(4 * j) * t;
                    configs.push((ell as u8, t, j, j0, rho, dtheta, theta_c, q_exact, decade, window));
                    break;
                }
            }
        }
    }

    let draws: Vec<(EnvelopeDraw, usize, bool)> = configs
        .par_iter()
        .map(|&(ell, t, j, _j0_target, rho, dtheta, theta_c, q, decade, window)| {
            let x = PolarPoint::new(rho, theta_c + dtheta).expect("valid draw");
            let y = PolarPoint::new(rho, theta_c).expect("valid draw");
            let j0 = oscquad::j_center(t, x.distance(&y));
            let ratio = envelope_check(ell, t, &x, &y, j, p, cfg)?;
            Ok((
                EnvelopeDraw {
                    ell,
                    j,
                    j0,
                    t,
                    q,
                    rx: x.r,
                    ry: y.r,
                    dtheta,
                    ratio,
                },
                decade,
                window,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut window_decade_max = vec![0.0f64; decades];
    let mut regular_decade_max = vec![0.0f64; decades];
    let mut max_ratio = 0.0f64;
    let mut flat = Vec::with_capacity(draws.len());
    for (draw, decade, _claimed_window) in draws {
        let actually_window = (draw.j - draw.j0).abs() <= 2;
        if actually_window {
            window_decade_max[decade] = window_decade_max[decade].max(draw.ratio);
        } else {
            regular_decade_max[decade] = regular_decade_max[decade].max(draw.ratio);
        }
        max_ratio = max_ratio.max(draw.ratio);
        flat.push(draw);
    }
    Ok(EnvelopeSweepReport {
        seed,
        draws: flat,
        window_decade_max,
        regular_decade_max,
        max_ratio,
    })
}

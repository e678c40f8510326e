//! Smooth dyadic cutoffs and an oscillation-aware quadrature engine for
//! phases a·σ⁴ + b·σ. Panels are sized so each spans at most 1/8 of a local
//! oscillation, then refined adaptively on the Gauss–Kronrod error estimate.

use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Smooth step built from exp(-1/x): equal to 1 on |s| ≤ scale/2 and 0 on
/// |s| ≥ scale, C^∞ in between.
#[derive(Clone, Copy, Debug)]
pub struct Cutoff {
    scale: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { scale: 1.0 }
    }
}

fn bump_half(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Transition profile: 0 at x ≤ 0, 1 at x ≥ 1.
fn smooth_step(x: f64) -> f64 {
    let up = bump_half(x);
    let down = bump_half(1.0 - x);
    if up == 0.0 {
        return 0.0;
    }
    if down == 0.0 {
        return 1.0;
    }
    up / (up + down)
}

impl Cutoff {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidConfig(format!("cutoff scale must be positive, got {scale}")));
        }
        Ok(Cutoff { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// χ(s): 1 for |s| ≤ scale/2, 0 for |s| ≥ scale.
    pub fn chi(&self, s: f64) -> f64 {
        1.0 - smooth_step(2.0 * (s / self.scale).abs() - 1.0)
    }
}

/// φ₀(s) = χ(s) − χ(2s), supported in [scale/4, scale] on the positive axis,
/// with Σ_j φ₀(2^{-j} s) = 1 for s > 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicBump {
    pub cutoff: Cutoff,
}

impl DyadicBump {
    pub fn new(cutoff: Cutoff) -> Self {
        DyadicBump { cutoff }
    }

    pub fn phi0(&self, s: f64) -> f64 {
        self.cutoff.chi(s) - self.cutoff.chi(2.0 * s)
    }

    /// φ_j(s) = φ₀(2^{-j} s). Scaling by powers of two is exact.
    pub fn phi_j(&self, j: i32, s: f64) -> f64 {
        self.phi0(s * pow2(-j))
    }

    /// Support of φ₀(2^{-j}·) on the positive axis: [scale·2^{j-2}, scale·2^j].
    pub fn support_j(&self, j: i32) -> (f64, f64) {
        let c = self.cutoff.scale;
        (c * pow2(j - 2), c * pow2(j))
    }
}

/// Exact power of two as f64.
pub fn pow2(j: i32) -> f64 {
    2.0_f64.powi(j)
}

/// Phase σ ↦ a·σ⁴ + b·σ of the dyadic frequency integrals
/// (a = t·2^{4j}, b = ∓2^j|x−y| after rescaling).
#[derive(Clone, Copy, Debug)]
pub struct PhaseSpec {
    pub a: f64,
    pub b: f64,
}

impl PhaseSpec {
    pub fn phase(&self, s: f64) -> f64 {
        self.a * s * s * s * s + self.b * s
    }

    pub fn derivative(&self, s: f64) -> f64 {
        4.0 * self.a * s * s * s + self.b
    }

    /// Oscillation count driving the node budget.
    pub fn n_osc(&self) -> f64 {
        (self.a.abs() + self.b.abs()) / TAU
    }

    /// Minimum of the second derivative 12·a·σ² over [lo, hi] (a ≥ 0).
    /// This is the curvature floor the stationary-phase bound rests on.
    pub fn second_derivative_min(&self, lo: f64, hi: f64) -> f64 {
        let s = if self.a >= 0.0 { lo } else { hi };
        12.0 * self.a * s * s
    }
}

/// Default panel cap for one oscillatory integral.
pub const PANEL_CAP: usize = 200_000;

/// Seed panels over [lo, hi] sized so the local phase change per panel stays
/// below `budget` radians (π/4 = 1/8 of an oscillation for the public entry).
fn oscillation_seeds(
    phase: &PhaseSpec,
    lo: f64,
    hi: f64,
    cap: usize,
    budget: f64,
) -> Result<Vec<(f64, f64)>> {
    let range = hi - lo;
    let w_max = range / 8.0;
    let mut seeds = Vec::new();
    let mut s = lo;
    while s < hi {
        // bound the phase increment by its Taylor majorant at s
        let d1 = phase.derivative(s).abs();
        let d2 = 6.0 * phase.a.abs() * s * s; // |φ''|/2
        let d3 = 4.0 * phase.a.abs() * s.abs(); // |φ'''|/6
        let d4 = phase.a.abs();
        let mut w = w_max;
        for (k, d) in [(1, d1), (2, d2), (3, d3), (4, d4)] {
            if d > 0.0 {
                w = w.min((budget / d).powf(1.0 / k as f64));
            }
        }
        let w = w.max(range * 1e-12);
        let right = (s + w).min(hi);
        seeds.push((s, right));
        s = right;
        if seeds.len() > cap {
            return Err(Error::BudgetExceeded {
                needed: seeds.len(),
                cap,
            });
        }
    }
    Ok(seeds)
}

/// ∫_{lo}^{hi} e^{-i(aσ⁴+bσ)} · amplitude(σ) dσ with absolute error ≤ tol
/// (adaptive refinement on top of the oscillation-proportional seeding).
pub fn integrate_oscillatory_on<F>(
    phase: &PhaseSpec,
    interval: (f64, f64),
    amplitude: &F,
    tol: f64,
    panel_cap: usize,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    integrate_oscillatory_budget(
        phase,
        interval,
        amplitude,
        tol,
        panel_cap,
        std::f64::consts::FRAC_PI_4,
    )
}

/// Engine core with an explicit per-panel phase budget. The GK15 panels are
/// exact to ~1e-13 for phase increments up to ~2 radians, which the kernel
/// assembler exploits; the public entry stays at the 1/8-oscillation seeding.
pub(crate) fn integrate_oscillatory_budget<F>(
    phase: &PhaseSpec,
    interval: (f64, f64),
    amplitude: &F,
    tol: f64,
    panel_cap: usize,
    budget: f64,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let seeds = oscillation_seeds(phase, lo, hi, panel_cap, budget)?;
    let f = |s: f64| Complex64::from_polar(1.0, -phase.phase(s)) * amplitude(s);
    quad::adaptive_gk(&f, &seeds, tol, panel_cap)
}

/// The σ-integral of the dyadic pieces: amplitude supported in [1/4, 1]
/// (times the cutoff scale) via φ₀.
pub fn oscillatory_integral<F>(phase: &PhaseSpec, amplitude: &F, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    integrate_oscillatory_on(phase, (0.25, 1.0), amplitude, tol, PANEL_CAP).map(|r| r.0)
}

/// Index of the dyadic block containing the stationary scale:
/// j₀ = ⌊(1/3) log₂(r/t)⌋.
pub fn j_center(t: f64, r: f64) -> i32 {
    ((r / t).log2() / 3.0).floor().clamp(-1.0e9, 1.0e9) as i32
}

/// Critical point σ₀ = 2^{-j-2/3} (r/t)^{1/3} of the phase t·2^{4j}σ⁴ − 2^jσr,
/// returned only when it lies inside the bump support [1/4, 1].
pub fn stationary_point(t: f64, j: i32, r: f64) -> Option<f64> {
    if !(t > 0.0) || !(r > 0.0) {
        return None;
    }
    let sigma0 = pow2(-j) * 2.0_f64.powf(-2.0 / 3.0) * (r / t).cbrt();
    if (0.25..=1.0).contains(&sigma0) {
        Some(sigma0)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::filon::{GL8_W, GL8_X};

    /// Oversampled brute-force oracle: ~10× the engine's panel density.
    fn oversampled(phase: &PhaseSpec, lo: f64, hi: f64, amp: &dyn Fn(f64) -> Complex64) -> Complex64 {
        let n_panels = (10.0 * (8.0 * phase.n_osc() + 32.0)).ceil() as usize;
        let w = (hi - lo) / n_panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n_panels {
            let a = lo + w * i as f64;
            let mid = a + 0.5 * w;
            for (k, &x) in GL8_X.iter().enumerate() {
                let s = mid + 0.5 * w * x;
                acc += 0.5 * w * GL8_W[k] * Complex64::from_polar(1.0, -phase.phase(s)) * amp(s);
            }
        }
        acc
    }

    #[test]
    fn chi_step_values() {
        let c = Cutoff::default();
        assert_eq!(c.chi(0.3), 1.0);
        assert_eq!(c.chi(0.5), 1.0);
        assert_eq!(c.chi(2.0), 0.0);
        assert_eq!(c.chi(1.0), 0.0);
        assert_eq!(c.chi(-0.2), 1.0);
        // monotone nonincreasing on [1/2, 1]
        let mut prev = 1.0;
        let mut s = 0.5;
        while s <= 1.0 {
            let v = c.chi(s);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
            s += 0.01;
        }
    }

    #[test]
    fn bump_support_and_endpoint() {
        let b = DyadicBump::default();
        assert_eq!(b.phi0(0.2), 0.0);
        assert_eq!(b.phi0(0.25), 0.0);
        assert_eq!(b.phi0(1.0), 0.0);
        assert_eq!(b.phi0(1.2), 0.0);
        assert!(b.phi0(0.5) > 0.0);
    }

    #[test]
    fn partition_of_unity() {
        let b = DyadicBump::default();
        let mut s = 2.0_f64.powi(-18);
        while s <= 2.0_f64.powi(18) {
            let total: f64 = (-20..=20).map(|j| b.phi_j(j, s)).sum();
            assert!((total - 1.0).abs() <= 1e-14, "s = {s}: {total}");
            s *= 3.7;
        }
    }

    #[test]
    fn engine_zero_amplitude() {
        let phase = PhaseSpec { a: 3.0, b: -7.0 };
        let v = oscillatory_integral(&phase, &|_s| Complex64::new(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn engine_matches_oversampled_oracle() {
        let b = DyadicBump::default();
        let amp = |s: f64| Complex64::new(b.phi0(s), 0.0);
        let phase = PhaseSpec { a: 0.0, b: 40.0 };
        let got = oscillatory_integral(&phase, &amp, 1e-12).unwrap();
        let want = oversampled(&phase, 0.25, 1.0, &amp);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");

        let phase = PhaseSpec { a: 150.0, b: -37.0 };
        let got = oscillatory_integral(&phase, &amp, 1e-12).unwrap();
        let want = oversampled(&phase, 0.25, 1.0, &amp);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn engine_tol_halving_is_stable() {
        let b = DyadicBump::default();
        let amp = |s: f64| Complex64::new(s * b.phi0(s), 0.0);
        for &(a, bb) in &[(30.0, -12.0), (400.0, 63.0), (0.0, 250.0)] {
            let phase = PhaseSpec { a, b: bb };
            let mut tol = 1e-6;
            let mut prev = oscillatory_integral(&phase, &amp, tol).unwrap();
            for _ in 0..3 {
                tol *= 0.5;
                let next = oscillatory_integral(&phase, &amp, tol).unwrap();
                assert!((next - prev).norm() <= 2.0 * tol, "a={a} b={bb} tol={tol}");
                prev = next;
            }
        }
    }

    #[test]
    fn quartic_stationary_scaling() {
        // With the cutoff amplitude on [0, 1] the degenerate critical point at
        // σ = 0 is inside the support: |∫ e^{-iλσ⁴} χ| ≈ Γ(5/4) λ^{-1/4}.
        let chi = Cutoff::default();
        let amp = |s: f64| Complex64::new(chi.chi(s), 0.0);
        let mut ratios = Vec::new();
        for &lam in &[1e2, 1e3, 1e4] {
            let phase = PhaseSpec { a: lam, b: 0.0 };
            let v =
                integrate_oscillatory_on(&phase, (0.0, 1.0), &amp, 1e-11, PANEL_CAP).unwrap();
            ratios.push(v.0.norm() * lam.powf(0.25));
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 2.0, "ratios {ratios:?}");
    }

    #[test]
    fn budget_exceeded_for_absurd_frequency() {
        let phase = PhaseSpec { a: 1e12, b: 0.0 };
        let r = oscillatory_integral(&phase, &|_s| Complex64::new(1.0, 0.0), 1e-9);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn stationary_point_examples() {
        // r/t = 2^{3j} puts σ₀ at 2^{-2/3}
        let t = 1.0;
        let j = 2;
        let r = 2.0_f64.powi(3 * j);
        let s0 = stationary_point(t, j, r as f64).unwrap();
        assert!((s0 - 2.0_f64.powf(-2.0 / 3.0)).abs() < 1e-14);

        assert_eq!(j_center(1.0, 8.0), 1);

        // |j - j₀| ≥ 3 ⟹ no critical point and single-signed derivative
        let t = 1.0;
        let r = 8.0; // j₀ = 1
        for j in [-4, -3, 4, 5] {
            assert!(stationary_point(t, j, r).is_none());
            let phase = PhaseSpec {
                a: t * pow2(4 * j),
                b: -pow2(j) * r,
            };
            let mut min_abs = f64::MAX;
            let mut s = 0.25;
            while s <= 1.0 {
                min_abs = min_abs.min(phase.derivative(s).abs());
                s += 1e-3;
            }
            assert!(min_abs > 0.0, "j={j}");
        }
    }

    #[test]
    fn second_derivative_floor() {
        let phase = PhaseSpec { a: 16.0, b: -3.0 };
        let floor = phase.second_derivative_min(0.25, 1.0);
        assert!((floor - 12.0 * 16.0 / 16.0).abs() < 1e-13);
        assert!(floor > 0.0);
    }

    #[test]
    fn grid_shift_partition_still_telescopes() {
        let shifted = DyadicBump::new(Cutoff::new(std::f64::consts::SQRT_2).unwrap());
        let mut s = 0.001;
        while s < 1000.0 {
            let total: f64 = (-25..=25).map(|j| shifted.phi_j(j, s)).sum();
            assert!((total - 1.0).abs() < 1e-14);
            s *= 4.1;
        }
    }
}

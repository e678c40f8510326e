//! Reusable evaluation plan for the s-integrals
//!   ∫₀^∞ radial(λ|n(s)|) · B_α(s, θ_x, θ_y) ds
//! with radial = H₀^± (second-order kernel) or F^± (fourth-order kernel).
//!
//! The phase λ|n(s)| grows like e^{s/2}, so oscillation-proportional panels
//! cannot reach the analytic tail point. The plan therefore splits at
//! λ·|n(s)| ≈ 30: below, Gauss–Kronrod panels in s evaluate the radial
//! function directly; above, the integral is rewritten in u = |n(s)| where
//! the phase is exactly linear and Filon panels (width set by the amplitude
//! alone) carry it to the tail. The angular density, the coordinate map and
//! the panel layout are λ-independent and cached, so one plan serves every
//! frequency of a dyadic block.

use super::{
    b_alpha_bracket, b_alpha_envelope, flux_decay_rate, PolarPoint, SIntegralSpec,
};
use crate::error::{Error, Result};
use crate::flux::{self, FluxProfile};
use crate::quad::filon::{filon_panel, GL8_X};
use crate::quad::{WG, WGK, XGK};
use crate::specfun::{self, Axis, Branch};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which radial function multiplies B_α under the integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialKind {
    /// H₀^±(λ|n(s)|) — second-order resolvent.
    Hankel,
    /// F^±(λ|n(s)|) = H₀^±(λ|n|) − H₀^±(iλ|n|) — fourth-order resolvent.
    HankelDiff,
}

/// λ·u beyond which the peeled form e^{±iλu} ω_±(λu) replaces the direct
/// evaluation (the imaginary-axis part is below 1e-14 there).
const LAMBDA_U_SWITCH: f64 = 18.0;
/// Maximum phase change across one direct GK15 panel (degree-22 exactness
/// leaves ~1e-13 of headroom at this budget).
const PHASE_BUDGET: f64 = 2.5;
/// Geometric growth of Filon panel widths relative to u.
const FILON_REL_WIDTH: f64 = 0.35;
/// Maximum Δs across one Filon panel.
const FILON_DS: f64 = 0.70;

struct DirectPanel {
    u: [f64; 15],
    /// kronrod weight × B(s_i), half-width folded in
    wk_b: [Complex64; 15],
    /// (kronrod − gauss) weight × B — live error estimate
    wd_b: [Complex64; 15],
}

struct FilonSeg {
    u0: f64,
    u1: f64,
    s0: f64,
    u_nodes: [f64; 8],
    /// B(s(u)) · ds/du at the nodes, prefactor folded in
    g_static: [Complex64; 8],
}

pub struct SIntegralPlan {
    alpha: f64,
    rate: f64,
    tol: f64,
    lambda_min: f64,
    lambda_max: f64,
    u_base_right: f64,
    /// direct_segs[0] covers [0, s_A]; direct_segs[1 + k] is the direct twin
    /// of filon[k] for k < overlap_count
    direct_segs: Vec<Vec<DirectPanel>>,
    filon: Vec<FilonSeg>,
    overlap_count: usize,
    /// bound on the dropped imaginary-axis part in the Filon region
    k0_drop_bound: f64,
    /// tail bound past the last panel, computed at λ_min
    final_tail: f64,
}

/// Pointwise bound on |H₀^±(x)| and |F^±(x)| used by tail certificates.
fn radial_amp_bound(x: f64) -> f64 {
    if x >= 1.0 {
        1.3 / x.sqrt()
    } else {
        2.0 + 1.7 * (2.0 / x).ln()
    }
}

struct Geometry {
    big_r: f64,
    rxry: f64,
}

impl Geometry {
    fn u_of_s(&self, s: f64) -> f64 {
        let sh = (0.5 * s).sinh();
        (self.big_r * self.big_r + 4.0 * self.rxry * sh * sh).sqrt()
    }

    fn s_of_u(&self, u: f64) -> f64 {
        let w = ((u - self.big_r) * (u + self.big_r) / (4.0 * self.rxry)).max(0.0);
        2.0 * w.sqrt().asinh()
    }

    fn du_ds(&self, s: f64) -> f64 {
        self.rxry * s.sinh() / self.u_of_s(s)
    }
}

impl SIntegralPlan {
    /// Build a plan for λ ∈ [lambda_min, lambda_max]. Returns None for
    /// integer flux (B_α ≡ 0); errors for non-reduced non-integer flux.
    pub fn build(
        p: &FluxProfile,
        x: &PolarPoint,
        y: &PolarPoint,
        lambda_min: f64,
        lambda_max: f64,
        spec: &SIntegralSpec,
    ) -> Result<Option<SIntegralPlan>> {
        spec.validate()?;
        if p.is_integer_flux() {
            return Ok(None);
        }
        let alpha = flux::total_flux(p);
        if alpha.abs() >= 1.0 {
            return Err(Error::FluxNotReduced { alpha });
        }
        if !(lambda_min > 0.0) || lambda_max < lambda_min {
            return Err(Error::domain("s_integral_plan", "need 0 < λ_min ≤ λ_max".to_string()));
        }

        let geom = Geometry {
            big_r: x.r + y.r,
            rxry: x.r * y.r,
        };
        let rate = flux_decay_rate(alpha);
        let tol = spec.tol;

        let dtheta = x.theta - y.theta;
        let alpha12 = flux::partial_flux(p, y.theta, x.theta);
        // same orientation and 1/(4π³) normalization as `b_alpha`
        let prefactor =
            -Complex64::from_polar(1.0 / (4.0 * PI * PI * PI), -(alpha * dtheta - alpha12));
        let bfull = |s: f64| prefactor * b_alpha_bracket(alpha, s, dtheta).0;

        // analytic tail point: envelope(B)(s) · amp(λ_min u(s)) / rate < tol/2
        let bound_at = |s: f64| {
            b_alpha_envelope(alpha, s) * radial_amp_bound(lambda_min * geom.u_of_s(s)) / rate
        };
        let mut s_tail = 4.0;
        while bound_at(s_tail) > 0.5 * tol && s_tail < spec.s_max_cap {
            s_tail += 0.5;
        }
        let final_tail = bound_at(s_tail);

        // direct/Filon hand-off points
        let s_switch_top = if lambda_max * geom.big_r >= LAMBDA_U_SWITCH {
            1.0
        } else {
            geom.s_of_u(LAMBDA_U_SWITCH / lambda_max).max(1.0)
        };
        let s_a = s_switch_top.min(s_tail);
        let u_f = LAMBDA_U_SWITCH / lambda_min; // beyond this every λ uses Filon

        // base direct segment [0, s_A]
        let mut direct_segs = Vec::new();
        direct_segs.push(build_direct_panels(
            &geom,
            &bfull,
            0.0,
            s_a,
            lambda_max,
            dtheta,
            tol,
            spec.initial_panels,
        ));
        let u_base_right = geom.u_of_s(s_a);

        // Filon panels from u(s_A) to u(s_tail); panels below u_F get direct twins
        let mut filon = Vec::new();
        let mut overlap_count = 0usize;
        let u_end = geom.u_of_s(s_tail);
        let mut u_left = u_base_right;
        while u_left < u_end * (1.0 - 1e-12) && s_a < s_tail {
            let s_left = geom.s_of_u(u_left);
            let duds = geom.du_ds(s_left.max(0.5));
            let w = (FILON_REL_WIDTH * u_left)
                .min(FILON_DS * duds)
                .max(1e-9 * u_left);
            let u_right = (u_left + w).min(u_end);
            let mid = 0.5 * (u_left + u_right);
            let half = 0.5 * (u_right - u_left);
            let mut u_nodes = [0.0; 8];
            let mut g_static = [Complex64::new(0.0, 0.0); 8];
            for i in 0..8 {
                let u = mid + half * GL8_X[i];
                let s = geom.s_of_u(u);
                u_nodes[i] = u;
                g_static[i] = bfull(s) * (u / (geom.rxry * s.sinh()));
            }
            let seg = FilonSeg {
                u0: u_left,
                u1: u_right,
                s0: s_left,
                u_nodes,
                g_static,
            };
            if u_left < u_f && lambda_min < lambda_max {
                // direct twin, oscillation-sized for the largest λ that may
                // still take this segment in the s-representation
                let lam_here = (LAMBDA_U_SWITCH / u_left).min(lambda_max);
                direct_segs.push(build_direct_panels(
                    &geom,
                    &bfull,
                    geom.s_of_u(u_left),
                    geom.s_of_u(u_right),
                    lam_here,
                    dtheta,
                    tol,
                    2,
                ));
                overlap_count += 1;
            } else if u_left < u_f {
                // single-λ plan never uses Filon below u_F
                let lam_here = lambda_max;
                direct_segs.push(build_direct_panels(
                    &geom,
                    &bfull,
                    geom.s_of_u(u_left),
                    geom.s_of_u(u_right),
                    lam_here,
                    dtheta,
                    tol,
                    2,
                ));
                overlap_count += 1;
            }
            filon.push(seg);
            u_left = u_right;
        }

        let k0_mass = 6.41 / (4.0 * PI * PI * PI) / rate; // ∫ envelope ds from 0
        let k0_drop_bound = 2.0 / PI
            * specfun::bessel_k0(LAMBDA_U_SWITCH).expect("positive argument")
            * k0_mass;

        Ok(Some(SIntegralPlan {
            alpha,
            rate,
            tol,
            lambda_min,
            lambda_max,
            u_base_right,
            direct_segs,
            filon,
            overlap_count,
            k0_drop_bound,
            final_tail,
        }))
    }

    /// Evaluate the integral for one λ ∈ [λ_min, λ_max] and one branch.
    /// Returns (value, error bound).
    pub fn eval(&self, kind: RadialKind, branch: Branch, lambda: f64) -> (Complex64, f64) {
        debug_assert!(lambda >= self.lambda_min * (1.0 - 1e-9));
        debug_assert!(lambda <= self.lambda_max * (1.0 + 1e-9));

        let radial = |x: f64| -> Complex64 {
            match kind {
                RadialKind::Hankel => {
                    specfun::hankel0(branch, Axis::Real, x).expect("x > 0")
                }
                RadialKind::HankelDiff => specfun::f_pm_fast(branch, x),
            }
        };

        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;

        let eval_direct = |panels: &[DirectPanel], value: &mut Complex64, err: &mut f64| {
            for p in panels {
                let mut v = Complex64::new(0.0, 0.0);
                let mut d = Complex64::new(0.0, 0.0);
                for i in 0..15 {
                    let rv = radial(lambda * p.u[i]);
                    v += rv * p.wk_b[i];
                    d += rv * p.wd_b[i];
                }
                *value += v;
                *err += d.norm();
            }
        };

        eval_direct(&self.direct_segs[0], &mut value, &mut err);

        // per-λ switch point: first Filon boundary with λ·u ≥ switch
        let u_switch = (LAMBDA_U_SWITCH / lambda).max(self.u_base_right);
        let mut start = 0usize;
        while start < self.overlap_count && self.filon[start].u1 <= u_switch * (1.0 + 1e-12) {
            eval_direct(&self.direct_segs[1 + start], &mut value, &mut err);
            start += 1;
        }

        let mut completed = true;
        for seg in &self.filon[start..] {
            // early tail stop once the remaining mass is certifiably small
            if seg.s0 >= 4.0 {
                let tail_here = b_alpha_envelope(self.alpha, seg.s0)
                    * radial_amp_bound(lambda * seg.u0)
                    / self.rate;
                if tail_here < 0.5 * self.tol {
                    err += tail_here;
                    completed = false;
                    break;
                }
            }
            let mut g = [Complex64::new(0.0, 0.0); 8];
            for i in 0..8 {
                let w = specfun::omega(branch, lambda * seg.u_nodes[i]).expect("λu ≥ 30");
                g[i] = w * seg.g_static[i];
            }
            let pr = filon_panel(seg.u0, seg.u1, branch.sign() * lambda, &g);
            value += pr.value;
            err += pr.err;
        }
        if completed {
            err += self.final_tail;
        }
        if kind == RadialKind::HankelDiff {
            err += self.k0_drop_bound;
        }
        (value, err)
    }
}

/// Direct GK15 panels on [s0, s1]: width limited by the oscillation of
/// λ·u(s), by the near-diagonal peak scale of B, and refined once against
/// the angular density itself.
#[allow(clippy::too_many_arguments)]
fn build_direct_panels(
    geom: &Geometry,
    bfull: &dyn Fn(f64) -> Complex64,
    s0: f64,
    s1: f64,
    lambda_osc: f64,
    dtheta: f64,
    tol: f64,
    min_panels: usize,
) -> Vec<DirectPanel> {
    if s1 <= s0 {
        return Vec::new();
    }
    // near-diagonal peak half-width √(2(1+cos Δθ))
    let eps0 = 2.0 * (0.5 * dtheta).cos().powi(2);
    let peak = (2.0 * eps0).sqrt().max(1e-7);
    let w_cap = (s1 - s0) / min_panels as f64;

    let mut breaks = vec![s0];
    let mut s = s0;
    while s < s1 {
        let rate = lambda_osc * geom.du_ds((s + 1e-3).min(s1));
        let mut w = if rate > 0.0 { PHASE_BUDGET / rate } else { f64::MAX };
        w = w.min(0.4).min(w_cap);
        if s < 4.0 * peak {
            w = w.min((0.4 * (s - s0 + 0.3 * peak)).max(peak / 32.0));
        }
        w = w.max(1e-9 * (1.0 + s));
        s = (s + w).min(s1);
        breaks.push(s);
    }

    // one refinement pass against B alone: split panels whose GK error on
    // the angular density is not negligible
    let tol_b = 1e-3 * tol / breaks.len() as f64;
    let mut refined = Vec::with_capacity(breaks.len());
    let mut stack: Vec<(f64, f64, u32)> =
        breaks.windows(2).map(|w| (w[0], w[1], 0u32)).collect();
    stack.reverse();
    while let Some((a, b, depth)) = stack.pop() {
        let (_, e) = crate::quad::gk15(&|s| bfull(s), a, b);
        if e > tol_b && depth < 14 {
            let mid = 0.5 * (a + b);
            stack.push((mid, b, depth + 1));
            stack.push((a, mid, depth + 1));
        } else {
            refined.push((a, b));
        }
    }
    refined.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut panels = Vec::with_capacity(refined.len());
    for (a, b) in refined {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut u = [0.0; 15];
        let mut wk_b = [Complex64::new(0.0, 0.0); 15];
        let mut wd_b = [Complex64::new(0.0, 0.0); 15];
        let mut idx = 0;
        for i in 0..8 {
            let offsets: &[f64] = if i == 7 { &[0.0] } else { &[-XGK[i], XGK[i]] };
            for &off in offsets {
                let s_node = mid + half * off;
                let bv = bfull(s_node);
                let wk = WGK[i] * half;
                let wg = if i % 2 == 1 {
                    WG[i / 2] * half
                } else if i == 7 {
                    WG[3] * half
                } else {
                    0.0
                };
                u[idx] = geom.u_of_s(s_node);
                wk_b[idx] = wk * bv;
                wd_b[idx] = (wk - wg) * bv;
                idx += 1;
            }
        }
        panels.push(DirectPanel { u, wk_b, wd_b });
    }
    panels
}

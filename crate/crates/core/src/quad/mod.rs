//! Low-level quadrature primitives: Gauss–Kronrod panels, an adaptive driver,
//! and Filon-type panels for integrands with a known linear phase.

pub(crate) mod filon;

use num_complex::Complex64;

/// 15-point Kronrod nodes on [-1, 1] (positive half; symmetric).
pub(crate) const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
pub(crate) const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights for the subset XGK[1], XGK[3], XGK[5], XGK[7].
pub(crate) const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss–Kronrod 15(7) panel over [a, b] for a complex integrand.
/// Returns (value, error estimate).
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;

    for i in 0..7 {
        let dx = half * XGK[i];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }

    let value = half * kronrod;
    let err = (half * (kronrod - gauss)).norm();
    (value, err)
}

/// Adaptive Gauss–Kronrod integration over a set of seed panels.
///
/// The worst panels are bisected until the summed error estimate falls
/// below `tol` or the panel budget is exhausted. Seed panels let callers
/// pre-refine around known structure (oscillation, peaks) so the adaptive
/// stage only has to mop up.
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: &F,
    seeds: &[(f64, f64)],
    tol: f64,
    max_panels: usize,
) -> crate::error::Result<(Complex64, f64)> {
    #[derive(Clone, Copy)]
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(seeds.len() * 2);
    for &(a, b) in seeds {
        if b <= a {
            continue;
        }
        let (value, err) = gk15(f, a, b);
        panels.push(Panel { a, b, value, err });
    }

    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol {
            break;
        }
        if panels.len() >= max_panels {
            return Err(crate::error::Error::BudgetExceeded {
                needed: panels.len() + 1,
                cap: max_panels,
            });
        }
        // Split the worst panel.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let p = panels[worst];
        if p.b - p.a < 1e-15 * (1.0 + p.a.abs()) {
            // Cannot refine further; accept the estimate.
            break;
        }
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, mid);
        let (v2, e2) = gk15(f, mid, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            err: e2,
        });
    }

    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    // Deterministic summation order: sort by left endpoint.
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    for p in &panels {
        value += p.value;
        err += p.err;
    }
    Ok((value, err))
}

/// Geometric panel subdivision of [a, b]: each panel is at most `ratio`
/// times wider than its left neighbour, starting from width `w0`.
pub fn geometric_seeds(a: f64, b: f64, w0: f64, ratio: f64) -> Vec<(f64, f64)> {
    let mut seeds = Vec::new();
    let mut left = a;
    let mut w = w0.max(1e-300);
    while left < b {
        let right = (left + w).min(b);
        seeds.push((left, right));
        left = right;
        w *= ratio;
    }
    seeds
}

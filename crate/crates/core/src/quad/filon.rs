//! Filon-type panels for integrals ∫ e^{iλu} g(u) du with a slowly varying
//! amplitude g and an explicitly known linear phase.
//!
//! On each panel g is projected onto Legendre polynomials from 8 Gauss
//! nodes and the oscillatory moments ∫ e^{iκξ} P_n(ξ) dξ = 2 iⁿ jₙ(κ) are
//! evaluated in closed form, so panel width is set by the smoothness of g
//! alone, not by λ.

use num_complex::Complex64;
use std::sync::OnceLock;

/// 8-point Gauss–Legendre nodes on [-1, 1].
pub const GL8_X: [f64; 8] = [
    -0.960289856497536231683560868569,
    -0.796666477413626739591553936476,
    -0.525532409916328985817739049189,
    -0.183434642495649804939476142360,
    0.183434642495649804939476142360,
    0.525532409916328985817739049189,
    0.796666477413626739591553936476,
    0.960289856497536231683560868569,
];

/// Matching Gauss–Legendre weights.
pub const GL8_W: [f64; 8] = [
    0.101228536290376259152531354310,
    0.222381034453374470544355994426,
    0.313706645877887287337962201987,
    0.362683783378361982965150449277,
    0.362683783378361982965150449277,
    0.313706645877887287337962201987,
    0.222381034453374470544355994426,
    0.101228536290376259152531354310,
];

const NMAX: usize = 7;

/// Legendre values P_n(x) for n = 0..=7 by the three-term recurrence.
fn legendre_row(x: f64) -> [f64; NMAX + 1] {
    let mut p = [0.0; NMAX + 1];
    p[0] = 1.0;
    p[1] = x;
    for n in 1..NMAX {
        p[n + 1] = ((2 * n + 1) as f64 * x * p[n] - n as f64 * p[n - 1]) / (n + 1) as f64;
    }
    p
}

fn legendre_table() -> &'static [[f64; NMAX + 1]; 8] {
    static TABLE: OnceLock<[[f64; NMAX + 1]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; NMAX + 1]; 8];
        for (i, &x) in GL8_X.iter().enumerate() {
            t[i] = legendre_row(x);
        }
        t
    })
}

const JN_MAX: usize = 10;

/// Spherical Bessel functions j_0..j_n (n ≤ 10) of the first kind at real x.
///
/// Small arguments use the Taylor series, large ones the upward recurrence,
/// and the intermediate range a Miller-style downward recurrence normalized
/// against whichever of j0, j1 is larger.
pub fn spherical_jn(nmax: usize, x: f64) -> [f64; JN_MAX + 1] {
    assert!(nmax <= JN_MAX);
    let ax = x.abs();
    let mut out = [0.0; JN_MAX + 1];

    if ax < 1e-12 {
        out[0] = 1.0;
        return out; // j_n(0) = 0 for n ≥ 1
    }

    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    if ax < 0.4 {
        // Taylor: j_n(x) = x^n/(2n+1)!! · Σ_k (-x²/2)^k / (k! (2n+3)(2n+5)…(2n+2k+1))
        let x2 = ax * ax;
        let mut dfact = 1.0; // (2n+1)!!
        let mut xn = 1.0; // x^n
        for (n, slot) in out.iter_mut().enumerate().take(nmax + 1) {
            if n > 0 {
                dfact *= (2 * n + 1) as f64;
                xn *= ax;
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..8 {
                term *= -0.5 * x2 / (k as f64 * (2 * n + 2 * k + 1) as f64);
                sum += term;
            }
            *slot = xn / dfact * sum;
        }
    } else if ax > nmax as f64 + 4.0 {
        let (s, c) = ax.sin_cos();
        let j0 = s / ax;
        let j1 = s / (ax * ax) - c / ax;
        out[0] = j0;
        if nmax >= 1 {
            out[1] = j1;
            for n in 1..nmax {
                out[n + 1] = (2 * n + 1) as f64 / ax * out[n] - out[n - 1];
            }
        }
    } else {
        // downward recurrence
        let m = nmax + 18;
        let mut fp = 0.0_f64;
        let mut fc = 1e-280_f64;
        let mut scratch = [0.0; JN_MAX + 19];
        scratch[m] = fc;
        for k in (1..=m).rev() {
            let fm = (2 * k + 1) as f64 / ax * fc - fp;
            fp = fc;
            fc = fm;
            scratch[k - 1] = fc;
            if fc.abs() > 1e250 {
                for v in scratch[k - 1..].iter_mut() {
                    *v /= 1e250;
                }
                fp /= 1e250;
                fc /= 1e250;
            }
        }
        let (s, c) = ax.sin_cos();
        let j0 = s / ax;
        let j1 = s / (ax * ax) - c / ax;
        let scale = if j0.abs() >= j1.abs() || nmax == 0 {
            j0 / scratch[0]
        } else {
            j1 / scratch[1]
        };
        for n in 0..=nmax {
            out[n] = scratch[n] * scale;
        }
    }

    if sign < 0.0 {
        // j_n(-x) = (-1)^n j_n(x)
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Result of one Filon panel: value and a spectral error proxy.
pub struct FilonPanel {
    pub value: Complex64,
    pub err: f64,
}

/// Integrate ∫_{a}^{b} e^{i·lam·u} g(u) du from the 8 Gauss-node values of g.
///
/// `g_nodes[i]` must be g evaluated at u = mid + half·GL8_X[i].
pub fn filon_panel(a: f64, b: f64, lam: f64, g_nodes: &[Complex64; 8]) -> FilonPanel {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let table = legendre_table();

    let mut coeff = [Complex64::new(0.0, 0.0); NMAX + 1];
    for i in 0..8 {
        let w = GL8_W[i];
        let row = &table[i];
        let gv = g_nodes[i];
        for n in 0..=NMAX {
            coeff[n] += w * row[n] * gv;
        }
    }
    for (n, c) in coeff.iter_mut().enumerate() {
        *c *= (2 * n + 1) as f64 / 2.0;
    }

    let kappa = lam * half;
    let jn = spherical_jn(NMAX, kappa);
    // i^n cycle
    let ipow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];

    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..=NMAX {
        acc += coeff[n] * ipow[n % 4] * 2.0 * jn[n];
    }
    let phase = Complex64::from_polar(1.0, lam * mid);
    let value = half * phase * acc;

    // Error proxy: magnitude of the top two retained modes.
    let err = half * (coeff[NMAX].norm() * jn[NMAX].abs() + coeff[NMAX - 1].norm() * jn[NMAX - 1].abs()) * 2.0;
    FilonPanel { value, err }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jn_ref(n: usize, x: f64) -> f64 {
        // closed forms for n ≤ 2
        let (s, c) = x.sin_cos();
        match n {
            0 => s / x,
            1 => s / (x * x) - c / x,
            2 => (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 / (x * x) * c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn spherical_bessel_matches_closed_forms() {
        // closed forms cancel catastrophically at small x, so compare only
        // where they are well conditioned
        for &x in &[0.7, 2.0, 5.0, 9.5, 30.0, 1000.0] {
            let j = spherical_jn(7, x);
            for n in 0..=2 {
                let want = jn_ref(n, x);
                assert!(
                    (j[n] - want).abs() < 1e-13 * (1.0 + want.abs()),
                    "n={n} x={x}: got {} want {}",
                    j[n],
                    want
                );
            }
        }
    }

    #[test]
    fn spherical_bessel_small_argument() {
        // j_3(x) = x³/105 · (1 − x²/18 + …)
        let j = spherical_jn(5, 1e-3);
        let want = 1e-9 / 105.0 * (1.0 - 1e-6 / 18.0);
        assert!(
            (j[3] - want).abs() < 1e-12 * want,
            "got {} want {want}",
            j[3]
        );
        // both sides of the Taylor/Miller hand-off against the closed forms
        for &x in &[0.39, 0.41] {
            let j = spherical_jn(7, x);
            for n in 0..=1 {
                let want = jn_ref(n, x);
                assert!(
                    (j[n] - want).abs() < 1e-13 * (1.0 + want.abs()),
                    "n={n} x={x}: got {} want {}",
                    j[n],
                    want
                );
            }
        }
    }

    #[test]
    fn filon_integrates_linear_oscillation() {
        // ∫_0^1 e^{iλu} du = (e^{iλ} - 1)/(iλ)
        for &lam in &[0.3, 4.0, 50.0, 4000.0] {
            let mid = 0.5;
            let half = 0.5;
            let mut g = [Complex64::new(0.0, 0.0); 8];
            for (i, slot) in g.iter_mut().enumerate() {
                let _u = mid + half * GL8_X[i];
                *slot = Complex64::new(1.0, 0.0);
            }
            let p = filon_panel(0.0, 1.0, lam, &g);
            let il = Complex64::new(0.0, lam);
            let want = (il.exp() - 1.0) / il;
            assert!(
                (p.value - want).norm() < 1e-12,
                "λ={lam}: got {} want {}",
                p.value,
                want
            );
        }
    }

    #[test]
    fn filon_with_varying_amplitude() {
        // ∫_1^2 e^{iλu} u² du, compare against integration by parts closed form
        let lam = 37.0;
        let a = 1.0;
        let b = 2.0;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut g = [Complex64::new(0.0, 0.0); 8];
        for (i, slot) in g.iter_mut().enumerate() {
            let u: f64 = mid + half * GL8_X[i];
            *slot = Complex64::new(u * u, 0.0);
        }
        let p = filon_panel(a, b, lam, &g);
        let il = Complex64::new(0.0, lam);
        let prim = |u: f64| {
            let e = (il * u).exp();
            e * (u * u / il - 2.0 * u / (il * il) + 2.0 / (il * il * il))
        };
        let want = prim(b) - prim(a);
        assert!((p.value - want).norm() < 1e-10);
    }
}

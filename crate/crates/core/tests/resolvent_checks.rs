//! Cross-checks of the resolvent kernels that go through independent routes:
//! the radial Fourier principal-value integral for the free Hankel form, and
//! seeded Hermitian pairings.

use abkernel::flux::FluxProfile;
use abkernel::resolvent::{self, PolarPoint, SIntegralSpec};
use abkernel::specfun::{self, Axis, Branch};
use num_complex::Complex64;

/// (−Δ − k² ∓ i0)^{-1}(r) in 2D by the radial Fourier integral
/// (1/2π)[ P.V.∫₀^∞ λ J₀(λr)/(λ²−k²) dλ ± iπ J₀(kr)/2 ],
/// evaluated with symmetric pairing around the pole and period-averaged
/// truncation of the conditionally convergent tail. Test-only oracle.
fn free_resolvent_fourier(branch: Branch, k: f64, r: f64) -> Complex64 {
    let j0 = specfun::bessel_j0;
    let integrand = |lam: f64| lam * j0(lam * r) / (lam * lam - k * k);

    // P.V. over (0, 2k): pair λ = k ± u so the simple pole cancels
    let n1 = 6000;
    let mut pv = 0.0;
    let h = k / n1 as f64;
    for i in 0..n1 {
        let u = h * (i as f64 + 0.5);
        pv += (integrand(k + u) + integrand(k - u)) * h;
    }

    // smooth remainder over (2k, Λ); average over one J₀ period in Λ to tame
    // the conditional convergence
    let lam_big = 2.0 * k + 240.0 / (r + 1.0);
    let period = std::f64::consts::TAU / r;
    let mut tails = Vec::new();
    for m in 0..8 {
        let upper = lam_big + period * m as f64 / 8.0;
        let n2 = 120_000;
        let h2 = (upper - 2.0 * k) / n2 as f64;
        let mut acc = 0.0;
        for i in 0..n2 {
            let lam = 2.0 * k + h2 * (i as f64 + 0.5);
            acc += integrand(lam) * h2;
        }
        tails.push(acc);
    }
    let tail = tails.iter().sum::<f64>() / tails.len() as f64;

    let real = (pv + tail) / (2.0 * std::f64::consts::PI);
    let imag = branch.sign() * 0.25 * j0(k * r);
    Complex64::new(real, imag)
}

#[test]
fn free_hankel_form_matches_fourier_integral() {
    for &(k, r) in &[(1.0, 1.3), (2.0, 0.8)] {
        for branch in [Branch::Plus, Branch::Minus] {
            let hankel_form = Complex64::new(0.0, branch.sign() * 0.25)
                * specfun::hankel0(branch, Axis::Real, k * r).unwrap();
            let fourier = free_resolvent_fourier(branch, k, r);
            assert!(
                (hankel_form - fourier).norm() < 2e-3,
                "k={k} r={r} {branch:?}: {hankel_form} vs {fourier}"
            );
        }
    }
}

#[test]
fn resolvent2_zero_flux_against_fourier_route() {
    // the full chain: resolvent2 → free Hankel form → Fourier integral
    let p = FluxProfile::constant(0.0);
    let spec = SIntegralSpec::default();
    let x = PolarPoint::new(1.5, 0.2).unwrap();
    let y = PolarPoint::new(0.7, 2.0).unwrap();
    let k = 1.1;
    let got = resolvent::resolvent2(Branch::Plus, &p, k, &x, &y, &spec).unwrap();
    let fourier = free_resolvent_fourier(Branch::Plus, k, x.distance(&y));
    assert!((got - fourier).norm() < 2e-3, "{got} vs {fourier}");
}

#[test]
fn hermitian_pairing_under_harmonic_flux() {
    // trig-polynomial profile, multiple geometries and frequencies
    let p = FluxProfile::new(0.4, vec![(1, 0.08, 0.03), (3, 0.0, -0.05)]).unwrap();
    let spec = SIntegralSpec::default();
    for &(lambda, rx, tx, ry, ty) in &[
        (0.6, 1.0, 0.1, 2.0, 2.0),
        (1.7, 0.5, 3.0, 0.8, 5.5),
        (4.0, 2.5, 1.2, 2.6, 4.2),
    ] {
        let x = PolarPoint::new(rx, tx).unwrap();
        let y = PolarPoint::new(ry, ty).unwrap();
        for (order, f) in [
            (2, resolvent::resolvent2 as fn(_, _, _, _, _, _) -> _),
            (4, resolvent::resolvent4 as fn(_, _, _, _, _, _) -> _),
        ] {
            let fwd = f(Branch::Plus, &p, lambda, &x, &y, &spec).unwrap();
            let bwd = f(Branch::Minus, &p, lambda, &y, &x, &spec).unwrap();
            assert!(
                (fwd - bwd.conj()).norm() < 1e-8,
                "order {order} λ={lambda}: {fwd} vs {bwd}"
            );
        }
    }
}

#[test]
fn g_pm_scales_consistently_between_routes() {
    // g_pm must agree with resolvent4 minus its closed A-part
    let p = FluxProfile::constant(0.5);
    let spec = SIntegralSpec::default();
    let x = PolarPoint::new(1.0, 0.0).unwrap();
    let y = PolarPoint::new(1.0, std::f64::consts::PI / 2.0).unwrap();
    let lambda = 1.3;
    let r4 = resolvent::resolvent4(Branch::Plus, &p, lambda, &x, &y, &spec).unwrap();
    let g = resolvent::g_pm(Branch::Plus, &p, lambda, &x, &y, &spec).unwrap();
    let a_part = resolvent::f_pm(Branch::Plus, lambda * x.distance(&y)).unwrap()
        * resolvent::a_alpha(&p, x.theta, y.theta);
    let prefactor = Complex64::new(
        0.0,
        resolvent::KAPPA / (8.0 * std::f64::consts::PI * lambda * lambda),
    );
    let reassembled = prefactor * (a_part + g);
    assert!((r4 - reassembled).norm() < 1e-12, "{r4} vs {reassembled}");
}

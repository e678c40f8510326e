#![allow(dead_code)] // shared across test targets; each uses a subset

//! Slow arbitrary-precision series oracle for the order-zero Bessel family,
//! shared by the integration tests. Everything is summed in exact rational
//! arithmetic with terms kept until they drop below 10^-45, so the only
//! approximation is the final conversion to f64.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a decimal literal into an exact rational.
pub fn rat_from_decimal(s: &str) -> Rat {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse::<BigInt>().expect("decimal digits") * BigInt::from(sign);
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Rat::new(num, den)
}

/// π to 50 decimal digits.
pub fn pi_rat() -> Rat {
    rat_from_decimal("3.14159265358979323846264338327950288419716939937511")
}

/// Euler–Mascheroni constant to 50 decimal digits.
pub fn gamma_rat() -> Rat {
    rat_from_decimal("0.57721566490153286060651209008240243104215933593992")
}

fn pow10(k: i32) -> Rat {
    if k >= 0 {
        Rat::from_integer(BigInt::from(10u32).pow(k as u32))
    } else {
        Rat::new(BigInt::one(), BigInt::from(10u32).pow((-k) as u32))
    }
}

/// ln 2 by the atanh series ln 2 = 2 Σ (1/3)^{2k+1}/(2k+1).
fn ln2_rat() -> Rat {
    let third = rat(1, 3);
    let third_sq = &third * &third;
    let mut term = third.clone();
    let mut sum = Rat::zero();
    let cutoff = pow10(-48);
    let mut k = 0u32;
    loop {
        sum += &term / Rat::from_integer(BigInt::from(2 * k + 1));
        term *= &third_sq;
        k += 1;
        if term < cutoff {
            break;
        }
    }
    sum * rat(2, 1)
}

/// ln x by power-of-two reduction and the atanh series.
pub fn ln_rat(x: &Rat) -> Rat {
    assert!(x.is_positive(), "ln needs x > 0");
    let mut y = x.clone();
    let mut n = 0i64;
    let three_half = rat(3, 2);
    let three_quarter = rat(3, 4);
    while y > three_half {
        y /= rat(2, 1);
        n += 1;
    }
    while y < three_quarter {
        y *= rat(2, 1);
        n -= 1;
    }
    // ln y = 2 atanh((y-1)/(y+1))
    let u = (&y - Rat::one()) / (&y + Rat::one());
    let u_sq = &u * &u;
    let mut term = u.clone();
    let mut sum = Rat::zero();
    let cutoff = pow10(-48);
    let mut k = 0u32;
    loop {
        sum += &term / Rat::from_integer(BigInt::from(2 * k + 1));
        term *= &u_sq;
        k += 1;
        if term.abs() < cutoff {
            break;
        }
    }
    sum * rat(2, 1) + ln2_rat() * Rat::from_integer(BigInt::from(n))
}

fn series_core(x: &Rat, alternating: bool) -> Rat {
    // Σ (±1)^k q^k/(k!)², q = (x/2)²
    let q = x * x / rat(4, 1);
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let cutoff = pow10(-46);
    for k in 1..500u32 {
        let kk = Rat::from_integer(BigInt::from(k));
        term = term * &q / (&kk * &kk);
        if alternating && k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if term.abs() < cutoff {
            break;
        }
    }
    sum
}

/// J₀(x) = Σ (-1)^k (x/2)^{2k}/(k!)².
pub fn j0_oracle(x: &Rat) -> Rat {
    series_core(x, true)
}

/// I₀(x) = Σ (x/2)^{2k}/(k!)².
pub fn i0_oracle(x: &Rat) -> Rat {
    series_core(x, false)
}

/// S_Y(x) = Σ_{k≥1} (-1)^{k-1} H_k (x/2)^{2k}/(k!)².
pub fn sy_oracle(x: &Rat) -> Rat {
    // series_core with alternating+harmonic gives Σ with sign (-1)^k flipped
    // on odd k; rebuild explicitly for clarity
    let q = x * x / rat(4, 1);
    let mut term = Rat::one();
    let mut h = Rat::zero();
    let mut sum = Rat::zero();
    let cutoff = pow10(-46);
    for k in 1..500u32 {
        let kk = Rat::from_integer(BigInt::from(k));
        term = term * &q / (&kk * &kk);
        h += Rat::one() / &kk;
        let signed = if k % 2 == 1 { term.clone() } else { -term.clone() };
        sum += &h * signed;
        if term.abs() < cutoff {
            break;
        }
    }
    sum
}

/// S_K(x) = Σ_{k≥1} H_k (x/2)^{2k}/(k!)².
pub fn sk_oracle(x: &Rat) -> Rat {
    let q = x * x / rat(4, 1);
    let mut term = Rat::one();
    let mut h = Rat::zero();
    let mut sum = Rat::zero();
    let cutoff = pow10(-46);
    for k in 1..500u32 {
        let kk = Rat::from_integer(BigInt::from(k));
        term = term * &q / (&kk * &kk);
        h += Rat::one() / &kk;
        sum += &h * &term;
        if term.abs() < cutoff {
            break;
        }
    }
    sum
}

/// Y₀(x) = (2/π)[(ln(x/2)+γ) J₀(x) + S_Y(x)].
pub fn y0_oracle(x: &Rat) -> Rat {
    let ell = ln_rat(&(x / rat(2, 1))) + gamma_rat();
    (ell * j0_oracle(x) + sy_oracle(x)) * rat(2, 1) / pi_rat()
}

/// K₀(x) = -(ln(x/2)+γ) I₀(x) + S_K(x).
pub fn k0_oracle(x: &Rat) -> Rat {
    let ell = ln_rat(&(x / rat(2, 1))) + gamma_rat();
    -ell * i0_oracle(x) + sk_oracle(x)
}

/// Literal principal-branch evaluation of H₀⁺(iρ) from the series with
/// ln(iρ/2) = ln(ρ/2) + iπ/2: returns (re, im) as rationals.
pub fn h0_plus_imag_axis_oracle(rho: &Rat) -> (Rat, Rat) {
    // J₀(iρ) = I₀(ρ); S_Y(iρ) = -S_K(ρ);
    // Y₀(iρ) = (2/π)[(ln(ρ/2)+γ+iπ/2) I₀(ρ) - S_K(ρ)]
    // H₀⁺(iρ) = J₀(iρ) + iY₀(iρ)
    let i0 = i0_oracle(rho);
    let sk = sk_oracle(rho);
    let ell = ln_rat(&(rho / rat(2, 1))) + gamma_rat();
    let pi = pi_rat();
    // Y₀(iρ) = (2/π)(ell·I₀ - S_K) + i·I₀
    let y_re = (&ell * &i0 - &sk) * rat(2, 1) / &pi;
    let y_im = i0.clone();
    // H⁺ = I₀ + i(y_re + i y_im) = (I₀ - y_im) + i y_re
    (&i0 - &y_im, y_re)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("finite rational")
}

/// Bisection for the first positive zero of the J₀ oracle.
pub fn j0_first_zero_oracle() -> f64 {
    let mut lo = rat(2, 1);
    let mut hi = rat(3, 1);
    assert!(j0_oracle(&lo).is_positive());
    assert!(j0_oracle(&hi).is_negative());
    for _ in 0..60 {
        let mid = (&lo + &hi) / rat(2, 1);
        if j0_oracle(&mid).is_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    to_f64(&((&lo + &hi) / rat(2, 1)))
}

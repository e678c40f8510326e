//! Angular flux density α(θ) of the scaling-critical magnetic potential:
//! a trigonometric polynomial with exact antiderivatives, so partial fluxes
//! come out in closed form.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// α(θ) = a0 + Σ_k (c_k cos kθ + s_k sin kθ), stored as (k, c_k, s_k) triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxProfile {
    pub a0: f64,
    #[serde(default)]
    pub harmonics: Vec<(u32, f64, f64)>,
}

impl FluxProfile {
    pub fn constant(a0: f64) -> Self {
        FluxProfile {
            a0,
            harmonics: Vec::new(),
        }
    }

    pub fn new(a0: f64, harmonics: Vec<(u32, f64, f64)>) -> Result<Self> {
        let p = FluxProfile { a0, harmonics };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a0.is_finite() {
            return Err(Error::InvalidConfig("a0 must be finite".into()));
        }
        for &(k, c, s) in &self.harmonics {
            if k == 0 {
                return Err(Error::InvalidConfig(
                    "harmonic index 0 is the mean value; put it in a0".into(),
                ));
            }
            if !c.is_finite() || !s.is_finite() {
                return Err(Error::InvalidConfig("harmonic coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    /// Parse from the JSON schema {"a0": 0.3, "harmonics": [[2, 0.1, 0.0]]}.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: FluxProfile =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("flux JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    /// Total flux is an integer (gauge-trivial kernel, B_α ≡ 0).
    pub fn is_integer_flux(&self) -> bool {
        self.a0 == self.a0.round()
    }

    /// Distance of the total flux from the nearest integer.
    pub fn flux_distance(&self) -> f64 {
        let frac = self.a0 - self.a0.floor();
        frac.min(1.0 - frac)
    }
}

/// Flux density at angle θ.
pub fn alpha_of_theta(p: &FluxProfile, theta: f64) -> f64 {
    let mut v = p.a0;
    for &(k, c, s) in &p.harmonics {
        let kt = k as f64 * theta;
        v += c * kt.cos() + s * kt.sin();
    }
    v
}

/// Mean value of α(θ) over the circle; equal to a0 for this representation.
pub fn total_flux(p: &FluxProfile) -> f64 {
    p.a0
}

/// Antiderivative F(θ) = a0 θ + Σ (c_k sin kθ − s_k cos kθ)/k. Not periodic:
/// F(θ + 2π) = F(θ) + 2π a0, which is what makes windings count.
fn antiderivative(p: &FluxProfile, theta: f64) -> f64 {
    let mut v = p.a0 * theta;
    for &(k, c, s) in &p.harmonics {
        let kf = k as f64;
        let kt = kf * theta;
        v += (c * kt.sin() - s * kt.cos()) / kf;
    }
    v
}

/// Signed partial flux ∫_{θ_from}^{θ_to} α(ϑ) dϑ in closed form.
pub fn partial_flux(p: &FluxProfile, theta_from: f64, theta_to: f64) -> f64 {
    antiderivative(p, theta_to) - antiderivative(p, theta_from)
}

/// Transversal vector potential on the unit circle:
/// A(θ) = α(θ)(−sin θ, cos θ).
pub fn vector_potential(p: &FluxProfile, theta: f64) -> (f64, f64) {
    let a = alpha_of_theta(p, theta);
    let (s, c) = theta.sin_cos();
    (-a * s, a * c)
}

/// Counterclockwise angle from θ_y to θ_x, in [0, 2π).
pub(crate) fn ccw_delta(theta_x: f64, theta_y: f64) -> f64 {
    (theta_x - theta_y).rem_euclid(TAU)
}

/// Partial flux along the counterclockwise arc from θ_y to θ_x.
pub(crate) fn ccw_partial_flux(p: &FluxProfile, theta_x: f64, theta_y: f64) -> f64 {
    partial_flux(p, theta_y, theta_y + ccw_delta(theta_x, theta_y))
}

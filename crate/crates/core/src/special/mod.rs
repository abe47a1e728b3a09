//! Pochhammer symbols, the Dedekind eta function, the elliptic gamma
//! function, the hyperbolic gamma function and ψ_b.

mod dilog;
mod elliptic;
mod hyperbolic;
mod pochhammer;

pub use dilog::dilog;
pub use elliptic::{
    elliptic_gamma, elliptic_gamma_product_log, log_elliptic_gamma_series, log_inverse_gamma_pair,
    narukawa_check, q_polynomials, GammaSeries,
};
pub use hyperbolic::{
    hyperbolic_gamma, hyperbolic_gamma_asymptotic_log, hyperbolic_gamma_b1, log_hyperbolic_gamma,
    log_hyperbolic_gamma_b1, log_psi_b, psi_b,
};
pub use pochhammer::{dedekind_eta, log_pochhammer, log_theta, pochhammer};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Squashing b and inverse temperature β of the hyperbolic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    pub b: f64,
    pub beta: f64,
}

impl EllipticParams {
    pub fn new(b: f64, beta: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::DivergentParameter(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { b, beta })
    }

    /// p = e^{−βb}
    pub fn p(&self) -> f64 {
        (-self.beta * self.b).exp()
    }

    /// q = e^{−β/b}
    pub fn q(&self) -> f64 {
        (-self.beta / self.b).exp()
    }

    /// σ = iβb/2π
    pub fn sigma(&self) -> Complex64 {
        Complex64::new(0.0, self.beta * self.b / (2.0 * PI))
    }

    /// τ = iβ/(2πb)
    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, self.beta / (2.0 * PI * self.b))
    }

    /// b + 1/b
    pub fn big_q(&self) -> f64 {
        self.b + 1.0 / self.b
    }
}

/// Tail cutoff and hard term cap for infinite products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub eps: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { eps: 1e-17, max_terms: 2_000_000 }
    }
}

impl TruncationPolicy {
    pub fn new(eps: f64, max_terms: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "truncation policy needs 0 < eps < 1 and max_terms >= 1, got ({eps}, {max_terms})"
            )));
        }
        Ok(Self { eps, max_terms })
    }
}

pub(crate) const POLE_THRESHOLD: f64 = 1e-12;

pub(crate) fn check_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::DivergentParameter(format!("{what} is not finite")))
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_finite, TruncationPolicy};
use crate::error::{Error, Result};
use crate::numeric::{ln_one_minus, I};

/// log (a; q)_∞ as a sum of principal logs of the factors.
/// Real part is −∞ when a factor vanishes.
pub fn log_pochhammer(a: Complex64, q: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    if !(q.norm() < 1.0) {
        return Err(Error::DivergentParameter(format!("|q| = {} >= 1", q.norm())));
    }
    let mut t = a;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        if t.norm() < policy.eps {
            // first-order tail: −Σ_{j≥k} a q^j
            sum -= t / (Complex64::new(1.0, 0.0) - q);
            break;
        }
        if k >= policy.max_terms {
            return Err(Error::TruncationExceeded { needed: k + 1, max_terms: policy.max_terms });
        }
        if (Complex64::new(1.0, 0.0) - t).norm() == 0.0 {
            return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
        }
        sum += ln_one_minus(t);
        t *= q;
        k += 1;
    }
    Ok(sum)
}

/// (a; q)_∞ = ∏_{k≥0} (1 − a q^k).
pub fn pochhammer(a: Complex64, q: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    let l = log_pochhammer(a, q, policy)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_finite(l.exp(), "pochhammer")
}

/// η(τ) = e^{2πiτ/24} (e^{2πiτ}; e^{2πiτ})_∞.
pub fn dedekind_eta(tau: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::DivergentParameter(format!("Im tau = {} <= 0", tau.im)));
    }
    let q = (2.0 * PI * I * tau).exp();
    let l = log_pochhammer(q, q, policy)? + 2.0 * PI * I * tau / 24.0;
    check_finite(l.exp(), "eta")
}

/// log θ(u; p) with θ(u; p) = (u; p)(p/u; p).
pub fn log_theta(u: Complex64, p: f64, policy: &TruncationPolicy) -> Result<Complex64> {
    let pc = Complex64::new(p, 0.0);
    Ok(log_pochhammer(u, pc, policy)? + log_pochhammer(pc / u, pc, policy)?)
}

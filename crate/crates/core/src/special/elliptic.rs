use std::f64::consts::PI;

use num_complex::Complex64;

use super::hyperbolic::log_psi_b;
use super::{check_finite, EllipticParams, TruncationPolicy, POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::numeric::{ln_one_minus, pairwise_sum_c, I};

/// log Γ(z; p, q) from the double product over j + k ≤ N.
/// Real part is −∞ at a zero of Γ.
pub fn elliptic_gamma_product_log(
    z: Complex64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let (p, q) = (params.p(), params.q());
    let m = p.max(q);
    if !(m < 1.0) {
        return Err(Error::DivergentParameter(format!("max(p, q) = {m}")));
    }
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument("z must be finite and nonzero".into()));
    }
    // the spec'd depth holds on |z| = 1; widen it when |z| or |pq/z| exceeds 1
    let growth = z.norm().max(p * q / z.norm()).max(1.0);
    let depth = ((policy.eps.ln() - growth.ln()) / m.ln()).ceil().max(0.0) as usize;
    if depth > policy.max_terms {
        return Err(Error::TruncationExceeded { needed: depth, max_terms: policy.max_terms });
    }
    let pq_over_z = Complex64::new(p * q, 0.0) / z;
    let mut logs = Vec::with_capacity((depth + 1) * (depth + 2) / 2);
    let mut pj = 1.0;
    for j in 0..=depth {
        let mut pjqk = pj;
        for _ in 0..=(depth - j) {
            let den = z * pjqk;
            if (Complex64::new(1.0, 0.0) - den).norm() < POLE_THRESHOLD {
                return Err(Error::PoleHit(format!("z = {z} sits on a pole of the elliptic gamma")));
            }
            let num = pq_over_z * pjqk;
            if (Complex64::new(1.0, 0.0) - num).norm() == 0.0 {
                return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
            }
            logs.push(ln_one_minus(num) - ln_one_minus(den));
            pjqk *= q;
        }
        pj *= p;
    }
    Ok(pairwise_sum_c(&logs))
}

/// Γ(z; p, q) = ∏_{j,k≥0} (1 − z⁻¹p^{j+1}q^{k+1}) / (1 − z p^j q^k).
pub fn elliptic_gamma(
    z: Complex64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let l = elliptic_gamma_product_log(z, params, policy)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_finite(l.exp(), "elliptic gamma")
}

/// Precomputed coefficients for the single-sum forms
///   log Γ(z) = Σ_n (zⁿ − (pq/z)ⁿ) / (n(1−pⁿ)(1−qⁿ)),           pq < |z| < 1
///   log θ(u;p) = log(1−u) − Σ_n pⁿ(uⁿ + u⁻ⁿ) / (n(1−pⁿ)),       p < |u| < 1/p
/// used inside quadrature loops.
#[derive(Debug, Clone)]
pub struct GammaSeries {
    pq: f64,
    gamma_coef: Vec<f64>,
    theta_p: Vec<f64>,
    theta_q: Vec<f64>,
}

impl GammaSeries {
    /// `worst_ratio` bounds max(|z|, pq/|z|) over the gamma arguments that
    /// will be evaluated.
    pub fn new(p: f64, q: f64, worst_ratio: f64, eps: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
            return Err(Error::DivergentParameter(format!("p = {p}, q = {q}")));
        }
        if !(worst_ratio > 0.0 && worst_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("series ratio {worst_ratio} not in (0, 1)")));
        }
        let terms = |r: f64| (eps.ln() / r.ln()).ceil().max(1.0) as usize + 2;
        let ng = terms(worst_ratio);
        let gamma_coef = (1..=ng)
            .map(|n| {
                let nf = n as f64;
                let a = -(nf * p.ln()).exp_m1();
                let b = -(nf * q.ln()).exp_m1();
                1.0 / (nf * a * b)
            })
            .collect();
        let theta = |x: f64| -> Vec<f64> {
            (1..=terms(x))
                .map(|n| {
                    let nf = n as f64;
                    (nf * x.ln()).exp() / (nf * -(nf * x.ln()).exp_m1())
                })
                .collect()
        };
        Ok(Self { pq: p * q, gamma_coef, theta_p: theta(p), theta_q: theta(q) })
    }

    /// log Γ(z; p, q) for pq < |z| < 1.
    pub fn log_gamma(&self, z: Complex64) -> Complex64 {
        let w = Complex64::new(self.pq, 0.0) / z;
        let (mut zn, mut wn) = (z, w);
        let mut s = Complex64::new(0.0, 0.0);
        for c in &self.gamma_coef {
            s += (zn - wn) * *c;
            zn *= z;
            wn *= w;
        }
        s
    }

    /// log [1/(Γ(u)Γ(1/u))] = log θ(u; p) + log θ(1/u; q), for |u| = 1.
    /// Real part is −∞ at u = 1.
    pub fn log_inverse_pair(&self, u: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let a = one - u;
        if a.norm() == 0.0 {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        let ui = one / u;
        let mut s = a.ln() + (one - ui).ln();
        let (mut un, mut uin) = (u, ui);
        let n = self.theta_p.len().max(self.theta_q.len());
        for k in 0..n {
            let sym = un + uin;
            let c = self.theta_p.get(k).copied().unwrap_or(0.0) + self.theta_q.get(k).copied().unwrap_or(0.0);
            s -= sym * c;
            un *= u;
            uin *= ui;
        }
        s
    }
}

/// log Γ(z; p, q) by the single series; requires pq < |z| < 1.
pub fn log_elliptic_gamma_series(z: Complex64, params: &EllipticParams, eps: f64) -> Result<Complex64> {
    let (p, q) = (params.p(), params.q());
    let r = z.norm();
    if !(r > p * q && r < 1.0) {
        return Err(Error::InvalidArgument(format!("series needs pq < |z| < 1, got |z| = {r}")));
    }
    let gs = GammaSeries::new(p, q, r.max(p * q / r), eps)?;
    Ok(gs.log_gamma(z))
}

/// log [1/(Γ(u)Γ(1/u))] by theta-function series; requires |u| = 1 up to rounding.
pub fn log_inverse_gamma_pair(u: Complex64, params: &EllipticParams, eps: f64) -> Result<Complex64> {
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("|u| = {} != 1", u.norm())));
    }
    let (p, q) = (params.p(), params.q());
    let gs = GammaSeries::new(p, q, 0.5, eps)?;
    Ok(gs.log_inverse_pair(u))
}

/// The cubic polynomials Q₋(x; σ, τ) and Q₊(x; σ, τ).
pub fn q_polynomials(x: Complex64, params: &EllipticParams) -> Result<(Complex64, Complex64)> {
    q_polynomials_raw(x, params.sigma(), params.tau())
}

pub(crate) fn q_polynomials_raw(x: Complex64, s: Complex64, t: Complex64) -> Result<(Complex64, Complex64)> {
    if s.norm() == 0.0 || t.norm() == 0.0 {
        return Err(Error::DivergentParameter("sigma or tau is zero".into()));
    }
    let ts = t * s;
    let one = Complex64::new(1.0, 0.0);
    let qm = -x * x * x / (6.0 * ts) + (t + s - one) * x * x / (4.0 * ts)
        - (t * t + s * s + 3.0 * ts - 3.0 * t - 3.0 * s + one) * x / (12.0 * ts)
        - (t + s - one) * (one / t + one / s - one) / 24.0;
    let shift = x - (t + s) / 2.0;
    let qp = qm + shift * shift / (2.0 * ts) - (t * t + s * s) / (24.0 * ts);
    Ok((qm, qp))
}

/// Γ(e^{2πix}) against e^{2πiQ₊(x)} ψ_b(−2πix/β − Q/2) times the product of
/// ψ_b ratios for n = 1..n_max. Returns (lhs, rhs).
pub fn narukawa_check(
    x: f64,
    params: &EllipticParams,
    n_max: usize,
    policy: &TruncationPolicy,
) -> Result<(Complex64, Complex64)> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let z = (2.0 * PI * I * x).exp();
    let lhs = elliptic_gamma(z, params, policy)?;
    let (b, beta) = (params.b, params.beta);
    let half_q = 0.5 * params.big_q();
    let (_, qp) = q_polynomials(Complex64::new(x, 0.0), params)?;
    let mut parts = vec![2.0 * PI * I * qp, log_psi_b(Complex64::new(-half_q, -2.0 * PI * x / beta), b)?];
    for n in 1..=n_max {
        let nf = n as f64;
        let num = log_psi_b(Complex64::new(-half_q, -2.0 * PI * (nf + x) / beta), b)?;
        let den = log_psi_b(Complex64::new(half_q, -2.0 * PI * (nf - x) / beta), b)?;
        parts.push(num - den);
    }
    let rhs = check_finite(pairwise_sum_c(&parts).exp(), "narukawa product")?;
    Ok((lhs, rhs))
}

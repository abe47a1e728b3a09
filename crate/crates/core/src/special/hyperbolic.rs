use std::f64::consts::PI;

use num_complex::Complex64;

use super::dilog::{dilog, BERNOULLI_EVEN};
use super::{check_finite, POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_gk, expm1, log_two_sin, I};

// half-opening of the rays along which each half of the integrand is taken
const MAX_RAY_ANGLE: f64 = 1.2;
const SERIES_CUT: f64 = 1e-3;
const LAURENT_TERMS: usize = 32;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Bernoulli numbers over factorials, B_n / n!, with B_1 = −1/2.
fn bernoulli_over_factorial(n_max: usize) -> Vec<f64> {
    let mut v = vec![0.0; n_max + 1];
    v[0] = 1.0;
    if n_max >= 1 {
        v[1] = -0.5;
    }
    for (k, c) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1);
        if n > n_max {
            break;
        }
        // table holds B_n / (n+1)!
        v[n] = c * (n as f64 + 1.0);
    }
    v
}

// is iy within threshold of i(mb + n/b) with m, n >= lo?
fn on_lattice(x: Complex64, b: f64, lo: f64) -> bool {
    if x.re.abs() >= POLE_THRESHOLD {
        return false;
    }
    let y = x.im;
    let mut m = lo;
    while m * b <= y + POLE_THRESHOLD {
        let n = ((y - m * b) * b).round();
        if n >= lo && (m * b + n / b - y).abs() < POLE_THRESHOLD {
            return true;
        }
        m += 1.0;
    }
    false
}

fn is_pole(x: Complex64, b: f64) -> bool {
    on_lattice(-x, b, 0.0)
}

fn is_zero(x: Complex64, b: f64) -> bool {
    on_lattice(x, b, 1.0)
}

// e^{2πixw} / ((e^{aw} − 1)(e^{cw} − 1) w), arranged so no factor overflows
fn kernel(w: Complex64, x: Complex64, a: f64, c: f64) -> Complex64 {
    let mut expo = 2.0 * PI * I * x * w;
    let mut den = w;
    for k in [a, c] {
        let u = w * k;
        if u.re > 0.0 {
            expo -= u;
            den *= -expm1(-u);
        } else {
            den *= expm1(u);
        }
    }
    expo.exp() / den
}

fn wrap_angle(t: f64) -> f64 {
    let mut t = t % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

// steepest-descent directions for the two halves and their decay rates
fn rays(x: Complex64, big_q: f64) -> (f64, f64, f64, f64) {
    let t1 = wrap_angle(PI / 2.0 - x.arg()).clamp(-MAX_RAY_ANGLE, MAX_RAY_ANGLE);
    let x2 = I * big_q - x;
    let t2 = wrap_angle(PI / 2.0 - x2.arg()).clamp(-MAX_RAY_ANGLE, MAX_RAY_ANGLE);
    let d1 = 2.0 * PI * (x * Complex64::from_polar(1.0, t1)).im;
    let d2 = 2.0 * PI * (x2 * Complex64::from_polar(1.0, t2)).im;
    (t1, d1, t2, d2)
}

// log Γ_h for x where both halves decay along their rays
fn log_gamma_h_integral(x: Complex64, b: f64) -> Result<Complex64> {
    let big_q = b + 1.0 / b;
    let a = -2.0 * PI * b;
    let c = -2.0 * PI / b;
    let (t1, d1, t2, d2) = rays(x, big_q);

    let delta = SERIES_CUT.min(0.5 / (2.0 * PI * x.norm()));

    // Laurent data of E(w) = e^{2πixw}·B(aw)·B(cw), B(t) = t/(eᵗ − 1)
    let bern = bernoulli_over_factorial(LAURENT_TERMS);
    let mut ea = vec![czero(); LAURENT_TERMS + 1];
    let mut ba = vec![0.0; LAURENT_TERMS + 1];
    let mut bc = vec![0.0; LAURENT_TERMS + 1];
    let mut pe = Complex64::new(1.0, 0.0);
    let (mut pa, mut pc) = (1.0, 1.0);
    for n in 0..=LAURENT_TERMS {
        ea[n] = pe;
        ba[n] = bern[n] * pa;
        bc[n] = bern[n] * pc;
        pe *= 2.0 * PI * I * x / (n as f64 + 1.0);
        pa *= a;
        pc *= c;
    }
    let coef = |n: usize| -> Complex64 {
        let mut s = czero();
        for i in 0..=n {
            let mut inner = 0.0;
            for j in 0..=(n - i) {
                inner += ba[j] * bc[n - i - j];
            }
            s += ea[i] * inner;
        }
        s
    };
    // finite part of ∫_0^δ [f(w) + f(−w)] dw
    let mut fp = -coef(1) / delta;
    let mut n = 3;
    while n <= LAURENT_TERMS {
        let t = coef(n) * delta.powi(n as i32 - 2) / (n as f64 - 2.0);
        fp += t;
        if t.norm() < 1e-18 * fp.norm().max(1.0) {
            break;
        }
        n += 2;
    }
    fp *= 2.0 / (a * c);

    let half = |theta: f64, decay: f64, sign: f64| -> Result<Complex64> {
        let dir = Complex64::from_polar(1.0, theta);
        let end = (40.0 + (1.0 / delta).ln()) / decay;
        let mut breaks = vec![0.0];
        let mut s = delta;
        while s < end.min(1.0) {
            breaks.push(s);
            s *= 2.0;
        }
        let mut s = breaks.last().copied().unwrap_or(0.0).max(1.0);
        while s < end {
            breaks.push(s);
            s += 1.0;
        }
        breaks.push(end);
        breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
        let f = |s: f64| {
            let w = Complex64::new(delta, 0.0) + dir * s;
            kernel(w * sign, x, a, c) * dir
        };
        let (v, _) = adaptive_gk(&f, &breaks, 1e-13, 1e-15, 4000)?;
        Ok(v)
    };
    let plus = half(t1, d1, 1.0)?;
    let minus = half(t2, d2, -1.0)?;
    check_finite(fp + plus + minus, "hyperbolic gamma integral")
}

/// log Γ_h(x; ib, i/b). The real part is −∞ at a zero.
pub fn log_hyperbolic_gamma(x: Complex64, b: f64) -> Result<Complex64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
    }
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::InvalidArgument("x must be finite".into()));
    }
    if is_pole(x, b) {
        return Err(Error::PoleHit(format!("x = {x} is a pole of the hyperbolic gamma")));
    }
    if is_zero(x, b) {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    let big_q = b + 1.0 / b;
    let w1 = Complex64::new(0.0, b);
    let w2 = Complex64::new(0.0, 1.0 / b);
    let min_decay = 2.0 * PI * (0.25 * big_q).min(0.25);
    let mut acc = czero();
    let mut x = x;
    for _ in 0..100_000 {
        let (_, d1, _, d2) = rays(x, big_q);
        if d1.min(d2) >= min_decay {
            let v = log_gamma_h_integral(x, b)?;
            return Ok(acc + v);
        }
        let y = x.im;
        let target = 0.5 * big_q;
        if y <= target {
            // Γ_h(x) = Γ_h(x + ω₂) / 2sin(πx/ω₁), and the same with ω₁ ↔ ω₂
            let (step, other) = if (y + 1.0 / b - target).abs() <= (y + b - target).abs() {
                (w2, w1)
            } else {
                (w1, w2)
            };
            let l = log_two_sin(PI * x / other);
            if l.re == f64::NEG_INFINITY {
                return Err(Error::PoleHit(format!("shift hits a pole at {x}")));
            }
            acc -= l;
            x += step;
        } else {
            let (step, other) = if (y - 1.0 / b - target).abs() <= (y - b - target).abs() {
                (w2, w1)
            } else {
                (w1, w2)
            };
            let l = log_two_sin(PI * (x - step) / other);
            if l.re == f64::NEG_INFINITY {
                return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
            }
            acc += l;
            x -= step;
        }
    }
    Err(Error::QuadratureFailure(format!("could not bring {x} into the strip")))
}

/// Γ_h(x; ib, i/b).
pub fn hyperbolic_gamma(x: Complex64, b: f64) -> Result<Complex64> {
    let l = log_hyperbolic_gamma(x, b)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(czero());
    }
    check_finite(l.exp(), "hyperbolic gamma")
}

/// Large-|x| estimate for log Γ_h(x + rω), x real.
/// For x < 0 the two constant terms enter with the opposite sign, as forced by
/// Γ_h(z) Γ_h(2ω − z) = 1.
pub fn hyperbolic_gamma_asymptotic_log(x: f64, r: f64, b: f64) -> Complex64 {
    let omega = Complex64::new(0.0, 0.5 * (b + 1.0 / b));
    let ax = x.abs();
    let s = x.signum();
    let inner = Complex64::new(x * ax / 2.0 + s * (b * b + 1.0 / (b * b)) / 24.0, 0.0)
        + (r - 1.0) * omega * ax
        + s * (r - 1.0) * (r - 1.0) * omega * omega / 2.0;
    -I * PI * inner
}

/// log Γ_h(ix; i, i) in closed form, for 0 < Re x < 2.
pub fn log_hyperbolic_gamma_b1(x: Complex64) -> Result<Complex64> {
    if x.re.abs() < POLE_THRESHOLD && x.im.abs() < POLE_THRESHOLD {
        return Err(Error::PoleHit("x = 0".into()));
    }
    if (x.re - 2.0).abs() < POLE_THRESHOLD && x.im.abs() < POLE_THRESHOLD {
        return Err(Error::PoleHit("x = 2 is a zero".into()));
    }
    if !(x.re > 0.0 && x.re < 2.0) {
        return Err(Error::InvalidArgument(format!("closed form needs 0 < Re x < 2, got {x}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let z = (-2.0 * PI * I * x).exp();
    let xm = x - one;
    let v = xm * (one - z).ln() - dilog(z) / (2.0 * PI * I) + I * PI * xm * xm / 2.0 - I * PI / 12.0;
    check_finite(v, "closed-form hyperbolic gamma")
}

/// Γ_h(ix; i, i) in closed form, for real 0 < x < 2.
pub fn hyperbolic_gamma_b1(x: f64) -> Result<Complex64> {
    let l = log_hyperbolic_gamma_b1(Complex64::new(x, 0.0))?;
    check_finite(l.exp(), "closed-form hyperbolic gamma")
}

/// log ψ_b(x) = −iπx²/2 + iπ(b² + b⁻²)/24 + log Γ_h(ix + ω).
/// Far to the right of the strip the two quadratic pieces cancel exactly and the
/// remainder is below e⁻⁴⁵, so zero is returned without forming them.
pub fn log_psi_b(x: Complex64, b: f64) -> Result<Complex64> {
    let big_q = b + 1.0 / b;
    let omega = Complex64::new(0.0, 0.5 * big_q);
    let z = I * x + omega;
    if z.im >= -big_q && z.im <= 2.0 * big_q && 2.0 * PI * b.min(1.0 / b) * z.re > 45.0 {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
        }
        return Ok(czero());
    }
    let g = log_hyperbolic_gamma(z, b)?;
    Ok(-I * PI * x * x / 2.0 + I * PI * (b * b + 1.0 / (b * b)) / 24.0 + g)
}

/// The non-compact quantum dilogarithm ψ_b(x).
pub fn psi_b(x: Complex64, b: f64) -> Result<Complex64> {
    let l = log_psi_b(x, b)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(czero());
    }
    check_finite(l.exp(), "psi_b")
}

//! Small numerical kernels shared by the special functions and quadrature.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Pairwise summation in the given order; the split points depend only on
/// the length, so results are reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// log Σ exp(l_k) for complex logs. Entries with re = -inf are zeros.
/// Returns None when every entry is zero.
pub fn log_sum_exp(logs: &[Complex64]) -> Option<Complex64> {
    let m = logs
        .iter()
        .map(|l| l.re)
        .filter(|r| r.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return None;
    }
    let terms: Vec<Complex64> = logs
        .iter()
        .map(|l| {
            if l.re == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                (l - m).exp()
            }
        })
        .collect();
    let s = pairwise_sum_c(&terms);
    Some(s.ln() + m)
}

/// e^z − 1 without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let em1 = z.re.exp_m1();
        let s = (0.5 * z.im).sin();
        Complex64::new(em1 * z.im.cos() - 2.0 * s * s, z.re.exp() * z.im.sin())
    } else {
        z.exp() - 1.0
    }
}

/// log(1 − t), principal branch, accurate for small |t|.
pub fn ln_one_minus(t: Complex64) -> Complex64 {
    let a = t.norm();
    if a < 1e-4 {
        let t2 = t * t;
        -(t + t2 / 2.0 + t2 * t / 3.0 + t2 * t2 / 4.0)
    } else {
        (Complex64::new(1.0, 0.0) - t).ln()
    }
}

/// log(2 sin u) on a branch that stays continuous away from the real axis.
/// Returns re = -inf at zeros.
pub fn log_two_sin(u: Complex64) -> Complex64 {
    // 2 sin u = -i (e^{iu} - e^{-iu})
    if u.im >= 0.0 {
        // dominant e^{-iu}
        let w = (2.0 * I * u).exp();
        let d = Complex64::new(1.0, 0.0) - w;
        if d.norm() == 0.0 {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        -I * u + (I * d).ln()
    } else {
        let w = (-2.0 * I * u).exp();
        let d = Complex64::new(1.0, 0.0) - w;
        if d.norm() == 0.0 {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        I * u + (-I * d).ln()
    }
}

/// Fractional part x − ⌊x⌋ in [0, 1).
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        k += s * GK_WK[j];
        if j % 2 == 1 {
            g += s * GK_WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) over the given breakpoints.
/// Stops when the summed error estimate is below max(abs_tol, rel_tol·|I|).
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: &F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(Complex64, f64)> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (val, err) = gk15(f, w[0], w[1]);
        heap.push(Panel { a: w[0], b: w[1], val, err });
    }
    loop {
        let total: Complex64 = heap.iter().map(|p| p.val).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        if heap.len() >= max_panels {
            if err <= 1e4 * target {
                return Ok((total, err));
            }
            return Err(Error::QuadratureFailure(format!(
                "error estimate {err:e} above target {target:e}"
            )));
        }
        let p = heap.pop().expect("non-empty heap");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            let total: Complex64 = heap.iter().map(|p| p.val).sum();
            return Ok((total, err));
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
}

/// Composite Gauss–Legendre over [a, b] with `panels` equal panels.
pub fn composite_gl<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Complex64 {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut parts = Vec::with_capacity(panels);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let c = lo + 0.5 * h;
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(&ws) {
            s += f(c + 0.5 * h * x) * *w;
        }
        parts.push(s * (0.5 * h));
    }
    pairwise_sum_c(&parts)
}

//! Torus quadrature for the elliptic index and line quadrature for the hyperbolic
//! integrals that appear as its reductions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{composite_gl, log_sum_exp, I};
use crate::special::{
    elliptic_gamma_product_log, log_hyperbolic_gamma, log_hyperbolic_gamma_b1, log_pochhammer, hyperbolic_gamma_asymptotic_log,
    EllipticParams, GammaSeries, TruncationPolicy,
};
use crate::theory::{rational_to_f64, TheorySpec};

pub const INDEX_RANK_LIMIT: usize = 2;

/// Chemical potentials for the flavor symmetries. The U(1) entries pair with each
/// chiral's U(1) charges, the flavor entries with its per-copy flavor weights.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FugacitySet {
    pub u1_potentials: Vec<f64>,
    pub flavor_potentials: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexValue {
    pub value: Complex64,
    /// log of the value, usable when the value itself over- or underflows
    pub log_value: Complex64,
    pub estimated_error: f64,
    pub grid_n: usize,
}

/// One numerator gamma: Γ((pq)^{r/2} e^{2πi(⟨w·x⟩ + shift)}) raised to `mult`.
#[derive(Clone, Debug)]
struct NumFactor {
    weight: Vec<i64>,
    r: f64,
    shift: f64,
    mult: f64,
}

fn numerator_factors(t: &TheorySpec, beta: f64, fug: Option<&FugacitySet>) -> Result<Vec<NumFactor>> {
    // key: weight, r bits, shift bits
    let mut merged: BTreeMap<(Vec<i64>, u64, u64), f64> = BTreeMap::new();
    for c in &t.chirals {
        let r = c.r_charge.to_f64();
        let u1_shift = match fug {
            Some(f) if !f.u1_potentials.is_empty() => {
                if c.flavor_u1_charges.len() != f.u1_potentials.len() {
                    return Err(Error::MissingFlavorData(format!(
                        "{} U(1) potentials given, chiral carries {} charges",
                        f.u1_potentials.len(),
                        c.flavor_u1_charges.len()
                    )));
                }
                c.flavor_u1_charges.iter().zip(&f.u1_potentials).map(|(q, m)| rational_to_f64(q) * m).sum::<f64>()
            }
            _ => 0.0,
        };
        let flavor = fug.filter(|f| !f.flavor_potentials.is_empty());
        for k in 0..c.copies as usize {
            let mut shift = u1_shift;
            if let Some(f) = flavor {
                let fw = c.flavor_weight(k).ok_or_else(|| {
                    Error::MissingFlavorData("flavor potentials given but chiral has no flavor weights".to_string())
                })?;
                if fw.len() != f.flavor_potentials.len() {
                    return Err(Error::LengthMismatch(fw.len(), f.flavor_potentials.len()));
                }
                shift += fw.iter().zip(&f.flavor_potentials).map(|(a, m)| *a as f64 * m).sum::<f64>();
            }
            shift *= beta;
            for w in &c.weights {
                *merged.entry((w.clone(), r.to_bits(), shift.to_bits())).or_insert(0.0) += 1.0;
            }
        }
    }
    Ok(merged
        .into_iter()
        .map(|((weight, r, s), mult)| NumFactor { weight, r: f64::from_bits(r), shift: f64::from_bits(s), mult })
        .collect())
}

fn dot_f(w: &[i64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

/// Grid size at which the trapezoid error e^{−2πnd} drops below e^{−40}, where d is the
/// distance from the real torus to the nearest singularity of the integrand.
pub fn default_grid_n(t: &TheorySpec, params: &EllipticParams) -> usize {
    let big_q = params.big_q();
    let mut d = f64::INFINITY;
    for c in &t.chirals {
        let r = c.r_charge.to_f64();
        let reach = c.weights.iter().flat_map(|w| w.iter()).map(|v| v.abs()).max().unwrap_or(0).max(1) as f64;
        d = d.min(r.min(2.0 - r) * params.beta * big_q / (4.0 * PI * reach));
    }
    let need = (40.0 / (2.0 * PI * d)).ceil();
    let (floor, cap) = if t.rank() <= 1 { (256.0, 8192.0) } else { (128.0, 1024.0) };
    let n = need.clamp(floor, cap) as usize;
    n + n % 2
}

/// The index as a product-trapezoid sum over the torus [−1/2, 1/2]^r.
pub fn elliptic_index(t: &TheorySpec, params: &EllipticParams, grid_n: usize, fug: Option<&FugacitySet>) -> Result<IndexValue> {
    let rank = t.rank();
    if rank > INDEX_RANK_LIMIT {
        return Err(Error::RankTooLarge { rank, limit: INDEX_RANK_LIMIT });
    }
    if grid_n < 16 || !grid_n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("grid_n must be even and at least 16, got {grid_n}")));
    }
    let (p, q) = (params.p(), params.q());
    let pq = p * q;
    let factors = numerator_factors(t, params.beta, fug)?;
    for f in &factors {
        if !(f.r > 0.0 && f.r < 2.0) {
            return Err(Error::PoleHit(format!("R-charge {} outside (0, 2) puts a pole on the torus", f.r)));
        }
    }
    let worst = factors.iter().map(|f| pq.powf(f.r / 2.0).max(pq.powf(1.0 - f.r / 2.0))).fold(0.5f64, f64::max);
    let series = GammaSeries::new(p, q, worst, 1e-17)?;
    let moduli: Vec<f64> = factors.iter().map(|f| pq.powf(f.r / 2.0)).collect();
    let roots = &t.group.positive_roots;

    let total = grid_n.pow(rank as u32);
    let log_integrand = |mut k: usize| -> Complex64 {
        let mut x = vec![0.0; rank];
        for xi in x.iter_mut().rev() {
            *xi = -0.5 + (k % grid_n) as f64 / grid_n as f64;
            k /= grid_n;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for a in roots {
            let u = (2.0 * PI * I * dot_f(a, &x)).exp();
            s += series.log_inverse_pair(u);
        }
        if s.re == f64::NEG_INFINITY {
            return s;
        }
        for (f, m) in factors.iter().zip(&moduli) {
            let z = (2.0 * PI * I * (dot_f(&f.weight, &x) + f.shift)).exp() * *m;
            s += series.log_gamma(z) * f.mult;
        }
        s
    };
    let logs: Vec<Complex64> = (0..total).into_par_iter().map(log_integrand).collect();

    let policy = TruncationPolicy::default();
    let pre = (log_pochhammer(Complex64::new(p, 0.0), Complex64::new(p, 0.0), &policy)?
        + log_pochhammer(Complex64::new(q, 0.0), Complex64::new(q, 0.0), &policy)?)
        * rank as f64
        - (t.group.weyl_order as f64).ln();

    let fine = log_sum_exp(&logs).ok_or_else(|| Error::QuadratureFailure("integrand vanishes on the whole grid".into()))?;
    let even: Vec<Complex64> = (0..total)
        .filter(|k| {
            let mut k = *k;
            (0..rank).all(|_| {
                let e = (k % grid_n).is_multiple_of(2);
                k /= grid_n;
                e
            })
        })
        .map(|k| logs[k])
        .collect();
    let log_fine = fine - (rank as f64) * (grid_n as f64).ln() + pre;
    let value = log_fine.exp();
    let estimated_error = match log_sum_exp(&even) {
        Some(c) => {
            let log_coarse = c - (rank as f64) * ((grid_n / 2) as f64).ln() + pre;
            // relative difference computed in log space, then scaled
            let rel = (log_coarse - log_fine).exp() - 1.0;
            rel.norm() * log_fine.re.exp()
        }
        None => f64::INFINITY,
    };
    Ok(IndexValue { value, log_value: log_fine, estimated_error, grid_n })
}

/// log Γ((pq)^{1/3})^15, the closed side of the rank-one beta integral.
pub fn log_spiridonov_rhs(params: &EllipticParams) -> Result<Complex64> {
    let z = Complex64::new((params.p() * params.q()).cbrt(), 0.0);
    Ok(elliptic_gamma_product_log(z, params, &TruncationPolicy::default())? * 15.0)
}

pub fn spiridonov_rhs(params: &EllipticParams) -> Result<Complex64> {
    Ok(log_spiridonov_rhs(params)?.exp())
}

/// One factor of a hyperbolic integrand in the variable x.
#[derive(Clone, Debug, PartialEq)]
pub enum LineFactor {
    /// Γ_h(c·x + rω)^power
    Gamma { coeff: f64, r: f64, power: i32 },
    /// 1/Γ_h(±c·x) = 4 sinh(πbcx) sinh(πcx/b)
    VectorPair { coeff: f64 },
}

/// A one-dimensional hyperbolic integral
///   norm · ∏ Γ_h(r_k ω)^{m_k} · ∫ e^{2π·exp_coeff·Q·x} ∏ factors dx.
#[derive(Clone, Debug, PartialEq)]
pub struct LineIntegrand {
    pub name: &'static str,
    pub norm: f64,
    pub constant_gammas: Vec<(f64, i32)>,
    pub exp_coeff: f64,
    pub factors: Vec<LineFactor>,
    /// no integration at all: the value is the constant part
    pub zero_dim: bool,
}

pub fn builtin_line_integrand(name: &str) -> Result<LineIntegrand> {
    use LineFactor::*;
    let v = match name {
        "y_iss" => LineIntegrand {
            name: "y_iss",
            norm: 1.0,
            constant_gammas: vec![],
            exp_coeff: -2.0 / 5.0,
            factors: vec![Gamma { coeff: 3.0, r: 0.6, power: 1 }, Gamma { coeff: -3.0, r: 0.6, power: 1 }],
            zero_dim: false,
        },
        "z_su2_sqcd_nf3" => LineIntegrand {
            name: "z_su2_sqcd_nf3",
            norm: 0.5,
            constant_gammas: vec![],
            exp_coeff: 0.0,
            factors: vec![
                Gamma { coeff: 1.0, r: 1.0 / 3.0, power: 6 },
                Gamma { coeff: -1.0, r: 1.0 / 3.0, power: 6 },
                VectorPair { coeff: 2.0 },
            ],
            zero_dim: false,
        },
        "y_so5_nf4" => LineIntegrand {
            name: "y_so5_nf4",
            norm: 0.25,
            constant_gammas: vec![(0.25, 4)],
            exp_coeff: 0.0,
            factors: vec![
                Gamma { coeff: 1.0, r: 0.25, power: 4 },
                Gamma { coeff: -1.0, r: 0.25, power: 4 },
                VectorPair { coeff: 1.0 },
            ],
            zero_dim: false,
        },
        "y_so3_nf2" => LineIntegrand {
            name: "y_so3_nf2",
            norm: 0.5,
            constant_gammas: vec![(0.5, 2)],
            exp_coeff: 0.0,
            factors: vec![],
            zero_dim: true,
        },
        _ => return Err(Error::InvalidArgument(format!("unknown hyperbolic integral {name:?}"))),
    };
    Ok(v)
}

pub const BUILTIN_LINE_INTEGRANDS: [&str; 4] = ["y_iss", "z_su2_sqcd_nf3", "y_so5_nf4", "y_so3_nf2"];

/// How Γ_h is evaluated on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaRoute {
    /// the general integral representation
    General,
    /// the b = 1 closed form through Li₂
    ClosedForm,
}

fn log_gamma_h(z: Complex64, b: f64, route: GammaRoute) -> Result<Complex64> {
    match route {
        GammaRoute::General => log_hyperbolic_gamma(z, b),
        GammaRoute::ClosedForm => {
            if b != 1.0 {
                return Err(Error::InvalidArgument(format!("closed form needs b = 1, got {b}")));
            }
            // Γ_h(z; i, i) = Γ_h(i·(−iz); i, i)
            log_hyperbolic_gamma_b1(-I * z)
        }
    }
}

fn log_two_sinh(x: f64) -> f64 {
    // log 2 sinh|x| without overflow
    let a = x.abs();
    a + (-(-2.0 * a).exp()).ln_1p()
}

impl LineIntegrand {
    pub fn log_constant(&self, b: f64, route: GammaRoute) -> Result<Complex64> {
        let omega = Complex64::new(0.0, 0.5 * (b + 1.0 / b));
        let mut s = Complex64::new(self.norm.ln(), 0.0);
        for (r, m) in &self.constant_gammas {
            s += log_gamma_h(omega * *r, b, route)? * *m as f64;
        }
        Ok(s)
    }

    /// log of the integrand at x, without the constant part. −∞ at zeros.
    pub fn log_at(&self, x: f64, b: f64, route: GammaRoute) -> Result<Complex64> {
        let big_q = b + 1.0 / b;
        let omega = Complex64::new(0.0, 0.5 * big_q);
        let mut s = Complex64::new(2.0 * PI * self.exp_coeff * big_q * x, 0.0);
        for f in &self.factors {
            match f {
                LineFactor::Gamma { coeff, r, power } => {
                    s += log_gamma_h(omega * *r + coeff * x, b, route)? * *power as f64;
                }
                LineFactor::VectorPair { coeff } => {
                    let (u, v) = (PI * b * coeff * x, PI * coeff * x / b);
                    if u == 0.0 {
                        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
                    }
                    let sign = if u * v < 0.0 { PI } else { 0.0 };
                    s += Complex64::new(log_two_sinh(u) + log_two_sinh(v), sign);
                }
            }
        }
        Ok(s)
    }

    /// Large-|x| estimate of log|integrand| from the Γ_h asymptotics.
    pub fn asymptotic_log_modulus(&self, x: f64, b: f64) -> f64 {
        let big_q = b + 1.0 / b;
        let mut s = 2.0 * PI * self.exp_coeff * big_q * x;
        for f in &self.factors {
            match f {
                LineFactor::Gamma { coeff, r, power } => {
                    s += hyperbolic_gamma_asymptotic_log(coeff * x, *r, b).re * *power as f64;
                }
                LineFactor::VectorPair { coeff } => s += PI * big_q * (coeff * x).abs(),
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineIntegral {
    pub value: Complex64,
    /// bound on the neglected tails beyond ±cutoff
    pub tail_bound: f64,
    pub cutoff: f64,
    pub panels: usize,
}

/// Composite Gauss–Legendre over [−cutoff, cutoff] with `panels` panels.
pub fn hyperbolic_line_integral(
    desc: &LineIntegrand,
    b: f64,
    cutoff: f64,
    panels: usize,
    route: GammaRoute,
) -> Result<LineIntegral> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
    }
    let constant = desc.log_constant(b, route)?;
    if desc.zero_dim {
        return Ok(LineIntegral { value: constant.exp(), tail_bound: 0.0, cutoff: 0.0, panels: 0 });
    }
    if !(cutoff > 0.0) || panels == 0 {
        return Err(Error::InvalidArgument("cutoff and panel count must be positive".into()));
    }
    // tails: the estimate must decay past the cutoff on both sides
    let mut tail = 0.0;
    for side in [-1.0, 1.0] {
        let x0 = side * cutoff;
        let h = 1e-3 * cutoff;
        let l0 = desc.asymptotic_log_modulus(x0, b);
        let slope = (desc.asymptotic_log_modulus(x0 + side * h, b) - l0) / h;
        if !(slope < 0.0) {
            return Err(Error::TailBoundViolated(format!("{} does not decay at x = {x0}", desc.name)));
        }
        tail += (l0 + constant.re).exp() / -slope;
    }
    let f = |x: f64| -> Complex64 {
        match desc.log_at(x, b, route) {
            Ok(l) if l.re == f64::NEG_INFINITY => Complex64::new(0.0, 0.0),
            Ok(l) => (l + constant).exp(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let value = composite_gl(&f, -cutoff, cutoff, panels, 8);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::QuadratureFailure(format!("{} did not evaluate on the line", desc.name)));
    }
    Ok(LineIntegral { value, tail_bound: tail, cutoff, panels })
}

/// Built-in integral at b with the route chosen by b.
pub fn hyperbolic_builtin(name: &str, b: f64, cutoff: f64, panels: usize) -> Result<LineIntegral> {
    let desc = builtin_line_integrand(name)?;
    let route = if b == 1.0 { GammaRoute::ClosedForm } else { GammaRoute::General };
    hyperbolic_line_integral(&desc, b, cutoff, panels, route)
}

//! The piecewise potential on the holonomy torus and its relatives.
//!
//! Everything here is generic over [`Scalar`], implemented for `f64` and for
//! exact rationals. Float sums go through pairwise summation in a fixed order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::special::{log_hyperbolic_gamma, log_psi_b};
use crate::theory::{
    is_non_chiral, is_positive, rat, rat_int, rational_to_f64, trace_anomalies, trace_anomalies_f64, Rational,
    TheorySpec, WeightVector,
};

pub trait Scalar:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// x − ⌊x⌋
    fn frac(&self) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Some for float scalars only.
    fn from_f64(v: f64) -> Option<Self>;
    fn sum(terms: Vec<Self>) -> Self;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn frac(&self) -> Self {
        let f = self - self.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }
    fn sum(terms: Vec<Self>) -> Self {
        pairwise_sum(&terms)
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        rat_int(n)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn frac(&self) -> Self {
        self - self.floor()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_f64(_: f64) -> Option<Self> {
        None
    }
    fn sum(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Rational::zero(), |a, b| a + b)
    }
}

/// ϑ(x) = {x}(1 − {x})
pub fn vartheta<S: Scalar>(x: &S) -> S {
    let f = x.frac();
    f.clone() * (S::from_i64(1) - f)
}

/// κ(x) = {x}(1 − {x})(1 − 2{x})
pub fn kappa<S: Scalar>(x: &S) -> S {
    let f = x.frac();
    f.clone() * (S::from_i64(1) - f.clone()) * (S::from_i64(1) - S::from_i64(2) * f)
}

pub fn dot<S: Scalar>(w: &[i64], x: &[S]) -> S {
    let mut acc = S::from_i64(0);
    for (wi, xi) in w.iter().zip(x) {
        if *wi != 0 {
            acc = acc + S::from_i64(*wi) * xi.clone();
        }
    }
    acc
}

/// One ϑ or κ term: coefficient · f(⟨w·x⟩).
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub weight: WeightVector,
    /// exact coefficient, absent for float-mode charges
    pub coeff: Option<Rational>,
    pub coeff_f64: f64,
}

impl Term {
    fn coeff_as<S: Scalar>(&self) -> Result<S> {
        match &self.coeff {
            Some(c) => Ok(S::from_rational(c)),
            None => S::from_f64(self.coeff_f64).ok_or(Error::IrrationalCharges),
        }
    }
}

/// The potential as a canonical list of terms, with ±w merged.
/// For L_h the terms are ϑ terms, for Q_h they are κ terms scaled by 1/12.
#[derive(Clone, Debug, PartialEq)]
pub struct RainsForm {
    pub rank: usize,
    pub l_terms: Vec<Term>,
    pub q_terms: Vec<Term>,
}

fn canonical(w: &[i64]) -> (WeightVector, i64) {
    if is_positive(w) {
        (w.to_vec(), 1)
    } else {
        (w.iter().map(|c| -c).collect(), -1)
    }
}

fn push_term(map: &mut BTreeMap<WeightVector, (Option<Rational>, f64)>, w: WeightVector, c: Option<Rational>, cf: f64) {
    let e = map.entry(w).or_insert((Some(Rational::zero()), 0.0));
    e.0 = match (e.0.take(), c) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    e.1 += cf;
}

fn finish(map: BTreeMap<WeightVector, (Option<Rational>, f64)>) -> Vec<Term> {
    map.into_iter()
        .filter(|(_, (c, cf))| match c {
            Some(c) => !c.is_zero(),
            None => *cf != 0.0,
        })
        .map(|(weight, (coeff, cf))| {
            let coeff_f64 = coeff.as_ref().map(rational_to_f64).unwrap_or(cf);
            Term { weight, coeff, coeff_f64 }
        })
        .collect()
}

impl RainsForm {
    pub fn new(t: &TheorySpec) -> Self {
        let mut l = BTreeMap::new();
        let mut q = BTreeMap::new();
        let half = rat(1, 2);
        let twelfth = rat(1, 12);
        for c in &t.chirals {
            let k = c.copies as i64;
            let exact = c.r_charge.exact().map(|r| (rat_int(1) - r) * &half * rat_int(k));
            let approx = 0.5 * (1.0 - c.r_charge.to_f64()) * k as f64;
            for w in &c.weights {
                if w.iter().all(|x| *x == 0) {
                    continue;
                }
                let (cw, s) = canonical(w);
                push_term(&mut l, cw.clone(), exact.clone(), approx);
                push_term(&mut q, cw, Some(&twelfth * rat_int(s * k)), (s * k) as f64 / 12.0);
            }
        }
        for a in &t.group.positive_roots {
            let (cw, _) = canonical(a);
            push_term(&mut l, cw, Some(rat_int(-1)), -1.0);
        }
        RainsForm { rank: t.group.rank, l_terms: finish(l), q_terms: finish(q) }
    }

    fn eval<S: Scalar>(&self, terms: &[Term], x: &[S], f: impl Fn(&S) -> S) -> Result<S> {
        if x.len() != self.rank {
            return Err(Error::LengthMismatch(x.len(), self.rank));
        }
        let parts = terms
            .iter()
            .map(|t| Ok(t.coeff_as::<S>()? * f(&dot(&t.weight, x))))
            .collect::<Result<Vec<S>>>()?;
        Ok(S::sum(parts))
    }

    pub fn l<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.eval(&self.l_terms, x, vartheta)
    }

    pub fn q<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.eval(&self.q_terms, x, kappa)
    }

    pub fn l_tilde<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.eval(&self.l_terms, x, |y| y.abs_val())
    }

    /// Q̃ = −¼ Σ ⟨ρ·x⟩|⟨ρ·x⟩|
    pub fn q_tilde<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.eval(&self.q_terms, x, |y| S::from_i64(-3) * y.clone() * y.abs_val())
    }
}

pub fn rains_l<S: Scalar>(t: &TheorySpec, x: &[S]) -> Result<S> {
    RainsForm::new(t).l(x)
}

pub fn rains_q<S: Scalar>(t: &TheorySpec, x: &[S]) -> Result<S> {
    RainsForm::new(t).q(x)
}

pub fn l_tilde_s3<S: Scalar>(t: &TheorySpec, x: &[S]) -> Result<S> {
    RainsForm::new(t).l_tilde(x)
}

pub fn q_tilde_s3<S: Scalar>(t: &TheorySpec, x: &[S]) -> Result<S> {
    RainsForm::new(t).q_tilde(x)
}

fn check_b_beta(b: f64, beta: Option<f64>) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
    }
    if let Some(beta) = beta {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
    }
    Ok(())
}

/// Tr R and Tr R³ as floats, exact when the charges are.
pub fn traces_f64(t: &TheorySpec) -> (f64, f64) {
    match trace_anomalies(t) {
        Ok((a, b)) => (rational_to_f64(&a), rational_to_f64(&b)),
        Err(_) => trace_anomalies_f64(t),
    }
}

/// (π²/3β)((b + b⁻¹)/2) Tr R
pub fn e0_dk(t: &TheorySpec, b: f64, beta: f64) -> Result<f64> {
    check_b_beta(b, Some(beta))?;
    let (tr, _) = traces_f64(t);
    Ok(PI * PI / (3.0 * beta) * 0.5 * (b + 1.0 / b) * tr)
}

/// (4π²/β)((b + b⁻¹)/2) L_h(x)
pub fn v_eff(t: &TheorySpec, x: &[f64], b: f64, beta: f64) -> Result<f64> {
    check_b_beta(b, Some(beta))?;
    Ok(4.0 * PI * PI / beta * 0.5 * (b + 1.0 / b) * rains_l(t, x)?)
}

/// (8π³/β²) Q_h(x)
pub fn theta_phase(t: &TheorySpec, x: &[f64], beta: f64) -> Result<f64> {
    check_b_beta(1.0, Some(beta))?;
    Ok(8.0 * PI.powi(3) / (beta * beta) * rains_q(t, x)?)
}

pub fn e_susy(t: &TheorySpec, b: f64) -> Result<f64> {
    check_b_beta(b, None)?;
    let (tr, tr3) = traces_f64(t);
    let h = 0.5 * (b + 1.0 / b);
    Ok(h.powi(3) * tr3 / 6.0 - h * (b * b + 1.0 / (b * b)) / 24.0 * tr)
}

/// ∏ over zero weights of Γ_h(r_j ω).
pub fn w0(t: &TheorySpec, b: f64) -> Result<f64> {
    check_b_beta(b, None)?;
    let omega = Complex64::new(0.0, 0.5 * (b + 1.0 / b));
    let mut acc = Complex64::new(0.0, 0.0);
    for c in &t.chirals {
        let zeros = c.weights.iter().filter(|w| w.iter().all(|x| *x == 0)).count() * c.copies as usize;
        if zeros > 0 {
            acc += zeros as f64 * log_hyperbolic_gamma(c.r_charge.to_f64() * omega, b)?;
        }
    }
    Ok(acc.exp().re)
}

/// The ψ_b ratio product. Each ±ρ pair found by the non-chiral pairing contributes
/// ψ_b(−2πi{y}/β + (r₊−1)Q/2) / ψ_b(−2πi{y}/β − (r₋−1)Q/2) with y = ⟨ρ₊·x⟩; r₊ and r₋ are the
/// R-charges of the chirals carrying +ρ and −ρ. Returns the complex value.
pub fn w_factor_complex(t: &TheorySpec, x: &[f64], b: f64, beta: f64) -> Result<Complex64> {
    check_b_beta(b, Some(beta))?;
    if x.len() != t.group.rank {
        return Err(Error::LengthMismatch(x.len(), t.group.rank));
    }
    let wit = is_non_chiral(t);
    if !wit.non_chiral {
        return Err(Error::ChiralTheory(format!("{} unpaired nonzero weights", wit.unpaired.len())));
    }
    let half_q = 0.5 * (b + 1.0 / b);
    let mut terms = Vec::new();
    let mut factor = |y: f64, up: f64, down: f64| -> Result<bool> {
        let im = -2.0 * PI * y.frac() / beta;
        let num = log_psi_b(Complex64::new(up, im), b);
        let den = log_psi_b(Complex64::new(down, im), b);
        match (num, den) {
            (_, Err(Error::PoleHit(_))) => Ok(false),
            (Ok(n), Ok(d)) if n.re == f64::NEG_INFINITY => {
                let _ = d;
                Ok(false)
            }
            (Ok(n), Ok(d)) => {
                terms.push(n - d);
                Ok(true)
            }
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    };
    for p in &wit.pairs {
        let rp = t.chirals[p.plus_chiral].r_charge.to_f64();
        let rm = t.chirals[p.minus_chiral].r_charge.to_f64();
        if !factor(dot(&p.positive, x), (rp - 1.0) * half_q, -(rm - 1.0) * half_q)? {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    for a in &t.group.positive_roots {
        if !factor(dot(a, x), half_q, -half_q)? {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let re = pairwise_sum(&terms.iter().map(|z| z.re).collect::<Vec<_>>());
    let im = pairwise_sum(&terms.iter().map(|z| z.im).collect::<Vec<_>>());
    Ok(Complex64::new(re, im).exp())
}

/// Real part of [`w_factor_complex`].
pub fn w_factor(t: &TheorySpec, x: &[f64], b: f64, beta: f64) -> Result<f64> {
    Ok(w_factor_complex(t, x, b, beta)?.re)
}

// ------------------------------------------------------------ inequalities

/// Does some permutation make the sorted values alternate c, d, c, d, … or d, c, d, c, …?
fn interleaves(c: &[f64], d: &[f64]) -> bool {
    let mut all: Vec<(f64, bool)> = c.iter().map(|v| (*v, true)).chain(d.iter().map(|v| (*v, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut prev = f64::NAN;
    for (v, is_c) in all {
        if v != prev {
            groups.push((0, 0));
            prev = v;
        }
        let g = groups.last_mut().unwrap();
        if is_c {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
    }
    [true, false].iter().any(|&start_c| {
        let mut next_c = start_c;
        groups.iter().all(|&(nc, nd)| {
            let k = nc + nd;
            let (want_next, want_other) = (k.div_ceil(2), k / 2);
            let (have_next, have_other) = if next_c { (nc, nd) } else { (nd, nc) };
            if have_next != want_next || have_other != want_other {
                return false;
            }
            if k % 2 == 1 {
                next_c = !next_c;
            }
            true
        })
    })
}

fn gti_sides(c: &[f64], d: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    if c.len() != d.len() {
        return Err(Error::LengthMismatch(c.len(), d.len()));
    }
    if c.is_empty() {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let n = c.len();
    let mut terms = Vec::new();
    for ci in c {
        for dj in d {
            terms.push(f(ci - dj));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            terms.push(-f(c[i] - c[j]));
            terms.push(-f(d[i] - d[j]));
        }
    }
    let s: f64 = pairwise_sum(&c.iter().zip(d).map(|(a, b)| a - b).collect::<Vec<_>>());
    terms.push(-f(s));
    Ok(pairwise_sum(&terms))
}

/// (lhs − rhs, equality expected) for the ϑ inequality.
pub fn gti_check(c: &[f64], d: &[f64]) -> Result<(f64, bool)> {
    let diff = gti_sides(c, d, |y| vartheta(&y))?;
    let fc: Vec<f64> = c.iter().map(Scalar::frac).collect();
    let fd: Vec<f64> = d.iter().map(Scalar::frac).collect();
    Ok((diff, interleaves(&fc, &fd)))
}

/// (lhs − rhs, equality expected) for the absolute-value inequality.
pub fn gti_abs_check(c: &[f64], d: &[f64]) -> Result<(f64, bool)> {
    let diff = gti_sides(c, d, f64::abs)?;
    Ok((diff, interleaves(c, d)))
}

/// (2N−2)Σϑ(x_j) − Σ_{i<j}[ϑ(x_i+x_j) + ϑ(x_i−x_j)] against 2Σ_{i<j} min(|x_i|, |x_j|).
pub fn so_identity_check(x: &[f64]) -> Result<(f64, f64)> {
    if let Some(v) = x.iter().find(|v| !(v.abs() <= 0.5)) {
        return Err(Error::DomainViolation(*v));
    }
    let n = x.len();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for xi in x {
        lhs.push((2 * n) as f64 * vartheta(xi) - 2.0 * vartheta(xi));
    }
    for i in 0..n {
        for j in i + 1..n {
            lhs.push(-vartheta(&(x[i] + x[j])));
            lhs.push(-vartheta(&(x[i] - x[j])));
            rhs.push(2.0 * x[i].abs().min(x[j].abs()));
        }
    }
    Ok((pairwise_sum(&lhs), pairwise_sum(&rhs)))
}

/// Potential of one trinion block with its three half nodes.
pub fn block_rains<S: Scalar>(x: &S, y: &S, z: &S) -> S {
    let t = |a: S| vartheta(&a);
    let two = S::from_i64(2);
    let s = S::sum(vec![
        t(x.clone() + y.clone() + z.clone()),
        t(x.clone() + y.clone() - z.clone()),
        t(x.clone() - y.clone() + z.clone()),
        t(-x.clone() + y.clone() + z.clone()),
        -t(two.clone() * x.clone()),
        -t(two.clone() * y.clone()),
        -t(two * z.clone()),
    ]);
    S::from_rational(&rat(1, 3)) * s
}

/// Grid nodes −1/2 + k/res, k = 0..=res.
pub fn grid_axis(res: usize) -> Vec<f64> {
    (0..=res).map(|k| -0.5 + k as f64 / res as f64).collect()
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// CSV of L_h (and optionally Q_h) on the uniform grid, last coordinate fastest.
pub fn rains_grid_csv(t: &TheorySpec, res: usize, with_q: bool) -> Result<String> {
    if res == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let form = RainsForm::new(t);
    let r = form.rank;
    let axis = grid_axis(res);
    let mut out = String::new();
    let head: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let _ = write!(out, "{},L_h", head.join(","));
    if with_q {
        out.push_str(",Q_h");
    }
    out.push('\n');
    let total = (res + 1).pow(r as u32);
    let mut idx = vec![0usize; r];
    for _ in 0..total {
        let x: Vec<f64> = idx.iter().map(|k| axis[*k]).collect();
        let cells: Vec<String> = x.iter().map(|v| fmt_num(*v)).collect();
        let _ = write!(out, "{},{}", cells.join(","), fmt_num(form.l(&x)?));
        if with_q {
            let _ = write!(out, ",{}", fmt_num(form.q(&x)?));
        }
        out.push('\n');
        for d in (0..r).rev() {
            idx[d] += 1;
            if idx[d] <= res {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(out)
}

/// CSV of a one-variable function on the uniform grid, header `x1,<label>`.
pub fn builtin_grid_csv(label: &str, res: usize, f: impl Fn(f64) -> f64) -> Result<String> {
    if res == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let mut out = format!("x1,{label}\n");
    for x in grid_axis(res) {
        let _ = writeln!(out, "{},{}", fmt_num(x), fmt_num(f(x)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleaving_with_ties() {
        assert!(interleaves(&[0.1, 0.3], &[0.2, 0.4]));
        assert!(interleaves(&[0.2, 0.4], &[0.1, 0.3]));
        assert!(!interleaves(&[0.1, 0.2], &[0.3, 0.4]));
        assert!(interleaves(&[0.1, 0.1], &[0.1, 0.1]));
        assert!(interleaves(&[0.0, 0.5], &[0.5, 0.5]));
        assert!(!interleaves(&[0.0, 0.0], &[0.5, 0.5]));
    }

    #[test]
    fn float_frac_stays_below_one() {
        let v = -1e-18f64;
        let f = v.frac();
        assert!((0.0..1.0).contains(&f));
    }
}

//! Leading small-β predictions compared against quadrature, plus the exact identity
//! and the large-β limit checks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minimizer::{minimize_auto, MinimizationResult};
use crate::numeric::{log_sum_exp, I};
use crate::quadrature::{default_grid_n, elliptic_index, log_spiridonov_rhs, IndexValue};
use crate::rains::{e0_dk, theta_phase, v_eff};
use crate::special::EllipticParams;
use crate::theory::{is_non_chiral, trace_anomalies, Rational, TheorySpec};

/// Grid resolution used when a minimization has to fall back to a scan.
pub const DEFAULT_RESOLUTION: usize = 60;

/// −(π²/3β)((b + b⁻¹)/2)(Tr R + 12 L_min) + dim h_qu · log(2π/β)
pub fn predict_log_index(t: &TheorySpec, b: f64, beta: f64, min: &MinimizationResult) -> Result<f64> {
    if !is_non_chiral(t).non_chiral {
        return Err(Error::ChiralTheory(t.name.clone()));
    }
    let e0 = e0_dk(t, b, beta)?;
    let lift = PI * PI / (3.0 * beta) * 0.5 * (b + 1.0 / b) * 12.0 * min.l_min_f64;
    Ok(-e0 - lift + min.dim_hqu as f64 * (2.0 * PI / beta).ln())
}

/// log(π/(2β) − 1/(2π)) + 3β/8, the complete small-β expansion of the SO(3), two-flavor
/// index at b = 1.
pub fn so3_all_orders(beta: f64) -> f64 {
    (PI / (2.0 * beta) - 1.0 / (2.0 * PI)).ln() + 3.0 * beta / 8.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport {
    pub theory: String,
    pub b: f64,
    pub beta_ladder: Vec<f64>,
    pub tr_r: Option<Rational>,
    pub tr_r3: Option<Rational>,
    pub l_min: Option<Rational>,
    pub l_min_f64: f64,
    pub dim_hqu: usize,
    pub predicted_log: Vec<f64>,
    pub measured_log: Vec<f64>,
    pub residuals: Vec<f64>,
    pub quadrature_error: Vec<f64>,
    /// residual[k+1] − residual[k]
    pub differences: Vec<f64>,
    /// |difference[k]| / |difference[k+1]|
    pub contraction: Vec<f64>,
}

impl AsymptoticReport {
    /// Every successive difference shrinks by at least `factor`.
    pub fn contracts_by(&self, factor: f64) -> bool {
        !self.contraction.is_empty() && self.contraction.iter().all(|c| *c >= factor)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,measured,predicted,residual\n");
        for k in 0..self.beta_ladder.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.beta_ladder[k], self.measured_log[k], self.predicted_log[k], self.residuals[k]
            );
        }
        out
    }
}

fn check_ladder(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("empty beta ladder".into()));
    }
    if betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::InvalidArgument("beta values must be positive".into()));
    }
    if betas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("beta ladder must be strictly decreasing".into()));
    }
    Ok(())
}

fn differences(res: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d: Vec<f64> = res.windows(2).map(|w| w[1] - w[0]).collect();
    let c = d.windows(2).map(|w| w[0].abs() / w[1].abs()).collect();
    (d, c)
}

/// log|I| on the ladder against the prediction. `grid_n` of None picks the grid per β.
pub fn residual_ladder(t: &TheorySpec, b: f64, betas: &[f64], grid_n: Option<usize>) -> Result<AsymptoticReport> {
    check_ladder(betas)?;
    let min = minimize_auto(t, DEFAULT_RESOLUTION)?;
    let predicted = betas.iter().map(|beta| predict_log_index(t, b, *beta, &min)).collect::<Result<Vec<f64>>>()?;
    let runs = betas
        .par_iter()
        .map(|beta| {
            let params = EllipticParams::new(b, *beta)?;
            let n = grid_n.unwrap_or_else(|| default_grid_n(t, &params));
            elliptic_index(t, &params, n, None)
        })
        .collect::<Result<Vec<IndexValue>>>()?;
    let measured: Vec<f64> = runs.iter().map(|v| v.log_value.re).collect();
    let quadrature_error = runs.iter().map(|v| v.estimated_error / v.value.norm()).collect();
    let residuals: Vec<f64> = measured.iter().zip(&predicted).map(|(m, p)| m - p).collect();
    let (differences, contraction) = differences(&residuals);
    let traces = trace_anomalies(t).ok();
    Ok(AsymptoticReport {
        theory: t.name.clone(),
        b,
        beta_ladder: betas.to_vec(),
        tr_r: traces.as_ref().map(|x| x.0.clone()),
        tr_r3: traces.map(|x| x.1),
        l_min: min.l_min.clone(),
        l_min_f64: min.l_min_f64,
        dim_hqu: min.dim_hqu,
        predicted_log: predicted,
        measured_log: measured,
        residuals,
        quadrature_error,
        differences,
        contraction,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct So3Check {
    pub betas: Vec<f64>,
    pub measured_log: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl So3Check {
    /// |residual| non-increasing along the ladder, ignoring changes below `floor`.
    pub fn monotone(&self, floor: f64) -> bool {
        self.residuals.windows(2).all(|w| w[1].abs() <= w[0].abs().max(floor))
    }
}

/// log I against the closed small-β expansion at b = 1. The theory must be SO(3)
/// with two vector flavors of charge 1/2.
pub fn check_so3_all_orders(t: &TheorySpec, betas: &[f64], grid_n: Option<usize>) -> Result<So3Check> {
    check_ladder(betas)?;
    let measured = betas
        .par_iter()
        .map(|beta| {
            let params = EllipticParams::new(1.0, *beta)?;
            let n = grid_n.unwrap_or_else(|| default_grid_n(t, &params));
            Ok(elliptic_index(t, &params, n, None)?.log_value.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let closed: Vec<f64> = betas.iter().map(|b| so3_all_orders(*b)).collect();
    let residuals = measured.iter().zip(&closed).map(|(m, c)| m - c).collect();
    Ok(So3Check { betas: betas.to_vec(), measured_log: measured, closed_form: closed, residuals })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub b: f64,
    pub beta: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative_error: f64,
    pub passed: bool,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// Quadrature of the rank-one theory against Γ((pq)^{1/3})^15.
pub fn check_spiridonov_identity(t: &TheorySpec, params: &EllipticParams, grid_n: usize) -> Result<IdentityCheck> {
    let lhs = elliptic_index(t, params, grid_n, None)?;
    let log_rhs = log_spiridonov_rhs(params)?;
    let relative_error = ((lhs.log_value - log_rhs).exp() - 1.0).norm();
    Ok(IdentityCheck {
        b: params.b,
        beta: params.beta,
        lhs: lhs.value,
        rhs: log_rhs.exp(),
        relative_error,
        passed: relative_error <= IDENTITY_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowTemperatureCheck {
    pub betas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub distance: Vec<f64>,
    pub monotone: bool,
    pub final_below: bool,
    pub passed: bool,
}

pub const LOW_TEMPERATURE_BOUND: f64 = 0.5;

/// |I − 1| along increasing β: decreasing, and below the bound at β = 8 when that
/// point is on the ladder (otherwise at the last point).
pub fn check_low_temperature(t: &TheorySpec, b: f64, betas: &[f64], grid_n: Option<usize>) -> Result<LowTemperatureCheck> {
    if betas.is_empty() || betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("beta values must be strictly increasing".into()));
    }
    let values = betas
        .par_iter()
        .map(|beta| {
            let params = EllipticParams::new(b, *beta)?;
            let n = grid_n.unwrap_or_else(|| default_grid_n(t, &params));
            Ok(elliptic_index(t, &params, n, None)?.value)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let distance: Vec<f64> = values.iter().map(|v| (v - 1.0).norm()).collect();
    let monotone = distance.windows(2).all(|w| w[1] < w[0]);
    let at = betas.iter().position(|b| *b == 8.0).unwrap_or(betas.len() - 1);
    let final_below = distance[at] < LOW_TEMPERATURE_BOUND;
    Ok(LowTemperatureCheck { betas: betas.to_vec(), values, distance, monotone, final_below, passed: monotone && final_below })
}

/// log of (2π/β)^r ∫ exp(−E₀ − V^eff(x) + iΘ(x)) over the hypercube, by the
/// trapezoid rule. Exploratory only; chiral theories are allowed.
pub fn conjecture_mode_estimate(t: &TheorySpec, b: f64, beta: f64, grid_n: usize) -> Result<Complex64> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument("grid_n must be at least 2".into()));
    }
    let r = t.rank();
    let total = grid_n
        .checked_pow(r as u32)
        .filter(|n| *n <= 50_000_000)
        .ok_or(Error::RankTooLarge { rank: r, limit: 4 })?;
    let e0 = e0_dk(t, b, beta)?;
    let logs = (0..total)
        .into_par_iter()
        .map(|mut k| {
            let mut x = vec![0.0; r];
            for xi in x.iter_mut().rev() {
                *xi = -0.5 + (k % grid_n) as f64 / grid_n as f64;
                k /= grid_n;
            }
            Ok(Complex64::new(-v_eff(t, &x, b, beta)?, 0.0) + I * theta_phase(t, &x, beta)?)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let s = log_sum_exp(&logs).ok_or_else(|| Error::QuadratureFailure("empty grid".into()))?;
    Ok(s - (r as f64) * (grid_n as f64).ln() - e0 + (r as f64) * (2.0 * PI / beta).ln())
}

//! Gauge theory data: groups, weight systems, chiral multiplets, anomaly checks.
//!
//! Weights are integer vectors in a per-factor basis, concatenated across
//! factors. SU(N) uses e_1..e_{N-1} with e_N = −(e_1 + … + e_{N-1}), so the
//! fundamental of SU(3) is {(1,0),(0,1),(−1,−1)} and its positive roots are
//! (1,−1),(2,1),(1,2). SO(n) and Sp(2N) use the orthogonal basis.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type WeightVector = Vec<i64>;

const MAX_FACTOR_RANK: usize = 64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse "p/q", "p", or a terminating decimal like "0.25".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let digits: BigInt = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp)
            .parse()
            .map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rational::new(digits, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    SU,
    SO,
    Sp,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::SU => "SU",
            GroupKind::SO => "SO",
            GroupKind::Sp => "Sp",
        })
    }
}

/// One simple factor. `n` is the matrix size: SU(n), SO(n), Sp(n) with n even.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub kind: GroupKind,
    pub n: usize,
}

impl GroupDescriptor {
    pub fn new(kind: GroupKind, n: usize) -> Self {
        GroupDescriptor { kind, n }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleFactor {
    pub kind: GroupKind,
    pub n: usize,
    pub rank: usize,
    /// first coordinate of this factor in the concatenated weight vector
    pub offset: usize,
}

impl SimpleFactor {
    fn unit(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank];
        if self.kind == GroupKind::SU && i == self.rank {
            v.iter_mut().for_each(|c| *c = -1);
        } else {
            v[i] = 1;
        }
        v
    }

    fn positive_roots(&self) -> Vec<Vec<i64>> {
        let r = self.rank;
        let mut out = Vec::new();
        match self.kind {
            GroupKind::SU => {
                for i in 0..=r {
                    for j in i + 1..=r {
                        out.push(sub(&self.unit(i), &self.unit(j)));
                    }
                }
            }
            GroupKind::SO | GroupKind::Sp => {
                for i in 0..r {
                    for j in i + 1..r {
                        out.push(sub(&self.unit(i), &self.unit(j)));
                        out.push(add(&self.unit(i), &self.unit(j)));
                    }
                }
                for i in 0..r {
                    match (self.kind, self.n % 2) {
                        (GroupKind::SO, 1) => out.push(self.unit(i)),
                        (GroupKind::Sp, _) => out.push(scale(&self.unit(i), 2)),
                        _ => {}
                    }
                }
            }
        }
        out
    }

    fn weyl_order(&self) -> u128 {
        let fact = |k: usize| (1..=k as u128).product::<u128>();
        let r = self.rank;
        match self.kind {
            GroupKind::SU => fact(r + 1),
            GroupKind::Sp => (1u128 << r) * fact(r),
            GroupKind::SO if self.n % 2 == 1 => (1u128 << r) * fact(r),
            GroupKind::SO => (1u128 << (r - 1)) * fact(r),
        }
    }

    /// Weights of the defining representation.
    fn vector_weights(&self) -> Vec<Vec<i64>> {
        let r = self.rank;
        match self.kind {
            GroupKind::SU => (0..=r).map(|i| self.unit(i)).collect(),
            _ => {
                let mut w: Vec<Vec<i64>> = Vec::new();
                for i in 0..r {
                    w.push(self.unit(i));
                    w.push(scale(&self.unit(i), -1));
                }
                if self.kind == GroupKind::SO && self.n % 2 == 1 {
                    w.push(vec![0; r]);
                }
                w
            }
        }
    }

    fn irrep_weights(&self, name: &str) -> Result<Vec<Vec<i64>>> {
        let unknown = || Error::UnknownRepresentation(format!("{name:?} of {}({})", self.kind, self.n));
        let r = self.rank;
        let w = match name {
            "singlet" | "trivial" => vec![vec![0; r]],
            "fund" | "vector" if self.kind != GroupKind::SU || name == "fund" => self.vector_weights(),
            "antifund" if self.kind == GroupKind::SU => {
                self.vector_weights().iter().map(|v| scale(v, -1)).collect()
            }
            "adj" | "adjoint" => {
                let mut w = Vec::new();
                for a in self.positive_roots() {
                    w.push(scale(&a, -1));
                    w.push(a);
                }
                w.extend(std::iter::repeat_n(vec![0; r], r));
                w
            }
            "sym_traceless" if self.kind == GroupKind::SO => {
                let v = self.vector_weights();
                let mut w = Vec::new();
                for i in 0..v.len() {
                    for j in i..v.len() {
                        w.push(add(&v[i], &v[j]));
                    }
                }
                let z = vec![0; r];
                let pos = w.iter().position(|x| *x == z).ok_or_else(unknown)?;
                w.remove(pos);
                w
            }
            _ if name.starts_with("spin:") && self.kind == GroupKind::SU && self.n == 2 => {
                let j = parse_rational(&name[5..]).map_err(|_| unknown())?;
                let two_j = &j * rat_int(2);
                if !two_j.is_integer() || two_j.is_negative() {
                    return Err(unknown());
                }
                let m = two_j.to_integer().to_i64().ok_or_else(unknown)?;
                (0..=m).map(|k| vec![m - 2 * k]).collect()
            }
            _ => return Err(unknown()),
        };
        Ok(w)
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[i64], k: i64) -> Vec<i64> {
    a.iter().map(|x| x * k).collect()
}

/// True when the first nonzero coordinate is positive.
pub fn is_positive(w: &[i64]) -> bool {
    w.iter().find(|c| **c != 0).is_some_and(|c| *c > 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeGroup {
    pub factors: Vec<SimpleFactor>,
    pub positive_roots: Vec<WeightVector>,
    pub rank: usize,
    pub dim: usize,
    pub weyl_order: u128,
}

impl GaugeGroup {
    /// All roots, positive then negative.
    pub fn roots(&self) -> Vec<WeightVector> {
        let mut out = self.positive_roots.clone();
        out.extend(self.positive_roots.iter().map(|a| scale(a, -1)));
        out
    }

    pub fn label(&self) -> String {
        self.factors.iter().map(|f| format!("{}({})", f.kind, f.n)).collect::<Vec<_>>().join("x")
    }
}

pub fn build_group(spec: &[GroupDescriptor]) -> Result<GaugeGroup> {
    if spec.is_empty() {
        return Err(Error::RankZero);
    }
    let mut factors = Vec::new();
    let mut offset = 0;
    for d in spec {
        let rank = match d.kind {
            GroupKind::SU => d.n.saturating_sub(1),
            GroupKind::SO => d.n / 2,
            GroupKind::Sp => {
                if d.n % 2 == 1 {
                    return Err(Error::UnknownGroup(format!("Sp({}) needs an even matrix size", d.n)));
                }
                d.n / 2
            }
        };
        if rank == 0 || (d.kind == GroupKind::SO && d.n == 2) {
            return Err(Error::RankZero);
        }
        if rank > MAX_FACTOR_RANK {
            return Err(Error::UnknownGroup(format!("{}({}) exceeds rank {MAX_FACTOR_RANK}", d.kind, d.n)));
        }
        factors.push(SimpleFactor { kind: d.kind, n: d.n, rank, offset });
        offset += rank;
    }
    let rank = offset;
    let mut positive_roots = Vec::new();
    let mut weyl_order = 1u128;
    for f in &factors {
        for a in f.positive_roots() {
            positive_roots.push(embed(f, &a, rank));
        }
        weyl_order = weyl_order.saturating_mul(f.weyl_order());
    }
    let dim = rank + 2 * positive_roots.len();
    Ok(GaugeGroup { factors, positive_roots, rank, dim, weyl_order })
}

fn embed(f: &SimpleFactor, w: &[i64], rank: usize) -> Vec<i64> {
    let mut v = vec![0; rank];
    v[f.offset..f.offset + f.rank].copy_from_slice(w);
    v
}

/// A representation: an irrep of one factor, or a tensor product of such.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepDescriptor {
    Irrep { factor: usize, name: String },
    Tensor(Vec<RepDescriptor>),
}

impl fmt::Display for RepDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepDescriptor::Irrep { factor, name } => write!(f, "{name}@{factor}"),
            RepDescriptor::Tensor(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", s.join(" x "))
            }
        }
    }
}

/// Full weight system with multiplicity. Tensor products add weights across all combinations.
pub fn rep_weights(group: &GaugeGroup, rep: &RepDescriptor) -> Result<Vec<WeightVector>> {
    match rep {
        RepDescriptor::Irrep { factor, name } => {
            let f = group.factors.get(*factor).ok_or_else(|| {
                Error::UnknownRepresentation(format!("factor {factor} not in {}", group.label()))
            })?;
            Ok(f.irrep_weights(name)?.iter().map(|w| embed(f, w, group.rank)).collect())
        }
        RepDescriptor::Tensor(parts) => {
            if parts.is_empty() {
                return Err(Error::UnknownRepresentation("empty tensor product".into()));
            }
            let mut acc = vec![vec![0; group.rank]];
            for p in parts {
                let ws = rep_weights(group, p)?;
                acc = acc.iter().flat_map(|a| ws.iter().map(move |w| add(a, w))).collect();
            }
            Ok(acc)
        }
    }
}

/// An R-charge. Decimal JSON numbers give `Float` and disable exact arithmetic downstream.
#[derive(Clone, Debug, PartialEq)]
pub enum RCharge {
    Exact(Rational),
    Float(f64),
}

impl RCharge {
    pub fn to_f64(&self) -> f64 {
        match self {
            RCharge::Exact(r) => rational_to_f64(r),
            RCharge::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RCharge::Exact(r) => Some(r),
            RCharge::Float(_) => None,
        }
    }
}

impl fmt::Display for RCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RCharge::Exact(r) => write!(f, "{r}"),
            RCharge::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiralMultiplet {
    pub rep: Option<RepDescriptor>,
    pub weights: Vec<WeightVector>,
    pub r_charge: RCharge,
    pub copies: u32,
    pub flavor_u1_charges: Vec<Rational>,
    /// one flavor weight per copy, or a single one shared by all copies
    pub flavor_weights: Option<Vec<WeightVector>>,
}

impl ChiralMultiplet {
    pub fn new(weights: Vec<WeightVector>, r: Rational, copies: u32) -> Self {
        ChiralMultiplet {
            rep: None,
            weights,
            r_charge: RCharge::Exact(r),
            copies,
            flavor_u1_charges: Vec::new(),
            flavor_weights: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Flavor weight of copy `k`.
    pub fn flavor_weight(&self, k: usize) -> Option<&WeightVector> {
        let fw = self.flavor_weights.as_ref()?;
        if fw.len() == 1 {
            fw.first()
        } else {
            fw.get(k)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheorySpec {
    pub name: String,
    pub group: GaugeGroup,
    pub chirals: Vec<ChiralMultiplet>,
}

impl TheorySpec {
    pub fn rank(&self) -> usize {
        self.group.rank
    }

    /// Exact R-charges, or IrrationalCharges if any is a float.
    pub fn exact_r_charges(&self) -> Result<Vec<Rational>> {
        self.chirals
            .iter()
            .map(|c| c.r_charge.exact().cloned().ok_or(Error::IrrationalCharges))
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.chirals.iter().all(|c| c.r_charge.exact().is_some())
    }

    pub fn u1_count(&self) -> usize {
        self.chirals.iter().map(|c| c.flavor_u1_charges.len()).max().unwrap_or(0)
    }
}

// ---------------------------------------------------------------- parsing

fn perr(location: &str, message: impl Into<String>) -> Error {
    Error::Parse { location: location.to_string(), message: message.into() }
}

fn parse_group_entry(v: &Value, loc: &str) -> Result<GroupDescriptor> {
    let obj = v.as_object().ok_or_else(|| perr(loc, "expected an object {\"type\", \"n\"}"))?;
    let kind = match obj.get("type").and_then(Value::as_str) {
        Some("SU") => GroupKind::SU,
        Some("SO") => GroupKind::SO,
        Some("Sp") | Some("USp") => GroupKind::Sp,
        Some(other) => return Err(Error::UnknownGroup(format!("{loc}.type = {other:?}"))),
        None => return Err(perr(&format!("{loc}.type"), "missing string field")),
    };
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| perr(&format!("{loc}.n"), "missing non-negative integer"))?;
    Ok(GroupDescriptor::new(kind, n as usize))
}

fn parse_rep(v: &Value, loc: &str, n_factors: usize, positional: Option<usize>) -> Result<RepDescriptor> {
    match v {
        Value::String(s) => {
            let factor = match positional {
                Some(i) => i,
                None if n_factors == 1 => 0,
                None => {
                    return Err(perr(loc, "bare irrep name is ambiguous for a product group; use {\"factor\", \"irrep\"}"))
                }
            };
            Ok(RepDescriptor::Irrep { factor, name: s.clone() })
        }
        Value::Object(obj) => {
            if let Some(t) = obj.get("tensor") {
                let arr = t.as_array().ok_or_else(|| perr(&format!("{loc}.tensor"), "expected an array"))?;
                let positional = arr.len() == n_factors && arr.iter().all(Value::is_string);
                let parts = arr
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        parse_rep(p, &format!("{loc}.tensor[{i}]"), n_factors, positional.then_some(i))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Ok(RepDescriptor::Tensor(parts));
            }
            let factor = obj
                .get("factor")
                .and_then(Value::as_u64)
                .ok_or_else(|| perr(&format!("{loc}.factor"), "missing non-negative integer"))?;
            let name = obj
                .get("irrep")
                .and_then(Value::as_str)
                .ok_or_else(|| perr(&format!("{loc}.irrep"), "missing string field"))?;
            Ok(RepDescriptor::Irrep { factor: factor as usize, name: name.to_string() })
        }
        _ => Err(perr(loc, "expected an irrep name or an object")),
    }
}

fn parse_rational_value(v: &Value, loc: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| perr(loc, format!("not a rational: {s:?}"))),
        Value::Number(n) if n.is_i64() => Ok(rat_int(n.as_i64().unwrap_or(0))),
        _ => Err(perr(loc, "expected \"p/q\" or an integer")),
    }
}

fn parse_r(v: &Value, loc: &str) -> Result<RCharge> {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            Ok(RCharge::Float(n.as_f64().ok_or_else(|| perr(loc, "bad number"))?))
        }
        _ => parse_rational_value(v, loc).map(RCharge::Exact),
    }
}

fn parse_int_vec(v: &Value, loc: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| perr(loc, "expected an integer array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_i64().ok_or_else(|| perr(&format!("{loc}[{i}]"), "expected an integer")))
        .collect()
}

/// Parse a theory spec from JSON text.
pub fn parse_theory(text: &str) -> Result<TheorySpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(&format!("line {}", e.line()), e.to_string()))?;
    theory_from_value(&v)
}

pub fn theory_from_value(v: &Value) -> Result<TheorySpec> {
    let obj = v.as_object().ok_or_else(|| perr("$", "expected a JSON object"))?;
    let name = obj.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
    let groups = match obj.get("group") {
        Some(Value::Array(a)) => {
            a.iter().enumerate().map(|(i, g)| parse_group_entry(g, &format!("group[{i}]"))).collect::<Result<Vec<_>>>()?
        }
        Some(g @ Value::Object(_)) => vec![parse_group_entry(g, "group")?],
        _ => return Err(perr("group", "missing group list")),
    };
    let group = build_group(&groups)?;
    let arr = obj.get("chirals").and_then(Value::as_array).ok_or_else(|| perr("chirals", "missing array"))?;
    let mut chirals = Vec::new();
    for (i, c) in arr.iter().enumerate() {
        let loc = format!("chirals[{i}]");
        let co = c.as_object().ok_or_else(|| perr(&loc, "expected an object"))?;
        let rep_v = co.get("rep").ok_or_else(|| perr(&format!("{loc}.rep"), "missing"))?;
        let rep = parse_rep(rep_v, &format!("{loc}.rep"), group.factors.len(), None)?;
        let weights = rep_weights(&group, &rep)?;
        let r_charge = parse_r(co.get("r").ok_or_else(|| perr(&format!("{loc}.r"), "missing"))?, &format!("{loc}.r"))?;
        let copies = match co.get("copies") {
            None => 1,
            Some(x) => x
                .as_u64()
                .filter(|k| *k >= 1 && *k <= u32::MAX as u64)
                .ok_or_else(|| perr(&format!("{loc}.copies"), "expected a positive integer"))? as u32,
        };
        let flavor_u1_charges = match co.get("u1_charges") {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(k, q)| parse_rational_value(q, &format!("{loc}.u1_charges[{k}]")))
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(perr(&format!("{loc}.u1_charges"), "expected an array")),
        };
        let flavor_weights = match co.get("flavor_weights") {
            None => None,
            Some(Value::Array(a)) if a.first().is_some_and(Value::is_array) => {
                let ws = a
                    .iter()
                    .enumerate()
                    .map(|(k, w)| parse_int_vec(w, &format!("{loc}.flavor_weights[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                if ws.len() != 1 && ws.len() != copies as usize {
                    return Err(perr(&format!("{loc}.flavor_weights"), "need one weight or one per copy"));
                }
                Some(ws)
            }
            Some(w) => Some(vec![parse_int_vec(w, &format!("{loc}.flavor_weights"))?]),
        };
        chirals.push(ChiralMultiplet { rep: Some(rep), weights, r_charge, copies, flavor_u1_charges, flavor_weights });
    }
    let nu = chirals.iter().map(|c| c.flavor_u1_charges.len()).max().unwrap_or(0);
    if nu > 0 {
        if let Some(i) = chirals.iter().position(|c| c.flavor_u1_charges.len() != nu) {
            return Err(perr(&format!("chirals[{i}].u1_charges"), format!("expected {nu} charges like the other chirals")));
        }
    }
    let fl = chirals.iter().filter_map(|c| c.flavor_weights.as_ref()).flatten().map(Vec::len).collect::<Vec<_>>();
    if fl.windows(2).any(|w| w[0] != w[1]) {
        return Err(perr("chirals", "flavor weights have inconsistent lengths"));
    }
    if chirals.iter().any(|c| c.flavor_weights.is_some()) && chirals.iter().any(|c| c.flavor_weights.is_none()) {
        return Err(perr("chirals", "flavor weights must be given for every chiral or none"));
    }
    Ok(TheorySpec { name, group, chirals })
}

// ------------------------------------------------------------- validation

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    /// (l, m, n, value) with nonzero cubic sum
    pub cubic_failures: Vec<(usize, usize, usize, Rational)>,
    /// (l, m, value) with nonzero quadratic sum
    pub quadratic_failures: Vec<(usize, usize, f64)>,
    /// (chiral index, r) outside ]0, 2[
    pub window_failures: Vec<(usize, String)>,
    /// chirals whose weights do not sum to zero
    pub weight_sum_failures: Vec<usize>,
    /// (u1 index, l, m, value)
    pub u1_failures: Vec<(usize, usize, usize, Rational)>,
    /// (flavor coordinate, m, n, value)
    pub flavor_weight_failures: Vec<(usize, usize, usize, i64)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.cubic_failures.is_empty()
            && self.quadratic_failures.is_empty()
            && self.window_failures.is_empty()
            && self.weight_sum_failures.is_empty()
            && self.u1_failures.is_empty()
            && self.flavor_weight_failures.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (l, m, n, v) in &self.cubic_failures {
            out.push(format!("cubic anomaly ({l},{m},{n}) = {v}"));
        }
        for (l, m, v) in &self.quadratic_failures {
            out.push(format!("R-gauge^2 anomaly ({l},{m}) = {v}"));
        }
        for (j, r) in &self.window_failures {
            out.push(format!("chiral {j}: r = {r} outside ]0,2["));
        }
        for j in &self.weight_sum_failures {
            out.push(format!("chiral {j}: weights do not sum to zero"));
        }
        for (a, l, m, v) in &self.u1_failures {
            out.push(format!("U(1) flavor {a}: anomaly ({l},{m}) = {v}"));
        }
        for (f, m, n, v) in &self.flavor_weight_failures {
            out.push(format!("flavor coordinate {f}: anomaly ({m},{n}) = {v}"));
        }
        out
    }
}

/// Σ_ρ ρ_l ρ_m per chiral, times copies.
fn quadratic_tensor(c: &ChiralMultiplet, rank: usize) -> Vec<Vec<i64>> {
    let mut t = vec![vec![0i64; rank]; rank];
    for w in &c.weights {
        for l in 0..rank {
            for m in 0..rank {
                t[l][m] += w[l] * w[m];
            }
        }
    }
    let k = c.copies as i64;
    t.iter_mut().flatten().for_each(|x| *x *= k);
    t
}

pub fn validate_theory(t: &TheorySpec) -> ValidationReport {
    let r = t.group.rank;
    let mut rep = ValidationReport::default();

    for (j, c) in t.chirals.iter().enumerate() {
        let ok = match &c.r_charge {
            RCharge::Exact(x) => x.is_positive() && *x < rat_int(2),
            RCharge::Float(x) => *x > 0.0 && *x < 2.0,
        };
        if !ok {
            rep.window_failures.push((j, c.r_charge.to_string()));
        }
        let mut s = vec![0i64; r];
        for w in &c.weights {
            for l in 0..r {
                s[l] += w[l];
            }
        }
        if s.iter().any(|x| *x != 0) {
            rep.weight_sum_failures.push(j);
        }
    }

    for l in 0..r {
        for m in l..r {
            for n in m..r {
                let mut s: i128 = 0;
                for c in &t.chirals {
                    let part: i128 = c.weights.iter().map(|w| (w[l] * w[m] * w[n]) as i128).sum();
                    s += part * c.copies as i128;
                }
                if s != 0 {
                    rep.cubic_failures.push((l, m, n, Rational::from_integer(BigInt::from(s))));
                }
            }
        }
    }

    let quads: Vec<Vec<Vec<i64>>> = t.chirals.iter().map(|c| quadratic_tensor(c, r)).collect();
    let roots = t.group.roots();
    for l in 0..r {
        for m in l..r {
            let root_part: i64 = roots.iter().map(|a| a[l] * a[m]).sum();
            if t.is_exact() {
                let mut s = rat_int(root_part);
                for (c, q) in t.chirals.iter().zip(&quads) {
                    if let RCharge::Exact(x) = &c.r_charge {
                        s += (x - Rational::one()) * rat_int(q[l][m]);
                    }
                }
                if !s.is_zero() {
                    rep.quadratic_failures.push((l, m, rational_to_f64(&s)));
                }
            } else {
                let mut s = root_part as f64;
                let mut scale = root_part.abs() as f64;
                for (c, q) in t.chirals.iter().zip(&quads) {
                    s += (c.r_charge.to_f64() - 1.0) * q[l][m] as f64;
                    scale += q[l][m].abs() as f64;
                }
                if s.abs() > 1e-12 * scale.max(1.0) {
                    rep.quadratic_failures.push((l, m, s));
                }
            }
        }
    }

    let nu = t.u1_count();
    for a in 0..nu {
        for l in 0..r {
            for m in l..r {
                let mut s = Rational::zero();
                for (c, q) in t.chirals.iter().zip(&quads) {
                    if let Some(qa) = c.flavor_u1_charges.get(a) {
                        s += qa * rat_int(q[l][m]);
                    }
                }
                if !s.is_zero() {
                    rep.u1_failures.push((a, l, m, s));
                }
            }
        }
    }

    let nf = t
        .chirals
        .iter()
        .filter_map(|c| c.flavor_weights.as_ref())
        .flatten()
        .map(Vec::len)
        .next()
        .unwrap_or(0);
    for f in 0..nf {
        for m in 0..r {
            for n in m..r {
                let mut s = 0i64;
                for c in &t.chirals {
                    let per_copy: i64 = c.weights.iter().map(|w| w[m] * w[n]).sum();
                    for k in 0..c.copies as usize {
                        if let Some(fw) = c.flavor_weight(k) {
                            s += fw[f] * per_copy;
                        }
                    }
                }
                if s != 0 {
                    rep.flavor_weight_failures.push((f, m, n, s));
                }
            }
        }
    }
    rep
}

/// (Tr R, Tr R³) in exact arithmetic.
pub fn trace_anomalies(t: &TheorySpec) -> Result<(Rational, Rational)> {
    let mut tr = rat_int(t.group.dim as i64);
    let mut tr3 = tr.clone();
    for c in &t.chirals {
        let x = c.r_charge.exact().ok_or(Error::IrrationalCharges)? - Rational::one();
        let d = rat_int(c.dim() as i64 * c.copies as i64);
        tr3 += &x * &x * &x * &d;
        tr += x * d;
    }
    Ok((tr, tr3))
}

/// (Tr R, Tr R³) in floating point, for float-mode charges.
pub fn trace_anomalies_f64(t: &TheorySpec) -> (f64, f64) {
    let mut tr = t.group.dim as f64;
    let mut tr3 = tr;
    for c in &t.chirals {
        let x = c.r_charge.to_f64() - 1.0;
        let d = (c.dim() * c.copies as usize) as f64;
        tr += x * d;
        tr3 += x * x * x * d;
    }
    (tr, tr3)
}

/// A ±ρ pair found by the non-chiral pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPair {
    pub positive: WeightVector,
    /// chiral carrying +ρ
    pub plus_chiral: usize,
    /// chiral carrying −ρ
    pub minus_chiral: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonChiralWitness {
    pub non_chiral: bool,
    pub pairs: Vec<WeightPair>,
    /// nonzero weights with no partner, with the chiral carrying them
    pub unpaired: Vec<(usize, WeightVector)>,
}

/// Greedy multiset pairing of nonzero weights with their negatives.
/// A negative partner is taken from the same chiral if possible, then from a
/// chiral with the same R-charge, then from any chiral.
pub fn is_non_chiral(t: &TheorySpec) -> NonChiralWitness {
    // weight -> chiral -> remaining multiplicity
    let mut neg: BTreeMap<WeightVector, BTreeMap<usize, u64>> = BTreeMap::new();
    let mut pos: Vec<(usize, WeightVector, u64)> = Vec::new();
    for (j, c) in t.chirals.iter().enumerate() {
        let mut counts: BTreeMap<&WeightVector, u64> = BTreeMap::new();
        for w in &c.weights {
            *counts.entry(w).or_default() += c.copies as u64;
        }
        for (w, k) in counts {
            if is_positive(w) {
                pos.push((j, w.clone(), k));
            } else if w.iter().any(|x| *x != 0) {
                *neg.entry(scale(w, -1)).or_default().entry(j).or_default() += k;
            }
        }
    }
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    for (j, w, k) in pos {
        for _ in 0..k {
            let Some(avail) = neg.get_mut(&w) else {
                unpaired.push((j, w.clone()));
                continue;
            };
            let rj = t.chirals[j].r_charge.to_f64();
            let pick = if avail.get(&j).is_some_and(|n| *n > 0) {
                Some(j)
            } else {
                avail
                    .iter()
                    .filter(|(_, n)| **n > 0)
                    .map(|(i, _)| *i)
                    .find(|i| t.chirals[*i].r_charge.to_f64() == rj)
                    .or_else(|| avail.iter().find(|(_, n)| **n > 0).map(|(i, _)| *i))
            };
            match pick {
                Some(i) => {
                    *avail.get_mut(&i).unwrap() -= 1;
                    pairs.push(WeightPair { positive: w.clone(), plus_chiral: j, minus_chiral: i });
                }
                None => unpaired.push((j, w.clone())),
            }
        }
    }
    for (w, m) in &neg {
        for (j, n) in m {
            for _ in 0..*n {
                unpaired.push((*j, scale(w, -1)));
            }
        }
    }
    NonChiralWitness { non_chiral: unpaired.is_empty(), pairs, unpaired }
}

/// r′_j = r_j + λ q_j for the U(1) flavor symmetry with index `u1`.
pub fn deform_r_charges(t: &TheorySpec, u1: usize, lambda: &Rational) -> Result<TheorySpec> {
    if t.chirals.iter().any(|c| c.flavor_u1_charges.len() <= u1) {
        return Err(Error::MissingFlavorData(format!("no U(1) flavor charge with index {u1}")));
    }
    let r = t.group.rank;
    let quads: Vec<Vec<Vec<i64>>> = t.chirals.iter().map(|c| quadratic_tensor(c, r)).collect();
    for l in 0..r {
        for m in l..r {
            let s: Rational = t
                .chirals
                .iter()
                .zip(&quads)
                .map(|(c, q)| &c.flavor_u1_charges[u1] * rat_int(q[l][m]))
                .sum();
            if !s.is_zero() {
                return Err(Error::FlavorAnomalyViolation { l, m });
            }
        }
    }
    let mut out = t.clone();
    for (j, c) in out.chirals.iter_mut().enumerate() {
        let q = &c.flavor_u1_charges[u1];
        let new = match &c.r_charge {
            RCharge::Exact(x) => {
                let v = x + lambda * q;
                if !(v.is_positive() && v < rat_int(2)) {
                    return Err(Error::ChargeWindowViolation { index: j, value: v.to_string() });
                }
                RCharge::Exact(v)
            }
            RCharge::Float(x) => {
                let v = x + rational_to_f64(lambda) * rational_to_f64(q);
                if !(v > 0.0 && v < 2.0) {
                    return Err(Error::ChargeWindowViolation { index: j, value: v.to_string() });
                }
                RCharge::Float(v)
            }
        };
        c.r_charge = new;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(kind: GroupKind, n: usize) -> GaugeGroup {
        build_group(&[GroupDescriptor::new(kind, n)]).unwrap()
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), rat_int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn sp_and_so_dimensions() {
        let sp4 = g(GroupKind::Sp, 4);
        assert_eq!((sp4.rank, sp4.dim, sp4.weyl_order), (2, 10, 8));
        let so6 = g(GroupKind::SO, 6);
        assert_eq!((so6.rank, so6.dim, so6.weyl_order), (3, 15, 24));
        let so3 = g(GroupKind::SO, 3);
        assert_eq!(so3.positive_roots, vec![vec![1]]);
    }

    #[test]
    fn invalid_groups() {
        assert!(matches!(build_group(&[]), Err(Error::RankZero)));
        assert!(matches!(build_group(&[GroupDescriptor::new(GroupKind::SU, 1)]), Err(Error::RankZero)));
        assert!(matches!(build_group(&[GroupDescriptor::new(GroupKind::SO, 2)]), Err(Error::RankZero)));
        assert!(matches!(build_group(&[GroupDescriptor::new(GroupKind::Sp, 3)]), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn unknown_rep() {
        let su3 = g(GroupKind::SU, 3);
        let r = RepDescriptor::Irrep { factor: 0, name: "spin:1".into() };
        assert!(matches!(rep_weights(&su3, &r), Err(Error::UnknownRepresentation(_))));
    }

    #[test]
    fn so3_symmetric_traceless() {
        let so3 = g(GroupKind::SO, 3);
        let mut w = rep_weights(&so3, &RepDescriptor::Irrep { factor: 0, name: "sym_traceless".into() }).unwrap();
        w.sort();
        assert_eq!(w, vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn parse_error_location() {
        let text = r#"{"name":"x","group":[{"type":"SU","n":2}],"chirals":[{"rep":"fund","r":"1/3"},{"rep":"fund","r":"a/b"}]}"#;
        match parse_theory(text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "chirals[1].r"),
            other => panic!("{other:?}"),
        }
    }
}

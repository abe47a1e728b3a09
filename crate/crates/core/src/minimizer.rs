//! Global minimum of the holonomy potential and the dimension of its minimizing set.
//!
//! The potential is linear on every cell of a finite hyperplane arrangement in the
//! hypercube [−1/2, 1/2]^r, so its minimum is attained at arrangement vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rains::{block_rains, dot, RainsForm};
use crate::theory::{is_positive, rat, rat_int, rational_to_f64, GroupKind, RepDescriptor, Rational, TheorySpec, WeightVector};

/// Exact vertex enumeration is refused above this rank.
pub const EXACT_RANK_LIMIT: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneSet {
    pub rank: usize,
    /// primitive normals, first nonzero entry positive
    pub normals: Vec<WeightVector>,
    /// values c with ⟨v·x⟩ = c, per normal, sorted
    pub offsets: Vec<Vec<Rational>>,
}

impl HyperplaneSet {
    pub fn len(&self) -> usize {
        self.offsets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn planes(&self) -> Vec<(&WeightVector, &Rational)> {
        self.normals.iter().zip(&self.offsets).flat_map(|(v, cs)| cs.iter().map(move |c| (v, c))).collect()
    }

    /// Number of planes through `x`.
    pub fn incident(&self, x: &[Rational]) -> Vec<(&WeightVector, &Rational)> {
        self.planes().into_iter().filter(|(v, c)| &dot(v, x) == *c).collect()
    }

    /// True if `x` lies on no plane other than possibly the bounding ones.
    pub fn in_open_cell(&self, x: &[Rational]) -> bool {
        self.incident(x).is_empty()
    }
}

fn primitive(w: &[i64]) -> (WeightVector, i64) {
    let g = w.iter().fold(0i64, |g, c| g.gcd(c));
    let mut v: WeightVector = w.iter().map(|c| c / g).collect();
    if !is_positive(&v) {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    (v, g)
}

/// Kink hyperplanes of the potential plus the bounding planes x_i = ±1/2.
pub fn enumerate_hyperplanes(t: &TheorySpec) -> HyperplaneSet {
    let rank = t.rank();
    let mut map: BTreeMap<WeightVector, BTreeSet<Rational>> = BTreeMap::new();
    let mut dirs: Vec<&WeightVector> = t.group.positive_roots.iter().collect();
    for c in &t.chirals {
        dirs.extend(c.weights.iter().filter(|w| w.iter().any(|x| *x != 0)));
    }
    for w in dirs {
        let (v, g) = primitive(w);
        // |⟨v·x⟩| ≤ ‖v‖₁/2 on the hypercube, and kinks sit at ⟨v·x⟩ ∈ Z/g
        let reach = v.iter().map(|c| c.abs()).sum::<i64>() * g;
        let set = map.entry(v).or_default();
        for m in -reach / 2..=reach / 2 {
            set.insert(rat(m, g));
        }
    }
    for i in 0..rank {
        let mut e = vec![0; rank];
        e[i] = 1;
        let set = map.entry(e).or_default();
        set.insert(rat(-1, 2));
        set.insert(rat(1, 2));
    }
    let (normals, offsets) = map.into_iter().map(|(v, s)| (v, s.into_iter().collect())).unzip();
    HyperplaneSet { rank, normals, offsets }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Grid,
    /// grid scan backed by an exact decomposition into nonnegative blocks
    Blocks,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Grid => "grid",
            Mode::Blocks => "grid+blocks",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizationResult {
    pub mode: Mode,
    /// exact minimum, absent for a plain grid scan
    pub l_min: Option<Rational>,
    pub l_min_f64: f64,
    pub vertices: Vec<Vec<Rational>>,
    pub dim_hqu: usize,
    /// index sets into `vertices`
    pub face_witnesses: Vec<Vec<usize>>,
}

/// Solves the square system exactly; None when singular.
pub fn solve_exact(rows: &[&WeightVector], rhs: &[&Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, c)| r.iter().map(|v| rat_int(*v)).chain(std::iter::once((*c).clone())).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=n {
                    let d = &f * &a[col][j];
                    a[i][j] -= d;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// Rank of a rational matrix.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[rank][col];
                for j in col..cols {
                    let d = &f * &m[rank][j];
                    m[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the affine hull of the points.
pub fn affine_dimension(points: &[&Vec<Rational>]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            rational_rank(rest.iter().map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a - b).collect()).collect())
        }
    }
}

fn in_cube(x: &[Rational]) -> bool {
    let h = rat(1, 2);
    x.iter().all(|v| v.abs() <= h)
}

fn combinations(n: usize, k: usize, first: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![first];
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(0, |l| l + 1);
        for i in start..n {
            cur.push(i);
            rec(n, k, cur, out);
            cur.pop();
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

/// All arrangement vertices inside the closed hypercube, sorted.
pub fn arrangement_vertices(h: &HyperplaneSet) -> Vec<Vec<Rational>> {
    let planes = h.planes();
    let r = h.rank;
    let found: BTreeSet<Vec<Rational>> = (0..planes.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            combinations(planes.len(), r, first).into_iter().filter_map(|idx| {
                let rows: Vec<&WeightVector> = idx.iter().map(|&i| planes[i].0).collect();
                let rhs: Vec<&Rational> = idx.iter().map(|&i| planes[i].1).collect();
                solve_exact(&rows, &rhs).filter(|x| in_cube(x))
            })
        })
        .collect();
    found.into_iter().collect()
}

fn midpoint(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let h = rat(1, 2);
    a.iter().zip(b).map(|(x, y)| (x + y) * &h).collect()
}

fn bron_kerbosch(adj: &[BTreeSet<usize>], r: BTreeSet<usize>, mut p: BTreeSet<usize>, mut x: BTreeSet<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.into_iter().collect());
        return;
    }
    let pivot = *p.union(&x).max_by_key(|u| adj[**u].intersection(&p).count()).unwrap();
    let cand: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in cand {
        let mut r2 = r.clone();
        r2.insert(v);
        let p2 = p.intersection(&adj[v]).copied().collect();
        let x2 = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.remove(&v);
        x.insert(v);
    }
}

/// Random rational convex combinations of the points all attain `l_min`.
fn convex_check(form: &RainsForm, pts: &[&Vec<Rational>], l_min: &Rational, rng: &mut ChaCha8Rng) -> Result<bool> {
    let rank = form.rank;
    for _ in 0..10 {
        let ws: Vec<i64> = pts.iter().map(|_| rng.gen_range(1..=100)).collect();
        let total: i64 = ws.iter().sum();
        let mut x = vec![Rational::zero(); rank];
        for (p, w) in pts.iter().zip(&ws) {
            for (xi, pi) in x.iter_mut().zip(p.iter()) {
                *xi += pi * rat(*w, total);
            }
        }
        if &form.l(&x)? != l_min {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Faces spanned by a set of minimizing vertices: maximal midpoint-closed clusters,
/// each confirmed by random convex combinations. Returns (dimension, witnesses).
fn minimizing_faces(form: &RainsForm, verts: &[Vec<Rational>], l_min: &Rational) -> Result<(usize, Vec<Vec<usize>>)> {
    let n = verts.len();
    let mut adj = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if &form.l(&midpoint(&verts[i], &verts[j]))? == l_min {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let mut cliques = Vec::new();
    bron_kerbosch(&adj, BTreeSet::new(), (0..n).collect(), BTreeSet::new(), &mut cliques);
    cliques.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut witnesses = Vec::new();
    let mut dim = 0;
    let mut queue = cliques;
    let mut seen = BTreeSet::new();
    while let Some(c) = queue.pop() {
        if !seen.insert(c.clone()) {
            continue;
        }
        let pts: Vec<&Vec<Rational>> = c.iter().map(|&i| &verts[i]).collect();
        if c.len() <= 1 || convex_check(form, &pts, l_min, &mut rng)? {
            dim = dim.max(affine_dimension(&pts));
            witnesses.push(c);
        } else if c.len() > 2 {
            // not a face: try the clusters with one vertex dropped
            for k in 0..c.len() {
                let mut d = c.clone();
                d.remove(k);
                queue.push(d);
            }
        }
    }
    witnesses.sort();
    Ok((dim, witnesses))
}

pub fn minimize_exact(t: &TheorySpec) -> Result<MinimizationResult> {
    let rank = t.rank();
    if rank > EXACT_RANK_LIMIT {
        return Err(Error::RankTooLarge { rank, limit: EXACT_RANK_LIMIT });
    }
    if !t.is_exact() {
        return Err(Error::IrrationalCharges);
    }
    let form = RainsForm::new(t);
    let h = enumerate_hyperplanes(t);
    let all = arrangement_vertices(&h);
    let values = all.iter().map(|v| form.l(v)).collect::<Result<Vec<Rational>>>()?;
    let l_min = values.iter().min().cloned().unwrap_or_else(Rational::zero);
    let vertices: Vec<Vec<Rational>> = all.into_iter().zip(&values).filter(|(_, v)| **v == l_min).map(|(x, _)| x).collect();
    let (dim_hqu, face_witnesses) = minimizing_faces(&form, &vertices, &l_min)?;
    Ok(MinimizationResult {
        mode: Mode::Exact,
        l_min_f64: rational_to_f64(&l_min),
        l_min: Some(l_min),
        vertices,
        dim_hqu,
        face_witnesses,
    })
}

/// Upper bound on the slope of the potential in the sup norm.
pub fn lipschitz_bound(form: &RainsForm) -> f64 {
    form.l_terms.iter().map(|t| t.coeff_f64.abs() * t.weight.iter().map(|c| c.abs() as f64).sum::<f64>()).sum()
}

const GRID_POINT_LIMIT: usize = 50_000_000;

fn grid_values(form: &RainsForm, res: usize) -> Result<Vec<f64>> {
    let r = form.rank;
    let total = (res + 1)
        .checked_pow(r as u32)
        .filter(|n| *n <= GRID_POINT_LIMIT)
        .ok_or(Error::RankTooLarge { rank: r, limit: EXACT_RANK_LIMIT })?;
    (0..total)
        .into_par_iter()
        .map(|mut k| {
            let mut x = vec![0.0; r];
            for d in (0..r).rev() {
                x[d] = -0.5 + (k % (res + 1)) as f64 / res as f64;
                k /= res + 1;
            }
            form.l(&x)
        })
        .collect()
}

fn grid_point(k: usize, res: usize, r: usize) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); r];
    let mut k = k;
    for d in (0..r).rev() {
        x[d] = rat((k % (res + 1)) as i64, res as i64) - rat(1, 2);
        k /= res + 1;
    }
    x
}

/// Minimum over a local grid of spacing h/16 around `centre`.
fn refine(form: &RainsForm, centre: &[f64], h: f64) -> Result<f64> {
    let r = form.rank;
    let steps = 16usize;
    let side = 2 * steps + 1;
    let mut best = f64::INFINITY;
    for mut k in 0..side.pow(r as u32) {
        let mut x = centre.to_vec();
        for xi in x.iter_mut() {
            *xi += ((k % side) as f64 - steps as f64) * h / steps as f64;
            k /= side;
        }
        if x.iter().all(|v| v.abs() <= 0.5) {
            best = best.min(form.l(&x)?);
        }
    }
    Ok(best)
}

fn near_min_count(vals: &[f64], l_min: f64, tol: f64) -> usize {
    vals.iter().filter(|v| **v - l_min <= tol).count()
}

/// Grid scan with local refinement. The dimension estimate compares the size of the
/// near-minimal set at `res` and `res/2`.
pub fn minimize_grid(t: &TheorySpec, res: usize) -> Result<MinimizationResult> {
    if res < 8 {
        return Err(Error::InvalidArgument(format!("grid resolution must be at least 8, got {res}")));
    }
    let form = RainsForm::new(t);
    let r = form.rank;
    let vals = grid_values(&form, res)?;
    let grid_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tie = 1e-9 * scale;
    let h = 1.0 / res as f64;
    let mut best = grid_min;
    let candidates: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] - grid_min <= tie).take(8).collect();
    for &k in &candidates {
        let c: Vec<f64> = grid_point(k, res, r).iter().map(rational_to_f64).collect();
        best = best.min(refine(&form, &c, h)?);
    }
    let vertices: Vec<Vec<Rational>> =
        (0..vals.len()).filter(|&k| vals[k] - grid_min <= tie).map(|k| grid_point(k, res, r)).collect();

    let lip = lipschitz_bound(&form);
    let coarse = res / 2;
    let cvals = grid_values(&form, coarse)?;
    let fine_n = near_min_count(&vals, best, tie + 0.5 * lip * h) as f64;
    let coarse_n = near_min_count(&cvals, best, tie + 0.5 * lip / coarse as f64).max(1) as f64;
    let est = (fine_n / coarse_n).log2() * (res as f64 / coarse as f64).log2().recip();
    let dim_hqu = (est.round().max(0.0) as usize).min(r);
    Ok(MinimizationResult {
        mode: Mode::Grid,
        l_min: None,
        l_min_f64: best,
        face_witnesses: vec![(0..vertices.len()).collect()],
        vertices,
        dim_hqu,
    })
}

/// Trinion legs when the theory is a gluing of SU(2)³ blocks: every factor is SU(2) with
/// one adjoint of charge 2/3, and every other chiral is a trifundamental of charge 2/3.
pub fn block_legs(t: &TheorySpec) -> Option<Vec<[usize; 3]>> {
    if t.group.factors.iter().any(|f| f.kind != GroupKind::SU || f.n != 2) {
        return None;
    }
    let two_thirds = rat(2, 3);
    let mut legs = Vec::new();
    let mut adjoints = vec![0u32; t.group.factors.len()];
    for c in &t.chirals {
        if c.r_charge.exact() != Some(&two_thirds) {
            return None;
        }
        match c.rep.as_ref()? {
            RepDescriptor::Irrep { factor, name } if matches!(name.as_str(), "adj" | "adjoint") => adjoints[*factor] += c.copies,
            RepDescriptor::Tensor(parts) if parts.len() == 3 => {
                let mut l = [0; 3];
                for (slot, p) in l.iter_mut().zip(parts) {
                    match p {
                        RepDescriptor::Irrep { factor, name } if name == "fund" => *slot = *factor,
                        _ => return None,
                    }
                }
                for _ in 0..c.copies {
                    legs.push(l);
                }
            }
            _ => return None,
        }
    }
    (adjoints.iter().all(|a| *a == 1) && !legs.is_empty()).then_some(legs)
}

fn block_sum(legs: &[[usize; 3]], x: &[Rational]) -> Rational {
    legs.iter().map(|l| block_rains(&x[l[0]], &x[l[1]], &x[l[2]])).fold(Rational::zero(), |a, b| a + b)
}

/// Grid scan plus an exact certificate from the block decomposition.
/// The decomposition is checked exactly at 200 random rational points; each block is
/// nonnegative, so an exact zero certifies l_min = 0, and a zero in an open cell
/// certifies a full-dimensional minimizing set.
pub fn minimize_blocks(t: &TheorySpec, res: usize) -> Result<MinimizationResult> {
    let legs = block_legs(t).ok_or_else(|| Error::InvalidArgument(format!("{} has no block decomposition", t.name)))?;
    let mut grid = minimize_grid(t, res)?;
    let form = RainsForm::new(t);
    let r = form.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    for _ in 0..200 {
        let x: Vec<Rational> = (0..r).map(|_| rat(rng.gen_range(-500..=500), 1000)).collect();
        if form.l(&x)? != block_sum(&legs, &x) {
            return Err(Error::InvalidArgument("block decomposition does not reproduce the potential".into()));
        }
    }
    let h = enumerate_hyperplanes(t);
    let zeros: Vec<Vec<Rational>> = grid.vertices.iter().filter(|x| form.l(x).map(|v| v.is_zero()).unwrap_or(false)).cloned().collect();
    let Some(interior) = zeros.iter().find(|x| h.in_open_cell(x)).or(zeros.first()).cloned() else {
        // no exact zero on the grid: the scan alone stands
        return Ok(grid);
    };
    let dim = if h.in_open_cell(&interior) { r } else { grid.dim_hqu };
    grid.mode = Mode::Blocks;
    grid.l_min = Some(Rational::zero());
    grid.l_min_f64 = 0.0;
    grid.dim_hqu = dim;
    grid.vertices = vec![interior];
    grid.face_witnesses = vec![vec![0]];
    Ok(grid)
}

/// Which minimizer to use for a theory: blocks when available, exact up to the rank
/// limit, otherwise the grid.
pub fn minimize_auto(t: &TheorySpec, res: usize) -> Result<MinimizationResult> {
    if block_legs(t).is_some() {
        minimize_blocks(t, res)
    } else if t.rank() <= EXACT_RANK_LIMIT && t.is_exact() {
        minimize_exact(t)
    } else {
        minimize_grid(t, res)
    }
}

/// |exact − grid| allowed at a given resolution.
pub fn agreement_bound(t: &TheorySpec, res: usize) -> f64 {
    2.0 / res as f64 * lipschitz_bound(&RainsForm::new(t))
}

//! Counting statistics of a finite A ⊆ F_p²: distances, pinned distances,
//! the classes S_r, bisector multiplicities and energies, isosceles triangles,
//! and the exact-identity checker.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::ffield::{inv_mod, sqrt_mod, FieldCtx, FieldScalar};
use crate::plane::{bisector, Circle, Curve, Line, PlanePoint, Segment};
use crate::report::{rat, ratio, CheckRecord, Quantity, Relation, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty point set")]
    EmptySet,
    #[error("point {0} is not a base-field point of this context")]
    ForeignPoint(String),
}

#[derive(Clone, Debug)]
pub struct PointSet {
    ctx: FieldCtx,
    points: Vec<PlanePoint>,
    provenance: String,
}

impl PointSet {
    /// Deduplicates, keeping first occurrences in order.
    pub fn new(
        ctx: FieldCtx,
        points: impl IntoIterator<Item = PlanePoint>,
        provenance: impl Into<String>,
    ) -> Result<Self, StatsError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for q in points {
            if q.ctx() != ctx || !q.is_base() {
                return Err(StatsError::ForeignPoint(q.to_string()));
            }
            if seen.insert(q) {
                out.push(q);
            }
        }
        Ok(PointSet { ctx, points: out, provenance: provenance.into() })
    }

    pub fn from_coords(ctx: FieldCtx, coords: &[(i64, i64)], provenance: &str) -> Self {
        let pts = coords.iter().map(|&(x, y)| PlanePoint::from_ints(&ctx, x, y));
        PointSet::new(ctx, pts, provenance).expect("integer coordinates are base-field points")
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Points not on `curve`.
    pub fn without_curve(&self, curve: &Curve) -> PointSet {
        PointSet {
            ctx: self.ctx,
            points: self.points.iter().copied().filter(|q| !curve.contains(*q)).collect(),
            provenance: format!("{} minus {}", self.provenance, curve),
        }
    }

    pub(crate) fn raw(&self) -> Vec<(u64, u64)> {
        self.points.iter().map(|q| (q.x.value(), q.y.value())).collect()
    }
}

#[inline]
fn dist_raw(p: u64, a: (u64, u64), b: (u64, u64)) -> u64 {
    let dx = (a.0 + p - b.0) % p;
    let dy = (a.1 + p - b.1) % p;
    (dx * dx + dy * dy) % p
}

/// Square root of −1 when p ≡ 1 mod 4.
fn sqrt_minus_one(ctx: &FieldCtx) -> Option<u64> {
    sqrt_mod(ctx.elem(-1)).base.map(|r| r.value())
}

// ---------------------------------------------------------------- distances

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PinCount {
    /// Distinct d(a, x), a ∈ A \ {x}; includes 0 iff some a ≠ x is isotropic to x.
    pub with_zero: usize,
    pub nonzero: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceProfile {
    /// Distinct distances over pairs of distinct points (0 included if realized).
    pub delta: usize,
    pub delta0: usize,
    pub per_pin: Vec<PinCount>,
    pub pin_max: usize,
    pub pin_max_nonzero: usize,
    /// First point (in set order) attaining `pin_max`.
    pub pin_argmax: PlanePoint,
}

pub fn distance_profile(a: &PointSet) -> Result<DistanceProfile, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptySet);
    }
    let p = a.p();
    let raw = a.raw();
    let per_pin: Vec<(PinCount, Vec<bool>)> = raw
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut seen = vec![false; p as usize];
            for (j, &y) in raw.iter().enumerate() {
                if i != j {
                    seen[dist_raw(p, x, y) as usize] = true;
                }
            }
            let with_zero = seen.iter().filter(|&&s| s).count();
            let nonzero = with_zero - seen[0] as usize;
            (PinCount { with_zero, nonzero }, seen)
        })
        .collect();
    let mut all = vec![false; p as usize];
    for (_, seen) in &per_pin {
        for (r, &s) in seen.iter().enumerate() {
            all[r] |= s;
        }
    }
    let delta = all.iter().filter(|&&s| s).count();
    let delta0 = delta - all[0] as usize;
    let per_pin: Vec<PinCount> = per_pin.into_iter().map(|(c, _)| c).collect();
    let pin_max = per_pin.iter().map(|c| c.with_zero).max().unwrap();
    let pin_max_nonzero = per_pin.iter().map(|c| c.nonzero).max().unwrap();
    let arg = per_pin.iter().position(|c| c.with_zero == pin_max).unwrap();
    Ok(DistanceProfile { delta, delta0, per_pin, pin_max, pin_max_nonzero, pin_argmax: a.points[arg] })
}

/// S_r for every realized r: ordered pairs (a, b), a ≠ b, with d(a, b) = r.
pub fn segment_classes(a: &PointSet) -> BTreeMap<FieldScalar, Vec<Segment>> {
    let mut out: BTreeMap<FieldScalar, Vec<Segment>> = BTreeMap::new();
    for &x in a.points() {
        for &y in a.points() {
            if x != y {
                let s = Segment::new(x, y);
                out.entry(s.length()).or_default().push(s);
            }
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// |S_r| for every r ∈ F_p (index r).
pub fn segment_class_sizes(a: &PointSet) -> Vec<u64> {
    let p = a.p();
    let raw = a.raw();
    raw.par_iter()
        .enumerate()
        .fold(
            || vec![0u64; p as usize],
            |mut acc, (i, &x)| {
                for (j, &y) in raw.iter().enumerate() {
                    if i != j {
                        acc[dist_raw(p, x, y) as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; p as usize], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        })
}

// ---------------------------------------------------------------- bisectors

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BisectorEntry {
    pub i_a: u64,
    pub b: u64,
    pub b_star: u64,
}

#[derive(Clone, Debug)]
pub struct BisectorTable {
    pub entries: HashMap<Line, BisectorEntry>,
}

impl BisectorTable {
    pub fn get(&self, l: &Line) -> BisectorEntry {
        self.entries.get(l).copied().unwrap_or_default()
    }

    /// Lines with b* > 0, sorted.
    pub fn support(&self) -> Vec<(Line, BisectorEntry)> {
        let mut v: Vec<_> = self.entries.iter().filter(|(_, e)| e.b_star > 0).map(|(l, e)| (*l, *e)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn sum_b_star(&self) -> u64 {
        self.entries.values().map(|e| e.b_star).sum()
    }
}

type LineKey = (u64, u64, u64);

fn canonical_line_raw(p: u64, al: u64, be: u64, ga: u64) -> LineKey {
    let lead = if al != 0 { al } else { be };
    let k = inv_mod(lead, p).expect("nondegenerate line");
    (al * k % p, be * k % p, ga * k % p)
}

/// Every line through `x`, canonical, one per direction.
fn lines_through_raw(p: u64, inv: &[u64], x: (u64, u64)) -> impl Iterator<Item = LineKey> + '_ {
    // Direction (1 : m): normal (m, −1); direction (0 : 1): x = x0.
    (0..p)
        .map(move |m| {
            if m == 0 {
                (0, 1, x.1)
            } else {
                let mi = inv[m as usize];
                (1, (p - mi) % p, (x.0 + p - x.1 * mi % p) % p)
            }
        })
        .chain(std::iter::once((1, 0, x.0)))
}

fn inverse_table(p: u64) -> Vec<u64> {
    (0..p).map(|m| inv_mod(m, p).unwrap_or(0)).collect()
}

fn key_to_line(ctx: &FieldCtx, k: LineKey) -> Line {
    Line::new(ctx.from_u64(k.0), ctx.from_u64(k.1), ctx.from_u64(k.2)).unwrap()
}

/// i_A(ℓ) for every line meeting A.
fn line_incidences_raw(p: u64, raw: &[(u64, u64)]) -> HashMap<LineKey, u64> {
    let inv = inverse_table(p);
    raw.par_iter()
        .fold(HashMap::new, |mut acc: HashMap<LineKey, u64>, &x| {
            for k in lines_through_raw(p, &inv, x) {
                *acc.entry(k).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, merge_counts)
}

fn merge_counts<K: std::hash::Hash + Eq>(mut a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    let (mut big, small) = if a.len() >= b.len() { (std::mem::take(&mut a), b) } else { (b, a) };
    for (k, v) in small {
        *big.entry(k).or_default() += v;
    }
    big
}

pub fn bisector_table(a: &PointSet) -> BisectorTable {
    let ctx = a.ctx();
    let p = ctx.p();
    let raw = a.raw();
    let iso = |d: (u64, u64)| (d.0 * d.0 + d.1 * d.1) % p == 0;
    // Unordered pairs; each contributes 2 ordered pairs.
    let pair_counts: HashMap<LineKey, (u64, u64)> = (0..raw.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<LineKey, (u64, u64)>, i| {
            let b = raw[i];
            let nb = (b.0 * b.0 + b.1 * b.1) % p;
            for &c in &raw[i + 1..] {
                let dx = (b.0 + p - c.0) % p;
                let dy = (b.1 + p - c.1) % p;
                let nc = (c.0 * c.0 + c.1 * c.1) % p;
                let k = canonical_line_raw(p, 2 * dx % p, 2 * dy % p, (nb + p - nc) % p);
                let e = acc.entry(k).or_default();
                e.0 += 2;
                if !iso((dx, dy)) {
                    e.1 += 2;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut x, y| {
            for (k, v) in y {
                let e = x.entry(k).or_default();
                e.0 += v.0;
                e.1 += v.1;
            }
            x
        });
    let incid = line_incidences_raw(p, &raw);
    let mut entries: HashMap<Line, BisectorEntry> = HashMap::with_capacity(pair_counts.len() + incid.len());
    for (k, (b, bs)) in pair_counts {
        entries.insert(key_to_line(&ctx, k), BisectorEntry { i_a: 0, b, b_star: bs });
    }
    for (k, i) in incid {
        entries.entry(key_to_line(&ctx, k)).or_default().i_a = i;
    }
    BisectorTable { entries }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectorEnergy {
    pub b: u128,
    pub b_star: u128,
}

pub fn bisector_energy_from(t: &BisectorTable) -> BisectorEnergy {
    let mut e = BisectorEnergy { b: 0, b_star: 0 };
    for v in t.entries.values() {
        e.b += (v.b as u128).pow(2);
        e.b_star += (v.b_star as u128).pow(2);
    }
    e
}

pub fn bisector_energy(a: &PointSet) -> BisectorEnergy {
    bisector_energy_from(&bisector_table(a))
}

// ---------------------------------------------------------------- triangles

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleCounts {
    pub t_star: u64,
    pub t_ni: u64,
    /// T*_a in point order.
    pub per_apex: Vec<u64>,
    pub per_apex_ni: Vec<u64>,
    /// z_a = |A ∩ σ_a(0)|, the apex itself included.
    pub z: Vec<u64>,
}

/// O(|A|³) enumeration of ordered triples.
pub fn count_isosceles_bruteforce(a: &PointSet) -> TriangleCounts {
    let p = a.p();
    let raw = a.raw();
    let n = raw.len();
    let d: Vec<Vec<u64>> = raw.iter().map(|&x| raw.iter().map(|&y| dist_raw(p, x, y)).collect()).collect();
    let mut per_apex = vec![0u64; n];
    let mut per_apex_ni = vec![0u64; n];
    let mut z = vec![0u64; n];
    for ai in 0..n {
        z[ai] = d[ai].iter().filter(|&&r| r == 0).count() as u64;
        for bi in 0..n {
            for ci in 0..n {
                if d[ai][bi] == d[ai][ci] && d[bi][ci] != 0 {
                    per_apex[ai] += 1;
                    if d[ai][bi] != 0 {
                        per_apex_ni[ai] += 1;
                    }
                }
            }
        }
    }
    TriangleCounts {
        t_star: per_apex.iter().sum(),
        t_ni: per_apex_ni.iter().sum(),
        per_apex,
        per_apex_ni,
        z,
    }
}

/// Per-apex bucket statistics used by the fast counter and the identity checker.
#[derive(Clone, Copy, Debug, Default)]
struct ApexBuckets {
    /// Σ_r N_r² over all r (b, c range over A, apex included).
    sq_all: u64,
    /// Σ_{r≠0} N_r².
    sq_nonzero: u64,
    /// Ordered pairs with equal distance and isotropic (or zero) base, all r.
    iso_all: u64,
    /// Same restricted to r ≠ 0, diagonal b = c included.
    iso_nonzero: u64,
    /// Number of b with d(a, b) ≠ 0.
    n_nonzero: u64,
    z: u64,
    distinct_nonzero: u64,
}

fn run_squares(keys: &mut [u64]) -> u64 {
    keys.sort_unstable();
    let mut total = 0u64;
    let mut i = 0;
    while i < keys.len() {
        let mut j = i;
        while j < keys.len() && keys[j] == keys[i] {
            j += 1;
        }
        let m = (j - i) as u64;
        total += m * m;
        i = j;
    }
    total
}

fn apex_buckets(p: u64, iroot: Option<u64>, raw: &[(u64, u64)], x: (u64, u64)) -> ApexBuckets {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &y in raw {
        *counts.entry(dist_raw(p, x, y)).or_default() += 1;
    }
    let z = counts.get(&0).copied().unwrap_or(0);
    let sq_all: u64 = counts.values().map(|m| m * m).sum();
    let sq_nonzero = sq_all - z * z;
    let n = raw.len() as u64;
    let n_nonzero = n - z;
    let distinct_nonzero = counts.len() as u64 - (z > 0) as u64;
    let (iso_all, iso_nonzero) = match iroot {
        None => (n, n_nonzero),
        Some(i) => {
            // b − c ∥ (1, ±i) iff y − i·x (resp. y + i·x) agree.
            let mut k1 = Vec::with_capacity(raw.len());
            let mut k2 = Vec::with_capacity(raw.len());
            let mut k1z = Vec::new();
            let mut k2z = Vec::new();
            for &y in raw {
                let r = dist_raw(p, x, y);
                let a = (y.1 + p - i * y.0 % p) % p;
                let b = (y.1 + i * y.0) % p;
                k1.push(r * p + a);
                k2.push(r * p + b);
                if r == 0 {
                    k1z.push(a);
                    k2z.push(b);
                }
            }
            let all = run_squares(&mut k1) + run_squares(&mut k2) - n;
            let zero = run_squares(&mut k1z) + run_squares(&mut k2z) - z;
            (all, all - zero)
        }
    };
    ApexBuckets { sq_all, sq_nonzero, iso_all, iso_nonzero, n_nonzero, z, distinct_nonzero }
}

fn all_apex_buckets(a: &PointSet) -> Vec<ApexBuckets> {
    let p = a.p();
    let iroot = sqrt_minus_one(&a.ctx());
    let raw = a.raw();
    raw.par_iter().map(|&x| apex_buckets(p, iroot, &raw, x)).collect()
}

/// O(|A|² log |A|): per apex, Σ_r N_r² minus the equal-distance pairs with
/// isotropic base, counted through the two isotropic pencils.
pub fn count_isosceles_fast(a: &PointSet) -> TriangleCounts {
    let buckets = all_apex_buckets(a);
    let per_apex: Vec<u64> = buckets.iter().map(|b| b.sq_all - b.iso_all).collect();
    let per_apex_ni: Vec<u64> = buckets.iter().map(|b| b.sq_nonzero - b.iso_nonzero).collect();
    TriangleCounts {
        t_star: per_apex.iter().sum(),
        t_ni: per_apex_ni.iter().sum(),
        per_apex,
        per_apex_ni,
        z: buckets.iter().map(|b| b.z).collect(),
    }
}

/// Σ_ℓ i_A(ℓ)·b*_A(ℓ).
pub fn count_isosceles_via_bisectors(a: &PointSet) -> u64 {
    sum_i_bstar(&bisector_table(a))
}

pub fn sum_i_bstar(t: &BisectorTable) -> u64 {
    t.entries.values().map(|e| e.i_a * e.b_star).sum()
}

// ---------------------------------------------------------------- rich curves

/// Every line with ≥ `min_count` points of A, with its count.
pub fn rich_lines(a: &PointSet, min_count: u64) -> Vec<(Line, u64)> {
    let ctx = a.ctx();
    let mut v: Vec<(Line, u64)> = line_incidences_raw(a.p(), &a.raw())
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(k, c)| (key_to_line(&ctx, k), c))
        .collect();
    v.sort();
    v
}

/// Every circle (r2 ≠ 0) with ≥ `min_count` points of A, by a sweep over
/// all p² centres.
pub fn rich_circles_sweep(a: &PointSet, min_count: u64) -> Vec<(Circle, u64)> {
    let ctx = a.ctx();
    let p = ctx.p();
    let raw = a.raw();
    let mut v: Vec<(Circle, u64)> = (0..p * p)
        .into_par_iter()
        .flat_map_iter(|c| {
            let centre = (c / p, c % p);
            let mut cnt = vec![0u64; p as usize];
            for &y in &raw {
                cnt[dist_raw(p, centre, y) as usize] += 1;
            }
            (1..p)
                .filter(|&r| cnt[r as usize] >= min_count.max(1))
                .map(|r| {
                    let center = PlanePoint::new(ctx.from_u64(centre.0), ctx.from_u64(centre.1));
                    (Circle { center, r2: ctx.from_u64(r) }, cnt[r as usize])
                })
                .collect::<Vec<_>>()
        })
        .collect();
    v.sort();
    v
}

/// Same as [`rich_circles_sweep`] by hashing circles spanned by point triples;
/// O(|A|³) time, independent of p. Only circles with ≥ 3 points are found.
pub fn rich_circles_triples(a: &PointSet, min_count: u64) -> Vec<(Circle, u64)> {
    let pts = a.points();
    let n = pts.len();
    // For the lowest-index point i of a circle with m points, the pairs j < k
    // (both > i) on it number C(m−1, 2).
    let found: Vec<(Circle, u64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut pair_counts: HashMap<PlanePoint, u64> = HashMap::new();
            let bis: Vec<Option<Line>> = (i + 1..n).map(|j| bisector(pts[i], pts[j]).ok()).collect();
            for j in 0..bis.len() {
                for k in j + 1..bis.len() {
                    if let (Some(l1), Some(l2)) = (&bis[j], &bis[k]) {
                        if let Some(c) = l1.intersect(l2) {
                            *pair_counts.entry(c).or_default() += 1;
                        }
                    }
                }
            }
            let q = pts[i];
            let mut out = Vec::new();
            for (c, pairs) in pair_counts {
                // m − 1 others with (m−1)(m−2)/2 = pairs
                let mut m1 = 2u64;
                while m1 * (m1 - 1) / 2 < pairs {
                    m1 += 1;
                }
                let r2 = crate::plane::distance(q, c);
                if !r2.is_zero() && m1 + 1 >= min_count {
                    out.push((Circle { center: c, r2 }, m1 + 1));
                }
            }
            out.into_iter()
        })
        .collect();
    // A circle appears once per point but the lowest-index one has the full count.
    let mut best: HashMap<Circle, u64> = HashMap::new();
    for (c, m) in found {
        let e = best.entry(c).or_default();
        *e = (*e).max(m);
    }
    let mut v: Vec<_> = best.into_iter().collect();
    v.sort();
    v
}

/// Rich circles by whichever exact method is cheaper.
pub fn rich_circles(a: &PointSet, min_count: u64) -> Vec<(Circle, u64)> {
    let n = a.len() as u128;
    let p = a.p() as u128;
    if min_count >= 3 && n * n * n < 6 * n * p * p {
        rich_circles_triples(a, min_count)
    } else {
        rich_circles_sweep(a, min_count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Collinearity {
    /// Maximum number of points of A on a line.
    pub lines: u64,
    /// Maximum number of points of A on a circle with r2 ≠ 0.
    pub circles: u64,
}

impl Collinearity {
    pub fn m(&self) -> u64 {
        self.lines.max(self.circles)
    }
}

pub fn collinearity(a: &PointSet) -> Collinearity {
    let n = a.len() as u64;
    if n <= 2 {
        return Collinearity { lines: n, circles: n };
    }
    let lines = line_incidences_raw(a.p(), &a.raw()).values().copied().max().unwrap_or(0);
    let circles = rich_circles(a, 3).iter().map(|c| c.1).max().unwrap_or(2);
    Collinearity { lines, circles }
}

/// M: the maximum number of collinear or co-circular points.
pub fn max_collinear_cocircular(a: &PointSet) -> u64 {
    collinearity(a).m()
}

// ---------------------------------------------------------------- identities

const ANCHOR_S0: &str = "bisector multiplicity sum";
const ANCHOR_TSUM: &str = "isosceles count via bisectors";
const ANCHOR_PINNED: &str = "pinned circle square sum";
const ANCHOR_PIN_LOWER: &str = "pinned-distance lower bound from triangles";
const ANCHOR_BCT: &str = "bisector energy controls triangles";
const ANCHOR_PER_PIN: &str = "per-pin Cauchy-Schwarz";

/// Size above which T* is only computed by the fast counter.
pub const BRUTEFORCE_LIMIT: usize = 400;

pub fn triangle_counts(a: &PointSet) -> TriangleCounts {
    if a.len() <= BRUTEFORCE_LIMIT {
        count_isosceles_bruteforce(a)
    } else {
        count_isosceles_fast(a)
    }
}

/// Every exact identity and inequality on A that depends only on counting.
pub fn check_identities(a: &PointSet) -> Report {
    let mut rep = Report::default();
    let n = a.len() as u64;
    let p = a.p();
    let table = bisector_table(a);
    let sizes = segment_class_sizes(a);
    let s0 = sizes[0];
    let tri = triangle_counts(a);
    let fast = count_isosceles_fast(a);
    let buckets = all_apex_buckets(a);
    let energy = bisector_energy_from(&table);
    let coll = collinearity(a);

    rep.push(CheckRecord::eq("s0_identity", ANCHOR_S0, table.sum_b_star(), n * n - n - s0));
    rep.push(CheckRecord::eq("t_sum", ANCHOR_TSUM, sum_i_bstar(&table), tri.t_star));
    rep.push(CheckRecord::eq("t_star_fast_vs_oracle", ANCHOR_TSUM, fast.t_star, tri.t_star));
    rep.push(CheckRecord::eq("t_ni_fast_vs_oracle", ANCHOR_TSUM, fast.t_ni, tri.t_ni));
    rep.push(CheckRecord::eq("per_apex_sum", ANCHOR_TSUM, tri.per_apex.iter().sum::<u64>(), tri.t_star));
    rep.push(CheckRecord::le("t_ni_le_t_star", ANCHOR_TSUM, tri.t_ni, tri.t_star));
    let iso_ok = table.entries.iter().all(|(l, e)| !l.is_isotropic() || (e.b_star == 0 && e.b == e.i_a * e.i_a - e.i_a));
    rep.push(CheckRecord::eq("isotropic_bisector_entries", ANCHOR_S0, iso_ok as u64, 1u64));

    // Σ_a Σ_{r≠0} N_r(a)² against T_NI and the diagonal.
    let lhs: u64 = buckets.iter().map(|b| b.sq_nonzero).sum();
    let offdiag_iso: u64 = buckets.iter().map(|b| b.iso_nonzero - b.n_nonzero).sum();
    rep.push(CheckRecord::eq("pinned_isotropic_offdiagonal", ANCHOR_PINNED, offdiag_iso, 0u64));
    rep.push(CheckRecord::eq("pinned_square_sum_exact", ANCHOR_PINNED, lhs, tri.t_ni + n * n - n - s0));
    rep.push(CheckRecord::le("pinned_square_sum_bound", ANCHOR_PINNED, lhs, tri.t_ni + n * n));
    rep.push(
        CheckRecord::diagnostic(
            "pinned_square_sum_literal_residual",
            ANCHOR_PINNED,
            lhs as i128 - (tri.t_ni + n * n) as i128,
            Relation::Eq,
            -((n + s0) as i128),
        )
        .with_note("lhs − (T_NI + |A|²); the diagonal contributes |A|² − |A| − |S₀|"),
    );

    // |A|(|A| − 2M + 1)² ≤ (Δ_pin + 1)(T* + |A|²) when |A| > 2M − 1.
    if let Ok(prof) = distance_profile(a) {
        let m = coll.lines;
        if n + 1 > 2 * m {
            let l = n as u128 * ((n + 1 - 2 * m) as u128).pow(2);
            let r = (prof.pin_max as u128 + 1) * (tri.t_star as u128 + (n * n) as u128);
            rep.push(CheckRecord::le("pin_iso_lower", ANCHOR_PIN_LOWER, l, r));
        } else {
            rep.push(CheckRecord::vacuous("pin_iso_lower", ANCHOR_PIN_LOWER, "|A| ≤ 2M − 1"));
        }

        // Per-pin: n_a²/D_a ≤ T_NI,a + n_a (asserted); the literal form is reported.
        let mut corrected_bad = 0u64;
        let mut literal_bad = 0u64;
        for (i, b) in buckets.iter().enumerate() {
            let d = prof.per_pin[i].nonzero as u128;
            assert_eq!(d, b.distinct_nonzero as u128);
            if d == 0 {
                continue;
            }
            let na = b.n_nonzero as u128;
            let tni = tri.per_apex_ni[i] as u128;
            if na * na > d * (tni + na) {
                corrected_bad += 1;
            }
            if na * na.saturating_sub(1) > d * tni {
                literal_bad += 1;
            }
        }
        rep.push(CheckRecord::eq("per_pin_cauchy_schwarz", ANCHOR_PER_PIN, corrected_bad, 0u64));
        rep.push(
            CheckRecord::diagnostic("per_pin_cauchy_schwarz_literal", ANCHOR_PER_PIN, literal_bad, Relation::Eq, 0u64)
                .with_note("pins violating (|A|−z_a)(|A|−z_a−1)/Δ(A;a) ≤ T_NI,a"),
        );
    }

    // T* ≤ 2|A|·√B*
    rep.push(CheckRecord::le(
        "bisectors_control_triangles",
        ANCHOR_BCT,
        tri.t_star,
        Quantity::sqrt_of(rat(4u128 * (n as u128).pow(2) * energy.b_star)),
    ));
    rep.push(CheckRecord::le("s0_le_2p_a", "zero-distance pairs", s0, 2 * p * n));
    let max_sr = sizes.iter().skip(1).copied().max().unwrap_or(0);
    rep.push(CheckRecord::le("max_s_r", "repeated distances", Quantity::from(max_sr), Quantity::sqrt_of(rat(16u128 * (n as u128).pow(3)))));
    rep.push(CheckRecord::diagnostic(
        "t_star_normalized",
        "pseudorandom triangle count",
        ratio(tri.t_star as u128 * p as u128, (n as u128).pow(3).max(1)),
        Relation::Report,
        1u64,
    ));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::plane::is_isotropic;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    fn three(p: u64) -> PointSet {
        PointSet::from_coords(f(p), &[(0, 0), (1, 0), (0, 1)], "three")
    }

    fn square(p: u64) -> PointSet {
        PointSet::from_coords(f(p), &[(0, 0), (1, 0), (0, 1), (1, 1)], "square")
    }

    fn iso_line(p: u64, i: i64, n: i64) -> PointSet {
        let c: Vec<_> = (0..n).map(|a| (a, i * a)).collect();
        PointSet::from_coords(f(p), &c, "isotropic")
    }

    #[test]
    fn profile_examples() {
        let pr = distance_profile(&three(7)).unwrap();
        assert_eq!(pr.delta0, 2);
        assert_eq!(pr.pin_max, 2);
        assert_eq!(pr.pin_argmax, PlanePoint::from_ints(&f(7), 1, 0));
        let single = PointSet::from_coords(f(7), &[(3, 3)], "one");
        assert_eq!(distance_profile(&single).unwrap().delta0, 0);
        let iso = iso_line(13, 5, 5);
        let pr = distance_profile(&iso).unwrap();
        assert_eq!((pr.delta0, pr.delta, pr.pin_max_nonzero), (0, 1, 0));
        let empty = PointSet::new(f(7), vec![], "empty").unwrap();
        assert_eq!(distance_profile(&empty), Err(StatsError::EmptySet));
    }

    #[test]
    fn segment_class_examples() {
        let k = f(7);
        let s = segment_classes(&three(7));
        assert_eq!(s[&k.elem(1)].len(), 4);
        assert_eq!(s[&k.elem(2)].len(), 2);
        let iso = iso_line(13, 5, 6);
        let s = segment_classes(&iso);
        assert_eq!(s[&f(13).zero()].len(), 30);
        assert_eq!(segment_class_sizes(&iso)[0], 30);
    }

    #[test]
    fn bisector_examples() {
        let k = f(7);
        let t = bisector_table(&three(7));
        let diag = Line::new(k.one(), -k.one(), k.zero()).unwrap();
        assert_eq!(t.get(&diag).b_star, 2);
        assert_eq!(t.get(&diag).i_a, 1);
        assert_eq!(bisector_energy_from(&t).b_star, 12);
        let two = PointSet::from_coords(k, &[(0, 0), (3, 1)], "two");
        assert_eq!(bisector_energy(&two).b_star, 4);
        let iso = iso_line(13, 5, 3);
        let t = bisector_table(&iso);
        assert_eq!(t.sum_b_star(), 0);
        let iso_b: u64 = t.entries.iter().filter(|(l, _)| l.is_isotropic()).map(|(_, e)| e.b).sum();
        assert_eq!(iso_b, 6);
        assert_eq!(bisector_energy(&iso).b_star, 0);
        let on_line = PointSet::from_coords(f(11), &[(0, 1), (1, 3), (2, 5), (3, 7), (4, 9)], "line");
        assert_eq!(bisector_table(&on_line).sum_b_star(), 20);
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(count_isosceles_bruteforce(&three(7)).t_star, 2);
        assert_eq!(count_isosceles_bruteforce(&square(7)).t_star, 8);
        let two = PointSet::from_coords(f(7), &[(0, 0), (1, 2)], "two");
        assert_eq!(count_isosceles_bruteforce(&two).t_star, 0);
        assert_eq!(count_isosceles_via_bisectors(&three(7)), 2);
        assert_eq!(count_isosceles_via_bisectors(&square(7)), 8);
        assert_eq!(count_isosceles_via_bisectors(&iso_line(13, 5, 5)), 0);
        let t = count_isosceles_bruteforce(&three(7));
        assert_eq!(t.per_apex, vec![2, 0, 0]);
    }

    #[test]
    fn collinearity_examples() {
        let k = f(13);
        let mut c: Vec<_> = (0..5).map(|i| (i, 2 * i + 1)).collect();
        c.push((7, 0));
        assert_eq!(max_collinear_cocircular(&PointSet::from_coords(k, &c, "line+1")), 5);
        let k7 = f(7);
        let circ = PointSet::new(k7, crate::plane::unit_circle(&k7), "circle").unwrap();
        assert_eq!(max_collinear_cocircular(&circ), 8);
        assert_eq!(max_collinear_cocircular(&PointSet::from_coords(k7, &[(1, 1), (2, 5)], "2")), 2);
        assert_eq!(max_collinear_cocircular(&PointSet::from_coords(k7, &[(1, 1)], "1")), 1);
    }

    #[test]
    fn identities_on_examples() {
        for a in [three(7), square(7), iso_line(13, 5, 5), square(13)] {
            let r = check_identities(&a);
            assert!(r.all_pass(), "{:?}", r.failures());
        }
        let r = check_identities(&three(7));
        let s0 = r.get("s0_identity").unwrap();
        assert_eq!((s0.lhs.to_string(), s0.rhs.to_string()), ("6".into(), "6".into()));
        // The literal per-pin form fails on the 3-point set (apex (1,0): T_NI = 0).
        assert!(!r.get("per_pin_cauchy_schwarz_literal").unwrap().pass);
    }

    fn random_set(p: u64, seed: u64, n: usize) -> PointSet {
        crate::gen::uniform(&f(p), n, seed).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn fast_counts_match_bruteforce(pi in 0usize..5, seed in any::<u64>(), n in 0usize..45) {
            let p = [5u64, 7, 11, 13, 17][pi];
            let a = random_set(p, seed, n.min((p * p) as usize));
            let b = count_isosceles_bruteforce(&a);
            prop_assert_eq!(count_isosceles_fast(&a), b.clone());
            prop_assert_eq!(count_isosceles_via_bisectors(&a), b.t_star);
        }

        #[test]
        fn identities_hold(pi in 0usize..4, seed in any::<u64>(), n in 1usize..40) {
            let p = [5u64, 7, 11, 13][pi];
            let a = random_set(p, seed, n.min((p * p) as usize));
            let r = check_identities(&a);
            prop_assert!(r.all_pass(), "{:?}", r.failures());
            let sizes = segment_class_sizes(&a);
            prop_assert_eq!(sizes.iter().sum::<u64>(), (a.len() * a.len() - a.len()) as u64);
            for r in 1..p as usize {
                prop_assert_eq!(sizes[r] % 2, 0);
            }
            if p % 4 == 3 {
                prop_assert_eq!(sizes[0], 0);
            }
        }

        #[test]
        fn rich_circle_methods_agree(pi in 0usize..3, seed in any::<u64>(), n in 3usize..40, k in 3u64..6) {
            let p = [7u64, 11, 13][pi];
            let a = random_set(p, seed, n);
            prop_assert_eq!(rich_circles_triples(&a, k), rich_circles_sweep(&a, k));
        }
    }

    #[test]
    fn rich_circles_match_definition() {
        let k = f(7);
        let a = random_set(7, 3, 25);
        let mut expect = Vec::new();
        for cx in k.elements() {
            for cy in k.elements() {
                for r2 in k.elements().skip(1) {
                    let c = Circle { center: PlanePoint::new(cx, cy), r2 };
                    let m = a.points().iter().filter(|&&q| c.contains(q)).count() as u64;
                    if m >= 3 {
                        expect.push((c, m));
                    }
                }
            }
        }
        expect.sort();
        assert_eq!(rich_circles_sweep(&a, 3), expect);
    }

    #[test]
    fn pinned_isotropic_companions() {
        // d(a,b) = d(a,b') ≠ 0 with b − b' isotropic forces b = b'.
        let k = f(13);
        let all: Vec<_> = (0..13).flat_map(|x| (0..13).map(move |y| (x, y))).collect();
        let a = PointSet::from_coords(k, &all, "plane");
        let r = check_identities(&a);
        assert!(r.all_pass(), "{:?}", r.failures());
        assert!(is_isotropic(PlanePoint::from_ints(&k, 1, 5)));
    }
}

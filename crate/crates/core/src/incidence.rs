//! Point–plane incidences in FP³, plain and restricted by a set of
//! forbidden lines, with the collinearity parameters k and μ.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::ffield::FieldCtx;
use crate::projective::{null_space, ProjLine, ProjPlane, ProjPoint};

#[derive(Clone, Debug, Default)]
pub struct IncidenceSystem {
    pub points: Vec<ProjPoint>,
    pub planes: Vec<ProjPlane>,
    pub forbidden: Vec<ProjLine>,
}

fn dedup<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

impl IncidenceSystem {
    pub fn new(points: Vec<ProjPoint>, planes: Vec<ProjPlane>) -> Self {
        IncidenceSystem { points: dedup(points), planes: dedup(planes), forbidden: Vec::new() }
    }

    pub fn with_forbidden(mut self, lines: Vec<ProjLine>) -> Self {
        self.forbidden = dedup(lines);
        self
    }

    fn ctx(&self) -> Option<FieldCtx> {
        self.points.first().map(|x| x.ctx()).or_else(|| self.planes.first().map(|pl| pl.coeffs()[0].ctx()))
    }
}

/// The p² + p + 1 planes through a base-field point.
fn planes_through(x: &ProjPoint) -> Vec<ProjPlane> {
    let ctx = x.ctx();
    let basis = null_space(&[*x.coords()]);
    let mut out = Vec::with_capacity((ctx.p() * ctx.p() + ctx.p() + 1) as usize);
    let elems: Vec<_> = ctx.elements().collect();
    let (z, o) = (ctx.zero(), ctx.one());
    let mut combos: Vec<[_; 3]> = Vec::new();
    for &b in &elems {
        for &c in &elems {
            combos.push([o, b, c]);
        }
    }
    for &c in &elems {
        combos.push([z, o, c]);
    }
    combos.push([z, z, o]);
    for [a, b, c] in combos {
        let v = std::array::from_fn(|i| a * basis[0][i] + b * basis[1][i] + c * basis[2][i]);
        out.push(ProjPlane::new(v).unwrap());
    }
    out
}

/// |{(x, π) : x ∈ π}| by direct scan.
pub fn incidence_count_scan(sys: &IncidenceSystem) -> u64 {
    sys.planes
        .par_iter()
        .map(|pl| sys.points.iter().filter(|x| pl.contains(x)).count() as u64)
        .sum()
}

pub fn incidence_count(sys: &IncidenceSystem) -> u64 {
    let Some(ctx) = sys.ctx() else { return 0 };
    let p = ctx.p();
    let all_base = sys.points.iter().all(ProjPoint::is_base) && sys.planes.iter().all(|pl| pl.coeffs().iter().all(|c| c.is_base()));
    let per_point = p * p + p + 1;
    if !all_base || (sys.planes.len() as u64) <= per_point {
        return incidence_count_scan(sys);
    }
    let planes: HashSet<&ProjPlane> = sys.planes.iter().collect();
    sys.points
        .par_iter()
        .map(|x| planes_through(x).iter().filter(|pl| planes.contains(pl)).count() as u64)
        .sum()
}

/// Index pairs (point, plane) joined through a forbidden line.
pub fn excluded_pairs(sys: &IncidenceSystem) -> HashSet<(usize, usize)> {
    let mut excluded: HashSet<(usize, usize)> = HashSet::new();
    for l in &sys.forbidden {
        let on: Vec<usize> = (0..sys.points.len()).filter(|&i| l.contains(&sys.points[i])).collect();
        let containing: Vec<usize> = (0..sys.planes.len()).filter(|&j| sys.planes[j].contains_line(l)).collect();
        for &i in &on {
            for &j in &containing {
                excluded.insert((i, j));
            }
        }
    }
    excluded
}

/// Incidences (x, π) not joined through a forbidden line ℓ with x ∈ ℓ ⊆ π.
pub fn restricted_incidence_count(sys: &IncidenceSystem) -> u64 {
    if sys.forbidden.is_empty() {
        return incidence_count(sys);
    }
    incidence_count(sys) - excluded_pairs(sys).len() as u64
}

/// Definition scan over every (point, plane, line) triple.
pub fn restricted_incidence_count_scan(sys: &IncidenceSystem) -> u64 {
    let mut n = 0;
    for x in &sys.points {
        for pl in &sys.planes {
            if pl.contains(x) && !sys.forbidden.iter().any(|l| l.contains(x) && pl.contains_line(l)) {
                n += 1;
            }
        }
    }
    n
}

/// c with c(c − 1)/2 = m.
fn rich_from_pairs(m: usize) -> usize {
    let c = (1 + (1 + 8 * m).isqrt()) / 2;
    debug_assert_eq!(c * (c - 1) / 2, m);
    c
}

/// Number of points on each line spanned by two of them.
pub fn line_richness(points: &[ProjPoint]) -> HashMap<ProjLine, usize> {
    let pairs: HashMap<ProjLine, usize> = (0..points.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<ProjLine, usize>, i| {
            for q in &points[i + 1..] {
                if let Some(l) = ProjLine::through(&points[i], q) {
                    *acc.entry(l).or_default() += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    pairs.into_iter().map(|(l, m)| (l, rich_from_pairs(m))).collect()
}

/// Number of planes through each line cut out by two of them.
pub fn plane_richness(planes: &[ProjPlane]) -> HashMap<ProjLine, usize> {
    let mut pairs: HashMap<ProjLine, usize> = HashMap::new();
    for i in 0..planes.len() {
        for b in &planes[i + 1..] {
            if let Some(l) = ProjLine::meet(&planes[i], b) {
                *pairs.entry(l).or_default() += 1;
            }
        }
    }
    pairs.into_iter().map(|(l, m)| (l, rich_from_pairs(m))).collect()
}

/// k: the maximum number of collinear points.
pub fn max_collinear(points: &[ProjPoint]) -> usize {
    if points.len() <= 2 {
        return points.len();
    }
    line_richness(points).values().copied().max().unwrap_or(1)
}

/// μ: the richest line outside the forbidden set, counting points on it or
/// planes through it, whichever is larger.
pub fn max_rich_line_off(sys: &IncidenceSystem) -> usize {
    let forbidden: HashSet<&ProjLine> = sys.forbidden.iter().collect();
    let off = |m: HashMap<ProjLine, usize>| m.into_iter().filter(|(l, _)| !forbidden.contains(l)).map(|(_, c)| c).max();
    let pts = off(line_richness(&sys.points)).unwrap_or(usize::from(!sys.points.is_empty()));
    let pls = off(plane_richness(&sys.planes)).unwrap_or(usize::from(!sys.planes.is_empty()));
    pts.max(pls)
}

#[derive(Clone, Debug, Serialize)]
pub struct PointPlaneReport {
    pub points: usize,
    pub planes: usize,
    pub incidences: u64,
    pub k: usize,
    /// I / (|P|^{1/2}|Π| + k|Π|)
    pub ratio: f64,
    pub points_over_p2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted: Option<RestrictedReport>,
    pub preconditions: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedReport {
    pub forbidden: usize,
    pub incidences: u64,
    pub mu: usize,
    /// I_L / (N^{3/2} + μN)
    pub ratio: f64,
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Empirical constants for the two incidence bounds; nothing is asserted.
pub fn point_plane_ratio(sys: &IncidenceSystem) -> PointPlaneReport {
    let (np, npl) = (sys.points.len(), sys.planes.len());
    let incidences = incidence_count(sys);
    let k = max_collinear(&sys.points);
    let p2 = sys.ctx().map(|c| (c.p() * c.p()) as f64).unwrap_or(1.0);
    let mut pre = Vec::new();
    if np > npl {
        pre.push(format!("|P| = {np} exceeds |Π| = {npl}"));
    }
    let restricted = (!sys.forbidden.is_empty()).then(|| {
        if np != npl {
            pre.push(format!("restricted form expects |P| = |Π|, got {np} and {npl}"));
        }
        let il = restricted_incidence_count(sys);
        let mu = max_rich_line_off(sys);
        let n = np.max(npl) as f64;
        RestrictedReport { forbidden: sys.forbidden.len(), incidences: il, mu, ratio: safe_ratio(il as f64, n.powf(1.5) + mu as f64 * n) }
    });
    PointPlaneReport {
        points: np,
        planes: npl,
        incidences,
        k,
        ratio: safe_ratio(incidences as f64, (np as f64).sqrt() * npl as f64 + (k * npl) as f64),
        points_over_p2: np as f64 / p2,
        restricted,
        preconditions: pre,
    }
}

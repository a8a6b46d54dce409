//! Seeded point-set generators and the CSV point format.
//!
//! Random stream: Xoshiro256** seeded through SplitMix64 (`seed_from_u64`).
//! Bounded integers in [0, n) are drawn by rejection: take `next_u64()`,
//! accept x ≤ 2⁶⁴ − 1 − (2⁶⁴ mod n) and return x mod n. Sampling without
//! replacement is a partial Fisher–Yates shuffle of the candidate list: for i = 0, 1, …, swap slot i with slot i + below(len − i).
//! Grid cells are indexed x·p + y. Components of a `+` model draw from one
//! shared stream in order and never repeat a point already taken.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::ffield::{sqrt_mod, FieldCtx, FieldError, FieldScalar};
use crate::plane::{distance, Direction, Line, PlanePoint};
use crate::stats::PointSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("requested {requested} points but only {capacity} are available for {what}")]
    Capacity { what: String, requested: usize, capacity: usize },
    #[error("bad model string: {0}")]
    BadModel(String),
    #[error("isotropic lines need p ≡ 1 mod 4 (p = {0})")]
    NoIsotropicLine(u64),
    #[error("bad csv: {0}")]
    BadCsv(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Uniform,
    Grid { w: u64, h: u64 },
    OnLine,
    OnCircle,
    IsotropicLine,
    ParallelLines { lines: u64 },
    Concentric { rings: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub kind: Kind,
    /// None means "as many as the shape holds" (grids only).
    pub size: Option<usize>,
}

/// A model (one or more components) plus prime and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub p: u64,
    pub seed: u64,
    pub components: Vec<Component>,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Uniform => write!(f, "uniform")?,
            Kind::Grid { w, h } => write!(f, "grid:{w}x{h}")?,
            Kind::OnLine => write!(f, "line")?,
            Kind::OnCircle => write!(f, "circle")?,
            Kind::IsotropicLine => write!(f, "isotropic_line")?,
            Kind::ParallelLines { lines } => write!(f, "parallel_lines:{lines}")?,
            Kind::Concentric { rings } => write!(f, "concentric:{rings}")?,
        }
        if let Some(n) = self.size {
            write!(f, "@{n}")?;
        }
        Ok(())
    }
}

impl FromStr for Component {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::BadModel(s.to_string());
        let (head, size) = match s.split_once('@') {
            Some((h, n)) => (h, Some(n.trim().parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let (name, param) = match head.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (head.trim(), None),
        };
        let num = |p: Option<&str>| -> Result<u64, GenError> { p.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let kind = match name {
            "uniform" => Kind::Uniform,
            "grid" => {
                let (w, h) = param.and_then(|p| p.split_once('x')).ok_or_else(bad)?;
                Kind::Grid { w: num(Some(w))?, h: num(Some(h))? }
            }
            "line" => Kind::OnLine,
            "circle" => Kind::OnCircle,
            "isotropic_line" => Kind::IsotropicLine,
            "parallel_lines" => Kind::ParallelLines { lines: num(param)? },
            "concentric" => Kind::Concentric { rings: num(param)? },
            _ => return Err(bad()),
        };
        if size.is_none() && !matches!(kind, Kind::Grid { .. }) {
            return Err(bad());
        }
        Ok(Component { kind, size })
    }
}

impl GeneratorSpec {
    /// Parses `kind[:params][@size]` components joined by `+`.
    pub fn parse(model: &str, p: u64, seed: u64) -> Result<Self, GenError> {
        let components = model.split('+').map(str::parse).collect::<Result<Vec<Component>, _>>()?;
        if components.is_empty() {
            return Err(GenError::BadModel(model.to_string()));
        }
        Ok(GeneratorSpec { p, seed, components })
    }

    pub fn model_string(&self) -> String {
        self.components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+")
    }
}

/// The seeded stream behind every generator; also used for sampled checks.
pub struct Sampler {
    rng: Xoshiro256StarStar,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: Xoshiro256StarStar::seed_from_u64(seed) }
    }

    /// Uniform integer in [0, n), n ≥ 1.
    pub fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.rng.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Uniform element of F_p.
    pub fn element(&mut self, ctx: &FieldCtx) -> FieldScalar {
        ctx.from_u64(self.below(ctx.p()))
    }

    /// Up to `k` distinct items of a virtual list of length `len`, in shuffle
    /// order, skipping those rejected by `keep`.
    fn sample_indices(&mut self, len: u64, k: usize, mut keep: impl FnMut(u64) -> bool) -> Vec<u64> {
        let mut swapped: HashMap<u64, u64> = HashMap::new();
        let mut out = Vec::with_capacity(k);
        let mut i = 0;
        while out.len() < k && i < len {
            let j = i + self.below(len - i);
            let vj = *swapped.get(&j).unwrap_or(&j);
            let vi = *swapped.get(&i).unwrap_or(&i);
            swapped.insert(j, vi);
            if keep(vj) {
                out.push(vj);
            }
            i += 1;
        }
        out
    }
}

fn take_from(
    sampler: &mut Sampler,
    candidates: &[PlanePoint],
    k: usize,
    taken: &HashSet<PlanePoint>,
    what: &str,
) -> Result<Vec<PlanePoint>, GenError> {
    let capacity = candidates.iter().filter(|q| !taken.contains(q)).count();
    if k > capacity {
        return Err(GenError::Capacity { what: what.to_string(), requested: k, capacity });
    }
    let idx = sampler.sample_indices(candidates.len() as u64, k, |i| !taken.contains(&candidates[i as usize]));
    Ok(idx.into_iter().map(|i| candidates[i as usize]).collect())
}

fn random_point(s: &mut Sampler, ctx: &FieldCtx) -> PlanePoint {
    let p = ctx.p();
    PlanePoint::new(ctx.from_u64(s.below(p)), ctx.from_u64(s.below(p)))
}

fn random_nonisotropic_direction(s: &mut Sampler, ctx: &FieldCtx) -> Direction {
    let dirs: Vec<Direction> = Direction::all(ctx).into_iter().filter(|d| !d.is_isotropic()).collect();
    dirs[s.below(dirs.len() as u64) as usize]
}

fn circle_points(center: PlanePoint, r2: FieldScalar) -> Vec<PlanePoint> {
    let ctx = center.ctx();
    let mut out = Vec::new();
    for dx in ctx.elements() {
        let rest = r2 - dx * dx;
        if let Some(dy) = sqrt_mod(rest).base {
            let x = center.x + dx;
            out.push(PlanePoint::new(x, center.y + dy));
            if !dy.is_zero() {
                out.push(PlanePoint::new(x, center.y - dy));
            }
        }
    }
    out
}

fn split_sizes(total: usize, parts: u64) -> Vec<usize> {
    let parts = parts as usize;
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

fn generate_component(
    ctx: &FieldCtx,
    c: &Component,
    s: &mut Sampler,
    taken: &HashSet<PlanePoint>,
) -> Result<Vec<PlanePoint>, GenError> {
    let p = ctx.p();
    let size = c.size.unwrap_or(0);
    match &c.kind {
        Kind::Uniform => {
            let cells = p * p;
            let capacity = (cells as usize).saturating_sub(taken.len());
            if size > capacity {
                return Err(GenError::Capacity { what: "the plane".into(), requested: size, capacity });
            }
            let cell = |i: u64| PlanePoint::new(ctx.from_u64(i / p), ctx.from_u64(i % p));
            Ok(s.sample_indices(cells, size, |i| !taken.contains(&cell(i))).into_iter().map(cell).collect())
        }
        Kind::Grid { w, h } => {
            if *w > p || *h > p {
                return Err(GenError::Capacity { what: "a grid side".into(), requested: (*w).max(*h) as usize, capacity: p as usize });
            }
            let all: Vec<PlanePoint> = (0..*w)
                .flat_map(|x| (0..*h).map(move |y| (x, y)))
                .map(|(x, y)| PlanePoint::new(ctx.from_u64(x), ctx.from_u64(y)))
                .filter(|q| !taken.contains(q))
                .collect();
            let n = c.size.unwrap_or(all.len());
            if n > all.len() {
                return Err(GenError::Capacity { what: "the grid".into(), requested: n, capacity: all.len() });
            }
            Ok(all[..n].to_vec())
        }
        Kind::OnLine => {
            let l = Line::through_with_direction(random_point(s, ctx), random_nonisotropic_direction(s, ctx));
            take_from(s, &l.points(), size, taken, "a line")
        }
        Kind::OnCircle => {
            let center = random_point(s, ctx);
            let r2 = ctx.from_u64(1 + s.below(p - 1));
            take_from(s, &circle_points(center, r2), size, taken, "a circle")
        }
        Kind::IsotropicLine => {
            let i = sqrt_mod(ctx.elem(-1)).base.ok_or(GenError::NoIsotropicLine(p))?;
            let pts: Vec<PlanePoint> = ctx
                .elements()
                .map(|a| PlanePoint::new(a, i * a))
                .filter(|q| !taken.contains(q))
                .take(size)
                .collect();
            if pts.len() < size {
                return Err(GenError::Capacity { what: "an isotropic line".into(), requested: size, capacity: pts.len() });
            }
            Ok(pts)
        }
        Kind::ParallelLines { lines } => {
            if *lines == 0 || *lines > p {
                return Err(GenError::BadModel(format!("parallel_lines:{lines}")));
            }
            let d = random_nonisotropic_direction(s, ctx);
            let normal = d.perpendicular();
            let offsets = s.sample_indices(p, *lines as usize, |_| true);
            let mut out = Vec::new();
            let mut local = taken.clone();
            for (off, k) in offsets.into_iter().zip(split_sizes(size, *lines)) {
                let base = normal.vector().scale(ctx.from_u64(off));
                let l = Line::through_with_direction(base, d);
                let pts = take_from(s, &l.points(), k, &local, "a parallel line")?;
                local.extend(pts.iter().copied());
                out.extend(pts);
            }
            Ok(out)
        }
        Kind::Concentric { rings } => {
            if *rings == 0 || *rings >= p {
                return Err(GenError::BadModel(format!("concentric:{rings}")));
            }
            let center = random_point(s, ctx);
            let radii = s.sample_indices(p - 1, *rings as usize, |_| true);
            let mut out = Vec::new();
            let mut local = taken.clone();
            for (r, k) in radii.into_iter().zip(split_sizes(size, *rings)) {
                let pts = take_from(s, &circle_points(center, ctx.from_u64(r + 1)), k, &local, "a circle")?;
                local.extend(pts.iter().copied());
                out.extend(pts);
            }
            debug_assert!(out.iter().all(|q| !distance(*q, center).is_zero()));
            Ok(out)
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<PointSet, GenError> {
    let ctx = FieldCtx::new(spec.p)?;
    let mut s = Sampler::new(spec.seed);
    let mut taken: HashSet<PlanePoint> = HashSet::new();
    let mut pts = Vec::new();
    for c in &spec.components {
        let got = generate_component(&ctx, c, &mut s, &taken)?;
        taken.extend(got.iter().copied());
        pts.extend(got);
    }
    let prov = format!("{} p={} seed={}", spec.model_string(), spec.p, spec.seed);
    Ok(PointSet::new(ctx, pts, prov).expect("generated points live in the context"))
}

/// `n` uniform random points without replacement.
pub fn uniform(ctx: &FieldCtx, n: usize, seed: u64) -> Result<PointSet, GenError> {
    generate(&GeneratorSpec {
        p: ctx.p(),
        seed,
        components: vec![Component { kind: Kind::Uniform, size: Some(n) }],
    })
}

pub fn to_csv(a: &PointSet) -> String {
    let mut s = format!("p={}\n", a.p());
    for q in a.points() {
        s.push_str(&format!("{},{}\n", q.x.value(), q.y.value()));
    }
    s
}

pub fn from_csv(text: &str, provenance: &str) -> Result<PointSet, GenError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let head = lines.next().ok_or_else(|| GenError::BadCsv("empty input".into()))?;
    let p: u64 = head
        .strip_prefix("p=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| GenError::BadCsv(format!("first line must be p=<modulus>, got {head:?}")))?;
    let ctx = FieldCtx::new(p)?;
    let mut pts = Vec::new();
    for (i, l) in lines.enumerate() {
        let (x, y) = l.split_once(',').ok_or_else(|| GenError::BadCsv(format!("line {}: {l:?}", i + 2)))?;
        let parse = |v: &str| -> Result<u64, GenError> {
            let v: u64 = v.trim().parse().map_err(|_| GenError::BadCsv(format!("line {}: {l:?}", i + 2)))?;
            if v >= p {
                return Err(GenError::BadCsv(format!("line {}: residue {v} not below p", i + 2)));
            }
            Ok(v)
        };
        pts.push(PlanePoint::new(ctx.from_u64(parse(x)?), ctx.from_u64(parse(y)?)));
    }
    Ok(PointSet::new(ctx, pts, provenance).expect("parsed points live in the context"))
}

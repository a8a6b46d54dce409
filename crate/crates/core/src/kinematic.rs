//! The kinematic mapping κ: SF₂(F) → FP³ \ {X0² + X1² = 0} and the
//! point–plane incidence systems built from it.
//!
//! κ(u, v, s, t) = [2(u+1) : 2v : s(u+1) + tv : sv − t(u+1)], or
//! [0 : 2 : t : s] when u = −1. In Clifford coordinates the same point is
//! [g0 : g12 : g13 : g23] = [X0 : −X1 : X2 : −X3]; left and right translation
//! are the even-subalgebra multiplications conjugated by that sign change.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::clifford::{CliffordAlgebra, EvenUnit};
use crate::ffield::{sqrt_mod, FieldCtx, FieldScalar};
use crate::gen::Sampler;
use crate::incidence::{incidence_count, max_collinear, IncidenceSystem};
use crate::plane::{
    axis_between, bisector, reflect, rigid_motion_between, unit_circle, Direction, FixedPoints, Line, PlanePoint,
    RigidMotion, Segment,
};
use crate::projective::{Mat4, ProjLine, ProjMap, ProjPlane, ProjPoint};
use crate::report::{CheckRecord, Relation, Report};
use crate::stats::{bisector_energy, max_collinear_cocircular, segment_classes, PointSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KinematicError {
    #[error("point lies in the exceptional set X0² + X1² = 0")]
    Exceptional,
    #[error("axis line is isotropic")]
    IsotropicAxis,
    #[error("fixed point on axis: some g⁻¹h fixes a point of the chosen line")]
    FixedPointOnAxis,
    #[error("segment class must have nonzero length")]
    ZeroLength,
}

pub fn is_exceptional(x: &ProjPoint) -> bool {
    let [x0, x1, ..] = *x.coords();
    (x0 * x0 + x1 * x1).is_zero()
}

pub fn kappa(g: &RigidMotion) -> ProjPoint {
    let one = g.u.ctx().one();
    let two = one + one;
    let (u, v, s, t) = (g.u, g.v, g.s, g.t);
    let w = u + one;
    let x = if w.is_zero() {
        [u.ctx().zero(), two, t, s]
    } else {
        [two * w, two * v, s * w + t * v, s * v - t * w]
    };
    ProjPoint::new(x).expect("κ never vanishes")
}

/// κ through a half-angle (ũ, ṽ) with ũ² − ṽ² = u, 2ũṽ = v; the half angle
/// may live in F_{p²}.
pub fn kappa_half_angle(g: &RigidMotion) -> ProjPoint {
    let ctx = g.ctx();
    let one = ctx.one();
    let two = one + one;
    let half = two.inv().unwrap();
    let ut = sqrt_mod((one + g.u) * half).ext;
    let vt = if ut.is_zero() { one } else { g.v / (two * ut) };
    ProjPoint::new([two * ut, two * vt, g.s * ut + g.t * vt, g.s * vt - g.t * ut]).unwrap()
}

pub fn kappa_inv(x: &ProjPoint) -> Result<RigidMotion, KinematicError> {
    let [x0, x1, x2, x3] = *x.coords();
    let d = (x0 * x0 + x1 * x1).inv().ok_or(KinematicError::Exceptional)?;
    let two = x0.ctx().elem(2);
    Ok(RigidMotion {
        u: (x0 * x0 - x1 * x1) * d,
        v: two * x0 * x1 * d,
        s: two * (x0 * x2 + x1 * x3) * d,
        t: two * (x1 * x2 - x0 * x3) * d,
    })
}

/// [X0 : X1 : X2 : X3] ↦ g0 + g12 e12 + g13 e13 + g23 e23 (Euclidean algebra).
pub fn to_clifford(x: &ProjPoint) -> EvenUnit {
    let [a, b, c, d] = *x.coords();
    EvenUnit { g0: a, g12: -b, g13: c, g23: -d }
}

pub fn from_clifford(g: &EvenUnit) -> ProjPoint {
    ProjPoint::new([g.g0, -g.g12, g.g13, -g.g23]).unwrap()
}

const EVEN: [usize; 4] = [0, 4, 5, 6];
const SIGN: [bool; 4] = [false, true, false, true];

fn translation_matrix(g: &RigidMotion, left: bool) -> Mat4 {
    let ctx = g.ctx();
    let alg = CliffordAlgebra::euclidean(&ctx);
    let a = alg.unit_element(&to_clifford(&kappa(g)));
    let mut m = [[ctx.zero(); 4]; 4];
    for (col, &k) in EVEN.iter().enumerate() {
        let e = alg.basis(k);
        let prod = if left { alg.mul(&a, &e) } else { alg.mul(&e, &a) };
        for (row, &j) in EVEN.iter().enumerate() {
            let c = prod.coeffs()[j];
            // conjugate by L = diag(1, −1, 1, −1)
            m[row][col] = if SIGN[row] != SIGN[col] { -c } else { c };
        }
    }
    m
}

/// φ_g: κ(g x) = φ_g(κ(x)).
pub fn left_map(g: &RigidMotion) -> ProjMap {
    ProjMap::new(translation_matrix(g, true)).expect("units act invertibly")
}

/// φ^g: κ(x g) = φ^g(κ(x)).
pub fn right_map(g: &RigidMotion) -> ProjMap {
    ProjMap::new(translation_matrix(g, false)).expect("units act invertibly")
}

/// All g with g(x) = y.
pub fn transporters(x: PlanePoint, y: PlanePoint) -> Vec<RigidMotion> {
    unit_circle(&x.ctx())
        .into_iter()
        .map(|c| {
            let r = RigidMotion::rotation(c.x, c.y).unwrap();
            let rx = r.apply(x);
            RigidMotion { s: y.x - rx.x, t: y.y - rx.y, ..r }
        })
        .collect()
}

/// The projective line containing κ(T_xy).
pub fn transporter_line(x: PlanePoint, y: PlanePoint) -> ProjLine {
    let ts = transporters(x, y);
    ProjLine::through(&kappa(&ts[0]), &kappa(&ts[1])).expect("κ is injective")
}

/// Plane holding κ of every rotation about a point of ℓ: for
/// αx + βy = γ it is −γX1 + βX2 + αX3 = 0.
pub fn r_tau_plane(l: &Line) -> Result<ProjPlane, KinematicError> {
    if l.is_isotropic() {
        return Err(KinematicError::IsotropicAxis);
    }
    let (a, b, g) = l.coefficients();
    Ok(ProjPlane::new([a.ctx().zero(), -g, b, a]).unwrap())
}

/// Non-isotropic lines in search order: through the origin by slope (y = 0,
/// y = x, …, x = 0), then their translates, then the same directions at
/// offset ω ∈ F_{p²} \ F_p.
pub fn tau_candidates(ctx: &FieldCtx) -> impl Iterator<Item = Line> + '_ {
    let dirs: Vec<Direction> = Direction::all(ctx).into_iter().filter(|d| !d.is_isotropic()).collect();
    let offsets: Vec<FieldScalar> = ctx.elements().chain(std::iter::once(ctx.omega())).collect();
    offsets.into_iter().flat_map(move |g| {
        dirs.clone().into_iter().map(move |d| {
            let (a, b) = (d.dy, -d.dx);
            Line::new(a, b, g).unwrap()
        })
    })
}

fn fixed_point_set(g_r: &[RigidMotion]) -> HashSet<PlanePoint> {
    let inv: Vec<RigidMotion> = g_r.iter().map(RigidMotion::inverse).collect();
    (0..g_r.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let gi = inv[i];
            g_r.iter().enumerate().filter(move |&(j, _)| j != i).filter_map(move |(_, h)| {
                match gi.compose(h).fixed_points() {
                    FixedPoints::Point(c) => Some(c),
                    _ => None,
                }
            })
        })
        .collect()
}

fn admissible(l: &Line, fixed: &HashSet<PlanePoint>) -> bool {
    !l.is_isotropic() && !fixed.iter().any(|c| l.contains(*c))
}

/// First line in search order on which no g⁻¹h (g ≠ h in G_r) has a fixed
/// point. Lines at offset ω carry no F_p points, so the search always ends.
pub fn choose_tau(ctx: &FieldCtx, g_r: &[RigidMotion]) -> Line {
    let fixed = fixed_point_set(g_r);
    tau_candidates(ctx).find(|l| admissible(l, &fixed)).expect("an F_{p²} line always qualifies")
}

/// The point–plane system of one segment class S_r.
#[derive(Clone, Debug)]
pub struct ClaimSystem {
    pub s_r: Segment,
    pub tau: Line,
    pub points: Vec<ProjPoint>,
    pub planes: Vec<ProjPlane>,
    /// points[i] = κ(g) with g(point_segments[i]) = s_r
    pub point_segments: Vec<Segment>,
    /// planes[j] belongs to plane_segments[j]
    pub plane_segments: Vec<Segment>,
}

impl ClaimSystem {
    pub fn system(&self) -> IncidenceSystem {
        IncidenceSystem::new(self.points.clone(), self.planes.clone())
    }

    pub fn incidences(&self) -> u64 {
        incidence_count(&self.system())
    }

    pub fn distinct_planes(&self) -> usize {
        self.planes.iter().collect::<HashSet<_>>().len()
    }

    /// The segment pairs read back from incidences: (plane side, point side).
    pub fn incident_pairs(&self) -> Vec<(Segment, Segment)> {
        let mut out = Vec::new();
        for (j, pl) in self.planes.iter().enumerate() {
            for (i, x) in self.points.iter().enumerate() {
                if pl.contains(x) {
                    out.push((self.plane_segments[j], self.point_segments[i]));
                }
            }
        }
        out.sort();
        out
    }
}

/// G_r: for each segment, the motion taking it to s_r.
pub fn class_motions(segments: &[Segment], s_r: &Segment) -> Vec<RigidMotion> {
    segments.iter().map(|x| rigid_motion_between(x, s_r).expect("same nonzero length")).collect()
}

pub fn build_incidence_system(segments: &[Segment], tau: &Line) -> Result<ClaimSystem, KinematicError> {
    if tau.is_isotropic() {
        return Err(KinematicError::IsotropicAxis);
    }
    let mut segs = segments.to_vec();
    segs.sort();
    segs.dedup();
    let Some(&s_r) = segs.first() else {
        return Ok(ClaimSystem { s_r: Segment::new(tau.point(), tau.point()), tau: *tau, points: vec![], planes: vec![], point_segments: vec![], plane_segments: vec![] });
    };
    if s_r.length().is_zero() {
        return Err(KinematicError::ZeroLength);
    }
    let g_r = class_motions(&segs, &s_r);
    if !admissible(tau, &fixed_point_set(&g_r)) {
        return Err(KinematicError::FixedPointOnAxis);
    }
    let rplane = r_tau_plane(tau)?;
    let points: Vec<ProjPoint> = g_r.iter().map(kappa).collect();
    let planes: Vec<ProjPlane> = segs
        .par_iter()
        .map(|x| {
            let refl = Segment::new(reflect(tau, x.a).unwrap(), reflect(tau, x.b).unwrap());
            let h = rigid_motion_between(&refl, &s_r).unwrap();
            left_map(&h).apply_plane(&rplane)
        })
        .collect();
    Ok(ClaimSystem { s_r, tau: *tau, points, planes, point_segments: segs.clone(), plane_segments: segs })
}

/// choose_tau followed by build_incidence_system.
pub fn claim_system(ctx: &FieldCtx, segments: &[Segment]) -> Result<ClaimSystem, KinematicError> {
    let mut segs = segments.to_vec();
    segs.sort();
    segs.dedup();
    let tau = match segs.first() {
        Some(s_r) => choose_tau(ctx, &class_motions(&segs, s_r)),
        None => tau_candidates(ctx).next().unwrap(),
    };
    build_incidence_system(&segs, &tau)
}

/// Ordered pairs (x, y) of segments with σ_ℓ(x) = y for a non-isotropic ℓ,
/// x = y included.
pub fn axial_pairs(segments: &[Segment]) -> Vec<(Segment, Segment)> {
    let mut out: Vec<_> = segments
        .par_iter()
        .flat_map_iter(|x| segments.iter().filter(move |y| axis_between(x, y).is_some()).map(move |y| (*x, *y)))
        .collect();
    out.sort();
    out
}

/// Reflection enumeration over every non-isotropic base-field line.
pub fn axial_pairs_bruteforce(segments: &[Segment]) -> Vec<(Segment, Segment)> {
    let Some(first) = segments.first() else { return vec![] };
    let ctx = first.a.ctx();
    let set: HashSet<&Segment> = segments.iter().collect();
    let lines: Vec<Line> = tau_candidates(&ctx).filter(Line::is_base).collect();
    let mut out: HashSet<(Segment, Segment)> = HashSet::new();
    for x in segments {
        for l in &lines {
            let y = Segment::new(reflect(l, x.a).unwrap(), reflect(l, x.b).unwrap());
            if set.contains(&y) {
                out.insert((*x, y));
            }
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    v
}

/// Oracle count and pipeline count of axially symmetric pairs in S_r.
pub fn axial_incidence_count(ctx: &FieldCtx, segments: &[Segment]) -> Result<(u64, u64), KinematicError> {
    let oracle = axial_pairs(segments).len() as u64;
    let sys = claim_system(ctx, segments)?;
    Ok((oracle, sys.incidences()))
}

/// Pairs of S_r related by a reflection that moves both endpoints.
pub fn moving_axial_count(segments: &[Segment]) -> u64 {
    segments
        .par_iter()
        .map(|x| {
            segments
                .iter()
                .filter(|y| x.a != y.a && x.b != y.b && axis_between(x, y).is_some())
                .count() as u64
        })
        .sum()
}

/// ℰ: quadruples (a, a', b, b') with d(a, b) = 0 (a = b allowed) and
/// σ_ℓ(a) = a', σ_ℓ(b) = b' for ℓ the non-isotropic bisector of a ≠ a',
/// with b ∉ ℓ.
pub fn isotropic_error_term(a: &PointSet) -> u64 {
    let pts = a.points();
    let set: HashSet<&PlanePoint> = pts.iter().collect();
    let mut zero_pairs: Vec<(PlanePoint, PlanePoint)> = Vec::new();
    for &x in pts {
        for &y in pts {
            if crate::plane::distance(x, y).is_zero() {
                zero_pairs.push((x, y));
            }
        }
    }
    zero_pairs
        .par_iter()
        .map(|&(x, y)| {
            pts.iter()
                .filter(|&&x2| x2 != x)
                .filter_map(|&x2| bisector(x, x2).ok())
                .filter(|l| !l.is_isotropic() && !l.contains(y))
                .filter(|l| set.contains(&reflect(l, y).unwrap()))
                .count() as u64
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct ClassSummary {
    pub r: FieldScalar,
    pub size: usize,
    pub axial: u64,
    pub moving: u64,
    pub incidences: u64,
    pub planes_distinct: usize,
    pub tau_in_base: bool,
    pub k: usize,
}

/// Per nonzero class: the axial-pair oracle, the incidence pipeline and the
/// moving-pair count.
pub fn class_summaries(a: &PointSet) -> Result<Vec<ClassSummary>, KinematicError> {
    let classes = segment_classes(a);
    let mut out = Vec::new();
    for (r, segs) in classes.into_iter().filter(|(r, _)| !r.is_zero()) {
        let sys = claim_system(&a.ctx(), &segs)?;
        out.push(ClassSummary {
            r,
            size: segs.len(),
            axial: axial_pairs(&segs).len() as u64,
            moving: moving_axial_count(&segs),
            incidences: sys.incidences(),
            planes_distinct: sys.distinct_planes(),
            tau_in_base: sys.tau.is_base(),
            k: max_collinear(&sys.points),
        });
    }
    Ok(out)
}

/// The class-by-class incidence equalities and the bisector-energy accounting
/// B* = Σ_{r≠0} I°(S_r) + ℰ.
pub fn bisector_decomposition(a: &PointSet) -> Result<Report, KinematicError> {
    let mut rep = Report::default();
    let n = a.len() as u64;
    let classes = class_summaries(a)?;
    let (mut eq_ok, mut planes_ok) = (0u64, 0u64);
    let (mut sum_i, mut sum_moving, mut kmax) = (0u64, 0u64, 0usize);
    for c in &classes {
        eq_ok += u64::from(c.axial == c.incidences);
        planes_ok += u64::from(c.planes_distinct == c.size);
        sum_i += c.axial;
        sum_moving += c.moving;
        kmax = kmax.max(c.k);
    }
    let nc = classes.len() as u64;
    rep.push(CheckRecord::eq("axial_incidence_equality", "axial pairs = point–plane incidences, per class", eq_ok, nc));
    rep.push(CheckRecord::eq("axial_plane_count", "|Π| = |S_r|, per class", planes_ok, nc));
    rep.push(CheckRecord::diagnostic(
        "axial_extension_tau",
        "classes needing an F_{p²} axis",
        classes.iter().filter(|c| !c.tau_in_base).count(),
        Relation::Report,
        nc,
    ));
    let self_pairs = classes.iter().all(|c| c.axial >= c.size as u64);
    rep.push(CheckRecord::eq("axial_self_symmetry", "every segment is symmetric to itself", u64::from(self_pairs), 1u64));
    let b_star = bisector_energy(a).b_star;
    let err = isotropic_error_term(a) as u128;
    let m = max_collinear_cocircular(a);
    rep.push(CheckRecord::eq("bisector_accounting", "B* = Σ I°(S_r) + ℰ", b_star, sum_moving as u128 + err));
    rep.push(CheckRecord::le("bisector_axial_bound", "B* ≤ Σ I(S_r) + ℰ", b_star, sum_i as u128 + err));
    rep.push(CheckRecord::le("error_term_bound", "ℰ ≤ 2M|A|²", err, 2 * m as u128 * (n * n) as u128));
    rep.push(
        CheckRecord::diagnostic("axial_collinear_vs_m", "k(P) against M(A)", kmax as u64, Relation::Le, m)
            .with_note("collinear κ-points come from segments on concentric circles or parallel lines"),
    );
    Ok(rep)
}

/// Closed-form counts: |SF₂(F_p)| = p²(p − χ(−1)); the exceptional set has
/// p + 1 points (a line) or 2p² + p + 1 (two planes).
pub fn expected_image_size(ctx: &FieldCtx) -> u64 {
    let p = ctx.p() as i64;
    (p * p * (p - ctx.chi_minus_one())) as u64
}

pub fn expected_exceptional_size(ctx: &FieldCtx) -> u64 {
    let p = ctx.p();
    if ctx.chi_minus_one() == 1 {
        2 * p * p + p + 1
    } else {
        p + 1
    }
}

fn exceptional_structure_ok(ctx: &FieldCtx, exc: &[ProjPoint]) -> bool {
    let (z, o) = (ctx.zero(), ctx.one());
    match sqrt_mod(-o).base {
        None => {
            // the line X0 = X1 = 0
            let l = ProjLine::meet(&ProjPlane::new([o, z, z, z]).unwrap(), &ProjPlane::new([z, o, z, z]).unwrap()).unwrap();
            exc.iter().all(|x| l.contains(x))
        }
        Some(i) => {
            // the planes X0 = ±i X1
            let a = ProjPlane::new([o, -i, z, z]).unwrap();
            let b = ProjPlane::new([o, i, z, z]).unwrap();
            exc.iter().all(|x| a.contains(x) || b.contains(x))
        }
    }
}

/// Bijection, round trips, equivariance, transporters, R_τ and the
/// Clifford correspondence. Exhaustive over SF₂(F_p) and FP³; `samples`
/// random pairs for the equivariance and transporter checks.
pub fn census(ctx: &FieldCtx, samples: usize, seed: u64) -> Report {
    let mut rep = Report::default();
    let motions = RigidMotion::enumerate(ctx);
    let images: Vec<ProjPoint> = motions.par_iter().map(kappa).collect();
    let image: HashSet<&ProjPoint> = images.iter().collect();
    rep.push(CheckRecord::eq("image_size", "|κ(SF₂)| = p²(p − χ(−1))", image.len(), expected_image_size(ctx)));
    rep.push(CheckRecord::eq("kappa_injective", "κ injective", image.len(), motions.len()));
    let all = ProjPoint::enumerate(ctx);
    rep.push(CheckRecord::eq("fp3_size", "|FP³| = (p⁴ − 1)/(p − 1)", all.len(), (ctx.p().pow(4) - 1) / (ctx.p() - 1)));
    let exc: Vec<ProjPoint> = all.iter().filter(|x| is_exceptional(x)).copied().collect();
    rep.push(CheckRecord::eq("exceptional_size", "exceptional set size", exc.len(), expected_exceptional_size(ctx)));
    rep.push(CheckRecord::eq("exceptional_shape", "line or two planes", u64::from(exceptional_structure_ok(ctx, &exc)), 1u64));
    let hits_exc = images.iter().filter(|x| is_exceptional(x)).count();
    rep.push(CheckRecord::eq("image_avoids_exceptional", "κ never exceptional", hits_exc, 0u64));
    rep.push(CheckRecord::eq("image_is_complement", "image = FP³ minus exceptional", image.len() + exc.len(), all.len()));

    let rt1 = motions.par_iter().zip(&images).filter(|(g, x)| kappa_inv(x).as_ref() == Ok(g)).count();
    rep.push(CheckRecord::eq("kappa_inv_kappa", "κ⁻¹∘κ = id", rt1, motions.len()));
    let alg = CliffordAlgebra::euclidean(ctx);
    let (mut rt2, mut cliff, mut nonexc) = (0u64, 0u64, 0u64);
    let mut half = 0u64;
    for x in all.iter().filter(|x| !is_exceptional(x)) {
        nonexc += 1;
        let g = kappa_inv(x).unwrap();
        rt2 += u64::from(kappa(&g) == *x);
        cliff += u64::from(alg.psi(&to_clifford(x)).unwrap() == g.matrix());
        half += u64::from(kappa_half_angle(&g) == *x);
    }
    rep.push(CheckRecord::eq("kappa_kappa_inv", "κ∘κ⁻¹ = id off the exceptional set", rt2, nonexc));
    rep.push(CheckRecord::eq("clifford_consistency", "ψ([X0:−X1:X2:−X3]) = κ⁻¹(X)", cliff, nonexc));
    rep.push(CheckRecord::eq("half_angle_form", "half-angle and (u+1) forms agree", half, nonexc));

    let mut s = Sampler::new(seed);
    let pick = |s: &mut Sampler| motions[s.below(motions.len() as u64) as usize];
    let (mut left, mut right) = (0u64, 0u64);
    for _ in 0..samples {
        let (g, x) = (pick(&mut s), pick(&mut s));
        left += u64::from(kappa(&g.compose(&x)) == left_map(&g).apply(&kappa(&x)));
        right += u64::from(kappa(&x.compose(&g)) == right_map(&g).apply(&kappa(&x)));
    }
    let n = samples as u64;
    rep.push(CheckRecord::eq("left_equivariance", "κ(gx) = φ_g(κ(x))", left, n));
    rep.push(CheckRecord::eq("right_equivariance", "κ(xg) = φ^g(κ(x))", right, n));

    let pt = |s: &mut Sampler| PlanePoint::new(s.element(ctx), s.element(ctx));
    let (mut lines_ok, mut sizes_ok) = (0u64, 0u64);
    let expect_t = (ctx.p() as i64 - ctx.chi_minus_one()) as usize;
    for _ in 0..samples {
        let (x, y) = (pt(&mut s), pt(&mut s));
        let ts = transporters(x, y);
        sizes_ok += u64::from(ts.len() == expect_t && ts.iter().all(|g| g.apply(x) == y));
        let l = transporter_line(x, y);
        let kp: Vec<[FieldScalar; 4]> = ts.iter().map(|g| *kappa(g).coords()).collect();
        lines_ok += u64::from(crate::projective::rank(&kp) == 2 && ts.iter().all(|g| l.contains(&kappa(g))));
    }
    rep.push(CheckRecord::eq("transporter_size", "|T_xy| = p − χ(−1)", sizes_ok, n));
    rep.push(CheckRecord::eq("transporter_line", "κ(T_xy) has rank 2", lines_ok, n));

    let mut rtau = 0u64;
    let lines: Vec<Line> = tau_candidates(ctx).filter(Line::is_base).collect();
    let circle = unit_circle(ctx);
    let checked = samples.min(lines.len());
    for _ in 0..checked {
        let l = lines[s.below(lines.len() as u64) as usize];
        let plane = r_tau_plane(&l).unwrap();
        let ok = l.points().iter().all(|c| {
            circle.iter().all(|r| plane.contains(&kappa(&RigidMotion::rotation_about(r.x, r.y, *c).unwrap())))
        });
        rtau += u64::from(ok);
    }
    rep.push(CheckRecord::eq("r_tau_plane", "rotations about ℓ lie in its plane", rtau, checked as u64));
    rep
}

/// Rotations about points of ℓ and translations along its normal, i.e.
/// σ_m∘σ_ℓ over non-isotropic m; exposed for tests and the CLI.
pub fn r_tau_motions(l: &Line) -> Vec<RigidMotion> {
    let ctx = l.ctx();
    let mut out: HashMap<ProjPoint, RigidMotion> = HashMap::new();
    let probe = [PlanePoint::origin(&ctx), PlanePoint::from_ints(&ctx, 1, 0), PlanePoint::from_ints(&ctx, 0, 1)];
    for m in tau_candidates(&ctx).filter(Line::is_base) {
        // σ_m σ_ℓ is determined by its action on an affine frame
        let img: Vec<PlanePoint> = probe.iter().map(|q| reflect(&m, reflect(l, *q).unwrap()).unwrap()).collect();
        let seg = Segment::new(probe[0], probe[1]);
        let g = rigid_motion_between(&seg, &Segment::new(img[0], img[1])).unwrap();
        debug_assert_eq!(g.apply(probe[2]), img[2]);
        out.insert(kappa(&g), g);
    }
    let mut v: Vec<_> = out.into_values().collect();
    v.sort();
    v
}

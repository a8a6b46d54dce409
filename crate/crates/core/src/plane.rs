//! Geometry of F²: the quadratic distance, lines and circles, perpendicular
//! bisectors, reflections and the rigid-motion group SF₂.

use std::fmt;

use thiserror::Error;

use crate::ffield::{quadratic_character, FieldCtx, FieldScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate bisector: the two points coincide")]
    DegenerateBisector,
    #[error("reflection undefined: the axis is isotropic")]
    ReflectionUndefined,
    #[error("degenerate line: both direction coefficients vanish")]
    DegenerateLine,
    #[error("(u, v) is not on the unit circle")]
    NotOnUnitCircle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: FieldScalar,
    pub y: FieldScalar,
}

impl PlanePoint {
    pub fn new(x: FieldScalar, y: FieldScalar) -> Self {
        debug_assert_eq!(x.ctx(), y.ctx());
        PlanePoint { x, y }
    }

    pub fn from_ints(ctx: &FieldCtx, x: i64, y: i64) -> Self {
        PlanePoint { x: ctx.elem(x), y: ctx.elem(y) }
    }

    pub fn origin(ctx: &FieldCtx) -> Self {
        PlanePoint { x: ctx.zero(), y: ctx.zero() }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.x.ctx()
    }

    pub fn dot(self, o: Self) -> FieldScalar {
        self.x * o.x + self.y * o.y
    }

    pub fn scale(self, k: FieldScalar) -> Self {
        PlanePoint { x: self.x * k, y: self.y * k }
    }

    pub fn is_base(&self) -> bool {
        self.x.is_base() && self.y.is_base()
    }
}

impl std::ops::Add for PlanePoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        PlanePoint { x: self.x + o.x, y: self.y + o.y }
    }
}

impl std::ops::Sub for PlanePoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        PlanePoint { x: self.x - o.x, y: self.y - o.y }
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// d(x, y) = (x − y)·(x − y)
pub fn distance(x: PlanePoint, y: PlanePoint) -> FieldScalar {
    let d = x - y;
    d.dot(d)
}

/// d(v, 0) = 0; the zero vector counts as isotropic.
pub fn is_isotropic(v: PlanePoint) -> bool {
    v.dot(v).is_zero()
}

/// Ordered pair of points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: PlanePoint,
    pub b: PlanePoint,
}

impl Segment {
    pub fn new(a: PlanePoint, b: PlanePoint) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> FieldScalar {
        distance(self.a, self.b)
    }

    pub fn reversed(&self) -> Self {
        Segment { a: self.b, b: self.a }
    }

    pub fn is_nontrivial_isotropic(&self) -> bool {
        self.a != self.b && self.length().is_zero()
    }
}

/// Projective direction (dx : dy), first nonzero coordinate scaled to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub dx: FieldScalar,
    pub dy: FieldScalar,
}

impl Direction {
    pub fn new(dx: FieldScalar, dy: FieldScalar) -> Option<Self> {
        if !dx.is_zero() {
            Some(Direction { dx: dx.ctx().one(), dy: dy / dx })
        } else if !dy.is_zero() {
            Some(Direction { dx, dy: dy.ctx().one() })
        } else {
            None
        }
    }

    pub fn of(v: PlanePoint) -> Option<Self> {
        Direction::new(v.x, v.y)
    }

    /// The p + 1 directions of the base field: (1 : m) for all m, then (0 : 1).
    pub fn all(ctx: &FieldCtx) -> Vec<Direction> {
        let mut out: Vec<Direction> =
            ctx.elements().map(|m| Direction { dx: ctx.one(), dy: m }).collect();
        out.push(Direction { dx: ctx.zero(), dy: ctx.one() });
        out
    }

    pub fn vector(&self) -> PlanePoint {
        PlanePoint { x: self.dx, y: self.dy }
    }

    pub fn is_isotropic(&self) -> bool {
        is_isotropic(self.vector())
    }

    /// The orthogonal direction (−dy : dx).
    pub fn perpendicular(&self) -> Direction {
        Direction::new(-self.dy, self.dx).unwrap()
    }
}

/// Line αx + βy = γ, canonically scaled so the first nonzero of (α, β) is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    alpha: FieldScalar,
    beta: FieldScalar,
    gamma: FieldScalar,
}

impl Line {
    pub fn new(alpha: FieldScalar, beta: FieldScalar, gamma: FieldScalar) -> Result<Self, GeomError> {
        let lead = if !alpha.is_zero() {
            alpha
        } else if !beta.is_zero() {
            beta
        } else {
            return Err(GeomError::DegenerateLine);
        };
        let k = lead.inv().unwrap();
        Ok(Line { alpha: alpha * k, beta: beta * k, gamma: gamma * k })
    }

    /// Line through `p` with direction `d`.
    pub fn through_with_direction(p: PlanePoint, d: Direction) -> Line {
        let (a, b) = (d.dy, -d.dx);
        Line::new(a, b, a * p.x + b * p.y).unwrap()
    }

    /// Line with normal vector (the direction of (α, β)) through `p`.
    pub fn through_with_normal(p: PlanePoint, n: Direction) -> Line {
        Line::new(n.dx, n.dy, n.dx * p.x + n.dy * p.y).unwrap()
    }

    pub fn through(p: PlanePoint, q: PlanePoint) -> Result<Line, GeomError> {
        let d = Direction::of(q - p).ok_or(GeomError::DegenerateLine)?;
        Ok(Line::through_with_direction(p, d))
    }

    pub fn coefficients(&self) -> (FieldScalar, FieldScalar, FieldScalar) {
        (self.alpha, self.beta, self.gamma)
    }

    pub fn ctx(&self) -> FieldCtx {
        self.alpha.ctx()
    }

    pub fn contains(&self, q: PlanePoint) -> bool {
        self.alpha * q.x + self.beta * q.y == self.gamma
    }

    pub fn normal(&self) -> Direction {
        Direction::new(self.alpha, self.beta).unwrap()
    }

    pub fn direction(&self) -> Direction {
        self.normal().perpendicular()
    }

    pub fn is_isotropic(&self) -> bool {
        (self.alpha * self.alpha + self.beta * self.beta).is_zero()
    }

    pub fn is_base(&self) -> bool {
        self.alpha.is_base() && self.beta.is_base() && self.gamma.is_base()
    }

    /// Some point of the line.
    pub fn point(&self) -> PlanePoint {
        let z = self.alpha.ctx().zero();
        if !self.alpha.is_zero() {
            PlanePoint { x: self.gamma / self.alpha, y: z }
        } else {
            PlanePoint { x: z, y: self.gamma / self.beta }
        }
    }

    /// Base-field points of the line, in order of the free coordinate.
    pub fn points(&self) -> Vec<PlanePoint> {
        let ctx = self.ctx();
        let d = self.direction().vector();
        let p0 = self.point();
        if !p0.is_base() || !d.is_base() {
            return Vec::new();
        }
        ctx.elements().map(|t| p0 + d.scale(t)).collect()
    }

    /// Intersection point of two non-parallel lines.
    pub fn intersect(&self, o: &Line) -> Option<PlanePoint> {
        let det = self.alpha * o.beta - self.beta * o.alpha;
        let inv = det.inv()?;
        Some(PlanePoint {
            x: (self.gamma * o.beta - self.beta * o.gamma) * inv,
            y: (self.alpha * o.gamma - self.gamma * o.alpha) * inv,
        })
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.alpha, self.beta, self.gamma)
    }
}

/// Circle {q : d(q, center) = r2}; r2 = 0 gives the (possibly empty) isotropic cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circle {
    pub center: PlanePoint,
    pub r2: FieldScalar,
}

impl Circle {
    pub fn contains(&self, q: PlanePoint) -> bool {
        distance(q, self.center) == self.r2
    }

    /// Circle through three non-collinear points, if its centre exists.
    pub fn through(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> Option<Circle> {
        let l1 = bisector(a, b).ok()?;
        let l2 = bisector(a, c).ok()?;
        let center = l1.intersect(&l2)?;
        Some(Circle { center, r2: distance(a, center) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve {
    Line(Line),
    Circle(Circle),
}

impl Curve {
    pub fn contains(&self, q: PlanePoint) -> bool {
        match self {
            Curve::Line(l) => l.contains(q),
            Curve::Circle(c) => c.contains(q),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Line(l) => write!(f, "line {l}"),
            Curve::Circle(c) => write!(f, "circle centre {} r2 {}", c.center, c.r2),
        }
    }
}

/// Perpendicular bisector 2x·(a − b) = d(a,0) − d(b,0).
pub fn bisector(a: PlanePoint, b: PlanePoint) -> Result<Line, GeomError> {
    if a == b {
        return Err(GeomError::DegenerateBisector);
    }
    let two = a.ctx().elem(2);
    let d = a - b;
    Line::new(two * d.x, two * d.y, a.dot(a) - b.dot(b))
}

/// Reflection in a non-isotropic line.
pub fn reflect(l: &Line, x: PlanePoint) -> Result<PlanePoint, GeomError> {
    if l.is_isotropic() {
        return Err(GeomError::ReflectionUndefined);
    }
    let (a, b, g) = l.coefficients();
    let n = a * a + b * b;
    let k = (a * x.x + b * x.y - g) * x.ctx().elem(2) / n;
    Ok(PlanePoint { x: x.x - k * a, y: x.y - k * b })
}

pub fn unit_circle(ctx: &FieldCtx) -> Vec<PlanePoint> {
    let mut out = Vec::new();
    for u in ctx.elements() {
        let rest = ctx.one() - u * u;
        match quadratic_character(rest) {
            0 => out.push(PlanePoint { x: u, y: rest }),
            1 => {
                let v = crate::ffield::sqrt_mod(rest).base.unwrap();
                out.push(PlanePoint { x: u, y: v });
                out.push(PlanePoint { x: u, y: -v });
            }
            _ => {}
        }
    }
    out.sort();
    out
}

/// x ↦ R x + (s, t) with R = [[u, −v], [v, u]] and u² + v² = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RigidMotion {
    pub u: FieldScalar,
    pub v: FieldScalar,
    pub s: FieldScalar,
    pub t: FieldScalar,
}

/// Fixed-point structure of a rigid motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPoints {
    Everywhere,
    Nowhere,
    Point(PlanePoint),
}

impl RigidMotion {
    pub fn new(u: FieldScalar, v: FieldScalar, s: FieldScalar, t: FieldScalar) -> Result<Self, GeomError> {
        if !(u * u + v * v).is_one() {
            return Err(GeomError::NotOnUnitCircle);
        }
        Ok(RigidMotion { u, v, s, t })
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        RigidMotion { u: ctx.one(), v: ctx.zero(), s: ctx.zero(), t: ctx.zero() }
    }

    pub fn rotation(u: FieldScalar, v: FieldScalar) -> Result<Self, GeomError> {
        let z = u.ctx().zero();
        RigidMotion::new(u, v, z, z)
    }

    pub fn translation(s: FieldScalar, t: FieldScalar) -> Self {
        let ctx = s.ctx();
        RigidMotion { u: ctx.one(), v: ctx.zero(), s, t }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.u.ctx()
    }

    /// Rotation by (u, v) about the point c.
    pub fn rotation_about(u: FieldScalar, v: FieldScalar, c: PlanePoint) -> Result<Self, GeomError> {
        let r = RigidMotion::rotation(u, v)?;
        let rc = r.apply(c);
        Ok(RigidMotion { s: c.x - rc.x, t: c.y - rc.y, ..r })
    }

    pub fn apply(&self, q: PlanePoint) -> PlanePoint {
        PlanePoint {
            x: self.u * q.x - self.v * q.y + self.s,
            y: self.v * q.x + self.u * q.y + self.t,
        }
    }

    /// self ∘ other
    pub fn compose(&self, o: &RigidMotion) -> RigidMotion {
        let st = self.apply(PlanePoint { x: o.s, y: o.t });
        RigidMotion {
            u: self.u * o.u - self.v * o.v,
            v: self.v * o.u + self.u * o.v,
            s: st.x,
            t: st.y,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        let z = self.ctx().zero();
        let r = RigidMotion { u: self.u, v: -self.v, s: z, t: z };
        let back = r.apply(PlanePoint { x: self.s, y: self.t });
        RigidMotion { s: -back.x, t: -back.y, ..r }
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.v.is_zero() && self.s.is_zero() && self.t.is_zero()
    }

    pub fn is_translation(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    pub fn fixed_points(&self) -> FixedPoints {
        if self.is_translation() {
            if self.s.is_zero() && self.t.is_zero() {
                FixedPoints::Everywhere
            } else {
                FixedPoints::Nowhere
            }
        } else {
            // (I − R)c = (s, t); det(I − R) = (1 − u)² + v² = 2(1 − u) ≠ 0.
            let a = self.ctx().one() - self.u;
            let det = a * a + self.v * self.v;
            let inv = det.inv().expect("u ≠ 1 on the unit circle gives det ≠ 0");
            FixedPoints::Point(PlanePoint {
                x: (a * self.s - self.v * self.t) * inv,
                y: (self.v * self.s + a * self.t) * inv,
            })
        }
    }

    /// The 3×3 matrix [[u, −v, s], [v, u, t], [0, 0, 1]].
    pub fn matrix(&self) -> [[FieldScalar; 3]; 3] {
        let ctx = self.ctx();
        [
            [self.u, -self.v, self.s],
            [self.v, self.u, self.t],
            [ctx.zero(), ctx.zero(), ctx.one()],
        ]
    }

    /// All of SF₂(F_p), for small p.
    pub fn enumerate(ctx: &FieldCtx) -> Vec<RigidMotion> {
        let circle = unit_circle(ctx);
        let mut out = Vec::with_capacity(circle.len() * (ctx.p() * ctx.p()) as usize);
        for c in &circle {
            for s in ctx.elements() {
                for t in ctx.elements() {
                    out.push(RigidMotion { u: c.x, v: c.y, s, t });
                }
            }
        }
        out
    }
}

impl fmt::Display for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u={}, v={}, s={}, t={})", self.u, self.v, self.s, self.t)
    }
}

/// The unique g ∈ SF₂ with g(s1.a) = s2.a and g(s1.b) = s2.b, when both
/// segments have the same nonzero length.
pub fn rigid_motion_between(s1: &Segment, s2: &Segment) -> Option<RigidMotion> {
    let r = s1.length();
    if r.is_zero() || r != s2.length() {
        return None;
    }
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let rinv = r.inv().unwrap();
    let u = d1.dot(d2) * rinv;
    let v = (d1.x * d2.y - d1.y * d2.x) * rinv;
    let rot = RigidMotion::rotation(u, v).ok()?;
    let ra = rot.apply(s1.a);
    Some(RigidMotion { s: s2.a.x - ra.x, t: s2.a.y - ra.y, ..rot })
}

/// The non-isotropic line ℓ with σ_ℓ(s1.a) = s2.a and σ_ℓ(s1.b) = s2.b, if any.
pub fn axis_between(s1: &Segment, s2: &Segment) -> Option<Line> {
    let candidate = if s1.a != s2.a {
        bisector(s1.a, s2.a).ok()?
    } else if s1.b != s2.b {
        bisector(s1.b, s2.b).ok()?
    } else if s1.a != s1.b {
        // s1 = s2: the line through the segment fixes both endpoints.
        Line::through(s1.a, s1.b).ok()?
    } else {
        return None;
    };
    if candidate.is_isotropic() {
        return None;
    }
    if reflect(&candidate, s1.a).ok()? == s2.a && reflect(&candidate, s1.b).ok()? == s2.b {
        Some(candidate)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::is_prime;
    use proptest::prelude::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    fn pt(k: &FieldCtx, x: i64, y: i64) -> PlanePoint {
        PlanePoint::from_ints(k, x, y)
    }

    #[test]
    fn distance_examples() {
        let k7 = f(7);
        let k13 = f(13);
        assert_eq!(distance(pt(&k7, 1, 2), pt(&k7, 4, 6)), k7.elem(4));
        assert!(distance(pt(&k13, 3, 5), pt(&k13, 3, 5)).is_zero());
        assert!(distance(pt(&k13, 0, 0), pt(&k13, 1, 5)).is_zero());
        assert!(is_isotropic(pt(&k13, 1, 5)));
        assert!(!is_isotropic(pt(&k7, 1, 5)));
        assert!(is_isotropic(pt(&k7, 0, 0)));
    }

    #[test]
    fn bisector_examples() {
        let k = f(7);
        let one = k.one();
        let z = k.zero();
        assert_eq!(bisector(pt(&k, 0, 0), pt(&k, 2, 0)).unwrap(), Line::new(one, z, one).unwrap());
        assert_eq!(bisector(pt(&k, 1, 0), pt(&k, 0, 1)).unwrap(), Line::new(one, -one, z).unwrap());
        let k13 = f(13);
        assert!(bisector(pt(&k13, 0, 0), pt(&k13, 1, 5)).unwrap().is_isotropic());
        assert_eq!(bisector(pt(&k, 3, 3), pt(&k, 3, 3)), Err(GeomError::DegenerateBisector));
    }

    #[test]
    fn reflect_examples() {
        let k = f(7);
        let one = k.one();
        let z = k.zero();
        let vert = Line::new(one, z, one).unwrap();
        assert_eq!(reflect(&vert, pt(&k, 0, 0)).unwrap(), pt(&k, 2, 0));
        let diag = Line::new(one, -one, z).unwrap();
        assert_eq!(reflect(&diag, pt(&k, 1, 0)).unwrap(), pt(&k, 0, 1));
        assert_eq!(reflect(&diag, pt(&k, 3, 3)).unwrap(), pt(&k, 3, 3));
        let k13 = f(13);
        let iso = Line::new(k13.one(), k13.elem(5), k13.zero()).unwrap();
        assert_eq!(reflect(&iso, pt(&k13, 1, 1)), Err(GeomError::ReflectionUndefined));
    }

    #[test]
    fn unit_circle_sizes() {
        let k7 = f(7);
        let c7 = unit_circle(&k7);
        assert_eq!(c7.len(), 8);
        assert!(c7.contains(&pt(&k7, 2, 2)));
        assert_eq!(unit_circle(&f(13)).len(), 12);
        for p in (3..100).filter(|&p| is_prime(p)) {
            let k = f(p);
            let c = unit_circle(&k);
            assert_eq!(c.len() as i64, p as i64 - k.chi_minus_one(), "p={p}");
            assert!(c.contains(&pt(&k, 1, 0)) && c.contains(&pt(&k, -1, 0)));
        }
    }

    #[test]
    fn motion_examples() {
        let k = f(7);
        let o = pt(&k, 0, 0);
        let g = rigid_motion_between(&Segment::new(o, pt(&k, 1, 0)), &Segment::new(o, pt(&k, 0, 1))).unwrap();
        assert_eq!(g, RigidMotion::rotation(k.zero(), k.one()).unwrap());
        let s = Segment::new(pt(&k, 2, 3), pt(&k, 5, 1));
        assert!(rigid_motion_between(&s, &s).unwrap().is_identity());
        assert!(rigid_motion_between(&Segment::new(o, pt(&k, 1, 0)), &Segment::new(o, pt(&k, 1, 1))).is_none());
        assert_eq!(RigidMotion::translation(k.elem(3), k.elem(4)).apply(o), pt(&k, 3, 4));
        assert_eq!(g.apply(pt(&k, 1, 0)), pt(&k, 0, 1));
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn bisector_is_equidistant_locus_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            let k = f(p);
            let pts: Vec<_> = (0..p as i64).flat_map(|x| (0..p as i64).map(move |y| (x, y))).map(|(x, y)| pt(&k, x, y)).collect();
            for (i, &a) in pts.iter().enumerate().step_by(3) {
                for &b in pts.iter().skip(i + 1).step_by(5) {
                    let l = bisector(a, b).unwrap();
                    for &x in &pts {
                        assert_eq!(l.contains(x), distance(a, x) == distance(b, x));
                    }
                    assert_eq!(l.is_isotropic(), is_isotropic(a - b));
                    let two = k.elem(2);
                    assert!(l.contains((a + b).scale(two.inv().unwrap())));
                }
            }
        }
    }

    #[test]
    fn fixed_point_of_rotation() {
        let k = f(13);
        let c = pt(&k, 4, 9);
        for uv in unit_circle(&k) {
            let g = RigidMotion::rotation_about(uv.x, uv.y, c).unwrap();
            if g.is_identity() {
                assert_eq!(g.fixed_points(), FixedPoints::Everywhere);
            } else {
                assert_eq!(g.fixed_points(), FixedPoints::Point(c));
            }
        }
        assert_eq!(RigidMotion::translation(k.one(), k.zero()).fixed_points(), FixedPoints::Nowhere);
    }

    const PS: [u64; 5] = [5, 7, 13, 31, 101];

    fn motion(k: &FieldCtx, idx: usize, s: i64, t: i64) -> RigidMotion {
        let c = unit_circle(k);
        let uv = c[idx % c.len()];
        RigidMotion::new(uv.x, uv.y, k.elem(s), k.elem(t)).unwrap()
    }

    proptest! {
        #[test]
        fn motions_preserve_distance(pi in 0usize..5, idx in 0usize..1000, v in proptest::array::uniform6(-1000i64..1000)) {
            let k = f(PS[pi]);
            let g = motion(&k, idx, v[0], v[1]);
            let (x, y) = (pt(&k, v[2], v[3]), pt(&k, v[4], v[5]));
            prop_assert_eq!(distance(g.apply(x), g.apply(y)), distance(x, y));
        }

        #[test]
        fn group_axioms(pi in 0usize..5, i in 0usize..1000, j in 0usize..1000, v in proptest::array::uniform6(-1000i64..1000)) {
            let k = f(PS[pi]);
            let g = motion(&k, i, v[0], v[1]);
            let h = motion(&k, j, v[2], v[3]);
            let x = pt(&k, v[4], v[5]);
            prop_assert_eq!(g.compose(&h).apply(x), g.apply(h.apply(x)));
            prop_assert!(g.compose(&g.inverse()).is_identity());
            prop_assert!(g.inverse().compose(&g).is_identity());
            prop_assert!(RigidMotion::new(g.compose(&h).u, g.compose(&h).v, k.zero(), k.zero()).is_ok());
        }

        #[test]
        fn reflection_properties(pi in 0usize..5, v in proptest::array::uniform8(-1000i64..1000)) {
            let k = f(PS[pi]);
            let a = pt(&k, v[0], v[1]);
            let b = pt(&k, v[2], v[3]);
            prop_assume!(a != b);
            let l = Line::through(a, b).unwrap();
            prop_assume!(!l.is_isotropic());
            let x = pt(&k, v[4], v[5]);
            let rx = reflect(&l, x).unwrap();
            prop_assert_eq!(reflect(&l, rx).unwrap(), x);
            prop_assert_eq!(rx == x, l.contains(x));
            for q in [a, b, a + (b - a).scale(k.elem(v[6]))] {
                prop_assert_eq!(distance(x, q), distance(rx, q));
            }
            // The composition of two reflections is a rigid motion.
            let c = pt(&k, v[6], v[7]);
            prop_assume!(c != a);
            let l2 = Line::through(a, c).unwrap();
            prop_assume!(!l2.is_isotropic());
            let y = pt(&k, v[7], v[4]);
            prop_assume!(x != y && !distance(x, y).is_zero());
            let s1 = Segment::new(x, y);
            let s2 = Segment::new(reflect(&l2, rx).unwrap(), reflect(&l2, reflect(&l, y).unwrap()).unwrap());
            let g = rigid_motion_between(&s1, &s2).unwrap();
            let z = pt(&k, v[5], v[0]);
            prop_assert_eq!(g.apply(z), reflect(&l2, reflect(&l, z).unwrap()).unwrap());
        }

        #[test]
        fn rigid_motion_between_is_exact(pi in 0usize..5, idx in 0usize..1000, v in proptest::array::uniform6(-1000i64..1000)) {
            let k = f(PS[pi]);
            let g = motion(&k, idx, v[0], v[1]);
            let s1 = Segment::new(pt(&k, v[2], v[3]), pt(&k, v[4], v[5]));
            prop_assume!(!s1.length().is_zero());
            let s2 = Segment::new(g.apply(s1.a), g.apply(s1.b));
            prop_assert_eq!(rigid_motion_between(&s1, &s2), Some(g));
        }

        #[test]
        fn axis_between_agrees_with_reflection(pi in 0usize..5, v in proptest::array::uniform8(-1000i64..1000)) {
            let k = f(PS[pi]);
            let l = Line::new(k.elem(v[0]), k.elem(v[1]), k.elem(v[2]));
            prop_assume!(l.is_ok());
            let l = l.unwrap();
            prop_assume!(!l.is_isotropic());
            let s = Segment::new(pt(&k, v[3], v[4]), pt(&k, v[5], v[6]));
            prop_assume!(s.a != s.b);
            let t = Segment::new(reflect(&l, s.a).unwrap(), reflect(&l, s.b).unwrap());
            let found = axis_between(&s, &t);
            prop_assert!(found.is_some());
            let m = found.unwrap();
            prop_assert_eq!(reflect(&m, s.a).unwrap(), t.a);
            prop_assert_eq!(reflect(&m, s.b).unwrap(), t.b);
        }
    }
}

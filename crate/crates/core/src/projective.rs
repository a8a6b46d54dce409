//! Points, planes, lines and collineations of FP³ in homogeneous coordinates.

use std::fmt;

use crate::ffield::{FieldCtx, FieldScalar};

pub type Vec4 = [FieldScalar; 4];
pub type Mat4 = [[FieldScalar; 4]; 4];

fn canonical4(v: Vec4) -> Option<Vec4> {
    let lead = v.iter().find(|c| !c.is_zero())?;
    let k = lead.inv().unwrap();
    Some(v.map(|c| c * k))
}

pub fn dot4(a: &Vec4, b: &Vec4) -> FieldScalar {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(Vec4);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPlane(Vec4);

impl ProjPoint {
    /// None for the zero vector.
    pub fn new(v: Vec4) -> Option<Self> {
        canonical4(v).map(ProjPoint)
    }

    pub fn coords(&self) -> &Vec4 {
        &self.0
    }

    pub fn ctx(&self) -> FieldCtx {
        self.0[0].ctx()
    }

    pub fn is_base(&self) -> bool {
        self.0.iter().all(|c| c.is_base())
    }

    /// Every point of FP³ over the base field: (p⁴ − 1)/(p − 1) of them.
    pub fn enumerate(ctx: &FieldCtx) -> Vec<ProjPoint> {
        let p = ctx.p();
        let mut out = Vec::with_capacity(((p * p * p * p - 1) / (p - 1)) as usize);
        let (z, o) = (ctx.zero(), ctx.one());
        for lead in 0..4 {
            let free = 3 - lead;
            let total = p.pow(free as u32);
            for idx in 0..total {
                let mut v = [z; 4];
                v[lead] = o;
                let mut r = idx;
                for c in v.iter_mut().skip(lead + 1) {
                    *c = ctx.from_u64(r % p);
                    r /= p;
                }
                out.push(ProjPoint(v));
            }
        }
        out
    }
}

impl ProjPlane {
    pub fn new(v: Vec4) -> Option<Self> {
        canonical4(v).map(ProjPlane)
    }

    pub fn coeffs(&self) -> &Vec4 {
        &self.0
    }

    pub fn contains(&self, x: &ProjPoint) -> bool {
        dot4(&self.0, &x.0).is_zero()
    }

    pub fn contains_line(&self, l: &ProjLine) -> bool {
        l.basis.iter().all(|b| dot4(&self.0, b).is_zero())
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[{a}:{b}:{c}:{d}]")
    }
}

impl fmt::Display for ProjPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "<{a},{b},{c},{d}>")
    }
}

/// Reduced row echelon form in place; returns the rank.
fn rref(rows: &mut [Vec4]) -> usize {
    let mut r = 0;
    for col in 0..4 {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let k = rows[r][col].inv().unwrap();
        rows[r] = rows[r].map(|c| c * k);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col];
                for j in 0..4 {
                    let t = rows[r][j];
                    rows[i][j] -= f * t;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

pub fn rank(rows: &[Vec4]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m)
}

/// Basis of {x : r·x = 0 for all rows r}.
pub fn null_space(rows: &[Vec4]) -> Vec<Vec4> {
    let ctx = rows[0][0].ctx();
    let mut m = rows.to_vec();
    let r = rref(&mut m);
    let pivots: Vec<usize> = m[..r].iter().map(|row| row.iter().position(|c| !c.is_zero()).unwrap()).collect();
    let mut out = Vec::new();
    for free in (0..4).filter(|c| !pivots.contains(c)) {
        let mut v = [ctx.zero(); 4];
        v[free] = ctx.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[i][free];
        }
        out.push(v);
    }
    out
}

/// A projective line, stored as the RREF basis of its 2-dimensional span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    basis: [Vec4; 2],
}

impl ProjLine {
    pub fn through(a: &ProjPoint, b: &ProjPoint) -> Option<ProjLine> {
        let mut m = [a.0, b.0];
        if rref(&mut m) != 2 {
            return None;
        }
        Some(ProjLine { basis: m })
    }

    pub fn meet(a: &ProjPlane, b: &ProjPlane) -> Option<ProjLine> {
        let ns = null_space(&[a.0, b.0]);
        if ns.len() != 2 {
            return None;
        }
        let mut m = [ns[0], ns[1]];
        rref(&mut m);
        Some(ProjLine { basis: m })
    }

    pub fn basis(&self) -> &[Vec4; 2] {
        &self.basis
    }

    pub fn contains(&self, x: &ProjPoint) -> bool {
        rank(&[self.basis[0], self.basis[1], x.0]) == 2
    }

    /// Points of the line over the base field (p + 1 of them).
    pub fn points(&self) -> Vec<ProjPoint> {
        let ctx = self.basis[0][0].ctx();
        let mut out: Vec<ProjPoint> = ctx
            .elements()
            .map(|t| {
                let v: Vec4 = std::array::from_fn(|i| self.basis[0][i] + t * self.basis[1][i]);
                ProjPoint::new(v).unwrap()
            })
            .collect();
        out.push(ProjPoint::new(self.basis[1]).unwrap());
        out
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = ProjPoint(self.basis[0]);
        let b = ProjPoint(self.basis[1]);
        write!(f, "{a}∨{b}")
    }
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).fold(a[0][0].ctx().zero(), |s, k| s + a[i][k] * b[k][j])))
}

pub fn mat_vec(a: &Mat4, v: &Vec4) -> Vec4 {
    std::array::from_fn(|i| dot4(&a[i], v))
}

pub fn transpose(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn mat_inverse(a: &Mat4) -> Option<Mat4> {
    let ctx = a[0][0].ctx();
    let mut m: Vec<[FieldScalar; 8]> = (0..4)
        .map(|i| std::array::from_fn(|j| if j < 4 { a[i][j] } else if j - 4 == i { ctx.one() } else { ctx.zero() }))
        .collect();
    for col in 0..4 {
        let piv = (col..4).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let k = m[col][col].inv().unwrap();
        m[col] = m[col].map(|c| c * k);
        for i in 0..4 {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in 0..8 {
                    let t = m[col][j];
                    m[i][j] -= f * t;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| m[i][j + 4])))
}

pub fn identity4(ctx: &FieldCtx) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { ctx.one() } else { ctx.zero() }))
}

/// Invertible 4×4 matrix acting on FP³, up to scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjMap {
    m: Mat4,
    inv: Mat4,
}

impl ProjMap {
    pub fn new(m: Mat4) -> Option<Self> {
        mat_inverse(&m).map(|inv| ProjMap { m, inv })
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        let i = identity4(ctx);
        ProjMap { m: i, inv: i }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    pub fn apply(&self, x: &ProjPoint) -> ProjPoint {
        ProjPoint::new(mat_vec(&self.m, &x.0)).unwrap()
    }

    /// Image plane: π ↦ π·M⁻¹, so that x ∈ π iff M x ∈ image.
    pub fn apply_plane(&self, pl: &ProjPlane) -> ProjPlane {
        ProjPlane::new(mat_vec(&transpose(&self.inv), &pl.0)).unwrap()
    }

    pub fn compose(&self, o: &ProjMap) -> ProjMap {
        ProjMap { m: mat_mul(&self.m, &o.m), inv: mat_mul(&o.inv, &self.inv) }
    }

    pub fn inverse(&self) -> ProjMap {
        ProjMap { m: self.inv, inv: self.m }
    }

    /// Equality as projective maps (matrices up to a nonzero scalar).
    pub fn same_as(&self, o: &ProjMap) -> bool {
        let flat = |m: &Mat4| -> Vec<FieldScalar> { m.iter().flatten().copied().collect() };
        let (a, b) = (flat(&self.m), flat(&o.m));
        let i = a.iter().position(|c| !c.is_zero()).unwrap();
        if b[i].is_zero() {
            return false;
        }
        let k = a[i] / b[i];
        a.iter().zip(&b).all(|(x, y)| *x == *y * k)
    }
}

//! Arithmetic in F_p and its quadratic extension F_{p²} = F_p(ω), ω² = w
//! for a fixed non-residue w.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus {0} too large (must be below 2^31)")]
    TooLarge(u64),
}

/// Largest supported modulus (exclusive); keeps every product inside u64.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u64,
    nonresidue: u64,
}

impl FieldCtx {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        if p < 3 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        let half = (p - 1) / 2;
        let nonresidue = (2..p)
            .find(|&a| pow_mod(a, half, p) == p - 1)
            .expect("odd prime has a non-residue");
        Ok(FieldCtx { p, nonresidue })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The non-residue w with ω² = w.
    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn elem(&self, v: i64) -> FieldScalar {
        FieldScalar { c0: self.reduce(v), c1: 0, ctx: *self }
    }

    pub fn from_u64(&self, v: u64) -> FieldScalar {
        FieldScalar { c0: v % self.p, c1: 0, ctx: *self }
    }

    /// a0 + a1·ω
    pub fn ext(&self, a0: i64, a1: i64) -> FieldScalar {
        FieldScalar { c0: self.reduce(a0), c1: self.reduce(a1), ctx: *self }
    }

    pub fn zero(&self) -> FieldScalar {
        self.elem(0)
    }

    pub fn one(&self) -> FieldScalar {
        self.elem(1)
    }

    pub fn omega(&self) -> FieldScalar {
        self.ext(0, 1)
    }

    /// All elements of the base field in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldScalar> + '_ {
        (0..self.p).map(move |v| self.from_u64(v))
    }

    /// True iff −1 is a square, i.e. p ≡ 1 mod 4.
    pub fn has_isotropic(&self) -> bool {
        self.p % 4 == 1
    }

    /// χ(−1) as ±1.
    pub fn chi_minus_one(&self) -> i64 {
        if self.has_isotropic() {
            1
        } else {
            -1
        }
    }

    fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    Some(t0.rem_euclid(p as i64) as u64)
}

/// Element c0 + c1·ω of F_{p²}; base-field values have c1 = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    c0: u64,
    c1: u64,
    ctx: FieldCtx,
}

impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.c1, self.c0).cmp(&(other.c1, other.c0))
    }
}

impl FieldScalar {
    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn c0(&self) -> u64 {
        self.c0
    }

    pub fn c1(&self) -> u64 {
        self.c1
    }

    pub fn is_base(&self) -> bool {
        self.c1 == 0
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_one(&self) -> bool {
        self.c0 == 1 && self.c1 == 0
    }

    /// Residue of a base-field value.
    pub fn value(&self) -> u64 {
        debug_assert!(self.is_base(), "value() on an extension element");
        self.c0
    }

    /// Symmetric representative in (−p/2, p/2], base field only.
    pub fn signed(&self) -> i64 {
        let p = self.ctx.p;
        if self.c0 > p / 2 {
            self.c0 as i64 - p as i64
        } else {
            self.c0 as i64
        }
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut r = self.ctx.one();
        let mut b = self;
        while e > 0 {
            if e & 1 == 1 {
                r *= b;
            }
            b *= b;
            e >>= 1;
        }
        r
    }

    /// Galois conjugate c0 − c1·ω.
    pub fn frobenius(self) -> Self {
        let p = self.ctx.p;
        FieldScalar { c0: self.c0, c1: (p - self.c1) % p, ctx: self.ctx }
    }

    /// N(x) = x·x̄ ∈ F_p.
    fn norm_residue(&self) -> u64 {
        let p = self.ctx.p;
        let w = self.ctx.nonresidue;
        let a = self.c0 * self.c0 % p;
        let b = self.c1 * self.c1 % p * w % p;
        (a + p - b) % p
    }

    pub fn inv(self) -> Option<Self> {
        let p = self.ctx.p;
        if self.c1 == 0 {
            return inv_mod(self.c0, p).map(|c0| FieldScalar { c0, c1: 0, ctx: self.ctx });
        }
        let n_inv = inv_mod(self.norm_residue(), p)?;
        let conj = self.frobenius();
        Some(FieldScalar {
            c0: conj.c0 * n_inv % p,
            c1: conj.c1 * n_inv % p,
            ctx: self.ctx,
        })
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1 == 0 {
            write!(f, "{}", self.c0)
        } else if self.c0 == 0 {
            write!(f, "{}w", self.c1)
        } else {
            write!(f, "{}+{}w", self.c0, self.c1)
        }
    }
}

impl Add for FieldScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let p = self.ctx.p;
        FieldScalar { c0: (self.c0 + o.c0) % p, c1: (self.c1 + o.c1) % p, ctx: self.ctx }
    }
}

impl Sub for FieldScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let p = self.ctx.p;
        FieldScalar { c0: (self.c0 + p - o.c0) % p, c1: (self.c1 + p - o.c1) % p, ctx: self.ctx }
    }
}

impl Neg for FieldScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let p = self.ctx.p;
        FieldScalar { c0: (p - self.c0) % p, c1: (p - self.c1) % p, ctx: self.ctx }
    }
}

impl Mul for FieldScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.ctx, o.ctx);
        let p = self.ctx.p;
        if self.c1 == 0 && o.c1 == 0 {
            return FieldScalar { c0: self.c0 * o.c0 % p, c1: 0, ctx: self.ctx };
        }
        let w = self.ctx.nonresidue;
        let c0 = (self.c0 * o.c0 % p + self.c1 * o.c1 % p * w) % p;
        let c1 = (self.c0 * o.c1 % p + self.c1 * o.c0 % p) % p;
        FieldScalar { c0, c1, ctx: self.ctx }
    }
}

impl Div for FieldScalar {
    type Output = Self;
    /// Panics on division by zero; use [`FieldScalar::inv`] when the divisor may vanish.
    fn div(self, o: Self) -> Self {
        self * o.inv().expect("division by zero in finite field")
    }
}

impl AddAssign for FieldScalar {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for FieldScalar {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for FieldScalar {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

/// Legendre symbol of a base-field value.
pub fn quadratic_character(a: FieldScalar) -> i8 {
    assert!(a.is_base(), "quadratic_character needs a base-field value");
    if a.c0 == 0 {
        return 0;
    }
    let p = a.ctx.p;
    if pow_mod(a.c0, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SqrtResult {
    /// Root in F_p, present iff the character is ≥ 0.
    pub base: Option<FieldScalar>,
    /// Root in F_{p²}; always present and equal to `base` when that exists.
    pub ext: FieldScalar,
}

fn tonelli_shanks(a: u64, p: u64, nonresidue: u64) -> u64 {
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut m = s;
    let mut c = pow_mod(nonresidue, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    r
}

fn canonical(r: u64, p: u64) -> u64 {
    r.min((p - r) % p)
}

/// Square root of a base-field value, canonical representative in [0, p/2].
/// Non-squares get the root ω·c with c² = a/w.
pub fn sqrt_mod(a: FieldScalar) -> SqrtResult {
    assert!(a.is_base(), "sqrt_mod needs a base-field value");
    let ctx = a.ctx;
    let p = ctx.p;
    if quadratic_character(a) >= 0 {
        let r = ctx.from_u64(canonical(tonelli_shanks(a.c0, p, ctx.nonresidue), p));
        SqrtResult { base: Some(r), ext: r }
    } else {
        let w_inv = inv_mod(ctx.nonresidue, p).unwrap();
        let c = canonical(tonelli_shanks(a.c0 * w_inv % p, p, ctx.nonresidue), p);
        SqrtResult { base: None, ext: FieldScalar { c0: 0, c1: c, ctx } }
    }
}

/// Exhaustive-search square root used as a cross-check for small p.
pub fn sqrt_bruteforce(a: FieldScalar) -> SqrtResult {
    let ctx = a.ctx;
    let p = ctx.p;
    if let Some(r) = (0..=p / 2).find(|&r| r * r % p == a.c0) {
        let r = ctx.from_u64(r);
        return SqrtResult { base: Some(r), ext: r };
    }
    for c1 in 1..=p / 2 {
        for c0 in 0..p {
            let z = FieldScalar { c0, c1, ctx };
            if z * z == a {
                return SqrtResult { base: None, ext: z };
            }
        }
    }
    unreachable!("every base-field value is a square in F_p²")
}

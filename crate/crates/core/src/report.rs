//! Check records shared by the identity/inequality suites and the CLI.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// An exact rational, the square root of a nonnegative rational, or (for
/// irrational empirical constants only) a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Exact(BigRational),
    Sqrt(BigRational),
    Float(f64),
}

pub fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl Quantity {
    pub fn sqrt_of(r: BigRational) -> Self {
        assert!(!r.is_negative(), "square root of a negative quantity");
        Quantity::Sqrt(r)
    }

    pub fn approx(&self) -> f64 {
        match self {
            Quantity::Exact(r) => rat_to_f64(r),
            Quantity::Sqrt(r) => rat_to_f64(r).sqrt(),
            Quantity::Float(x) => *x,
        }
    }

    /// Exact comparison when neither side is a float.
    pub fn compare(&self, other: &Quantity) -> Option<Ordering> {
        use Quantity::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Some(a.cmp(b)),
            (Sqrt(a), Sqrt(b)) => Some(a.cmp(b)),
            (Exact(a), Sqrt(b)) => Some(if a.is_negative() {
                Ordering::Less
            } else {
                (a * a).cmp(b)
            }),
            (Sqrt(_), Exact(_)) => other.compare(self).map(Ordering::reverse),
            _ => self.approx().partial_cmp(&other.approx()),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(r) => write!(f, "{r}"),
            Quantity::Sqrt(r) => write!(f, "sqrt({r})"),
            Quantity::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Quantity", 2)?;
        st.serialize_field("repr", &self.to_string())?;
        st.serialize_field("value", &self.approx())?;
        st.end()
    }
}

macro_rules! quantity_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Quantity {
            fn from(v: $t) -> Self {
                Quantity::Exact(rat(v))
            }
        }
    )*};
}
quantity_from_int!(i64, u64, i128, u128, usize, BigInt);

impl From<BigRational> for Quantity {
    fn from(v: BigRational) -> Self {
        Quantity::Exact(v)
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Float(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    /// Diagnostic value with no relation checked.
    #[serde(rename = "report")]
    Report,
}

impl Relation {
    fn holds(self, o: Option<Ordering>) -> bool {
        match (self, o) {
            (Relation::Report, _) => true,
            (_, None) => false,
            (Relation::Eq, Some(o)) => o == Ordering::Equal,
            (Relation::Le, Some(o)) => o != Ordering::Greater,
            (Relation::Ge, Some(o)) => o != Ordering::Less,
            (Relation::Lt, Some(o)) => o == Ordering::Less,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub relation: Relation,
    pub pass: bool,
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(
        name: &str,
        anchor: &str,
        lhs: impl Into<Quantity>,
        relation: Relation,
        rhs: impl Into<Quantity>,
    ) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let pass = relation.holds(lhs.compare(&rhs));
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            relation,
            pass,
            asserted: relation != Relation::Report,
            note: None,
        }
    }

    pub fn eq(name: &str, anchor: &str, lhs: impl Into<Quantity>, rhs: impl Into<Quantity>) -> Self {
        Self::new(name, anchor, lhs, Relation::Eq, rhs)
    }

    pub fn le(name: &str, anchor: &str, lhs: impl Into<Quantity>, rhs: impl Into<Quantity>) -> Self {
        Self::new(name, anchor, lhs, Relation::Le, rhs)
    }

    /// Recorded but never counted as a failure.
    pub fn diagnostic(name: &str, anchor: &str, lhs: impl Into<Quantity>, relation: Relation, rhs: impl Into<Quantity>) -> Self {
        let mut r = Self::new(name, anchor, lhs, relation, rhs);
        r.asserted = false;
        r
    }

    /// A check that does not apply to this input; recorded as a pass.
    pub fn vacuous(name: &str, anchor: &str, why: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: Quantity::from(0u64),
            rhs: Quantity::from(0u64),
            relation: Relation::Report,
            pass: true,
            asserted: false,
            note: Some(why.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.asserted && !self.pass
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, r: CheckRecord) {
        self.checks.push(r);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        !self.checks.iter().any(CheckRecord::failed)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.failed()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Empirical constant lhs / rhs; zero when both vanish.
pub fn empirical_constant(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

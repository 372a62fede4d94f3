//! Closed bounded real intervals and the three subtraction notions.
//!
//! Endpoints are `f64` with round-to-nearest semantics. This is plain
//! interval arithmetic, not a validated (outward-rounded) enclosure library.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
///
/// Degenerate intervals `[x, x]` are ordinary values and embed the reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`, rejecting non-finite endpoints and `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(Error::Inverted { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    /// Builds the interval spanned by two reals in either order.
    pub fn hull(a: f64, b: f64) -> Result<Self> {
        Self::new(a.min(b), a.max(b))
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Minkowski sum `[a.lo + b.lo, a.hi + b.hi]`.
    pub fn add(&self, other: &Interval) -> Result<Interval> {
        let lo = self.lo + other.lo;
        let hi = self.hi + other.hi;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(Interval { lo, hi })
    }

    /// `[-hi, -lo]`.
    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Minkowski difference `[a.lo - b.hi, a.hi - b.lo]`, i.e. `a + (-b)`.
    pub fn minkowski_sub(&self, other: &Interval) -> Result<Interval> {
        self.add(&other.neg())
    }

    /// `p * [lo, hi]`, swapping endpoints when `p < 0`.
    pub fn scale(&self, p: f64) -> Result<Interval> {
        if !p.is_finite() {
            return Err(Error::NonFiniteScalar(p));
        }
        let (lo, hi) = if p >= 0.0 {
            (p * self.lo, p * self.hi)
        } else {
            (p * self.hi, p * self.lo)
        };
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Overflow);
        }
        // 0 * x and p * 0 can produce -0.0; keep the zero interval canonical.
        Ok(Interval {
            lo: lo + 0.0,
            hi: hi + 0.0,
        })
    }

    /// Hausdorff distance `max(|a.lo - b.lo|, |a.hi - b.hi|)`.
    pub fn hausdorff(&self, other: &Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    /// Hukuhara difference: the `c` with `other + c == self`, when one exists.
    ///
    /// Returns `None` when `self.lo - other.lo > self.hi - other.hi`, i.e.
    /// `other` is wider than `self`.
    pub fn h_diff(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo - other.lo;
        let hi = self.hi - other.hi;
        (lo <= hi && lo.is_finite() && hi.is_finite()).then_some(Interval { lo, hi })
    }

    /// Generalized Hukuhara difference. Total, and equal to [`Interval::h_diff`]
    /// whenever that exists.
    pub fn gh_diff(&self, other: &Interval) -> Result<Interval> {
        let a = self.lo - other.lo;
        let b = self.hi - other.hi;
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(Interval {
            lo: a.min(b),
            hi: a.max(b),
        })
    }

    /// Endpoint-wise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Interval, tol: f64) -> bool {
        self.hausdorff(other) <= tol
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            lo: f64,
            hi: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        Interval::new(raw.lo, raw.hi).map_err(serde::de::Error::custom)
    }
}

/// An ordered, nonempty tuple of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(items: Vec<Interval>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self(items))
    }

    /// Builds from flat `lo hi lo hi ...` pairs.
    pub fn from_pairs(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::OddPairs(flat.len()));
        }
        let items = flat
            .chunks_exact(2)
            .map(|c| Interval::new(c[0], c[1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    /// Lower endpoint vector `(k1.lo, ..., kn.lo)`.
    pub fn lower(&self) -> Vec<f64> {
        self.0.iter().map(Interval::lo).collect()
    }

    /// Upper endpoint vector `(k1.hi, ..., kn.hi)`.
    pub fn upper(&self) -> Vec<f64> {
        self.0.iter().map(Interval::hi).collect()
    }
}

impl TryFrom<Vec<Interval>> for IntervalVector {
    type Error = Error;

    fn try_from(items: Vec<Interval>) -> Result<Self> {
        Self::new(items)
    }
}

impl From<IntervalVector> for Vec<Interval> {
    fn from(v: IntervalVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for IntervalVector {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

//! The gH-product of a real vector with a tuple of intervals.
//!
//! For `v` and `K = (K1, ..., Kn)` split the indices into `j+ = {i : v_i >= 0}`
//! and `j- = {i : v_i < 0}` and form
//!
//! ```text
//! p = sum_{j+} v_i K_i.lo - sum_{j-} |v_i| K_i.lo
//! q = sum_{j+} v_i K_i.hi - sum_{j-} |v_i| K_i.hi
//! <v, K>_gH = [min(p, q), max(p, q)]
//! ```
//!
//! which equals the gH-difference of the two Minkowski partial sums. Unlike
//! the Minkowski dot product ([`ghosh_dot`]) it gives `<(1,-1), (K1,K1)> = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};

/// Absolute tolerance used by [`is_gh_orthogonal`] on dot products.
pub const ORTHO_TOL: f64 = 1e-12;

/// A nonempty vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(items: Vec<f64>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&bad) = items.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteScalar(bad));
        }
        Ok(Self(items))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| lambda * x).collect())
    }

    pub fn sum(&self, other: &RealVector) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn abs(&self) -> Self {
        Self(self.0.iter().map(|x| x.abs()).collect())
    }

    /// Compensated dot product with a plain real vector.
    pub fn dot(&self, xs: &[f64]) -> f64 {
        let mut acc = NeumaierSum::default();
        for (a, b) in self.0.iter().zip(xs) {
            acc.add(a * b);
        }
        acc.value()
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(items: Vec<f64>) -> Result<Self> {
        Self::new(items)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::Dimension { left, right });
    }
    Ok(())
}

/// Minkowski dot product `sum_i v_i * K_i`.
pub fn ghosh_dot(v: &RealVector, k: &IntervalVector) -> Result<Interval> {
    check_len(v.len(), k.len())?;
    v.as_slice()
        .iter()
        .zip(k.iter())
        .try_fold(Interval::ZERO, |acc, (&vi, ki)| acc.add(&ki.scale(vi)?))
}

/// The gH-product `<v, K>_gH`, computed by the single-pass p/q formula.
pub fn gh_product(v: &RealVector, k: &IntervalVector) -> Result<Interval> {
    check_len(v.len(), k.len())?;
    let mut p = NeumaierSum::default();
    let mut q = NeumaierSum::default();
    for (&vi, ki) in v.as_slice().iter().zip(k.iter()) {
        // j- terms enter as -|v_i| K_i, which is v_i K_i endpoint-wise
        // (no endpoint swap), so both index sets reduce to the same update.
        p.add(vi * ki.lo());
        q.add(vi * ki.hi());
    }
    let (p, q) = (p.value() + 0.0, q.value() + 0.0);
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::Overflow);
    }
    Interval::hull(p, q)
}

/// `<lambda v, K>_gH`.
pub fn scale_product(lambda: f64, v: &RealVector, k: &IntervalVector) -> Result<Interval> {
    if !lambda.is_finite() {
        return Err(Error::NonFiniteScalar(lambda));
    }
    gh_product(&v.scaled(lambda)?, k)
}

/// Whether `v` is orthogonal to both endpoint vectors of `K`, which holds
/// exactly when `<v, K>_gH = [0, 0]`.
pub fn is_gh_orthogonal(v: &RealVector, k: &IntervalVector) -> Result<bool> {
    is_gh_orthogonal_tol(v, k, ORTHO_TOL)
}

pub fn is_gh_orthogonal_tol(v: &RealVector, k: &IntervalVector, tol: f64) -> Result<bool> {
    check_len(v.len(), k.len())?;
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.dot(&k.lower()).abs() <= tol && v.dot(&k.upper()).abs() <= tol)
}

/// Sufficient condition for `<v + w, K>_gH = <v, K>_gH + <w, K>_gH`: both
/// vectors order the endpoint dot products the same way.
pub fn linearity_holds(v: &RealVector, w: &RealVector, k: &IntervalVector) -> Result<bool> {
    check_len(v.len(), k.len())?;
    check_len(w.len(), k.len())?;
    let (lo, hi) = (k.lower(), k.upper());
    let (vl, vu) = (v.dot(&lo), v.dot(&hi));
    let (wl, wu) = (w.dot(&lo), w.dot(&hi));
    Ok((vl <= vu && wl <= wu) || (vl >= vu && wl >= wu))
}

//! gH-partial derivatives by one-sided difference-quotient analysis.
//!
//! Fix every coordinate of `x` except `x_i` and study, for each endpoint `f`
//! and each side, the quotients `(f(x + t e_i) - f(x)) / t` along a geometric
//! sequence of steps. Each branch channel of an endpoint gives one sequence
//! and, when it settles, one limit. These limits feed the four-case
//! characterization:
//!
//! 1. all four one-sided endpoint derivatives exist and the right pair and the
//!    left pair span the same interval;
//! 2. the right pair exists and the left quotients are complementary with
//!    cluster set `{kL, kU}` equal to the right interval;
//! 3. the mirror image of 2;
//! 4. both sides are complementary with the same `{kL, kU}`.
//!
//! Anything else is a proof of non-existence. A sequence that never settles
//! makes the whole report [`Status::Inconclusive`]. A noisy profile is never
//! forced into an answer.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Branch, EvalError, IvfSpec, Which};
use crate::interval::Interval;

/// Smallest number of noise-free samples needed to judge a limit.
pub const MIN_SAMPLES: usize = 4;

/// Highest Richardson order tried when the raw tail has not settled.
const MAX_RICHARDSON: usize = 3;

/// Steps below `FLOOR_FACTOR * eps * max(1, |x_i|)` are not sampled.
const FLOOR_FACTOR: f64 = 1e3;

/// Samples whose rounding bound exceeds `limit_tol / NOISE_DIVISOR` are
/// excluded from limit detection.
const NOISE_DIVISOR: f64 = 16.0;

/// Geometric step schedule and tolerances for limit detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// First step size.
    pub t0: f64,
    /// Step decay, in `(0, 1)`.
    pub ratio: f64,
    /// Samples per side per branch.
    pub count: usize,
    /// Spread below which a tail counts as converged.
    pub limit_tol: f64,
    /// Radius for merging limits into cluster points.
    pub cluster_tol: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            t0: 1e-2,
            ratio: 0.5,
            count: 32,
            limit_tol: 1e-5,
            cluster_tol: 1e-4,
        }
    }
}

impl SamplingPlan {
    /// Range checks, plus at least [`MIN_SAMPLES`] steps above the
    /// cancellation floor at a coordinate of magnitude `scale`.
    pub fn validate(&self, scale: f64) -> Result<(), CalculusError> {
        let bad = |msg: String| Err(CalculusError::Plan(msg));
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return bad(format!("t0 must be positive and finite, got {}", self.t0));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return bad(format!("ratio must lie in (0, 1), got {}", self.ratio));
        }
        if self.count == 0 {
            return bad("count must be positive".into());
        }
        if !(self.limit_tol.is_finite() && self.limit_tol > 0.0) {
            return bad(format!(
                "limit_tol must be positive, got {}",
                self.limit_tol
            ));
        }
        if !(self.cluster_tol.is_finite() && self.cluster_tol > 0.0) {
            return bad(format!(
                "cluster_tol must be positive, got {}",
                self.cluster_tol
            ));
        }
        let usable = self.steps(scale).len();
        if usable < MIN_SAMPLES {
            return bad(format!(
                "only {usable} of {} steps lie above the cancellation floor {:.3e}; need {MIN_SAMPLES}",
                self.count,
                cancellation_floor(scale)
            ));
        }
        Ok(())
    }

    /// Positive step magnitudes `t0 * ratio^k` above the cancellation floor.
    pub fn steps(&self, scale: f64) -> Vec<f64> {
        let floor = cancellation_floor(scale);
        let mut out = Vec::with_capacity(self.count);
        let mut t = self.t0;
        for _ in 0..self.count {
            if t <= floor {
                break;
            }
            out.push(t);
            t *= self.ratio;
        }
        out
    }
}

fn cancellation_floor(scale: f64) -> f64 {
    FLOOR_FACTOR * f64::EPSILON * scale.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("invalid sampling plan: {0}")]
    Plan(String),
    #[error("coordinate {index} is out of range for arity {arity}")]
    Coordinate { index: usize, arity: usize },
    #[error("point has {got} coordinates, function takes {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("point coordinates must be finite")]
    NonFinitePoint,
    #[error("evaluating {which} branch '{label}' at {point:?}: {source}")]
    Eval {
        which: Which,
        label: String,
        point: Vec<f64>,
        source: EvalError,
    },
    #[error("the {which} endpoint has no branch defined at {point:?}")]
    UndefinedAtPoint { which: Which, point: Vec<f64> },
    #[error("branches of the {which} endpoint disagree at {point:?}: {values:?}")]
    AmbiguousValue {
        which: Which,
        point: Vec<f64>,
        values: Vec<f64>,
    },
    #[error("lower endpoint {lower} exceeds upper endpoint {upper} at {point:?} (branches '{lower_label}'/'{upper_label}')")]
    Ordering {
        point: Vec<f64>,
        lower: f64,
        upper: f64,
        lower_label: String,
        upper_label: String,
    },
}

/// One difference quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    /// Signed step actually taken.
    pub t: f64,
    /// `f(x + t e_i)`.
    pub value: f64,
    /// `(f(x + t e_i) - f(x)) / t`.
    pub quotient: f64,
    /// Rounding-error bound on `quotient`.
    pub noise: f64,
}

/// Quotient sequence of one branch channel and its limit, if it settled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchQuotients {
    pub label: String,
    pub samples: Vec<Sample>,
    pub limit: Option<f64>,
    /// Richardson order at which the tail settled.
    pub order: Option<usize>,
    /// Tail spread at the last order tried.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "state", content = "reason", rename_all = "snake_case")]
pub enum ProfileState {
    Settled,
    /// No branch is defined on this side of the point.
    Undefined,
    Inconclusive(String),
}

/// One-sided quotient analysis of one endpoint along one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientProfile {
    pub which: Which,
    pub side: Side,
    pub coord: usize,
    pub state: ProfileState,
    pub branches: Vec<BranchQuotients>,
    /// Tolerance-merged accumulation points of the quotients, ascending.
    pub cluster_set: Vec<f64>,
    /// Limit of the pointwise minimum across branches.
    pub min_limit: Option<f64>,
    /// Limit of the pointwise maximum across branches.
    pub max_limit: Option<f64>,
}

impl QuotientProfile {
    pub fn is_settled(&self) -> bool {
        self.state == ProfileState::Settled
    }

    /// The one-sided derivative: present when every branch settled on the
    /// same value.
    pub fn one_sided(&self) -> Option<f64> {
        match (self.is_settled(), self.cluster_set.as_slice()) {
            (true, [c]) => Some(*c),
            _ => None,
        }
    }

    fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.branches.iter().map(|b| b.label.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Convention used to pair lower and upper channels at a common step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Both endpoints carry the same channel labels; pair like with like.
    LabelMatched,
    /// Label sets differ; pair every lower channel with every upper one.
    CrossProduct,
}

fn pairing_for(lower: &QuotientProfile, upper: &QuotientProfile) -> Pairing {
    if lower.labels() == upper.labels() {
        Pairing::LabelMatched
    } else {
        Pairing::CrossProduct
    }
}

fn pairs<'a>(
    lower: &'a QuotientProfile,
    upper: &'a QuotientProfile,
    pairing: Pairing,
) -> Vec<(&'a BranchQuotients, &'a BranchQuotients)> {
    let mut out = Vec::new();
    for a in &lower.branches {
        for b in &upper.branches {
            if pairing == Pairing::CrossProduct || a.label == b.label {
                out.push((a, b));
            }
        }
    }
    out
}

/// Outcome of the complementarity test on one side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Complementarity {
    pub pairing: Pairing,
    /// `(kL, kU)` when the quotient functions are complementary.
    pub pair: Option<(f64, f64)>,
    pub min_limit: Option<f64>,
    pub max_limit: Option<f64>,
    /// Why complementarity fails, when it does.
    pub failure: Option<String>,
}

/// Complementarity of lower and upper quotient functions on one side: both
/// share the two-point cluster set `{kL, kU}` with `kL < kU`, and the
/// pointwise min and max across paired channels converge to `kL` and `kU`.
pub fn complementary(
    lower: &QuotientProfile,
    upper: &QuotientProfile,
    cluster_tol: f64,
) -> Option<(f64, f64)> {
    complementarity(lower, upper, cluster_tol).pair
}

pub fn complementarity(
    lower: &QuotientProfile,
    upper: &QuotientProfile,
    cluster_tol: f64,
) -> Complementarity {
    let pairing = pairing_for(lower, upper);
    let mut out = Complementarity {
        pairing,
        pair: None,
        min_limit: None,
        max_limit: None,
        failure: None,
    };
    if !lower.is_settled() || !upper.is_settled() {
        out.failure = Some("quotients did not settle".into());
        return out;
    }
    // min and max commute with limits, so the pointwise min/max of a pair of
    // convergent channels converges to the min/max of their limits. The
    // interleaved function has a limit only if every pair agrees.
    let mut mins = Vec::new();
    let mut maxs = Vec::new();
    for (a, b) in pairs(lower, upper, pairing) {
        if let (Some(x), Some(y)) = (a.limit, b.limit) {
            mins.push(x.min(y));
            maxs.push(x.max(y));
        }
    }
    out.min_limit = single_cluster(&mins, cluster_tol);
    out.max_limit = single_cluster(&maxs, cluster_tol);

    let (cl, cu) = (&lower.cluster_set, &upper.cluster_set);
    if cl.len() != 2 || cu.len() != 2 {
        out.failure = Some(format!(
            "cluster sets {} and {} are not both two-point sets",
            fmt_set(cl),
            fmt_set(cu)
        ));
        return out;
    }
    if (cl[0] - cu[0]).abs() > cluster_tol || (cl[1] - cu[1]).abs() > cluster_tol {
        out.failure = Some(format!(
            "cluster sets differ: {} vs {}",
            fmt_set(cl),
            fmt_set(cu)
        ));
        return out;
    }
    let (kl, ku) = ((cl[0] + cu[0]) / 2.0, (cl[1] + cu[1]) / 2.0);
    match (out.min_limit, out.max_limit) {
        (Some(lo), Some(hi))
            if (lo - kl).abs() <= cluster_tol && (hi - ku).abs() <= cluster_tol =>
        {
            out.pair = Some((kl, ku));
        }
        (lo, hi) => {
            out.failure = Some(format!(
                "pointwise min/max limits are {} / {}, need {} / {}",
                fmt_opt(lo, &mins),
                fmt_opt(hi, &maxs),
                kl,
                ku
            ));
        }
    }
    out
}

fn fmt_set(xs: &[f64]) -> String {
    let inner: Vec<String> = xs
        .iter()
        .map(|x| format!("{}", round_for_display(*x)))
        .collect();
    format!("{{{}}}", inner.join(", "))
}

fn fmt_opt(x: Option<f64>, candidates: &[f64]) -> String {
    match x {
        Some(v) => format!("{}", round_for_display(v)),
        None => {
            let mut c = candidates.to_vec();
            c.sort_by(f64::total_cmp);
            format!(
                "none (oscillates over {})",
                fmt_set(&merge_clusters(&c, 1e-9))
            )
        }
    }
}

fn round_for_display(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Single-linkage merge of values into cluster centres, ascending.
fn merge_clusters(values: &[f64], radius: f64) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut centres = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    for v in sorted {
        if let Some(&last) = group.last() {
            if v - last > radius {
                centres.push(group.iter().sum::<f64>() / group.len() as f64);
                group.clear();
            }
        }
        group.push(v);
    }
    if !group.is_empty() {
        centres.push(group.iter().sum::<f64>() / group.len() as f64);
    }
    centres
}

fn single_cluster(values: &[f64], radius: f64) -> Option<f64> {
    match merge_clusters(values, radius).as_slice() {
        [c] => Some(*c),
        _ => None,
    }
}

/// Result of tail analysis on one quotient sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LimitEstimate {
    value: Option<f64>,
    order: Option<usize>,
    spread: f64,
}

/// One Richardson elimination step for errors of order `t^power` on a
/// geometric step sequence with the given ratio.
fn richardson_step(seq: &[f64], ratio: f64, power: i32) -> Vec<f64> {
    let r = ratio.powi(power);
    seq.windows(2)
        .map(|w| (w[1] - r * w[0]) / (1.0 - r))
        .collect()
}

fn tail_spread(seq: &[f64]) -> f64 {
    let n = seq.len();
    let tail = &seq[n - n.div_ceil(3).max(3).min(n)..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

/// Limit of a quotient sequence taken along `t_k = t0 * ratio^k`.
///
/// Only the prefix above the rounding-noise floor is used. The raw tail (the
/// final third) is tried first. When its spread is under `limit_tol`, the
/// last four terms are Richardson-extrapolated and the extrapolated value is
/// reported if it moved by less than `limit_tol`. Otherwise the tail is
/// re-examined after eliminating the `t`, `t^2`, `t^3` error terms in turn.
fn estimate_limit(samples: &[Sample], ratio: f64, limit_tol: f64) -> LimitEstimate {
    let noise_cap = limit_tol / NOISE_DIVISOR;
    let quotients: Vec<f64> = samples
        .iter()
        .take_while(|s| s.noise <= noise_cap)
        .map(|s| s.quotient)
        .collect();
    if quotients.len() < MIN_SAMPLES {
        return LimitEstimate {
            value: None,
            order: None,
            spread: f64::INFINITY,
        };
    }
    let mut seq = quotients;
    let mut spread = f64::INFINITY;
    for order in 0..=MAX_RICHARDSON {
        if order > 0 {
            seq = richardson_step(&seq, ratio, order as i32);
        }
        if seq.len() < 3 {
            break;
        }
        spread = tail_spread(&seq);
        if spread < limit_tol {
            let last = seq[seq.len() - 1];
            let value = if order == 0 {
                let mut tail = seq[seq.len() - MIN_SAMPLES..].to_vec();
                for p in 1..MIN_SAMPLES as i32 {
                    tail = richardson_step(&tail, ratio, p);
                }
                if (tail[0] - last).abs() < limit_tol {
                    tail[0]
                } else {
                    last
                }
            } else {
                last
            };
            return LimitEstimate {
                value: Some(value),
                order: Some(order),
                spread,
            };
        }
    }
    LimitEstimate {
        value: None,
        order: None,
        spread,
    }
}

fn check_point(spec: &IvfSpec, point: &[f64], coord: usize) -> Result<(), CalculusError> {
    if point.len() != spec.arity() {
        return Err(CalculusError::PointLength {
            expected: spec.arity(),
            got: point.len(),
        });
    }
    if coord >= spec.arity() {
        return Err(CalculusError::Coordinate {
            index: coord,
            arity: spec.arity(),
        });
    }
    if point.iter().any(|x| !x.is_finite()) {
        return Err(CalculusError::NonFinitePoint);
    }
    Ok(())
}

fn eval_branch(which: Which, b: &Branch, point: &[f64]) -> Result<f64, CalculusError> {
    b.expr.eval(point).map_err(|source| CalculusError::Eval {
        which,
        label: b.label.clone(),
        point: point.to_vec(),
        source,
    })
}

/// The endpoint value at the point itself, from the branches whose guards
/// hold there. They must agree.
fn value_at_point(spec: &IvfSpec, which: Which, point: &[f64]) -> Result<f64, CalculusError> {
    let mut values = Vec::new();
    for b in spec.endpoint(which).branches() {
        if b.applies_at(point) {
            values.push(eval_branch(which, b, point)?);
        }
    }
    let Some(&first) = values.first() else {
        return Err(CalculusError::UndefinedAtPoint {
            which,
            point: point.to_vec(),
        });
    };
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if values
        .iter()
        .any(|v| (v - first).abs() > 64.0 * f64::EPSILON * scale)
    {
        return Err(CalculusError::AmbiguousValue {
            which,
            point: point.to_vec(),
            values,
        });
    }
    Ok(first)
}

/// Samples the one-sided difference quotients of one endpoint.
///
/// A branch takes part on a side when its guard holds at the smallest step;
/// larger steps where the guard fails are dropped. The base value `f(x)`
/// comes from the branch itself when its guard holds at `x`, and otherwise
/// from the branches that are defined at `x`.
pub fn quotient_profile(
    spec: &IvfSpec,
    which: Which,
    point: &[f64],
    coord: usize,
    side: Side,
    plan: &SamplingPlan,
) -> Result<QuotientProfile, CalculusError> {
    check_point(spec, point, coord)?;
    let x = point[coord];
    plan.validate(x)?;
    let steps = plan.steps(x);
    let shared_base = value_at_point(spec, which, point);

    let mut probe = point.to_vec();
    let mut branches = Vec::new();
    for b in spec.endpoint(which).branches() {
        probe[coord] = x + side.sign() * steps[steps.len() - 1];
        if !b.applies_at(&probe) {
            continue;
        }
        let base = if b.applies_at(point) {
            eval_branch(which, b, point)?
        } else {
            shared_base.clone()?
        };
        let mut samples = Vec::with_capacity(steps.len());
        for &t in &steps {
            probe[coord] = x + side.sign() * t;
            if !b.applies_at(&probe) {
                continue;
            }
            let h = probe[coord] - x;
            let value = eval_branch(which, b, &probe)?;
            let quotient = (value - base) / h;
            // Values near zero are usually the result of cancellation between
            // terms of order one, so their rounding error is measured against
            // at least unit magnitude.
            let magnitude = value.abs().max(base.abs()).max(1.0);
            let noise = 8.0 * f64::EPSILON * magnitude / h.abs() + f64::EPSILON * quotient.abs();
            samples.push(Sample {
                t: h,
                value,
                quotient,
                noise,
            });
        }
        let est = estimate_limit(&samples, plan.ratio, plan.limit_tol);
        branches.push(BranchQuotients {
            label: b.label.clone(),
            samples,
            limit: est.value,
            order: est.order,
            spread: est.spread,
        });
    }

    let limits: Vec<f64> = branches.iter().filter_map(|b| b.limit).collect();
    let unsettled: Vec<&str> = branches
        .iter()
        .filter(|b| b.limit.is_none())
        .map(|b| b.label.as_str())
        .collect();
    let state = if branches.is_empty() {
        ProfileState::Undefined
    } else if !unsettled.is_empty() {
        let worst = branches
            .iter()
            .filter(|b| b.limit.is_none())
            .map(|b| b.spread)
            .fold(0.0_f64, f64::max);
        ProfileState::Inconclusive(format!(
            "{which} {side} quotients of branch(es) {} did not settle (tail spread {worst:.3e})",
            unsettled.join(", ")
        ))
    } else {
        ProfileState::Settled
    };
    let all = state == ProfileState::Settled;
    Ok(QuotientProfile {
        which,
        side,
        coord,
        state,
        cluster_set: merge_clusters(&limits, plan.cluster_tol),
        min_limit: if all {
            limits.iter().copied().reduce(f64::min)
        } else {
            None
        },
        max_limit: if all {
            limits.iter().copied().reduce(f64::max)
        } else {
            None
        },
        branches,
    })
}

/// One-sided partial derivative of one endpoint, present only when every
/// branch settles on a common limit.
pub fn endpoint_one_sided(
    spec: &IvfSpec,
    which: Which,
    point: &[f64],
    coord: usize,
    side: Side,
    plan: &SamplingPlan,
) -> Result<Option<f64>, CalculusError> {
    Ok(quotient_profile(spec, which, point, coord, side, plan)?.one_sided())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exists,
    NotExists,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exists => "exists",
            Status::NotExists => "not_exists",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Which branch of the characterization produced the derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    I,
    Ii,
    Iii,
    Iv,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "i",
            Case::Ii => "ii",
            Case::Iii => "iii",
            Case::Iv => "iv",
        })
    }
}

/// One-sided findings for both endpoints on one side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideSummary {
    pub side: Side,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub complementarity: Complementarity,
}

impl SideSummary {
    /// `[min, max]` of the one-sided endpoint derivatives, when both exist.
    pub fn pair_interval(&self) -> Option<Interval> {
        Interval::hull(self.lower?, self.upper?).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub coord: usize,
    pub status: Status,
    pub value: Option<Interval>,
    pub case: Option<Case>,
    pub reason: String,
    pub right: SideSummary,
    pub left: SideSummary,
    /// Lower-right, upper-right, lower-left, upper-left.
    pub profiles: Vec<QuotientProfile>,
}

impl DerivativeReport {
    pub fn exists(&self) -> bool {
        self.status == Status::Exists
    }
}

fn summarize(
    side: Side,
    lower: &QuotientProfile,
    upper: &QuotientProfile,
    tol: f64,
) -> SideSummary {
    SideSummary {
        side,
        lower: lower.one_sided(),
        upper: upper.one_sided(),
        complementarity: complementarity(lower, upper, tol),
    }
}

fn fmt_interval(iv: &Interval) -> String {
    format!(
        "[{}, {}]",
        round_for_display(iv.lo()),
        round_for_display(iv.hi())
    )
}

/// Verdict of the four-case characterization from already computed profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub value: Option<Interval>,
    pub case: Option<Case>,
    pub reason: String,
    pub right: SideSummary,
    pub left: SideSummary,
}

/// Applies the four-case characterization to the four quotient profiles.
///
/// The result depends on the endpoint profiles only through `[min, max]`
/// constructions and set comparisons, so exchanging the lower and upper
/// profiles leaves it unchanged.
pub fn classify(
    right_lower: &QuotientProfile,
    right_upper: &QuotientProfile,
    left_lower: &QuotientProfile,
    left_upper: &QuotientProfile,
    cluster_tol: f64,
) -> Verdict {
    let right = summarize(Side::Right, right_lower, right_upper, cluster_tol);
    let left = summarize(Side::Left, left_lower, left_upper, cluster_tol);
    let verdict = |status, value, case, reason: String| Verdict {
        status,
        value,
        case,
        reason,
        right: right.clone(),
        left: left.clone(),
    };
    let all = [right_lower, right_upper, left_lower, left_upper];

    if let Some(p) = all.iter().find(|p| p.state == ProfileState::Undefined) {
        return verdict(
            Status::NotExists,
            None,
            None,
            format!(
                "the function is not defined on the punctured {} neighbourhood along x{}",
                p.side,
                p.coord + 1
            ),
        );
    }
    if let Some(ProfileState::Inconclusive(why)) = all
        .iter()
        .map(|p| &p.state)
        .find(|s| **s != ProfileState::Settled)
    {
        return verdict(Status::Inconclusive, None, None, why.clone());
    }

    let same = |a: &Interval, b: &Interval| a.hausdorff(b) <= cluster_tol;
    let kpair = |(kl, ku): (f64, f64)| Interval::new(kl, ku).ok();
    let failure = |c: &Complementarity| c.failure.clone().unwrap_or_default();

    match (right.pair_interval(), left.pair_interval()) {
        (Some(r), Some(l)) => {
            if same(&r, &l) {
                verdict(
                    Status::Exists,
                    Some(r),
                    Some(Case::I),
                    "one-sided endpoint derivatives agree as intervals".into(),
                )
            } else {
                verdict(
                    Status::NotExists,
                    None,
                    None,
                    format!("right {} ≠ left {}", fmt_interval(&r), fmt_interval(&l)),
                )
            }
        }
        (Some(r), None) => match left.complementarity.pair.and_then(kpair) {
            Some(k) if same(&k, &r) => verdict(
                Status::Exists,
                Some(k),
                Some(Case::Ii),
                "right pair exists; left quotients are complementary with the same cluster points"
                    .into(),
            ),
            Some(k) => verdict(
                Status::NotExists,
                None,
                None,
                format!(
                    "left complementary pair {} ≠ right {}",
                    fmt_interval(&k),
                    fmt_interval(&r)
                ),
            ),
            None => verdict(
                Status::NotExists,
                None,
                None,
                format!(
                    "right pair {} exists but left quotients are not complementary: {}",
                    fmt_interval(&r),
                    failure(&left.complementarity)
                ),
            ),
        },
        (None, Some(l)) => match right.complementarity.pair.and_then(kpair) {
            Some(k) if same(&k, &l) => verdict(
                Status::Exists,
                Some(k),
                Some(Case::Iii),
                "left pair exists; right quotients are complementary with the same cluster points"
                    .into(),
            ),
            Some(k) => verdict(
                Status::NotExists,
                None,
                None,
                format!(
                    "right complementary pair {} ≠ left {}",
                    fmt_interval(&k),
                    fmt_interval(&l)
                ),
            ),
            None => verdict(
                Status::NotExists,
                None,
                None,
                format!(
                    "left pair {} exists but right quotients are not complementary: {}",
                    fmt_interval(&l),
                    failure(&right.complementarity)
                ),
            ),
        },
        (None, None) => {
            let r = right.complementarity.pair.and_then(kpair);
            let l = left.complementarity.pair.and_then(kpair);
            match (r, l) {
                (Some(r), Some(l)) if same(&r, &l) => verdict(
                    Status::Exists,
                    Some(r),
                    Some(Case::Iv),
                    "both sides are complementary with the same cluster points".into(),
                ),
                (Some(r), Some(l)) => verdict(
                    Status::NotExists,
                    None,
                    None,
                    format!(
                        "right complementary pair {} ≠ left {}",
                        fmt_interval(&r),
                        fmt_interval(&l)
                    ),
                ),
                (None, _) => verdict(
                    Status::NotExists,
                    None,
                    None,
                    format!(
                        "no right pair and right quotients are not complementary: {}",
                        failure(&right.complementarity)
                    ),
                ),
                (_, None) => verdict(
                    Status::NotExists,
                    None,
                    None,
                    format!(
                        "no left pair and left quotients are not complementary: {}",
                        failure(&left.complementarity)
                    ),
                ),
            }
        }
    }
}

/// Checks `lower <= upper` on paired channels at every common step.
fn check_ordering(
    lower: &QuotientProfile,
    upper: &QuotientProfile,
    point: &[f64],
) -> Result<(), CalculusError> {
    for (a, b) in pairs(lower, upper, pairing_for(lower, upper)) {
        for sa in &a.samples {
            if let Some(sb) = b.samples.iter().find(|s| s.t == sa.t) {
                let slack = 64.0 * f64::EPSILON * sa.value.abs().max(sb.value.abs()).max(1.0);
                if sa.value > sb.value + slack {
                    let mut p = point.to_vec();
                    p[lower.coord] += sa.t;
                    return Err(CalculusError::Ordering {
                        point: p,
                        lower: sa.value,
                        upper: sb.value,
                        lower_label: a.label.clone(),
                        upper_label: b.label.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// gH-partial derivative with respect to coordinate `coord` (zero-based).
pub fn gh_partial(
    spec: &IvfSpec,
    point: &[f64],
    coord: usize,
    plan: &SamplingPlan,
) -> Result<DerivativeReport, CalculusError> {
    check_point(spec, point, coord)?;
    plan.validate(point[coord])?;
    let lo = value_at_point(spec, Which::Lower, point)?;
    let hi = value_at_point(spec, Which::Upper, point)?;
    if lo > hi + 64.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        return Err(CalculusError::Ordering {
            point: point.to_vec(),
            lower: lo,
            upper: hi,
            lower_label: "(at point)".into(),
            upper_label: "(at point)".into(),
        });
    }
    let profile = |which, side| quotient_profile(spec, which, point, coord, side, plan);
    let rl = profile(Which::Lower, Side::Right)?;
    let ru = profile(Which::Upper, Side::Right)?;
    let ll = profile(Which::Lower, Side::Left)?;
    let lu = profile(Which::Upper, Side::Left)?;
    check_ordering(&rl, &ru, point)?;
    check_ordering(&ll, &lu, point)?;
    let v = classify(&rl, &ru, &ll, &lu, plan.cluster_tol);
    Ok(DerivativeReport {
        coord,
        status: v.status,
        value: v.value,
        case: v.case,
        reason: v.reason,
        right: v.right,
        left: v.left,
        profiles: vec![rl, ru, ll, lu],
    })
}

/// gH-gradient: one report per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub components: Vec<DerivativeReport>,
}

impl GradientReport {
    pub fn exists(&self) -> bool {
        self.components.iter().all(DerivativeReport::exists)
    }

    /// The gradient vector, when every component exists.
    pub fn value(&self) -> Option<Vec<Interval>> {
        self.components.iter().map(|c| c.value).collect()
    }
}

/// Computes every gH-partial derivative, one thread per coordinate.
pub fn gh_gradient(
    spec: &IvfSpec,
    point: &[f64],
    plan: &SamplingPlan,
) -> Result<GradientReport, CalculusError> {
    if point.len() != spec.arity() {
        return Err(CalculusError::PointLength {
            expected: spec.arity(),
            got: point.len(),
        });
    }
    let results: Vec<Result<DerivativeReport, CalculusError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..spec.arity())
            .map(|i| s.spawn(move || gh_partial(spec, point, i, plan)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("gradient worker panicked"))
            .collect()
    });
    Ok(GradientReport {
        components: results.into_iter().collect::<Result<_, _>>()?,
    })
}

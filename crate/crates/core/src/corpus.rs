//! Reference functions and the regression corpus behind `replay-paper`.
//!
//! The piecewise functions use the branch-channel encoding: `rat`/`irr` stand
//! for "x rational" / "x irrational", `pos`/`neg` for plain sign pieces, and
//! `zero` for the value at the origin.

use serde::{Deserialize, Serialize};

use crate::calculus::{gh_partial, Case, SamplingPlan, Status};
use crate::expr::IvfSpec;
use crate::interval::{Interval, IntervalVector};
use crate::product::{gh_product, ghosh_dot, is_gh_orthogonal, linearity_holds, RealVector};

/// `[-|x| + y^2, |x| + y^2]`: endpoint partials fail to exist at the origin,
/// the gH-partial in `x` is `[-1, 1]`.
pub const ABS_KINK: &str = "n=2; L: -abs(x1) + x2^2; U: abs(x1) + x2^2";

/// `[|x| + sin x + y^2, |x| + sin x + (x-4)^2 + y^2]`: one-sided pairs
/// `(2, -6)` on the right and `(0, -8)` on the left disagree.
pub const SINE_KINK: &str =
    "n=2; L: abs(x1) + sin(x1) + x2^2; U: abs(x1) + sin(x1) + (x1 - 4)^2 + x2^2";

/// Rational/irrational channels left of the origin; left quotients are
/// complementary with `{1, 2}`.
pub const CHANNELS_LEFT: &str = "n=2;
L: branch pos [x1>0]: x1
 | branch zero [x1=0, x2=0]: 0
 | branch rat [x1<0]: x1
 | branch irr [x1<0]: 2*x1;
U: branch pos [x1>0]: 2*x1 + 1 + abs(x2)
 | branch zero [x1=0, x2=0]: 1
 | branch rat [x1<0]: x1^2 + 2*x1 + 1
 | branch irr [x1<0]: x1^2 + x1 + 1";

/// Like [`CHANNELS_LEFT`] but the channels coincide per label, so the
/// pointwise min oscillates between 1 and 2 and complementarity fails.
pub const CHANNELS_NOT_COMPLEMENTARY: &str = "n=2;
L: branch pos [x1>0]: x1
 | branch zero [x1=0, x2=0]: 0
 | branch rat [x1<0]: x1
 | branch irr [x1<0]: 2*x1;
U: branch pos [x1>0]: 2*x1 + abs(x2)
 | branch zero [x1=0, x2=0]: 0
 | branch rat [x1<0]: x1 + abs(x2)
 | branch irr [x1<0]: 2*x1 + abs(x2)";

/// Mirror of [`CHANNELS_LEFT`]: channels right of the origin.
pub const CHANNELS_RIGHT: &str = "n=2;
L: branch neg [x1<0]: x1
 | branch zero [x1=0, x2=0]: 0
 | branch rat [x1>0]: x1
 | branch irr [x1>0]: 2*x1;
U: branch neg [x1<0]: 2*x1 + 1 + abs(x2)
 | branch zero [x1=0, x2=0]: 1
 | branch rat [x1>0]: x1^2 + 2*x1 + 1
 | branch irr [x1>0]: x1^2 + x1 + 1";

/// Channels on both sides, complementary with `{1, 2}` on each.
pub const CHANNELS_BOTH: &str = "n=2;
L: branch rat [x1>0]: x1
 | branch irr [x1>0]: 2*x1
 | branch zero [x1=0, x2=0]: 0
 | branch rat [x1<0]: x1
 | branch irr [x1<0]: 2*x1;
U: branch rat [x1>0]: 2*x1^2 + 2*x1 + 1 + abs(x2)
 | branch irr [x1>0]: 2*x1^2 + x1 + 1 + abs(x2)
 | branch zero [x1=0, x2=0]: 1
 | branch rat [x1<0]: x1^2 + 2*x1 + 1
 | branch irr [x1<0]: x1^2 + x1 + 1";

/// Absolute tolerance on derivative values in the corpus.
pub const DERIVATIVE_TOL: f64 = 2e-4;

/// What one corpus entry computes and what it must produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Check {
    GhDiff {
        a: Interval,
        b: Interval,
        expect: Interval,
    },
    HDiff {
        a: Interval,
        b: Interval,
        expect: Option<Interval>,
    },
    MinkowskiSub {
        a: Interval,
        b: Interval,
        expect: Interval,
    },
    GhProduct {
        v: Vec<f64>,
        k: Vec<f64>,
        expect: Interval,
    },
    GhoshDot {
        v: Vec<f64>,
        k: Vec<f64>,
        expect: Interval,
    },
    Orthogonal {
        v: Vec<f64>,
        k: Vec<f64>,
        expect: bool,
    },
    Linearity {
        v: Vec<f64>,
        w: Vec<f64>,
        k: Vec<f64>,
        holds: bool,
        /// `<v + w, K>_gH`
        combined: Interval,
        /// `<v, K>_gH + <w, K>_gH`
        summed: Interval,
    },
    Partial {
        spec: String,
        point: Vec<f64>,
        /// One-based coordinate.
        coord: usize,
        status: Status,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Interval>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        case: Option<Case>,
        /// Expected one-sided `(lower, upper)` derivatives on the right.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        right: Option<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left: Option<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("corpus interval")
}

fn partial(
    id: &str,
    spec: &str,
    status: Status,
    value: Option<(f64, f64)>,
    case: Option<Case>,
) -> Entry {
    Entry {
        id: id.into(),
        check: Check::Partial {
            spec: spec.into(),
            point: vec![0.0, 0.0],
            coord: 1,
            status,
            value: value.map(|(a, b)| iv(a, b)),
            case,
            right: None,
            left: None,
        },
    }
}

/// The built-in corpus of worked examples.
pub fn builtin() -> Vec<Entry> {
    let k36 = vec![1.0, 2.0, 3.0, 6.0];
    let mut out = vec![
        Entry {
            id: "gh-diff-self".into(),
            check: Check::GhDiff {
                a: iv(0.0, 1.0),
                b: iv(0.0, 1.0),
                expect: Interval::ZERO,
            },
        },
        Entry {
            id: "minkowski-self".into(),
            check: Check::MinkowskiSub {
                a: iv(0.0, 1.0),
                b: iv(0.0, 1.0),
                expect: iv(-1.0, 1.0),
            },
        },
        Entry {
            id: "h-diff-self".into(),
            check: Check::HDiff {
                a: iv(0.0, 1.0),
                b: iv(0.0, 1.0),
                expect: Some(Interval::ZERO),
            },
        },
        Entry {
            id: "h-diff-undefined".into(),
            check: Check::HDiff {
                a: iv(0.0, 4.0),
                b: iv(0.0, 10.0),
                expect: None,
            },
        },
        Entry {
            id: "ghosh-self-cancel".into(),
            check: Check::GhoshDot {
                v: vec![1.0, -1.0],
                k: vec![1.0, 2.0, 1.0, 2.0],
                expect: iv(-1.0, 1.0),
            },
        },
        Entry {
            id: "gh-product-self-cancel".into(),
            check: Check::GhProduct {
                v: vec![1.0, -1.0],
                k: vec![1.0, 2.0, 1.0, 2.0],
                expect: Interval::ZERO,
            },
        },
        Entry {
            id: "gh-product-nonlinear-v".into(),
            check: Check::GhProduct {
                v: vec![1.0, -1.0],
                k: k36.clone(),
                expect: iv(-4.0, -2.0),
            },
        },
        Entry {
            id: "gh-product-nonlinear-w".into(),
            check: Check::GhProduct {
                v: vec![-5.0, 4.0],
                k: k36.clone(),
                expect: iv(7.0, 14.0),
            },
        },
        Entry {
            id: "gh-product-nonlinear-sum".into(),
            check: Check::GhProduct {
                v: vec![-4.0, 3.0],
                k: k36.clone(),
                expect: iv(5.0, 10.0),
            },
        },
        Entry {
            id: "gh-product-orthogonal".into(),
            check: Check::GhProduct {
                v: vec![1.0, -2.0],
                k: vec![3.0, 5.0, 1.5, 2.5],
                expect: Interval::ZERO,
            },
        },
        Entry {
            id: "orthogonality".into(),
            check: Check::Orthogonal {
                v: vec![1.0, -2.0],
                k: vec![3.0, 5.0, 1.5, 2.5],
                expect: true,
            },
        },
        Entry {
            id: "linearity-fails".into(),
            check: Check::Linearity {
                v: vec![1.0, -1.0],
                w: vec![-5.0, 4.0],
                k: k36,
                holds: false,
                combined: iv(5.0, 10.0),
                summed: iv(3.0, 12.0),
            },
        },
        Entry {
            id: "linearity-holds".into(),
            check: Check::Linearity {
                v: vec![1.0, -1.0],
                w: vec![-5.0, 4.0],
                k: vec![1.0, 2.0, 3.0, 4.0],
                holds: true,
                combined: iv(4.0, 5.0),
                summed: iv(4.0, 5.0),
            },
        },
        partial(
            "partial-abs-kink",
            ABS_KINK,
            Status::Exists,
            Some((-1.0, 1.0)),
            Some(Case::I),
        ),
        partial(
            "partial-channels-left",
            CHANNELS_LEFT,
            Status::Exists,
            Some((1.0, 2.0)),
            Some(Case::Ii),
        ),
        partial(
            "partial-not-complementary",
            CHANNELS_NOT_COMPLEMENTARY,
            Status::NotExists,
            None,
            None,
        ),
        partial(
            "partial-channels-right",
            CHANNELS_RIGHT,
            Status::Exists,
            Some((1.0, 2.0)),
            Some(Case::Iii),
        ),
        partial(
            "partial-channels-both",
            CHANNELS_BOTH,
            Status::Exists,
            Some((1.0, 2.0)),
            Some(Case::Iv),
        ),
    ];
    let mut sine = partial(
        "partial-sine-kink",
        SINE_KINK,
        Status::NotExists,
        None,
        None,
    );
    if let Check::Partial { right, left, .. } = &mut sine.check {
        *right = Some((2.0, -6.0));
        *left = Some((0.0, -8.0));
    }
    out.insert(out.len() - 4, sine);
    out
}

fn show(iv: &Interval) -> String {
    iv.to_string()
}

fn show_opt(iv: &Option<Interval>) -> String {
    iv.as_ref().map_or_else(|| "undefined".into(), show)
}

fn pass(id: &str, expected: String, got: String, ok: bool) -> Outcome {
    Outcome {
        id: id.into(),
        expected,
        got,
        pass: ok,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= DERIVATIVE_TOL
}

/// Runs one entry. Computation errors count as failures.
pub fn run_entry(entry: &Entry, plan: &SamplingPlan) -> Outcome {
    let id = entry.id.as_str();
    let fail = |expected: String, err: String| pass(id, expected, format!("error: {err}"), false);
    match &entry.check {
        Check::GhDiff { a, b, expect } => match a.gh_diff(b) {
            Ok(got) => pass(id, show(expect), show(&got), got == *expect),
            Err(e) => fail(show(expect), e.to_string()),
        },
        Check::HDiff { a, b, expect } => {
            let got = a.h_diff(b);
            pass(id, show_opt(expect), show_opt(&got), got == *expect)
        }
        Check::MinkowskiSub { a, b, expect } => match a.minkowski_sub(b) {
            Ok(got) => pass(id, show(expect), show(&got), got == *expect),
            Err(e) => fail(show(expect), e.to_string()),
        },
        Check::GhProduct { v, k, expect } | Check::GhoshDot { v, k, expect } => {
            let ghosh = matches!(entry.check, Check::GhoshDot { .. });
            let res = RealVector::new(v.clone())
                .and_then(|v| Ok((v, IntervalVector::from_pairs(k)?)))
                .and_then(|(v, k)| {
                    if ghosh {
                        ghosh_dot(&v, &k)
                    } else {
                        gh_product(&v, &k)
                    }
                });
            match res {
                Ok(got) => pass(id, show(expect), show(&got), got == *expect),
                Err(e) => fail(show(expect), e.to_string()),
            }
        }
        Check::Orthogonal { v, k, expect } => {
            let res = RealVector::new(v.clone())
                .and_then(|v| Ok((v, IntervalVector::from_pairs(k)?)))
                .and_then(|(v, k)| is_gh_orthogonal(&v, &k));
            match res {
                Ok(got) => pass(id, expect.to_string(), got.to_string(), got == *expect),
                Err(e) => fail(expect.to_string(), e.to_string()),
            }
        }
        Check::Linearity {
            v,
            w,
            k,
            holds,
            combined,
            summed,
        } => {
            let expected = format!("holds={holds} {} vs {}", show(combined), show(summed));
            let res = (|| {
                let v = RealVector::new(v.clone())?;
                let w = RealVector::new(w.clone())?;
                let k = IntervalVector::from_pairs(k)?;
                let h = linearity_holds(&v, &w, &k)?;
                let c = gh_product(&v.sum(&w)?, &k)?;
                let s = gh_product(&v, &k)?.add(&gh_product(&w, &k)?)?;
                Ok::<_, crate::error::Error>((h, c, s))
            })();
            match res {
                Ok((h, c, s)) => pass(
                    id,
                    expected,
                    format!("holds={h} {} vs {}", show(&c), show(&s)),
                    h == *holds && c == *combined && s == *summed && (!h || c == s),
                ),
                Err(e) => fail(expected, e.to_string()),
            }
        }
        Check::Partial {
            spec,
            point,
            coord,
            status,
            value,
            case,
            right,
            left,
        } => {
            let mut expected = status.to_string();
            if let Some(v) = value {
                expected += &format!(" {}", show(v));
            }
            if let Some(c) = case {
                expected += &format!(" (case {c})");
            }
            if let Some((l, u)) = right {
                expected += &format!(" right ({l}, {u})");
            }
            if let Some((l, u)) = left {
                expected += &format!(" left ({l}, {u})");
            }
            let parsed = match IvfSpec::parse(spec) {
                Ok(s) => s,
                Err(e) => return fail(expected, e.to_string()),
            };
            let Some(zero_based) = coord.checked_sub(1) else {
                return fail(expected, "coordinates are one-based".into());
            };
            let r = match gh_partial(&parsed, point, zero_based, plan) {
                Ok(r) => r,
                Err(e) => return fail(expected, e.to_string()),
            };
            let mut got = r.status.to_string();
            if let Some(v) = &r.value {
                got += &format!(" [{:.6}, {:.6}]", v.lo(), v.hi());
            }
            if let Some(c) = r.case {
                got += &format!(" (case {c})");
            }
            let side_ok = |want: &Option<(f64, f64)>,
                           s: &crate::calculus::SideSummary,
                           got: &mut String| match want {
                None => true,
                Some((l, u)) => {
                    *got += &format!(" {} ({:?}, {:?})", s.side, s.lower, s.upper);
                    matches!((s.lower, s.upper), (Some(a), Some(b)) if close(a, *l) && close(b, *u))
                }
            };
            let mut ok = r.status == *status && r.case == *case;
            ok &= match (value, &r.value) {
                (None, None) => true,
                (Some(w), Some(g)) => close(w.lo(), g.lo()) && close(w.hi(), g.hi()),
                _ => false,
            };
            ok &= side_ok(right, &r.right, &mut got);
            ok &= side_ok(left, &r.left, &mut got);
            pass(id, expected, got, ok)
        }
    }
}

/// Runs every entry in order.
pub fn replay(entries: &[Entry], plan: &SamplingPlan) -> Vec<Outcome> {
    entries.iter().map(|e| run_entry(e, plan)).collect()
}

//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ghcalc::calculus::{gh_partial, Case, SamplingPlan, Status};
use ghcalc::corpus::{self, Check, Entry};
use ghcalc::expr::IvfSpec;
use ghcalc::interval::{Interval, IntervalVector};
use ghcalc::product::{gh_product, ghosh_dot, linearity_holds, RealVector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PROPERTY_CASES: u32 = 10_000;
const DERIVATIVE_TOL: f64 = 2e-4;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn rv(xs: &[f64]) -> RealVector {
    RealVector::new(xs.to_vec()).unwrap()
}

fn kv(flat: &[f64]) -> IntervalVector {
    IntervalVector::from_pairs(flat).unwrap()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn exact_values() -> Outcome {
    let start = Instant::now();
    let gh = iv(0.0, 1.0).gh_diff(&iv(0.0, 1.0)).unwrap();
    ensure(gh == Interval::ZERO, || {
        format!("gh_diff([0,1],[0,1]) = {gh}")
    })?;
    let h = iv(0.0, 4.0).h_diff(&iv(0.0, 10.0));
    ensure(h.is_none(), || format!("h_diff([0,4],[0,10]) = {h:?}"))?;
    let k12 = kv(&[1.0, 2.0, 1.0, 2.0]);
    let k36 = kv(&[1.0, 2.0, 3.0, 6.0]);
    let cases = [
        (rv(&[1.0, -1.0]), &k12, Interval::ZERO),
        (rv(&[1.0, -1.0]), &k36, iv(-4.0, -2.0)),
        (rv(&[-5.0, 4.0]), &k36, iv(7.0, 14.0)),
        (rv(&[-4.0, 3.0]), &k36, iv(5.0, 10.0)),
        (rv(&[1.0, -2.0]), &kv(&[3.0, 5.0, 1.5, 2.5]), Interval::ZERO),
    ];
    for (v, k, want) in cases {
        let got = gh_product(&v, k).unwrap();
        ensure(got == want, || {
            format!("gh_product({v:?}) = {got}, want {want}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("gh_diff, h_diff and five gH-products exact".into())
}

fn linearity() -> Outcome {
    let v = rv(&[1.0, -1.0]);
    let w = rv(&[-5.0, 4.0]);
    let sum = v.sum(&w).unwrap();

    let k = kv(&[1.0, 2.0, 3.0, 6.0]);
    let lhs = gh_product(&sum, &k).unwrap();
    let rhs = gh_product(&v, &k)
        .unwrap()
        .add(&gh_product(&w, &k).unwrap())
        .unwrap();
    ensure(!linearity_holds(&v, &w, &k).unwrap(), || {
        "condition should fail".into()
    })?;
    ensure(lhs == iv(5.0, 10.0) && rhs == iv(3.0, 12.0), || {
        format!("{lhs} vs {rhs}")
    })?;

    let k = kv(&[1.0, 2.0, 3.0, 4.0]);
    let lhs = gh_product(&sum, &k).unwrap();
    let rhs = gh_product(&v, &k)
        .unwrap()
        .add(&gh_product(&w, &k).unwrap())
        .unwrap();
    ensure(linearity_holds(&v, &w, &k).unwrap(), || {
        "condition should hold".into()
    })?;
    ensure(lhs == iv(4.0, 5.0) && rhs == iv(4.0, 5.0), || {
        format!("{lhs} vs {rhs}")
    })?;
    Ok("[5,10] ≠ [3,12] with K=([1,2],[3,6]); [4,5] = [4,5] with K=([1,2],[3,4])".into())
}

fn derivative_corpus() -> Outcome {
    let start = Instant::now();
    let plan = SamplingPlan {
        t0: 1e-2,
        ratio: 0.5,
        count: 32,
        ..SamplingPlan::default()
    };
    let close = |a: f64, b: f64| (a - b).abs() <= DERIVATIVE_TOL;
    let expect_exists = |name: &str, src: &str, case: Case| -> Result<(), String> {
        let r = gh_partial(&IvfSpec::parse(src).unwrap(), &[0.0, 0.0], 0, &plan)
            .map_err(|e| e.to_string())?;
        let v = r
            .value
            .ok_or_else(|| format!("{name}: {} ({})", r.status, r.reason))?;
        let want = if case == Case::I {
            (-1.0, 1.0)
        } else {
            (1.0, 2.0)
        };
        ensure(
            r.case == Some(case) && close(v.lo(), want.0) && close(v.hi(), want.1),
            || format!("{name}: got {v} case {:?}", r.case),
        )
    };
    expect_exists("abs kink", corpus::ABS_KINK, Case::I)?;
    expect_exists("channels left", corpus::CHANNELS_LEFT, Case::Ii)?;
    expect_exists("channels right", corpus::CHANNELS_RIGHT, Case::Iii)?;
    expect_exists("channels both", corpus::CHANNELS_BOTH, Case::Iv)?;

    let r = gh_partial(
        &IvfSpec::parse(corpus::SINE_KINK).unwrap(),
        &[0.0, 0.0],
        0,
        &plan,
    )
    .unwrap();
    ensure(r.status == Status::NotExists, || {
        format!("sine kink: {}", r.status)
    })?;
    let pair = |s: &ghcalc::calculus::SideSummary| {
        (s.lower.unwrap_or(f64::NAN), s.upper.unwrap_or(f64::NAN))
    };
    let (rl, ru) = pair(&r.right);
    let (ll, lu) = pair(&r.left);
    ensure(
        close(rl, 2.0) && close(ru, -6.0) && close(ll, 0.0) && close(lu, -8.0),
        || format!("sine kink pairs right ({rl}, {ru}) left ({ll}, {lu})"),
    )?;

    let r = gh_partial(
        &IvfSpec::parse(corpus::CHANNELS_NOT_COMPLEMENTARY).unwrap(),
        &[0.0, 0.0],
        0,
        &plan,
    )
    .unwrap();
    ensure(
        r.status == Status::NotExists && r.left.complementarity.pair.is_none(),
        || format!("not complementary: {} ({})", r.status, r.reason),
    )?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "six reference functions classified in {:?}",
        start.elapsed()
    ))
}

fn small_int() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(f64::from)
}

fn int_interval() -> impl Strategy<Value = Interval> {
    (small_int(), 0i32..=20).prop_map(|(lo, w)| iv(lo, lo + f64::from(w)))
}

fn int_pair(
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Vec<f64>, Vec<Interval>)> {
    n.prop_flat_map(|n| {
        (
            prop::collection::vec(small_int(), n),
            prop::collection::vec(int_interval(), n),
        )
    })
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    fn run<T: std::fmt::Debug>(name: &str, result: Result<(), TestError<T>>) -> Result<(), String> {
        result.map_err(|e| format!("{name}: {e}"))
    }

    run(
        "scalar distributes over gh_diff",
        runner.run(
            &(-10i32..=10, int_interval(), int_interval()),
            |(nu, a, b)| {
                let nu = f64::from(nu);
                let lhs = a.gh_diff(&b).unwrap().scale(nu).unwrap();
                let rhs = a.scale(nu).unwrap().gh_diff(&b.scale(nu).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                Ok(())
            },
        ),
    )?;
    run(
        "negation law",
        runner.run(&int_pair(1..=6), |(v, k)| {
            let (v, k) = (RealVector::new(v).unwrap(), IntervalVector::new(k).unwrap());
            let lhs = gh_product(&v.scaled(-1.0).unwrap(), &k).unwrap();
            prop_assert_eq!(lhs, gh_product(&v, &k).unwrap().neg());
            Ok(())
        }),
    )?;
    run(
        "scalar law",
        runner.run(&(int_pair(1..=6), -10i32..=10), |((v, k), lambda)| {
            let lambda = f64::from(lambda);
            let (v, k) = (RealVector::new(v).unwrap(), IntervalVector::new(k).unwrap());
            let lhs = gh_product(&v.scaled(lambda).unwrap(), &k).unwrap();
            prop_assert_eq!(lhs, gh_product(&v, &k).unwrap().scale(lambda).unwrap());
            Ok(())
        }),
    )?;
    run(
        "degenerate collapse to dot product",
        runner.run(
            &(1usize..=6).prop_flat_map(|n| {
                (
                    prop::collection::vec(small_int(), n),
                    prop::collection::vec(small_int(), n),
                )
            }),
            |(v, pts)| {
                let dot: f64 = v.iter().zip(&pts).map(|(a, b)| a * b).sum();
                let k = IntervalVector::new(pts.iter().map(|&p| iv(p, p)).collect()).unwrap();
                prop_assert_eq!(
                    gh_product(&RealVector::new(v).unwrap(), &k).unwrap(),
                    iv(dot, dot)
                );
                Ok(())
            },
        ),
    )?;
    run(
        "nonnegative vectors reduce to the Minkowski dot product",
        runner.run(&int_pair(1..=6), |(v, k)| {
            let v = RealVector::new(v.iter().map(|x| x.abs()).collect()).unwrap();
            let k = IntervalVector::new(k).unwrap();
            prop_assert_eq!(gh_product(&v, &k).unwrap(), ghosh_dot(&v, &k).unwrap());
            Ok(())
        }),
    )?;
    run(
        "negative vectors reduce to 0 gH-minus the Minkowski dot product",
        runner.run(&int_pair(1..=6), |(v, k)| {
            let v = RealVector::new(v.iter().map(|x| -x.abs() - 1.0).collect()).unwrap();
            let k = IntervalVector::new(k).unwrap();
            let want = Interval::ZERO
                .gh_diff(&ghosh_dot(&v.abs(), &k).unwrap())
                .unwrap();
            prop_assert_eq!(gh_product(&v, &k).unwrap(), want);
            Ok(())
        }),
    )?;
    run(
        "closed form equals gh_diff of partial sums",
        runner.run(&int_pair(1..=8), |(v, k)| {
            let mut pos = Interval::ZERO;
            let mut neg = Interval::ZERO;
            for (&vi, ki) in v.iter().zip(&k) {
                if vi >= 0.0 {
                    pos = pos.add(&ki.scale(vi).unwrap()).unwrap();
                } else {
                    neg = neg.add(&ki.scale(-vi).unwrap()).unwrap();
                }
            }
            let (v, k) = (RealVector::new(v).unwrap(), IntervalVector::new(k).unwrap());
            prop_assert_eq!(gh_product(&v, &k).unwrap(), pos.gh_diff(&neg).unwrap());
            Ok(())
        }),
    )?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "7 suites x {PROPERTY_CASES} cases in {:?}",
        start.elapsed()
    ))
}

/// A random smooth endpoint: a few monomials `c x1^a x2^b` (a + b <= 4) and
/// one trig term, known both as spec text and as a closure with its
/// derivative computed independently by central differences.
#[derive(Debug, Clone)]
struct Smooth {
    monomials: Vec<(f64, i32, i32)>,
    trig: (f64, bool, usize),
    offset: f64,
}

impl Smooth {
    fn random(rng: &mut impl Rng, offset: f64) -> Self {
        let n = rng.gen_range(1..=4);
        let monomials = (0..n)
            .map(|_| {
                let deg = rng.gen_range(0..=4);
                let a = rng.gen_range(0..=deg);
                (round2(rng.gen_range(-3.0..=3.0)), a, deg - a)
            })
            .collect();
        let trig = (
            round2(rng.gen_range(-3.0..=3.0)),
            rng.gen_bool(0.5),
            rng.gen_range(0..2),
        );
        Self {
            monomials,
            trig,
            offset,
        }
    }

    fn text(&self) -> String {
        let mut s = format!("{}", self.offset);
        for (c, a, b) in &self.monomials {
            s += &format!(" + {c} * x1^{a} * x2^{b}");
        }
        let (c, sine, var) = self.trig;
        s += &format!(
            " + {c} * {}(x{})",
            if sine { "sin" } else { "cos" },
            var + 1
        );
        s
    }

    fn eval(&self, p: [f64; 2]) -> f64 {
        let mut y = self.offset;
        for &(c, a, b) in &self.monomials {
            y += c * p[0].powi(a) * p[1].powi(b);
        }
        let (c, sine, var) = self.trig;
        y + c * if sine { p[var].sin() } else { p[var].cos() }
    }

    fn central_diff(&self, p: [f64; 2], coord: usize) -> f64 {
        let h = 1e-6;
        let (mut a, mut b) = (p, p);
        a[coord] += h;
        b[coord] -= h;
        (self.eval(a) - self.eval(b)) / (2.0 * h)
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    let plan = SamplingPlan::default();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        // |monomials + trig| <= 15 on [-1, 1]^2, so the offsets keep lower < upper
        let lower = Smooth::random(&mut rng, -20.0);
        let upper = Smooth::random(&mut rng, 20.0);
        let src = format!("n=2; L: {}; U: {}", lower.text(), upper.text());
        let spec = IvfSpec::parse(&src).map_err(|e| format!("{src}: {e}"))?;
        for _ in 0..5 {
            let p = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            for coord in 0..2 {
                let r = gh_partial(&spec, &p, coord, &plan)
                    .map_err(|e| format!("{src} at {p:?}: {e}"))?;
                let (dl, du) = (lower.central_diff(p, coord), upper.central_diff(p, coord));
                let want = iv(dl.min(du), dl.max(du));
                let got = r.value.ok_or_else(|| {
                    format!("{src} at {p:?} x{}: {} ({})", coord + 1, r.status, r.reason)
                })?;
                let err = got.hausdorff(&want);
                worst = worst.max(err);
                ensure(err <= DERIVATIVE_TOL, || {
                    format!("{src} at {p:?} x{}: got {got}, oracle {want}", coord + 1)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} partials within {worst:.2e} of central differences, none inconclusive"
    ))
}

fn tamper(entry: &mut Entry) {
    let bump = |iv: &mut Interval| *iv = Interval::new(iv.lo(), iv.hi() + 1.0).unwrap();
    match &mut entry.check {
        Check::GhDiff { expect, .. } | Check::MinkowskiSub { expect, .. } => bump(expect),
        Check::GhProduct { expect, .. } | Check::GhoshDot { expect, .. } => bump(expect),
        Check::HDiff { expect, .. } => {
            *expect = match expect {
                Some(_) => None,
                None => Some(Interval::ZERO),
            }
        }
        Check::Orthogonal { expect, .. } => *expect = !*expect,
        Check::Linearity { holds, .. } => *holds = !*holds,
        Check::Partial { value, status, .. } => match value {
            Some(v) => bump(v),
            None => *status = Status::Exists,
        },
    }
}

fn replay_mutation() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ghcalc");
    let clean = Command::new(exe)
        .arg("replay-paper")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(clean.status.code() == Some(0), || {
        format!(
            "clean replay exited {:?}:\n{}",
            clean.status.code(),
            String::from_utf8_lossy(&clean.stdout)
        )
    })?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let builtin = corpus::builtin();
    for i in 0..builtin.len() {
        let mut entries = builtin.clone();
        tamper(&mut entries[i]);
        let path = dir.path().join(format!("tampered-{i}.json"));
        std::fs::write(&path, serde_json::to_string(&entries).unwrap())
            .map_err(|e| e.to_string())?;
        let out = Command::new(exe)
            .args(["replay-paper", "--corpus"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        let text = String::from_utf8_lossy(&out.stdout);
        let fails = text.lines().filter(|l| l.contains(" FAIL ")).count();
        ensure(out.status.code() == Some(1) && fails == 1, || {
            format!(
                "tampering '{}' gave exit {:?} with {fails} FAIL rows",
                builtin[i].id,
                out.status.code()
            )
        })?;
    }
    Ok(format!(
        "clean run exits 0; each of {} single-entry mutations exits 1",
        builtin.len()
    ))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("exact-value suite", exact_values),
        ("linearity counterexample and restoration", linearity),
        ("derivative corpus", derivative_corpus),
        ("property suites", property_suites),
        ("oracle equivalence", oracle_equivalence),
        ("replay-paper mutation check", replay_mutation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

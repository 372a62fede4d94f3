//! Command-line front end.
//!
//! Exit codes: 0 success (including a `not_exists` verdict), 1 replay
//! mismatch, 2 malformed input or usage error, 3 evaluation error,
//! 4 inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::calculus::{
    gh_gradient, gh_partial, CalculusError, DerivativeReport, SamplingPlan, Status,
};
use crate::corpus::{self, Entry};
use crate::expr::IvfSpec;
use crate::interval::{Interval, IntervalVector};
use crate::product::{gh_product, ghosh_dot, RealVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "ghcalc",
    version,
    about = "Generalized-Hukuhara interval calculus"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    plan: PlanArgs,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the default sampling plan.
#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long, global = true)]
    t0: Option<f64>,
    #[arg(long, global = true)]
    ratio: Option<f64>,
    #[arg(long, global = true)]
    count: Option<usize>,
    #[arg(long = "limit-tol", global = true)]
    limit_tol: Option<f64>,
    #[arg(long = "cluster-tol", global = true)]
    cluster_tol: Option<f64>,
}

impl PlanArgs {
    fn plan(&self) -> SamplingPlan {
        let d = SamplingPlan::default();
        SamplingPlan {
            t0: self.t0.unwrap_or(d.t0),
            ratio: self.ratio.unwrap_or(d.ratio),
            count: self.count.unwrap_or(d.count),
            limit_tol: self.limit_tol.unwrap_or(d.limit_tol),
            cluster_tol: self.cluster_tol.unwrap_or(d.cluster_tol),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// gH-difference of two intervals given as `A_LO A_HI B_LO B_HI`.
    Ghdiff {
        #[arg(num_args = 4, value_names = ["A_LO", "A_HI", "B_LO", "B_HI"], allow_negative_numbers = true)]
        ends: Vec<f64>,
    },
    /// Hukuhara difference, or `undefined`.
    Hdiff {
        #[arg(num_args = 4, value_names = ["A_LO", "A_HI", "B_LO", "B_HI"], allow_negative_numbers = true)]
        ends: Vec<f64>,
    },
    /// gH-product of a real vector with a tuple of intervals.
    Ghproduct {
        /// Vector components.
        #[arg(short = 'v', long = "vector", num_args = 1.., required = true, allow_negative_numbers = true)]
        v: Vec<f64>,
        /// Intervals as flat `lo hi lo hi ...` pairs.
        #[arg(short = 'K', long = "intervals", num_args = 1.., required = true, allow_negative_numbers = true)]
        k: Vec<f64>,
        /// Also print the Minkowski dot product.
        #[arg(long)]
        compare: bool,
    },
    /// gH-partial derivative with respect to one coordinate.
    Partial {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        point: Vec<f64>,
        /// One-based coordinate index.
        #[arg(short = 'i', long = "coord", default_value_t = 1)]
        coord: usize,
    },
    /// gH-gradient: every partial derivative.
    Gradient {
        #[command(flatten)]
        source: SpecSource,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        point: Vec<f64>,
    },
    /// Re-run the built-in worked examples and compare against expectations.
    #[command(name = "replay-paper")]
    ReplayPaper {
        /// Run this corpus (JSON) instead of the built-in one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Print the built-in corpus as JSON and exit.
        #[arg(long)]
        dump_corpus: bool,
        /// Shorthand for `--format json`.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SpecSource {
    /// Inline function spec.
    #[arg(long)]
    spec: Option<String>,
    /// Read the spec from a file.
    #[arg(long = "spec-file")]
    spec_file: Option<PathBuf>,
}

impl SpecSource {
    fn load(&self) -> Result<IvfSpec, Failure> {
        let text = match (&self.spec, &self.spec_file) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
            (None, None) => return Err(Failure::input("no spec given".into())),
        };
        IvfSpec::parse(&text).map_err(|e| Failure::input(format!("parse error at {e}")))
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Self {
            code: EXIT_INPUT,
            message,
        }
    }
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<CalculusError> for Failure {
    fn from(e: CalculusError) -> Self {
        let code = match e {
            CalculusError::Plan(_)
            | CalculusError::Coordinate { .. }
            | CalculusError::PointLength { .. }
            | CalculusError::NonFinitePoint => EXIT_INPUT,
            _ => EXIT_EVAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Rounds away sampling noise for display; JSON keeps full precision.
fn tidy(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn tidy_interval(iv: &Interval) -> String {
    format!("[{}, {}]", tidy(iv.lo()), tidy(iv.hi()))
}

fn tidy_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), |v| tidy(v).to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn interval_args(ends: &[f64]) -> Result<(Interval, Interval), Failure> {
    let a = Interval::new(ends[0], ends[1])?;
    let b = Interval::new(ends[2], ends[3])?;
    Ok((a, b))
}

fn report_exit(status: Status) -> i32 {
    if status == Status::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn render_partial_text(r: &DerivativeReport) -> String {
    let mut s = match r.status {
        Status::Exists => format!(
            "exists {} (case {})",
            r.value.as_ref().map(tidy_interval).unwrap_or_default(),
            r.case.map(|c| c.to_string()).unwrap_or_default()
        ),
        Status::NotExists => format!("not_exists: {}", r.reason),
        Status::Inconclusive => format!("inconclusive: {}", r.reason),
    };
    for side in [&r.right, &r.left] {
        s += &format!(
            "\n  {:<5}  lower {}  upper {}",
            side.side.to_string(),
            tidy_opt(side.lower),
            tidy_opt(side.upper)
        );
        if let Some((kl, ku)) = side.complementarity.pair {
            s += &format!("  complementary ({}, {})", tidy(kl), tidy(ku));
        }
    }
    s
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let plan = cli.plan.plan();
    let json = cli.format == Format::Json;
    let mut emit = |text: String| {
        let _ = writeln!(out, "{text}");
    };
    match &cli.command {
        Command::Ghdiff { ends } => {
            let (a, b) = interval_args(ends)?;
            let gh = a.gh_diff(&b)?;
            let h = a.h_diff(&b);
            if json {
                emit(to_json(&json!({ "gh_diff": gh, "h_diff": h })));
            } else {
                let note = if h.is_some() { "defined" } else { "undefined" };
                emit(format!("{gh} (H-difference {note})"));
            }
            Ok(EXIT_OK)
        }
        Command::Hdiff { ends } => {
            let (a, b) = interval_args(ends)?;
            let h = a.h_diff(&b);
            if json {
                emit(to_json(&json!({ "h_diff": h })));
            } else {
                emit(h.map_or_else(|| "undefined".to_string(), |h| h.to_string()));
            }
            Ok(EXIT_OK)
        }
        Command::Ghproduct { v, k, compare } => {
            let v = RealVector::new(v.clone())?;
            let k = IntervalVector::from_pairs(k)?;
            let gh = gh_product(&v, &k)?;
            let ghosh = if *compare {
                Some(ghosh_dot(&v, &k)?)
            } else {
                None
            };
            if json {
                let mut body = json!({ "gh_product": gh });
                if let Some(g) = ghosh {
                    body["ghosh_dot"] = json!(g);
                }
                emit(to_json(&body));
            } else if let Some(g) = ghosh {
                emit(format!("gH: {gh}\nGhosh: {g}"));
            } else {
                emit(gh.to_string());
            }
            Ok(EXIT_OK)
        }
        Command::Partial {
            source,
            point,
            coord,
        } => {
            let spec = source.load()?;
            let Some(zero_based) = coord.checked_sub(1) else {
                return Err(Failure::input("coordinates are numbered from 1".into()));
            };
            let report = gh_partial(&spec, point, zero_based, &plan)?;
            if json {
                emit(to_json(
                    &json!({ "variable": format!("x{coord}"), "report": report }),
                ));
            } else {
                emit(render_partial_text(&report));
            }
            Ok(report_exit(report.status))
        }
        Command::Gradient { source, point } => {
            let spec = source.load()?;
            let g = gh_gradient(&spec, point, &plan)?;
            let inconclusive = g
                .components
                .iter()
                .any(|c| c.status == Status::Inconclusive);
            if json {
                emit(to_json(
                    &json!({ "exists": g.exists(), "components": g.components }),
                ));
            } else {
                let parts: Vec<String> = g
                    .components
                    .iter()
                    .map(|c| {
                        c.value
                            .as_ref()
                            .map_or_else(|| c.status.to_string(), tidy_interval)
                    })
                    .collect();
                let mut text = format!("({})", parts.join(", "));
                for c in &g.components {
                    text += &format!(
                        "\nx{}: {}",
                        c.coord + 1,
                        render_partial_text(c).replace('\n', "\n  ")
                    );
                }
                emit(text);
            }
            Ok(if inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            })
        }
        Command::ReplayPaper {
            corpus: path,
            dump_corpus,
            json: json_flag,
        } => {
            if *dump_corpus {
                emit(to_json(&corpus::builtin()));
                return Ok(EXIT_OK);
            }
            let entries: Vec<Entry> = match path {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display())))?;
                    serde_json::from_str(&text)
                        .map_err(|e| Failure::input(format!("bad corpus: {e}")))?
                }
                None => corpus::builtin(),
            };
            let results = corpus::replay(&entries, &plan);
            let all_pass = results.iter().all(|r| r.pass);
            if json || *json_flag {
                emit(to_json(&json!({ "pass": all_pass, "results": results })));
            } else {
                let width = results.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
                let mut text = format!("{:<width$}  {:<6}  expected | got", "id", "result");
                for r in &results {
                    let tag = if r.pass { "PASS" } else { "FAIL" };
                    text += &format!("\n{:<width$}  {tag:<6}  {} | {}", r.id, r.expected, r.got);
                }
                let failed = results.iter().filter(|r| !r.pass).count();
                text += &format!("\n{} passed, {failed} failed", results.len() - failed);
                emit(text);
            }
            Ok(if all_pass { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

/// Runs the CLI with explicit arguments (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                return EXIT_OK;
            }
            let _ = write!(err, "{text}");
            return EXIT_INPUT;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["ghcalc"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ghdiff_text() {
        assert_eq!(
            call(&["ghdiff", "0", "4", "0", "10"]).1.trim(),
            "[-6, 0] (H-difference undefined)"
        );
        assert!(call(&["ghdiff", "0", "1", "0", "1"])
            .1
            .starts_with("[0, 0]"));
        assert_eq!(
            call(&["ghdiff", "3", "7", "1", "2"]).1.trim(),
            "[2, 5] (H-difference defined)"
        );
        assert_eq!(
            call(&["ghdiff", "-3", "-1", "1", "2"]).1.trim(),
            "[-4, -3] (H-difference defined)"
        );
    }

    #[test]
    fn malformed_interval_exits_2() {
        let (code, _, err) = call(&["ghdiff", "2", "1", "0", "1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("exceeds"));
        assert_eq!(call(&["ghdiff", "1", "2", "3"]).0, EXIT_INPUT);
        assert_eq!(call(&["ghdiff", "a", "2", "3", "4"]).0, EXIT_INPUT);
    }

    #[test]
    fn hdiff_text() {
        assert_eq!(call(&["hdiff", "0", "4", "0", "10"]).1.trim(), "undefined");
        assert_eq!(call(&["hdiff", "3", "7", "1", "2"]).1.trim(), "[2, 5]");
    }

    #[test]
    fn ghproduct_text() {
        let (code, out, _) = call(&[
            "ghproduct",
            "-v",
            "1",
            "-1",
            "-K",
            "1",
            "2",
            "1",
            "2",
            "--compare",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "gH: [0, 0]\nGhosh: [-1, 1]");
        assert_eq!(
            call(&["ghproduct", "-v", "1", "-2", "-K", "3", "5", "1.5", "2.5"])
                .1
                .trim(),
            "[0, 0]"
        );
        assert_eq!(
            call(&["ghproduct", "-v", "0", "0", "-K", "1", "2", "3", "6"])
                .1
                .trim(),
            "[0, 0]"
        );
        let (code, _, err) = call(&["ghproduct", "-v", "1", "-K", "1", "2", "3", "6"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("dimension"));
    }

    #[test]
    fn partial_text() {
        let (code, out, _) = call(&[
            "partial",
            "--spec",
            corpus::ABS_KINK,
            "--point",
            "0",
            "0",
            "-i",
            "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("exists [-1, 1] (case i)"), "{out}");
        let (code, out, _) = call(&["partial", "--spec", corpus::SINE_KINK, "--point", "0", "0"]);
        assert_eq!(code, 0);
        assert!(
            out.starts_with("not_exists: right [-6, 2] ≠ left [-8, 0]"),
            "{out}"
        );
        let (_, out, _) = call(&[
            "partial",
            "--spec",
            corpus::CHANNELS_RIGHT,
            "--point",
            "0",
            "0",
        ]);
        assert!(out.starts_with("exists [1, 2] (case iii)"), "{out}");
    }

    #[test]
    fn partial_exit_codes() {
        assert_eq!(
            call(&["partial", "--spec", "n=1; L: x1 +; U: 1", "--point", "0"]).0,
            EXIT_INPUT
        );
        assert_eq!(
            call(&[
                "partial",
                "--spec",
                "n=1; L: 1/x1; U: 1/x1 + 1",
                "--point",
                "0"
            ])
            .0,
            EXIT_EVAL
        );
        assert_eq!(
            call(&["partial", "--spec", "n=1; L: x1; U: 0", "--point", "0"]).0,
            EXIT_EVAL
        );
        let osc = "n=1; L: branch a [x1>0]: x1*sin(1/x1) | branch a [x1<0]: x1*sin(1/x1) | branch z [x1=0]: 0; \
                   U: branch a [x1>0]: x1*sin(1/x1) + 1 | branch a [x1<0]: x1*sin(1/x1) + 1 | branch z [x1=0]: 1";
        assert_eq!(
            call(&["partial", "--spec", osc, "--point", "0"]).0,
            EXIT_INCONCLUSIVE
        );
        assert_eq!(
            call(&["partial", "--spec", corpus::ABS_KINK, "--point", "0"]).0,
            EXIT_INPUT
        );
        assert_eq!(
            call(&[
                "partial",
                "--spec",
                corpus::ABS_KINK,
                "--point",
                "0",
                "0",
                "-i",
                "3"
            ])
            .0,
            EXIT_INPUT
        );
        assert_eq!(
            call(&[
                "partial",
                "--spec",
                corpus::ABS_KINK,
                "--point",
                "0",
                "0",
                "-i",
                "0"
            ])
            .0,
            EXIT_INPUT
        );
        assert_eq!(
            call(&[
                "partial",
                "--spec",
                corpus::ABS_KINK,
                "--point",
                "0",
                "0",
                "--ratio",
                "2"
            ])
            .0,
            EXIT_INPUT
        );
        assert_eq!(call(&["partial", "--point", "0", "0"]).0, EXIT_INPUT);
    }

    #[test]
    fn gradient_text() {
        let (code, out, _) = call(&["gradient", "--spec", corpus::ABS_KINK, "--point", "0", "0"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("([-1, 1], [0, 0])"), "{out}");
        let (_, out, _) = call(&[
            "gradient",
            "--spec",
            "n=2; L: x1 + 2*x2; U: x1 + 2*x2",
            "--point",
            "1",
            "1",
        ]);
        assert!(out.starts_with("([1, 1], [2, 2])"), "{out}");
        let (_, out, _) = call(&["gradient", "--spec", corpus::SINE_KINK, "--point", "0", "0"]);
        assert!(out.starts_with("(not_exists, [0, 0])"), "{out}");
    }

    #[test]
    fn replay_passes_and_dumps() {
        let (code, out, _) = call(&["replay-paper"]);
        assert_eq!(code, 0, "{out}");
        assert!(!out.contains("FAIL"));
        let (code, out, _) = call(&["replay-paper", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pass"], true);
        assert!(v["results"].as_array().unwrap().len() >= 19);
        let (_, dumped, _) = call(&["replay-paper", "--dump-corpus"]);
        let entries: Vec<Entry> = serde_json::from_str(&dumped).unwrap();
        assert_eq!(entries, corpus::builtin());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("replay-paper"));
    }
}

//! A small language for interval-valued functions given by endpoint formulas.
//!
//! ```text
//! spec       := "n=" INT ";" "L:" endpoint ";" "U:" endpoint [";"]
//! endpoint   := expr | branchlist
//! branchlist := branch ("|" branch)*
//! branch     := "branch" LABEL [guard] ":" expr
//! guard      := "[" cond ("," cond)* "]"
//! cond       := "x" INT ("<" | ">" | "=") "0"
//! ```
//!
//! Expressions use `+ - * / ^`, the functions `abs sin cos exp sqrt`, and the
//! variables `x1 .. xn`. Precedence from tightest: `^` (right associative),
//! unary minus, `* /`, `+ -`. A `#` starts a comment that runs to the end of
//! the line.
//!
//! Branch labels name sampling channels. Predicates such as "x is rational"
//! cannot be decided on floats, so a piecewise definition like
//!
//! ```text
//! [x, x^2 + 2x + 1]   if x < 0, x rational
//! [2x, x^2 + x + 1]   if x < 0, x irrational
//! ```
//!
//! is written as two branches `rat` and `irr` sharing the guard `[x1<0]`, and
//! each channel is sampled on its own.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Label given to an endpoint written as a single expression.
pub const DEFAULT_LABEL: &str = "main";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnaryOp {
    Neg,
    Abs,
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl UnaryOp {
    fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Sqrt => Some("sqrt"),
        }
    }

    fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => UnaryOp::Abs,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Scalar expression over `x1 .. xn`. Variables are stored zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_ADD,
            Expr::Const(_) | Expr::Var(_) => PREC_ATOM,
            Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
            Expr::Unary(..) => PREC_ATOM,
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
            Expr::Binary(BinOp::Pow, ..) => PREC_POW,
        }
    }

    /// Largest zero-based variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Unary(_, a) => a.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *point.get(*i).ok_or(EvalError::Arity {
                index: *i + 1,
                len: point.len(),
            })?,
            Expr::Unary(op, a) => {
                let x = a.eval(point)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Abs => x.abs(),
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(self.domain("square root of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(point)?;
                let y = b.eval(point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.domain("division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => power(x, y),
                }
            }
        };
        if !value.is_finite() {
            return Err(self.domain("non-finite result"));
        }
        Ok(value)
    }

    fn domain(&self, what: &'static str) -> EvalError {
        EvalError::Domain {
            what,
            subexpr: self.to_string(),
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn power(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= 64.0 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                a.write_child(f, a.precedence() < PREC_NEG)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.function_name().unwrap_or("?")),
            Expr::Binary(BinOp::Pow, a, b) => {
                a.write_child(f, a.precedence() <= PREC_POW)?;
                f.write_str("^")?;
                b.write_child(f, b.precedence() < PREC_NEG)
            }
            Expr::Binary(op, a, b) => {
                let prec = self.precedence();
                a.write_child(f, a.precedence() < prec)?;
                write!(f, " {} ", op.symbol())?;
                b.write_child(f, b.precedence() <= prec)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

/// A sign condition `x_i < 0`, `x_i > 0` or `x_i = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub var: usize,
    pub rel: Relation,
}

impl Condition {
    pub fn holds(&self, point: &[f64]) -> bool {
        let x = point.get(self.var).copied().unwrap_or(f64::NAN);
        match self.rel {
            Relation::Lt => x < 0.0,
            Relation::Gt => x > 0.0,
            Relation::Eq => x == 0.0,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Eq => "=",
        };
        write!(f, "x{}{}0", self.var + 1, rel)
    }
}

/// One channel of an endpoint: a label, an optional conjunction of sign
/// conditions, and the formula used where the guard holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub guard: Vec<Condition>,
    pub expr: Expr,
}

impl Branch {
    pub fn applies_at(&self, point: &[f64]) -> bool {
        self.guard.iter().all(|c| c.holds(point))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchedEndpoint {
    branches: Vec<Branch>,
}

impl BranchedEndpoint {
    pub fn single(expr: Expr) -> Self {
        Self {
            branches: vec![Branch {
                label: DEFAULT_LABEL.to_string(),
                guard: Vec::new(),
                expr,
            }],
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    fn is_plain(&self) -> bool {
        matches!(self.branches.as_slice(), [b] if b.label == DEFAULT_LABEL && b.guard.is_empty())
    }

    /// The first branch carrying `label` whose guard holds at `point`.
    pub fn select(&self, label: &str, point: &[f64]) -> Result<&Branch, EvalError> {
        let mut seen = false;
        for b in self.branches.iter().filter(|b| b.label == label) {
            seen = true;
            if b.applies_at(point) {
                return Ok(b);
            }
        }
        if seen {
            Err(EvalError::GuardFailed {
                label: label.to_string(),
                point: point.to_vec(),
            })
        } else {
            Err(EvalError::UnknownBranch(label.to_string()))
        }
    }
}

impl fmt::Display for BranchedEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_plain() {
            return write!(f, "{}", self.branches[0].expr);
        }
        for (k, b) in self.branches.iter().enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "branch {}", b.label)?;
            if !b.guard.is_empty() {
                f.write_str(" [")?;
                for (j, c) in b.guard.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")?;
            }
            write!(f, ": {}", b.expr)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Lower,
    Upper,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Lower => "lower",
            Which::Upper => "upper",
        })
    }
}

/// An interval-valued function of `arity` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct IvfSpec {
    arity: usize,
    lower: BranchedEndpoint,
    upper: BranchedEndpoint,
}

impl IvfSpec {
    pub fn new(
        arity: usize,
        lower: BranchedEndpoint,
        upper: BranchedEndpoint,
    ) -> Result<Self, ParseError> {
        let spec = Self {
            arity,
            lower,
            upper,
        };
        spec.validate().map_err(|message| ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Arity,
            message,
        })?;
        Ok(spec)
    }

    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Parser::new(source)?.spec()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn endpoint(&self, which: Which) -> &BranchedEndpoint {
        match which {
            Which::Lower => &self.lower,
            Which::Upper => &self.upper,
        }
    }

    /// Value of branch `label` of one endpoint at `point`.
    pub fn eval_endpoint(
        &self,
        which: Which,
        label: &str,
        point: &[f64],
    ) -> Result<f64, EvalError> {
        if point.len() != self.arity {
            return Err(EvalError::PointLength {
                expected: self.arity,
                got: point.len(),
            });
        }
        self.endpoint(which).select(label, point)?.expr.eval(point)
    }

    fn validate(&self) -> Result<(), String> {
        if self.arity == 0 {
            return Err("arity must be positive".into());
        }
        for (which, ep) in [(Which::Lower, &self.lower), (Which::Upper, &self.upper)] {
            if ep.branches.is_empty() {
                return Err(format!("{which} endpoint has no branches"));
            }
            for b in &ep.branches {
                if let Some(i) = b.expr.max_var() {
                    if i >= self.arity {
                        return Err(format!(
                            "variable x{} exceeds declared arity {} in {which} branch '{}'",
                            i + 1,
                            self.arity,
                            b.label
                        ));
                    }
                }
                if let Some(c) = b.guard.iter().find(|c| c.var >= self.arity) {
                    return Err(format!(
                        "guard variable x{} exceeds declared arity {}",
                        c.var + 1,
                        self.arity
                    ));
                }
            }
            for (k, a) in ep.branches.iter().enumerate() {
                for b in &ep.branches[k + 1..] {
                    if a.label == b.label && !guards_disjoint(&a.guard, &b.guard) {
                        return Err(format!(
                            "{which} endpoint has overlapping branches labelled '{}'",
                            a.label
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn guards_disjoint(a: &[Condition], b: &[Condition]) -> bool {
    a.iter()
        .any(|ca| b.iter().any(|cb| ca.var == cb.var && ca.rel != cb.rel))
}

impl fmt::Display for IvfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; L: {}; U: {}", self.arity, self.lower, self.upper)
    }
}

impl std::str::FromStr for IvfSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{what} in `{subexpr}`")]
    Domain { what: &'static str, subexpr: String },
    #[error("variable x{index} is out of range for a point of length {len}")]
    Arity { index: usize, len: usize },
    #[error("point has {got} coordinates, function takes {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("no branch labelled '{0}'")]
    UnknownBranch(String),
    #[error("branch '{label}' is not defined at {point:?}")]
    GuardFailed { label: String, point: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
    Guard,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut text = String::new();
            while let Some(&d) = chars.peek() {
                let exp_sign =
                    matches!(d, '+' | '-') && matches!(text.chars().last(), Some('e' | 'E'));
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    text.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let value: f64 = text.parse().map_err(|_| ParseError {
                line: tl,
                column: tc,
                kind: ParseErrorKind::Syntax,
                message: format!("malformed number '{text}'"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    text.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(text),
                line: tl,
                column: tc,
            });
            continue;
        }
        if "+-*/^()[],;:|=<>".contains(c) {
            chars.next();
            column += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(ParseError {
            line: tl,
            column: tc,
            kind: ParseErrorKind::Syntax,
            message: format!("unexpected character '{c}'"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn new(source: &str) -> Result<Self, ParseError> {
        Ok(Self {
            tokens: lex(source)?,
            pos: 0,
            arity: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, kind: ParseErrorKind, message: String) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            kind,
            message,
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.error_at(
                &t,
                ParseErrorKind::Syntax,
                format!("expected '{c}', found {}", t.tok),
            ))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            other => Err(self.error_at(
                &t,
                ParseErrorKind::Syntax,
                format!("expected '{kw}', found {other}"),
            )),
        }
    }

    fn spec(&mut self) -> Result<IvfSpec, ParseError> {
        self.expect_keyword("n")?;
        self.expect_sym('=')?;
        let t = self.next();
        self.arity = match t.tok {
            Tok::Num(x) if x.fract() == 0.0 && (1.0..=1e6).contains(&x) => x as usize,
            ref other => {
                return Err(self.error_at(
                    &t,
                    ParseErrorKind::Arity,
                    format!("arity must be a positive integer, found {other}"),
                ))
            }
        };
        self.expect_sym(';')?;
        self.expect_keyword("L")?;
        self.expect_sym(':')?;
        let lower = self.endpoint()?;
        self.expect_sym(';')?;
        self.expect_keyword("U")?;
        self.expect_sym(':')?;
        let upper = self.endpoint()?;
        self.eat_sym(';');
        let t = self.next();
        if t.tok != Tok::Eof {
            return Err(self.error_at(
                &t,
                ParseErrorKind::Syntax,
                format!("unexpected {} after spec", t.tok),
            ));
        }
        let start = self.tokens[0].clone();
        IvfSpec::new(self.arity, lower, upper)
            .map_err(|e| self.error_at(&start, ParseErrorKind::Arity, e.message))
    }

    fn endpoint(&mut self) -> Result<BranchedEndpoint, ParseError> {
        if !matches!(&self.peek().tok, Tok::Ident(s) if s == "branch") {
            return Ok(BranchedEndpoint::single(self.expr()?));
        }
        let mut branches = Vec::new();
        loop {
            self.expect_keyword("branch")?;
            let t = self.next();
            let label = match t.tok {
                Tok::Ident(ref s) => s.clone(),
                ref other => {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Syntax,
                        format!("expected branch label, found {other}"),
                    ))
                }
            };
            let guard = if self.eat_sym('[') {
                self.guard()?
            } else {
                Vec::new()
            };
            self.expect_sym(':')?;
            let expr = self.expr()?;
            branches.push(Branch { label, guard, expr });
            if !self.eat_sym('|') {
                break;
            }
        }
        Ok(BranchedEndpoint { branches })
    }

    fn guard(&mut self) -> Result<Vec<Condition>, ParseError> {
        let mut conds = Vec::new();
        loop {
            let t = self.next();
            let var = match &t.tok {
                Tok::Ident(s) => self.variable(s).ok_or_else(|| {
                    self.error_at(
                        &t,
                        ParseErrorKind::Guard,
                        format!("guards test a variable x1..x{}, found '{s}'", self.arity),
                    )
                })?,
                other => {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Guard,
                        format!("expected a variable in guard, found {other}"),
                    ))
                }
            };
            let t = self.next();
            let rel = match t.tok {
                Tok::Sym('<') => Relation::Lt,
                Tok::Sym('>') => Relation::Gt,
                Tok::Sym('=') => Relation::Eq,
                ref other => {
                    return Err(self.error_at(
                        &t,
                        ParseErrorKind::Guard,
                        format!("guards support only <, > or =, found {other}"),
                    ))
                }
            };
            let t = self.next();
            if t.tok != Tok::Num(0.0) {
                return Err(self.error_at(
                    &t,
                    ParseErrorKind::Guard,
                    format!("guards compare against 0 only, found {}", t.tok),
                ));
            }
            conds.push(Condition { var, rel });
            if self.eat_sym(']') {
                return Ok(conds);
            }
            self.expect_sym(',')?;
        }
    }

    /// Zero-based index for `x<k>` with `1 <= k <= arity`.
    fn variable(&self, name: &str) -> Option<usize> {
        let k: usize = name.strip_prefix('x')?.parse().ok()?;
        (1..=self.arity).contains(&k).then(|| k - 1)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym('-') {
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat_sym('^') {
            // right associative; the exponent may carry its own sign
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(x) => Ok(Expr::Const(*x)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(op) = UnaryOp::from_function_name(name) {
                    self.expect_sym('(')?;
                    let e = self.expr()?;
                    self.expect_sym(')')?;
                    return Ok(Expr::unary(op, e));
                }
                if let Some(i) = self.variable(name) {
                    return Ok(Expr::Var(i));
                }
                let is_var_shape = name
                    .strip_prefix('x')
                    .is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()));
                if is_var_shape {
                    Err(self.error_at(
                        &t,
                        ParseErrorKind::Arity,
                        format!("variable '{name}' exceeds declared arity {}", self.arity),
                    ))
                } else {
                    Err(self.error_at(
                        &t,
                        ParseErrorKind::UnknownIdentifier,
                        format!("unknown identifier '{name}'"),
                    ))
                }
            }
            other => Err(self.error_at(
                &t,
                ParseErrorKind::Syntax,
                format!("expected an expression, found {other}"),
            )),
        }
    }
}

/// Parses a standalone scalar expression over `x1 .. x<arity>`.
pub fn parse_expr(source: &str, arity: usize) -> Result<Expr, ParseError> {
    let mut p = Parser::new(source)?;
    p.arity = arity;
    let e = p.expr()?;
    let t = p.next();
    if t.tok != Tok::Eof {
        return Err(p.error_at(&t, ParseErrorKind::Syntax, format!("unexpected {}", t.tok)));
    }
    Ok(e)
}

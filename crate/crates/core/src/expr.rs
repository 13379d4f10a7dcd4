//! Text grammar for polynomials, fractions, truncated series, polynomial
//! relations and NC series.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary | power)*      juxtaposition multiplies
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' ['-'] int)?
//! primary := int | 'X' | 'y' | 'z' | word | name '(' args ')' | '(' expr ')'
//!          | 'O(X^N)' | 'O(N)'
//! word    := ('x' digit)+                           NC letters x1..x4
//! ```
//!
//! `O(X^N)` truncates a one-variable expression to order `N`; `O(N)` does
//! the same for NC series.

use std::fmt;

use thiserror::Error;

use crate::digits::binom_mod_p;
use crate::forms::{iterate_sigma, psi, psi_inv, sigma, sigma_inv, sigma_tilde, sigma_tilde_inv};
use crate::fraction::{FractionError, PolyFraction};
use crate::kernel::{section, thue_morse_series, KernelError, Relation};
use crate::nc::{geometric_with_limits, NCSeries, NcError, NcLimits, Word};
use crate::poly::FpPoly;
use crate::ring::{PrimeModulus, Ring};
use crate::series::{SeriesError, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Fraction(#[from] FractionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error("{0}")]
    Type(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} argument(s)")]
    Arity { name: String, expected: &'static str },
}

fn type_err(msg: impl Into<String>) -> ExprError {
    ExprError::Type(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMark {
    /// `O(X^N)`.
    Uni(usize),
    /// `O(N)`.
    Nc(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    X,
    /// `y` or `z`, the unknown of a relation.
    Unknown,
    Word(Word),
    Order(OrderMark),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    BigX,
    Letter(u8),
    Ident(String),
    Sym(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| ParseError { pos, message };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let n = text.parse().map_err(|_| err(pos, format!("integer `{text}` is too large")))?;
            out.push((pos, Tok::Num(n)));
        } else if c == 'X' {
            out.push((pos, Tok::BigX));
            i += 1;
        } else if c == 'x' && chars.get(i + 1).is_some_and(|&(_, d)| d.is_ascii_digit()) {
            let d = chars[i + 1].1.to_digit(10).expect("digit");
            if !(1..=4).contains(&d) {
                return Err(err(pos, format!("variable x{d} is outside x1..x4")));
            }
            out.push((pos, Tok::Letter(d as u8 - 1)));
            i += 2;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(err(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::BigX | Tok::Letter(_) | Tok::Ident(_) | Tok::Sym('('))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if self.starts_primary() {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let Tok::Num(n) = self.bump() else {
            self.at -= 1;
            return self.fail("exponent must be an integer");
        };
        if paren {
            self.expect(')')?;
        }
        let n = i64::try_from(n).or_else(|_| self.fail("exponent too large"))?;
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Int(n)),
            Tok::BigX => Ok(Expr::X),
            Tok::Letter(s) => Ok(Expr::Word(Word::letter(s))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "O" => {
                self.expect('(')?;
                let mark = match self.bump() {
                    Tok::BigX => {
                        if self.eat('^') {
                            let Tok::Num(n) = self.bump() else { return self.fail("expected order") };
                            OrderMark::Uni(n as usize)
                        } else {
                            OrderMark::Uni(1)
                        }
                    }
                    Tok::Num(n) => OrderMark::Nc(n as usize),
                    _ => return Err(ParseError { pos, message: "expected O(X^N) or O(N)".into() }),
                };
                self.expect(')')?;
                Ok(Expr::Order(mark))
            }
            Tok::Ident(name) if name == "y" || name == "z" => Ok(Expr::Unknown),
            Tok::Ident(name) => {
                if !self.eat('(') {
                    return Err(ParseError { pos, message: format!("`{name}` must be called with arguments") });
                }
                let mut args = Vec::new();
                if !self.eat(')') {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Expr::Call(name, args))
            }
            Tok::End => Err(ParseError { pos, message: "unexpected end of input".into() }),
            t => Err(ParseError { pos, message: format!("unexpected {t:?}") }),
        }
    }
}

/// Parses one expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("trailing input");
    }
    Ok(e)
}

/// Everything an expression needs besides its text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub prime: PrimeModulus,
    /// Order used whenever a one-variable fraction has to become a series.
    pub order: usize,
    pub nc_order: usize,
    /// Number of NC variables; inferred from the expression when absent.
    pub nc_vars: Option<usize>,
    pub nc_limits: NcLimits,
}

impl EvalContext {
    pub fn new(prime: PrimeModulus, order: usize) -> Self {
        EvalContext { prime, order, nc_order: 8, nc_vars: None, nc_limits: NcLimits::default() }
    }

    fn field(&self) -> Ring {
        Ring::field(self.prime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Fraction(PolyFraction),
    Series(TruncSeries),
    Nc(NCSeries),
}

impl Value {
    /// The one-variable series, expanding a fraction to `order`.
    pub fn to_series(&self, order: usize) -> Result<TruncSeries, ExprError> {
        match self {
            Value::Fraction(f) => Ok(f.expand(order)),
            Value::Series(s) => Ok(s.clone()),
            Value::Nc(_) => Err(type_err("expected a one-variable expression, got an NC series")),
        }
    }

    pub fn as_fraction(&self) -> Result<&PolyFraction, ExprError> {
        match self {
            Value::Fraction(f) => Ok(f),
            _ => Err(type_err("expected a polynomial or rational fraction")),
        }
    }

    pub fn as_nc(&self) -> Result<&NCSeries, ExprError> {
        match self {
            Value::Nc(s) => Ok(s),
            _ => Err(type_err("expected an NC series")),
        }
    }

    fn constant(&self) -> Option<u32> {
        match self {
            Value::Fraction(f) if f.is_polynomial() && f.num().degree_or_zero() == 0 => Some(f.constant_term()),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Fraction(x) => write!(f, "{x}"),
            Value::Series(x) => write!(f, "{x}"),
            Value::Nc(x) => write!(f, "{x}"),
        }
    }
}

/// Parses and evaluates.
pub fn eval_str(src: &str, ctx: &EvalContext) -> Result<Value, ExprError> {
    let e = parse(src)?;
    let ctx = EvalContext { nc_vars: ctx.nc_vars.or_else(|| nc_arity(&e)), ..*ctx };
    eval(&e, &ctx)
}

/// Largest NC variable count the expression mentions.
fn nc_arity(e: &Expr) -> Option<usize> {
    match e {
        Expr::Word(w) => w.letters().max().map(|s| s as usize + 1),
        Expr::Order(OrderMark::Nc(_)) => Some(1),
        Expr::Neg(a) | Expr::Pow(a, _) => nc_arity(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => nc_arity(a).max(nc_arity(b)),
        Expr::Call(name, args) => {
            let own = (name == "geometric").then_some(args.len());
            args.iter().map(nc_arity).fold(own, Option::max)
        }
        _ => None,
    }
}

fn int_arg(e: &Expr) -> Result<i64, ExprError> {
    match e {
        Expr::Int(n) => i64::try_from(*n).map_err(|_| type_err("integer argument too large")),
        Expr::Neg(inner) => Ok(-int_arg(inner)?),
        _ => Err(type_err("expected an integer argument")),
    }
}

fn arity(name: &str, args: &[Expr], n: usize, expected: &'static str) -> Result<(), ExprError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(ExprError::Arity { name: name.into(), expected })
    }
}

pub fn eval(e: &Expr, ctx: &EvalContext) -> Result<Value, ExprError> {
    let p = ctx.prime;
    match e {
        Expr::Int(n) => Ok(Value::Fraction(PolyFraction::from_poly(FpPoly::constant(p, (*n % p.get() as u64) as u32)))),
        Expr::X => Ok(Value::Fraction(PolyFraction::from_poly(FpPoly::x(p)))),
        Expr::Unknown => Err(type_err("`y`/`z` only appear in relations")),
        Expr::Word(w) => {
            let mut s = NCSeries::zero_with_limits(ctx.nc_vars.unwrap_or(1), ctx.nc_order, ctx.field(), ctx.nc_limits)?;
            s.set(*w, 1);
            Ok(Value::Nc(s))
        }
        Expr::Order(OrderMark::Uni(n)) => Ok(Value::Series(TruncSeries::zero(ctx.field(), *n))),
        Expr::Order(OrderMark::Nc(n)) => {
            Ok(Value::Nc(NCSeries::zero_with_limits(ctx.nc_vars.unwrap_or(1), *n, ctx.field(), ctx.nc_limits)?))
        }
        Expr::Neg(a) => negate(eval(a, ctx)?),
        Expr::Add(a, b) => binary(Op::Add, eval(a, ctx)?, eval(b, ctx)?),
        Expr::Sub(a, b) => binary(Op::Sub, eval(a, ctx)?, eval(b, ctx)?),
        Expr::Mul(a, b) => binary(Op::Mul, eval(a, ctx)?, eval(b, ctx)?),
        Expr::Div(a, b) => binary(Op::Div, eval(a, ctx)?, eval(b, ctx)?),
        Expr::Pow(a, k) => power(eval(a, ctx)?, *k),
        Expr::Call(name, args) => call(name, args, ctx),
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

fn negate(v: Value) -> Result<Value, ExprError> {
    Ok(match v {
        Value::Fraction(f) => Value::Fraction(f.neg()),
        Value::Series(s) => Value::Series(s.neg()),
        Value::Nc(s) => Value::Nc(s.scale(s.ring().p() - 1)),
    })
}

fn series_op(op: Op, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries, ExprError> {
    Ok(match op {
        Op::Add => a.add(b)?,
        Op::Sub => a.sub(b)?,
        Op::Mul => a.cauchy_mul(b)?,
        Op::Div => a.cauchy_mul(&b.cauchy_inv()?)?,
    })
}

fn binary(op: Op, a: Value, b: Value) -> Result<Value, ExprError> {
    match (a, b) {
        (Value::Fraction(x), Value::Fraction(y)) => Ok(Value::Fraction(match op {
            Op::Add => x.add(&y)?,
            Op::Sub => x.sub(&y)?,
            Op::Mul => x.mul(&y)?,
            Op::Div => x.div(&y)?,
        })),
        (Value::Series(x), Value::Series(y)) => Ok(Value::Series(series_op(op, &x, &y)?)),
        (Value::Series(x), Value::Fraction(y)) => Ok(Value::Series(series_op(op, &x, &y.expand(x.order()))?)),
        (Value::Fraction(x), Value::Series(y)) => Ok(Value::Series(series_op(op, &x.expand(y.order()), &y)?)),
        (Value::Nc(x), Value::Nc(y)) => Ok(Value::Nc(match op {
            Op::Add => x.add(&y)?,
            Op::Sub => x.sub(&y)?,
            Op::Mul => x.concat_mul(&y)?,
            Op::Div => return Err(type_err("NC series can only be divided by scalars")),
        })),
        (Value::Nc(x), c) if c.constant().is_some() => {
            let k = c.constant().expect("checked");
            let mut cs = x.empty_like();
            cs.set(Word::EMPTY, k);
            Ok(Value::Nc(match op {
                Op::Add => x.add(&cs)?,
                Op::Sub => x.sub(&cs)?,
                Op::Mul => x.scale(k),
                Op::Div => x.scale(x.ring().inv(k).ok_or_else(|| type_err("division by zero"))?),
            }))
        }
        (c, Value::Nc(x)) if c.constant().is_some() => {
            let k = c.constant().expect("checked");
            let mut cs = x.empty_like();
            cs.set(Word::EMPTY, k);
            Ok(Value::Nc(match op {
                Op::Add => cs.add(&x)?,
                Op::Sub => cs.sub(&x)?,
                Op::Mul => x.scale(k),
                Op::Div => return Err(type_err("NC series can only be divided by scalars")),
            }))
        }
        _ => Err(type_err("cannot combine an NC series with a non-constant one-variable expression")),
    }
}

fn power(v: Value, k: i64) -> Result<Value, ExprError> {
    match v {
        Value::Fraction(f) => Ok(Value::Fraction(f.pow(k)?)),
        Value::Series(s) => {
            let base = if k < 0 { s.cauchy_inv()? } else { s };
            Ok(Value::Series(base.cauchy_pow(k.unsigned_abs())))
        }
        Value::Nc(s) => {
            if k < 0 {
                return Err(type_err("negative powers of NC series are not supported"));
            }
            let mut acc = s.empty_like();
            acc.set(Word::EMPTY, 1);
            for _ in 0..k.min(s.order() as i64) {
                acc = acc.concat_mul(&s)?;
            }
            Ok(Value::Nc(acc))
        }
    }
}

type UniMap = fn(&TruncSeries) -> Result<TruncSeries, SeriesError>;

fn uni_map(name: &str) -> Option<UniMap> {
    Some(match name {
        "sigma" => sigma,
        "sigma_inv" => sigma_inv,
        "sigma_tilde" => sigma_tilde,
        "sigma_tilde_inv" => sigma_tilde_inv,
        "psi" => psi,
        "psi_inv" => psi_inv,
        "shuffle_inv" => TruncSeries::shuffle_inv,
        "frobenius" => TruncSeries::frobenius,
        _ => return None,
    })
}

fn call(name: &str, args: &[Expr], ctx: &EvalContext) -> Result<Value, ExprError> {
    let ring = ctx.field();
    let p = ctx.prime;
    if let Some(f) = uni_map(name) {
        arity(name, args, 1, "1")?;
        let v = eval(&args[0], ctx)?;
        if let Value::Nc(s) = &v {
            return Ok(Value::Nc(match name {
                "sigma" => s.sigma()?,
                "sigma_inv" => s.sigma_inv()?,
                "shuffle_inv" => s.shuffle_inv()?,
                _ => return Err(type_err(format!("`{name}` is not defined on NC series"))),
            }));
        }
        return Ok(Value::Series(f(&v.to_series(ctx.order)?)?));
    }
    match name {
        "shuffle" => {
            arity(name, args, 2, "2")?;
            match (eval(&args[0], ctx)?, eval(&args[1], ctx)?) {
                (Value::Nc(a), Value::Nc(b)) => Ok(Value::Nc(a.shuffle(&b)?)),
                (a, b) => Ok(Value::Series(a.to_series(ctx.order)?.shuffle_mul(&b.to_series(ctx.order)?)?)),
            }
        }
        "sigma_iter" => {
            arity(name, args, 2, "2")?;
            let a = eval(&args[0], ctx)?.to_series(ctx.order)?;
            Ok(Value::Series(iterate_sigma(&a, int_arg(&args[1])?)?))
        }
        "section" => {
            arity(name, args, 3, "3")?;
            let a = eval(&args[0], ctx)?.to_series(ctx.order)?;
            let k = usize::try_from(int_arg(&args[1])?).map_err(|_| type_err("negative offset"))?;
            let f = u32::try_from(int_arg(&args[2])?).map_err(|_| type_err("negative level"))?;
            Ok(Value::Series(section(&a, k, f)?))
        }
        "lacunary" => {
            arity(name, args, 3, "3 (base, factor, shift)")?;
            let (b, c, s) = (int_arg(&args[0])?, int_arg(&args[1])?, int_arg(&args[2])?);
            if b < 2 || c < 1 || c + s < 0 {
                return Err(type_err("lacunary needs base ≥ 2, factor ≥ 1 and non-negative exponents"));
            }
            let mut out = vec![0u32; ctx.order];
            let mut pw = 1i64;
            while let Some(e) = (c * pw + s).try_into().ok().filter(|&e: &usize| e < ctx.order) {
                out[e] = ring.add(out[e], 1);
                pw *= b;
            }
            Ok(Value::Series(TruncSeries::new(ring, out)?))
        }
        "thue_morse" => {
            arity(name, args, 1, "1 (shift)")?;
            let s = usize::try_from(int_arg(&args[0])?).map_err(|_| type_err("negative shift"))?;
            Ok(Value::Series(thue_morse_series(ring, s, ctx.order)))
        }
        "binom_diag" => {
            arity(name, args, 1, "1")?;
            let a = u64::try_from(int_arg(&args[0])?).map_err(|_| type_err("negative parameter"))?;
            if a == 0 {
                return Err(type_err("binom_diag needs a ≥ 1"));
            }
            Ok(Value::Series(TruncSeries::from_fn(ring, ctx.order, |n| {
                binom_mod_p(n as u64, (a - 1) * n as u64, p).value()
            })))
        }
        "geometric" => {
            if args.is_empty() || args.len() > 4 {
                return Err(ExprError::Arity { name: name.into(), expected: "1 to 4" });
            }
            let lambda = args.iter().map(|a| Ok(ring.from_i64(int_arg(a)?))).collect::<Result<Vec<_>, ExprError>>()?;
            let k = ctx.nc_vars.unwrap_or(lambda.len());
            if k != lambda.len() {
                return Err(type_err(format!("geometric has {} weights but the series has {k} variables", lambda.len())));
            }
            Ok(Value::Nc(geometric_with_limits(&lambda, ctx.nc_order, ring, ctx.nc_limits)?))
        }
        _ => Err(ExprError::UnknownFunction(name.into())),
    }
}

/// Bivariate polynomial in `X` and the unknown, indexed by the power of
/// the unknown.
#[derive(Debug, Clone)]
struct BiPoly(Vec<FpPoly>);

impl BiPoly {
    fn constant(p: FpPoly) -> Self {
        BiPoly(vec![p])
    }

    fn combine(&self, other: &Self, sign: bool) -> Result<Self, ExprError> {
        let n = self.0.len().max(other.0.len());
        let p = self.0[0].prime();
        let get = |v: &[FpPoly], i: usize| v.get(i).cloned().unwrap_or_else(|| FpPoly::zero(p));
        (0..n)
            .map(|i| {
                let (a, b) = (get(&self.0, i), get(&other.0, i));
                let r = if sign { a.add(&b) } else { a.sub(&b) };
                r.map_err(|e| type_err(e.to_string()))
            })
            .collect::<Result<_, _>>()
            .map(BiPoly)
    }

    fn mul(&self, other: &Self) -> Result<Self, ExprError> {
        let p = self.0[0].prime();
        let mut out = vec![FpPoly::zero(p); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                let prod = a.mul(b).map_err(|e| type_err(e.to_string()))?;
                out[i + j] = out[i + j].add(&prod).map_err(|e| type_err(e.to_string()))?;
            }
        }
        Ok(BiPoly(out))
    }
}

fn eval_bipoly(e: &Expr, p: PrimeModulus) -> Result<BiPoly, ExprError> {
    Ok(match e {
        Expr::Int(n) => BiPoly::constant(FpPoly::constant(p, (*n % p.get() as u64) as u32)),
        Expr::X => BiPoly::constant(FpPoly::x(p)),
        Expr::Unknown => BiPoly(vec![FpPoly::zero(p), FpPoly::one(p)]),
        Expr::Neg(a) => BiPoly::constant(FpPoly::zero(p)).combine(&eval_bipoly(a, p)?, false)?,
        Expr::Add(a, b) => eval_bipoly(a, p)?.combine(&eval_bipoly(b, p)?, true)?,
        Expr::Sub(a, b) => eval_bipoly(a, p)?.combine(&eval_bipoly(b, p)?, false)?,
        Expr::Mul(a, b) => eval_bipoly(a, p)?.mul(&eval_bipoly(b, p)?)?,
        Expr::Pow(a, k) if *k >= 0 => {
            let base = eval_bipoly(a, p)?;
            let mut acc = BiPoly::constant(FpPoly::one(p));
            for _ in 0..*k {
                acc = acc.mul(&base)?;
            }
            acc
        }
        _ => return Err(type_err("relations are polynomials in X and z with non-negative exponents")),
    })
}

/// Parses `P(X, z)` or `P(X, z) = Q(X, z)` into a relation `P - Q = 0`.
pub fn parse_relation(src: &str, p: PrimeModulus) -> Result<Relation, ExprError> {
    let (lhs, rhs) = match src.split_once('=') {
        Some((l, r)) => (l, Some(r)),
        None => (src, None),
    };
    let mut poly = eval_bipoly(&parse(lhs)?, p)?;
    if let Some(r) = rhs {
        let rp = eval_bipoly(&parse(r).map_err(|e| ParseError { pos: e.pos + lhs.len() + 1, ..e })?, p)?;
        poly = poly.combine(&rp, false)?;
    }
    let terms = poly
        .0
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.coeffs().iter().enumerate().filter(|(_, &v)| v != 0).map(move |(i, &v)| (i, j, v)))
        .collect();
    Ok(Relation::new(p, terms))
}

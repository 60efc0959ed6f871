//! Expression syntax, evaluation and the text/JSON forms of series.
//!
//! Grammar, loosest first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! atom   := number [ident | '(' ...]       implicit product, as in 3x
//!         | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents are rational constants (`E^-1`, `x^(1/2)`, `(1+t)^(-2/3)`),
//! except after `e`, where `e^(...)` is `exp(...)`. Symbols are generator
//! names, `x` (the inverse of the `x^-1` generator, or the variable inside
//! an exponential) and `exp1` for `e^x`. Functions: `abs exp log1p inv D
//! logd`.
//!
//! The printed form lists terms in descending order, writes the first
//! exponential generator as `e^(q x)` and the `x^-1` generator as powers of
//! `x`; it parses back to the same series.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic::{eval_power_series, exp_series, log1p_series, power};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::monomial::{GeneratorContext, GeneratorKind, Monomial};
use crate::scalar::Scalar;
use crate::series::{Bound, Series};
use crate::Rational;

pub fn is_function_name(name: &str) -> bool {
    Func::from_name(name).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Log1p,
    Inv,
    D,
    Logd,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "log1p" => Func::Log1p,
            "inv" => Func::Inv,
            "D" => Func::D,
            "logd" => Func::Logd,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

/// `123`, `1.25`; signs and fractions are handled by the parser.
fn number(digits: &str) -> Option<Rational> {
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let all = format!("{int}{frac}");
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    Some(Rational::new(n, num_traits::pow(BigInt::from(10), frac.len())))
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch.is_ascii_digit() || ch == '.' {
            let mut end = pos;
            while let Some(&(i, c)) = chars.peek() {
                if !(c.is_ascii_digit() || c == '.') {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let q = number(&src[pos..end]).ok_or_else(|| syntax(pos, "malformed number"))?;
            out.push((pos, Tok::Num(q)));
        } else if ch.is_alphabetic() || ch == '_' {
            let mut end = pos;
            while let Some(&(i, c)) = chars.peek() {
                if !(c.is_alphanumeric() || c == '_') {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            out.push((pos, Tok::Ident(src[pos..end].to_string())));
        } else if "+-*/^()".contains(ch) {
            out.push((pos, Tok::Op(ch)));
            chars.next();
        } else {
            return Err(syntax(pos, format!("unexpected character '{ch}'")));
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

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
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

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Ident("e".into()) && self.toks[self.at + 1].1 == Tok::Op('^') {
            self.at += 2;
            let neg = self.eat('-');
            let arg = self.atom()?;
            return Ok(Expr::Call(
                Func::Exp,
                Box::new(if neg { Expr::Neg(Box::new(arg)) } else { arg }),
            ));
        }
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), self.exponent()?))
        } else {
            Ok(base)
        }
    }

    /// A rational constant: signed literal or parenthesized constant
    /// expression, right associative.
    fn exponent(&mut self) -> Result<Rational> {
        let pos = self.pos();
        let neg = self.eat('-');
        let base = match self.bump() {
            Tok::Num(q) => q,
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                fold_constant(&e).ok_or_else(|| syntax(pos, "exponent must be a rational constant"))?
            }
            _ => return Err(syntax(pos, "exponent must be a rational constant")),
        };
        let value = if self.eat('^') {
            let e = self.exponent()?;
            Scalar::pow_rational(&base, &e).ok_or_else(|| syntax(pos, "exponent must be a rational constant"))?
        } else {
            base
        };
        Ok(if neg { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(q) => {
                let n = Expr::Num(q);
                match self.peek() {
                    Tok::Ident(_) | Tok::Op('(') => Ok(Expr::Mul(Box::new(n), Box::new(self.power()?))),
                    _ => Ok(n),
                }
            }
            Tok::Ident(name) => {
                if self.eat('(') {
                    let f = Func::from_name(&name).ok_or_else(|| syntax(pos, format!("unknown function {name}")))?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Call(f, Box::new(arg)))
                } else if Func::from_name(&name).is_some() {
                    Err(syntax(self.pos(), format!("expected '(' after {name}")))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::Op(c) => Err(syntax(pos, format!("unexpected '{c}'"))),
        }
    }
}

fn fold_constant(e: &Expr) -> Option<Rational> {
    Some(match e {
        Expr::Num(q) => q.clone(),
        Expr::Neg(a) => -fold_constant(a)?,
        Expr::Add(a, b) => fold_constant(a)? + fold_constant(b)?,
        Expr::Sub(a, b) => fold_constant(a)? - fold_constant(b)?,
        Expr::Mul(a, b) => fold_constant(a)? * fold_constant(b)?,
        Expr::Div(a, b) => {
            let d = fold_constant(b)?;
            if d.is_zero() {
                return None;
            }
            fold_constant(a)? / d
        }
        Expr::Pow(a, q) => Scalar::pow_rational(&fold_constant(a)?, q)?,
        _ => return None,
    })
}

/// Parses without looking at any generator context.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and checks every symbol against `ctx`.
pub fn parse_in(src: &str, ctx: &GeneratorContext) -> Result<Expr> {
    let e = parse(src)?;
    check_symbols(&e, ctx, false)?;
    Ok(e)
}

fn check_symbols(e: &Expr, ctx: &GeneratorContext, in_exp: bool) -> Result<()> {
    match e {
        Expr::Num(_) => Ok(()),
        Expr::Sym(s) => {
            let known = ctx.index_of(s).is_some()
                || (s == "x" && (in_exp || ctx.x_monomial().is_some()))
                || (s == "exp1" && ctx.exp_monomial(&Rational::one()).is_some());
            if known {
                Ok(())
            } else {
                Err(Error::UnknownSymbol(s.clone()))
            }
        }
        Expr::Neg(a) | Expr::Pow(a, _) => check_symbols(a, ctx, in_exp),
        Expr::Call(f, a) => check_symbols(a, ctx, in_exp || *f == Func::Exp),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            check_symbols(a, ctx, in_exp)?;
            check_symbols(b, ctx, in_exp)
        }
    }
}

/// Evaluates `e` to a series reliable through weight `depth` where
/// possible. Intermediate steps are retried with a deeper working bound
/// until the result is known through `depth` or the retries run out.
pub fn eval_expr<C: Scalar>(e: &Expr, derivation: &Derivation<C>, depth: &Rational) -> Result<Series<C>> {
    let target = Bound::Through(depth.clone());
    let mut result = None;
    for extra in [0i64, 1, 2, 4, 8, 16, 32] {
        let work = depth + Rational::from_integer(extra.into());
        let r = Eval {
            d: derivation,
            work: &work,
        }
        .eval(e)?;
        let done = r.is_exact() || *r.known_below() >= target;
        result = Some(r);
        if done {
            break;
        }
    }
    let r = result.expect("at least one pass");
    Ok(if r.is_exact() { r } else { r.truncate(depth) })
}

struct Eval<'a, C> {
    d: &'a Derivation<C>,
    work: &'a Rational,
}

impl<C: Scalar> Eval<'_, C> {
    fn ctx(&self) -> &Arc<GeneratorContext> {
        self.d.context()
    }

    fn trunc(&self, s: Series<C>) -> Series<C> {
        if s.is_exact() {
            s
        } else {
            s.truncate(self.work)
        }
    }

    fn symbol(&self, s: &str) -> Result<Series<C>> {
        let ctx = self.ctx();
        if let Some(i) = ctx.index_of(s) {
            return Ok(Series::generator(ctx, i));
        }
        let m = match s {
            "x" => ctx.x_monomial(),
            "exp1" => Some(
                ctx.exp_monomial(&Rational::one())
                    .ok_or_else(|| Error::MissingExpGenerator("1".into()))?,
            ),
            _ => None,
        };
        m.map(|m| Series::monomial(ctx, m, C::one()))
            .ok_or_else(|| Error::UnknownSymbol(s.into()))
    }

    fn eval(&self, e: &Expr) -> Result<Series<C>> {
        let ctx = self.ctx();
        Ok(match e {
            Expr::Num(q) => Series::from_rational(ctx, q),
            Expr::Sym(s) => self.symbol(s)?,
            Expr::Neg(a) => -&self.eval(a)?,
            Expr::Add(a, b) => self.eval(a)?.checked_add(&self.eval(b)?)?,
            Expr::Sub(a, b) => self.eval(a)?.checked_sub(&self.eval(b)?)?,
            Expr::Mul(a, b) => self.trunc(self.eval(a)?.checked_mul(&self.eval(b)?)?),
            Expr::Div(a, b) => {
                let num = self.eval(a)?;
                let low = num.min_weight().unwrap_or_else(Rational::zero);
                let inv = self.eval(b)?.invert(&(self.work - low))?;
                self.trunc(num.checked_mul(&inv)?)
            }
            Expr::Pow(a, q) => self.pow(&self.eval(a)?, q)?,
            Expr::Call(f, a) => match f {
                Func::Exp => self.exp(a)?,
                Func::Abs => self.eval(a)?.abs(),
                Func::Inv => self.eval(a)?.invert(self.work)?,
                Func::D => self.d.derive(&self.eval(a)?)?,
                Func::Logd => self.d.log_derivative(&self.eval(a)?, self.work)?,
                Func::Log1p => eval_power_series(&log1p_series(ctx), &self.eval(a)?, self.work)?,
            },
        })
    }

    fn pow(&self, base: &Series<C>, q: &Rational) -> Result<Series<C>> {
        if q.is_integer() {
            let n = q.to_integer();
            let k = u32::try_from(n.magnitude()).map_err(|_| Error::PreconditionFailed("exponent too large".into()))?;
            let p = self.trunc(base.powi(k));
            return if n.is_negative() { p.invert(self.work) } else { Ok(p) };
        }
        if base.sign() < 0 && !q.denom().is_even() {
            let p = power(&-base, q, self.work)?;
            return Ok(if q.numer().is_odd() { -&p } else { p });
        }
        power(base, q, self.work)
    }

    /// `λ x + s` for an exponent that is affine in `x`.
    fn affine(&self, e: &Expr) -> Result<(Rational, Series<C>)> {
        let ctx = self.ctx();
        let constant = |s: &Series<C>| {
            (s.is_exact() && s.len() <= 1 && s.terms().all(|(m, _)| m.is_one())).then(|| s.constant_term())
        };
        Ok(match e {
            Expr::Sym(s) if s == "x" => (Rational::one(), Series::zero(ctx)),
            Expr::Neg(a) => {
                let (l, s) = self.affine(a)?;
                (-l, -&s)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (la, sa) = self.affine(a)?;
                let (lb, sb) = self.affine(b)?;
                if matches!(e, Expr::Add(..)) {
                    (la + lb, sa.checked_add(&sb)?)
                } else {
                    (la - lb, sa.checked_sub(&sb)?)
                }
            }
            Expr::Mul(a, b) => {
                let (la, sa) = self.affine(a)?;
                let (lb, sb) = self.affine(b)?;
                match (la.is_zero(), lb.is_zero()) {
                    (true, true) => (la, self.trunc(sa.checked_mul(&sb)?)),
                    (true, false) | (false, true) => {
                        let (k, l, s) = if la.is_zero() { (sa, lb, sb) } else { (sb, la, sa) };
                        let k = constant(&k)
                            .and_then(|c| c.to_rational())
                            .ok_or_else(|| Error::PreconditionFailed("exponent must be affine in x".into()))?;
                        (l * &k, s.scale(&C::from_rational(&k)))
                    }
                    (false, false) => return Err(Error::PreconditionFailed("exponent must be affine in x".into())),
                }
            }
            Expr::Div(a, b) => {
                let (la, sa) = self.affine(a)?;
                if la.is_zero() {
                    (la, self.eval(e)?)
                } else {
                    let k = constant(&self.eval(b)?)
                        .and_then(|c| c.to_rational())
                        .filter(|k| !k.is_zero())
                        .ok_or_else(|| Error::PreconditionFailed("exponent must be affine in x".into()))?;
                    (la / &k, sa.scale(&C::from_rational(&k.recip())))
                }
            }
            _ => (Rational::zero(), self.eval(e)?),
        })
    }

    fn exp(&self, arg: &Expr) -> Result<Series<C>> {
        let ctx = self.ctx();
        let (lambda, s) = self.affine(arg)?;
        let c0 = s.constant_term();
        if !c0.is_zero() {
            return Err(Error::IrrationalScalarPower {
                base: "e".into(),
                exponent: c0.to_string(),
            });
        }
        let rest = s.checked_sub(&Series::constant(ctx, c0))?;
        let m = if lambda.is_zero() {
            ctx.one()
        } else {
            ctx.exp_monomial(&lambda)
                .ok_or_else(|| Error::MissingExpGenerator(lambda.to_string()))?
        };
        let unit = if rest.is_exact_zero() {
            Series::one(ctx)
        } else {
            eval_power_series(&exp_series(ctx), &rest, &(self.work - ctx.weight(&m)))?
        };
        Ok(unit.mul_monomial(&m))
    }
}

fn first_exp(ctx: &GeneratorContext) -> Option<usize> {
    ctx.generators()
        .iter()
        .position(|g| matches!(g.kind, GeneratorKind::Exp { .. }))
}

/// `^k` suffix for a power `k != 0`.
fn pow_suffix(k: &Rational) -> String {
    if k.is_one() {
        String::new()
    } else if k.is_integer() && k.is_positive() {
        format!("^{k}")
    } else {
        format!("^({k})")
    }
}

/// `q x` as `x`, `-x`, `3x`, `x/2`, `-3x/2`.
fn linear_x(q: &Rational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let n = q.numer().magnitude().clone();
    let num = if n.is_one() { String::new() } else { n.to_string() };
    let den = if q.denom().is_one() {
        String::new()
    } else {
        format!("/{}", q.denom())
    };
    format!("{sign}{num}x{den}")
}

pub fn format_monomial(ctx: &GeneratorContext, m: &Monomial) -> String {
    let exp_index = first_exp(ctx);
    let mut factors = Vec::new();
    for (i, (g, k)) in ctx.generators().iter().zip(m.exponents()).enumerate() {
        if k.is_zero() {
            continue;
        }
        factors.push(match &g.kind {
            GeneratorKind::Exp { rate } if Some(i) == exp_index => format!("e^({})", linear_x(&-(k * rate))),
            GeneratorKind::RecipX => format!("x{}", pow_suffix(&-k)),
            _ => format!("{}{}", g.name, pow_suffix(k)),
        });
    }
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join("*")
    }
}

/// The stored terms, largest first; `0` when nothing is stored.
pub fn format_series<C: Scalar>(f: &Series<C>) -> String {
    let ctx = f.context();
    let mut out = String::new();
    for (i, (m, c)) in f.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        if m.is_one() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&format_monomial(ctx, m));
        } else {
            out.push_str(&format!("{a}*{}", format_monomial(ctx, m)));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `known_below` as text: `<q`, `<=q` or `exact`.
pub fn format_bound(b: &Bound) -> String {
    b.to_string()
}

/// Reads the printed form back; the bound is not part of the text and is
/// supplied separately.
pub fn parse_series<C: Scalar>(src: &str, derivation: &Derivation<C>, bound: Bound) -> Result<Series<C>> {
    let e = parse_in(src, derivation.context())?;
    let s = eval_expr(&e, derivation, &Rational::zero())?;
    if !s.is_exact() {
        return Err(Error::PreconditionFailed("printed series must evaluate exactly".into()));
    }
    Ok(s.with_bound(bound))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exponents: Vec<String>,
}

/// `{"terms":[{"coeff":"p/q","exponents":["a",...]}],"known_below":"<=N"}`
/// with `known_below: null` for exact series. Terms are listed largest
/// first and exponents follow the generator order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<TermJson>,
    pub known_below: Option<String>,
}

pub fn to_json<C: Scalar>(f: &Series<C>) -> SeriesJson {
    SeriesJson {
        terms: f
            .terms()
            .map(|(m, c)| TermJson {
                coeff: c.to_string(),
                exponents: m.exponents().iter().map(ToString::to_string).collect(),
            })
            .collect(),
        known_below: (!f.is_exact()).then(|| f.known_below().to_string()),
    }
}

/// `p/q`, `-p`, `1.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Syntax {
        pos: 0,
        msg: format!("not a rational number: {s}"),
    };
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let q = match body.split_once('/') {
        Some((n, d)) => {
            let d = number(d).filter(|d| !d.is_zero()).ok_or_else(bad)?;
            number(n).ok_or_else(bad)? / d
        }
        None => number(body).ok_or_else(bad)?,
    };
    Ok(if neg { -q } else { q })
}

pub fn from_json<C: Scalar>(ctx: &Arc<GeneratorContext>, j: &SeriesJson) -> Result<Series<C>> {
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        if t.exponents.len() != ctx.len() {
            return Err(Error::InvalidContext(format!(
                "term has {} exponents for {} generators",
                t.exponents.len(),
                ctx.len()
            )));
        }
        let exps = t
            .exponents
            .iter()
            .map(|e| parse_rational(e))
            .collect::<Result<Vec<_>>>()?;
        terms.push((
            Monomial::from_exponents(exps),
            C::from_rational(&parse_rational(&t.coeff)?),
        ));
    }
    let bound = match &j.known_below {
        None => Bound::Exact,
        Some(b) => Bound::from_str(b)?,
    };
    Series::from_terms(ctx, terms, bound)
}

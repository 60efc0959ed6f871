#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use dashu::float::round::mode::HalfEven;
use dashu::float::FBig;
use dashu::integer::IBig;
use hahn::numeric::Real;
use hahn::{Bound, GeneratorContext, Monomial, QSeries, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Nonzero `p/q` with small numerator and denominator.
pub fn coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut p = 0;
    while p == 0 {
        p = rng.gen_range(-9..=9);
    }
    q(p, rng.gen_range(1..=4))
}

/// `E^a X^b` in a two-generator context, exponents in halves.
pub fn mono(a: i64, b: i64) -> Monomial {
    Monomial::from_exponents(vec![q(a, 2), q(b, 2)])
}

/// Finite exact series with arbitrary monomials `E^(a/2) X^(b/2)`.
pub fn exact(rng: &mut ChaCha8Rng, ctx: &Arc<GeneratorContext>, max_terms: usize) -> QSeries {
    let n = rng.gen_range(1..=max_terms);
    let terms: Vec<_> = (0..n)
        .map(|_| (mono(rng.gen_range(-6..=6), rng.gen_range(-6..=6)), coeff(rng)))
        .collect();
    QSeries::from_terms(ctx, terms, Bound::Exact).unwrap()
}

/// Infinitesimal tail: terms `E^(a/2) X^(b/2)` with `a, b >= 0`, not both 0.
pub fn tail(rng: &mut ChaCha8Rng, ctx: &Arc<GeneratorContext>, max_terms: usize) -> QSeries {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..n)
        .map(|_| {
            let (mut a, b) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
            if a == 0 && b == 0 {
                a = 1;
            }
            (mono(a, b), coeff(rng))
        })
        .collect();
    QSeries::from_terms(ctx, terms, Bound::Exact).unwrap()
}

/// `d m (1 + tail)` cut at a random depth, so the stored terms are the
/// leading part of an exact object.
pub fn truncated(rng: &mut ChaCha8Rng, ctx: &Arc<GeneratorContext>) -> QSeries {
    let m = mono(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
    let d = coeff(rng);
    let body = &QSeries::one(ctx) + &tail(rng, ctx, 4);
    let f = body.mul_monomial(&m).scale(&d);
    let w = ctx.weight(&m);
    let depth = w + q(rng.gen_range(2..=8), 2);
    if rng.gen_bool(0.5) {
        f.truncate(&depth)
    } else {
        f.with_bound(Bound::Below(depth))
    }
}

/// Random element of `{infinitesimal, c (1 + infinitesimal)}`.
pub fn factor(rng: &mut ChaCha8Rng, ctx: &Arc<GeneratorContext>) -> QSeries {
    let kind = *[0u8, 1, 2].choose(rng).unwrap();
    let mut t = tail(rng, ctx, 3);
    if t.is_zero() {
        t = QSeries::monomial(ctx, mono(1, 0), q(1, 1));
    }
    match kind {
        0 => t,
        1 => &QSeries::one(ctx) + &t,
        _ => (&QSeries::one(ctx) + &t).scale(&coeff(rng)),
    }
}

/// Exact `Σ binom(c, k) x^k` coefficient.
pub fn binom(c: &Rational, k: usize) -> Rational {
    let mut acc = q(1, 1);
    for i in 0..k {
        acc = acc * (c - Rational::from_integer(i.into())) / Rational::from_integer((i + 1).into());
    }
    acc
}

const PREC: usize = 256;

type F = FBig<HalfEven, 2>;

fn big(n: &num_bigint::BigInt) -> F {
    F::from(IBig::from_str(&n.to_string()).unwrap())
        .with_precision(PREC)
        .value()
}

/// 256-bit binary floats.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Hp(pub F);

impl Real for Hp {
    fn from_rational(x: &Rational) -> Self {
        Hp(big(x.numer()) / big(x.denom()))
    }
    fn from_f64(x: f64) -> Self {
        Hp(F::try_from(x).unwrap().with_precision(PREC).value())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn exp(&self) -> Self {
        Hp(self.0.exp())
    }
    fn ln(&self) -> Self {
        Hp(self.0.ln())
    }
}

macro_rules! hp_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Hp {
            type Output = Hp;
            fn $m(self, o: Hp) -> Hp {
                Hp(self.0 $op o.0)
            }
        }
    };
}

hp_op!(Add, add, +);
hp_op!(Sub, sub, -);
hp_op!(Mul, mul, *);
hp_op!(Div, div, /);

impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(-self.0)
    }
}

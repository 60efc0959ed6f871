//! Truncated series in `k[[M]]`.
//!
//! A [`Series`] stores finitely many terms together with a reliability
//! [`Bound`]: every term of the exact object whose weight lies inside the
//! bound is stored, and nothing outside it is. Arithmetic propagates the
//! bound conservatively, so a truncated result never claims more than its
//! inputs justify.
//!
//! Reliability is expressed in weights while dominance is lexicographic, so
//! decisions about leading terms assume that a term of larger weight is
//! dominated by a term of smaller weight. That holds on any single
//! generator and on every support where all infinitesimal ratios carry
//! positive weight, which is where truncation is used.

mod bound;
mod relation;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

pub use bound::Bound;
pub use relation::Dominance;

use crate::error::{Error, Result};
use crate::monomial::{GeneratorContext, Monomial};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C = Rational> {
    ctx: Arc<GeneratorContext>,
    // ascending in the dominance order; iterate in reverse for display order
    terms: BTreeMap<Monomial, C>,
    bound: Bound,
}

/// Where the stored part of a series starts, as seen by the comparison code.
pub(crate) enum Lead<'a, C> {
    Zero,
    Term(&'a Monomial, &'a C, Rational),
    Unknown(&'a Bound),
}

impl<C: Scalar> Series<C> {
    pub fn zero(ctx: &Arc<GeneratorContext>) -> Self {
        Series {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            bound: Bound::Exact,
        }
    }

    /// A series with no known terms, reliable inside `bound`.
    pub fn unknown(ctx: &Arc<GeneratorContext>, bound: Bound) -> Self {
        Series {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            bound,
        }
    }

    pub fn constant(ctx: &Arc<GeneratorContext>, c: C) -> Self {
        Self::monomial(ctx, ctx.one(), c)
    }

    pub fn one(ctx: &Arc<GeneratorContext>) -> Self {
        Self::constant(ctx, C::one())
    }

    pub fn from_rational(ctx: &Arc<GeneratorContext>, q: &Rational) -> Self {
        Self::constant(ctx, C::from_rational(q))
    }

    pub fn monomial(ctx: &Arc<GeneratorContext>, m: Monomial, c: C) -> Self {
        assert_eq!(m.exponents().len(), ctx.len(), "monomial from a different context");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Series {
            ctx: ctx.clone(),
            terms,
            bound: Bound::Exact,
        }
    }

    /// Generator `i` as an exact series.
    pub fn generator(ctx: &Arc<GeneratorContext>, i: usize) -> Self {
        Self::monomial(ctx, ctx.gen(i), C::one())
    }

    /// Collects terms, summing repeated monomials and dropping zeros and
    /// anything outside `bound`.
    pub fn from_terms(
        ctx: &Arc<GeneratorContext>,
        terms: impl IntoIterator<Item = (Monomial, C)>,
        bound: Bound,
    ) -> Result<Self> {
        let mut map: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m, c) in terms {
            if m.exponents().len() != ctx.len() {
                return Err(Error::ContextMismatch);
            }
            if !bound.contains(&ctx.weight(&m)) {
                continue;
            }
            accumulate(&mut map, m, c);
        }
        Ok(Series {
            ctx: ctx.clone(),
            terms: map,
            bound,
        })
    }

    pub fn context(&self) -> &Arc<GeneratorContext> {
        &self.ctx
    }

    pub fn known_below(&self) -> &Bound {
        &self.bound
    }

    /// Terms in descending dominance order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No stored terms. The exact object may still be nonzero beyond the
    /// bound; see [`Series::is_exact_zero`].
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.bound.is_exact()
    }

    pub fn is_exact(&self) -> bool {
        self.bound.is_exact()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Constant term.
    pub fn constant_term(&self) -> C {
        self.terms.get(&self.ctx.one()).cloned().unwrap_or_else(C::zero)
    }

    pub fn weight(&self, m: &Monomial) -> Rational {
        self.ctx.weight(m)
    }

    /// Least weight among stored terms.
    pub fn min_weight(&self) -> Option<Rational> {
        self.terms.keys().map(|m| self.ctx.weight(m)).min()
    }

    /// Lower cut of the whole (exact) object: every term has weight at or
    /// beyond it.
    pub fn lower_cut(&self) -> Bound {
        match self.min_weight() {
            Some(w) => Bound::Below(w),
            None => self.bound.clone(),
        }
    }

    pub(crate) fn same_context(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Lowers the reliability bound, dropping terms that fall outside.
    pub fn with_bound(mut self, bound: Bound) -> Self {
        if bound < self.bound {
            let ctx = self.ctx.clone();
            self.terms.retain(|m, _| bound.contains(&ctx.weight(m)));
            self.bound = bound;
        }
        self
    }

    /// Declares the stored terms to be the whole object.
    pub fn assume_exact(mut self) -> Self {
        self.bound = Bound::Exact;
        self
    }

    /// Drops terms of weight `> n`; the result is reliable through `n`.
    pub fn truncate(&self, n: &Rational) -> Self {
        self.clone().with_bound(Bound::Through(n.clone()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let bound = (&self.bound).min(&other.bound).clone();
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            if bound.contains(&self.ctx.weight(m)) {
                accumulate(&mut terms, m.clone(), c.clone());
            }
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            terms,
            bound,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let bound = (self.bound.plus(&other.lower_cut())).min(other.bound.plus(&self.lower_cut()));
        fn weighted<C: Scalar>(s: &Series<C>) -> Vec<(Rational, &Monomial, &C)> {
            s.terms.iter().map(|(m, c)| (s.ctx.weight(m), m, c)).collect()
        }
        let (lhs, rhs) = (weighted(self), weighted(other));
        let mut terms = BTreeMap::new();
        for (wa, ma, ca) in &lhs {
            for (wb, mb, cb) in &rhs {
                if bound.contains(&(wa + wb)) {
                    accumulate(&mut terms, *ma * *mb, (*ca).clone() * (*cb).clone());
                }
            }
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            terms,
            bound,
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Series::zero(&self.ctx);
        }
        Series {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
            bound: self.bound.clone(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Series {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, a)| (k * m, a.clone())).collect(),
            bound: self.bound.shift(&self.ctx.weight(m)),
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: u32) -> Self {
        let mut result = Series::one(&self.ctx);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub(crate) fn lead(&self) -> Lead<'_, C> {
        match self.terms.iter().next_back() {
            Some((m, c)) => Lead::Term(m, c, self.ctx.weight(m)),
            None if self.bound.is_exact() => Lead::Zero,
            None => Lead::Unknown(&self.bound),
        }
    }

    /// Leading coefficient and monomial.
    pub fn leading_term(&self) -> Result<(C, Monomial)> {
        match self.lead() {
            Lead::Term(m, c, _) => Ok((c.clone(), m.clone())),
            Lead::Zero => Err(Error::ZeroSeries),
            Lead::Unknown(b) => Err(Error::Inconclusive(format!("no stored terms inside bound {b}"))),
        }
    }

    /// Sign of the leading coefficient; 0 when nothing is stored.
    pub fn sign(&self) -> i8 {
        match self.terms.values().next_back() {
            Some(c) if c.is_positive() => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// `self <= other` in the ordering by eventual sign.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        Ok(other.checked_sub(self)?.sign() >= 0)
    }

    /// Membership in the maximal ideal (`self ≺ 1`).
    pub fn is_infinitesimal(&self) -> bool {
        match self.lead() {
            Lead::Zero => true,
            Lead::Term(m, _, _) => m.is_infinitesimal(),
            Lead::Unknown(b) => b.contains(&Rational::zero()),
        }
    }

    /// Membership in the valuation ring (`self ≼ 1`).
    pub fn is_bounded(&self) -> bool {
        match self.lead() {
            Lead::Zero => true,
            Lead::Term(m, _, _) => m.is_bounded(),
            Lead::Unknown(b) => b.value().is_some_and(|v| *v >= Rational::zero()),
        }
    }

    /// Multiplicative inverse, reliable at most through weight `depth`.
    ///
    /// Writes `self = d*m*(1+u)` with `u ≺ 1` and sums the geometric series
    /// in `-u`.
    pub fn invert(&self, depth: &Rational) -> Result<Self> {
        let (d, m) = match self.lead() {
            Lead::Zero => return Err(Error::ZeroDivision),
            Lead::Unknown(b) => {
                return Err(Error::Inconclusive(format!(
                    "cannot invert: no stored terms inside bound {b}"
                )))
            }
            Lead::Term(m, c, _) => (c.clone(), m.clone()),
        };
        let m_inv = m.inv();
        let d_inv = C::one() / d;
        let u = &self.mul_monomial(&m_inv).scale(&d_inv) - &Series::one(&self.ctx);
        let rel = depth + self.ctx.weight(&m);
        let s = geometric(&-&u, &rel)?;
        Ok(s.mul_monomial(&m_inv).scale(&d_inv))
    }

    /// Stored terms agree with `other` wherever both are reliable.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if !self.same_context(other) {
            return false;
        }
        let bound = (&self.bound).min(&other.bound);
        let inside = |s: &Self| -> Vec<(Monomial, C)> {
            s.terms
                .iter()
                .filter(|(m, _)| bound.contains(&s.ctx.weight(m)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect()
        };
        inside(self) == inside(other)
    }
}

/// `sum_n v^n` through relative weight `rel`, for `v ≺ 1`.
pub(crate) fn geometric<C: Scalar>(v: &Series<C>, rel: &Rational) -> Result<Series<C>> {
    let one = Series::one(&v.ctx);
    if v.is_exact_zero() {
        return Ok(one);
    }
    let through = Bound::Through(rel.clone());
    let mu = match v.min_weight() {
        Some(mu) => mu,
        // nothing known: 1/(1-v) = 1 + O(v)
        None => return Ok(one.with_bound(v.bound.clone().min(through))),
    };
    if mu <= Rational::zero() {
        return Err(Error::ZeroWeightStep(mu.to_string()));
    }
    let mut acc = one.clone();
    let mut power = one;
    let mut n = Rational::one();
    while &(&n * &mu) <= rel {
        power = (&power * v).truncate(rel);
        acc = &acc + &power;
        n += Rational::one();
    }
    Ok(acc.with_bound(through))
}

fn accumulate<C: Scalar>(map: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            let sum = e.get().clone() + c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

impl<C: Scalar> Neg for &Series<C> {
    type Output = Series<C>;

    fn neg(self) -> Series<C> {
        Series {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
            bound: self.bound.clone(),
        }
    }
}

impl<C: Scalar> Neg for Series<C> {
    type Output = Series<C>;

    fn neg(self) -> Series<C> {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Scalar> $tr<&Series<C>> for &Series<C> {
            type Output = Series<C>;

            /// Panics if the operands come from different contexts.
            fn $method(self, rhs: &Series<C>) -> Series<C> {
                self.$checked(rhs).expect("series from different contexts")
            }
        }

        impl<C: Scalar> $tr<Series<C>> for Series<C> {
            type Output = Series<C>;

            fn $method(self, rhs: Series<C>) -> Series<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

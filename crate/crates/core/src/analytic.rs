//! Power series on the maximal ideal and the Hensel-type solver.
//!
//! For `Q(Z) = sum a_n Z^n` with bounded coefficients, `Q(0) ≺ 1` and
//! `Q'(0) ≍ 1`, the map `z -> z - Q(z)/a_1` contracts the maximal ideal and
//! its fixed point is the unique infinitesimal zero of `Q`.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::GeneratorContext;
use crate::scalar::Scalar;
use crate::series::{Bound, Series};
use crate::Rational;

type Source<C> = dyn Fn(usize) -> Result<Series<C>> + Send + Sync;

struct Inner<C> {
    ctx: Arc<GeneratorContext>,
    source: Box<Source<C>>,
    // filled in index order under the write lock
    cache: RwLock<Vec<Series<C>>>,
}

/// A coefficient stream `a_0, a_1, ...` of bounded series.
///
/// Coefficients are computed on first access and memoized, so repeated
/// reads return identical values. Clones share the cache.
pub struct PowerSeries<C = Rational>(Arc<Inner<C>>);

impl<C> Clone for PowerSeries<C> {
    fn clone(&self) -> Self {
        PowerSeries(self.0.clone())
    }
}

impl<C> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let filled = self.0.cache.read().map(|c| c.len()).unwrap_or(0);
        f.debug_struct("PowerSeries").field("memoized", &filled).finish()
    }
}

impl<C: Scalar> PowerSeries<C> {
    pub fn new(ctx: &Arc<GeneratorContext>, source: impl Fn(usize) -> Series<C> + Send + Sync + 'static) -> Self {
        PowerSeries::try_new(ctx, move |n| Ok(source(n)))
    }

    fn try_new(
        ctx: &Arc<GeneratorContext>,
        source: impl Fn(usize) -> Result<Series<C>> + Send + Sync + 'static,
    ) -> Self {
        PowerSeries(Arc::new(Inner {
            ctx: ctx.clone(),
            source: Box::new(source),
            cache: RwLock::new(Vec::new()),
        }))
    }

    /// Finitely many coefficients; all later ones are zero.
    pub fn from_coeffs(ctx: &Arc<GeneratorContext>, coeffs: Vec<Series<C>>) -> Self {
        let zero = Series::zero(ctx);
        PowerSeries::new(ctx, move |n| coeffs.get(n).cloned().unwrap_or_else(|| zero.clone()))
    }

    /// Constant coefficients given by an exact rational formula.
    pub fn from_scalars(ctx: &Arc<GeneratorContext>, f: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Self {
        let ctx2 = ctx.clone();
        PowerSeries::new(ctx, move |n| Series::from_rational(&ctx2, &f(n)))
    }

    pub fn context(&self) -> &Arc<GeneratorContext> {
        &self.0.ctx
    }

    /// `a_n`, checked to lie in the valuation ring.
    pub fn coeff(&self, n: usize) -> Result<Series<C>> {
        if let Some(a) = self.0.cache.read().expect("poisoned coefficient cache").get(n) {
            return Ok(a.clone());
        }
        let mut cache = self.0.cache.write().expect("poisoned coefficient cache");
        while cache.len() <= n {
            let k = cache.len();
            let a = (self.0.source)(k)?;
            if !a.same_context(&Series::zero(&self.0.ctx)) {
                return Err(Error::ContextMismatch);
            }
            if !a.is_bounded() {
                return Err(Error::UnboundedCoefficient(k));
            }
            cache.push(a);
        }
        Ok(cache[n].clone())
    }

    /// Applies `f` to every coefficient.
    pub fn map(&self, f: impl Fn(usize, Series<C>) -> Series<C> + Send + Sync + 'static) -> Self {
        let parent = self.clone();
        PowerSeries::try_new(self.context(), move |n| parent.coeff(n).map(|a| f(n, a)))
    }

    /// Formal derivative `Q'(Z) = sum (n+1) a_{n+1} Z^n`.
    pub fn derivative(&self) -> Self {
        let parent = self.clone();
        PowerSeries::try_new(self.context(), move |n| {
            let k = C::from_rational(&Rational::from_integer((n + 1).into()));
            parent.coeff(n + 1).map(|a| a.scale(&k))
        })
    }
}

/// `c (c-1) ... (c-n+1) / n!`.
pub fn binomial_coefficient(c: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 0..n {
        let k = Rational::from_integer(k.into());
        acc = acc * (c - &k) / (k + Rational::one());
    }
    acc
}

/// `sum_n (c choose n) Z^n`, the expansion of `(1+Z)^c`.
pub fn binomial_series<C: Scalar>(ctx: &Arc<GeneratorContext>, c: &Rational) -> PowerSeries<C> {
    let c = c.clone();
    PowerSeries::from_scalars(ctx, move |n| binomial_coefficient(&c, n))
}

/// `sum_n Z^n / n!`.
pub fn exp_series<C: Scalar>(ctx: &Arc<GeneratorContext>) -> PowerSeries<C> {
    PowerSeries::from_scalars(ctx, |n| {
        let fact = (1..=n).fold(num_bigint::BigInt::one(), |acc, k| acc * k);
        Rational::new(1.into(), fact)
    })
}

/// `sum_{m>=1} (-1)^(m-1) Z^m / m`.
pub fn log1p_series<C: Scalar>(ctx: &Arc<GeneratorContext>) -> PowerSeries<C> {
    PowerSeries::from_scalars(ctx, |m| {
        if m == 0 {
            Rational::zero()
        } else {
            let sign = if m.is_odd() { 1 } else { -1 };
            Rational::new(sign.into(), m.into())
        }
    })
}

/// Smallest weight an infinitesimal's terms can have, from stored terms or,
/// failing that, from its bound.
fn step_of<C: Scalar>(z: &Series<C>) -> Option<Rational> {
    z.min_weight().or_else(|| z.known_below().value().cloned())
}

/// `Q(z) = sum a_n z^n` for `z ≺ 1`, reliable at most through weight `depth`.
pub fn eval_power_series<C: Scalar>(q: &PowerSeries<C>, z: &Series<C>, depth: &Rational) -> Result<Series<C>> {
    if !z.same_context(&Series::zero(q.context())) {
        return Err(Error::ContextMismatch);
    }
    if !z.is_infinitesimal() {
        return Err(Error::NotInfinitesimal);
    }
    let mut acc = q.coeff(0)?.truncate(depth);
    if z.is_exact_zero() {
        return Ok(acc);
    }
    let mu = step_of(z).unwrap_or_else(Rational::zero);
    if !mu.is_positive() {
        return Err(Error::ZeroWeightStep(mu.to_string()));
    }
    let terms = if depth.is_positive() {
        (depth / &mu).ceil().to_integer()
    } else {
        0.into()
    };
    let mut power = Series::one(q.context());
    let mut n = 1usize;
    while num_bigint::BigInt::from(n) <= terms {
        power = (&power * z).truncate(depth);
        let a = q.coeff(n)?;
        if !a.is_exact_zero() {
            acc = &acc + &(&a * &power).truncate(depth);
        }
        n += 1;
    }
    Ok(acc.with_bound(Bound::Through(depth.clone())))
}

/// `f^c = exp(c log f)` for `f > 0`, reliable at most through `depth`.
pub fn power<C: Scalar>(f: &Series<C>, c: &Rational, depth: &Rational) -> Result<Series<C>> {
    if f.sign() != 1 {
        return Err(Error::NonPositive);
    }
    let (d, m) = f.leading_term()?;
    let dc = d.pow_rational(c).ok_or_else(|| Error::IrrationalScalarPower {
        base: d.to_string(),
        exponent: c.to_string(),
    })?;
    let mc = m.pow(c);
    let ctx = f.context();
    let u = &f.mul_monomial(&m.inv()).scale(&(C::one() / d)) - &Series::one(ctx);
    let s = if u.is_exact_zero() {
        Series::one(ctx)
    } else {
        let rel = depth - ctx.weight(&mc);
        eval_power_series(&binomial_series(ctx, c), &u, &rel)?
    };
    Ok(s.mul_monomial(&mc).scale(&dc))
}

/// Outcome of a Hensel iteration.
#[derive(Clone, Debug)]
pub struct HenselRun<C = Rational> {
    pub root: Series<C>,
    /// Lower cut of the residual `Q(z_k)/a_1` at each iteration; the last
    /// entry belongs to the accepted root.
    pub residual_cuts: Vec<Bound>,
    pub iterations: usize,
}

/// The unique infinitesimal zero of `Q`, reliable at most through `depth`.
pub fn hensel_solve<C: Scalar>(q: &PowerSeries<C>, depth: &Rational) -> Result<Series<C>> {
    Ok(hensel_solve_from(q, depth, &Series::zero(q.context()))?.root)
}

/// Hensel iteration started from an arbitrary infinitesimal seed.
pub fn hensel_solve_from<C: Scalar>(q: &PowerSeries<C>, depth: &Rational, seed: &Series<C>) -> Result<HenselRun<C>> {
    let ctx = q.context().clone();
    let one = Series::one(&ctx);
    let a0 = q.coeff(0)?;
    let a1 = q.coeff(1)?;
    if !a0.prec(&one)? {
        return Err(Error::PreconditionFailed("Q(0) is not infinitesimal".into()));
    }
    if !a1.asymp(&one)? {
        return Err(Error::PreconditionFailed("Q'(0) is not asymptotic to 1".into()));
    }
    if !seed.same_context(&one) {
        return Err(Error::ContextMismatch);
    }
    if !seed.is_infinitesimal() {
        return Err(Error::NotInfinitesimal);
    }
    if a0.is_exact_zero() && seed.is_exact_zero() {
        return Ok(HenselRun {
            root: seed.clone(),
            residual_cuts: vec![Bound::Exact],
            iterations: 0,
        });
    }

    // reduce to a_1 = 1
    let a1_inv = a1.invert(depth)?;
    let depth_owned = depth.clone();
    let normalized = q.map(move |_, a| (&a1_inv * &a).truncate(&depth_owned));

    let step = [step_of(&a0), step_of(seed)]
        .into_iter()
        .flatten()
        .filter(|w| w.is_positive())
        .min()
        .ok_or_else(|| Error::ZeroWeightStep("0".into()))?;
    let cap = if depth.is_positive() {
        (depth / &step).ceil().to_integer().try_into().unwrap_or(usize::MAX - 2) + 2
    } else {
        2
    };

    let mut z = seed.truncate(depth);
    let mut cuts = Vec::new();
    for k in 0..=cap {
        let residual = eval_power_series(&normalized, &z, depth)?;
        cuts.push(residual.lower_cut());
        if residual.is_zero() {
            let bound = residual.known_below().clone();
            return Ok(HenselRun {
                root: z.with_bound(bound),
                residual_cuts: cuts,
                iterations: k,
            });
        }
        z = (&z - &residual).truncate(depth);
    }
    Err(Error::NoConvergence { iterations: cap })
}

/// `Q(Z) = (sum (c choose n) Z^n)(1 + ε + Z) - 1`.
pub fn unit_eq_power_series<C: Scalar>(c: &Rational, eps: &Series<C>) -> PowerSeries<C> {
    let ctx = eps.context().clone();
    let c = c.clone();
    let one_eps = &Series::one(&ctx) + eps;
    let eps = eps.clone();
    PowerSeries::new(&ctx.clone(), move |n| {
        if n == 0 {
            return eps.clone();
        }
        let cn = C::from_rational(&binomial_coefficient(&c, n));
        let prev = C::from_rational(&binomial_coefficient(&c, n - 1));
        &one_eps.scale(&cn) + &Series::constant(&ctx, prev)
    })
}

/// The unique infinitesimal `z` with `(1+z)^c (1+ε+z) = 1`.
pub fn solve_unit_eq<C: Scalar>(c: &Rational, eps: &Series<C>, depth: &Rational) -> Result<Series<C>> {
    Ok(solve_unit_eq_from(c, eps, depth, &Series::zero(eps.context()))?.root)
}

pub fn solve_unit_eq_from<C: Scalar>(
    c: &Rational,
    eps: &Series<C>,
    depth: &Rational,
    seed: &Series<C>,
) -> Result<HenselRun<C>> {
    if *c == -Rational::one() {
        return Err(Error::CMinusOne);
    }
    if !eps.is_infinitesimal() {
        return Err(Error::NotInfinitesimal);
    }
    let ctx = eps.context();
    let q = unit_eq_power_series(c, eps);
    // constant term ε, linear term (1 + c + cε)
    let cc = C::from_rational(c);
    let expected_a1 = &Series::constant(ctx, C::one() + cc.clone()) + &eps.scale(&cc);
    if q.coeff(0)? != *eps || q.coeff(1)? != expected_a1 {
        return Err(Error::Postcondition("unexpected low-order coefficients of Q".into()));
    }
    hensel_solve_from(&q, depth, seed)
}

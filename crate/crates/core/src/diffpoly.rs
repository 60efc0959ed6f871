//! Differential polynomials and the zeros of `P_c`.
//!
//! `P_c(Y) = Y'(c(Y+1) + Y) - Y(Y+1)`. Its nonzero, non-`-1` zeros are the
//! `y` with `|y|^c (y+1) = a e^x` for a nonzero constant `a`. Writing
//! `y = b e^(x/(c+1)) (1+z)` turns `P_c(y) = 0` into the unit equation
//! `(1+z)^c (1+ε+z) = 1` with `ε = b^-1 e^(-x/(c+1))`, which the Hensel
//! solver handles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::analytic::{power, solve_unit_eq_from};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::monomial::{GeneratorContext, Monomial};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::Rational;

/// A polynomial in `Y, Y', ..., Y^(r)` with series coefficients, stored as
/// a map from exponent tuples `(d_0, ..., d_r)` to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffPoly<C = Rational> {
    ctx: Arc<GeneratorContext>,
    order: usize,
    terms: BTreeMap<Vec<u32>, Series<C>>,
}

impl<C: Scalar> DiffPoly<C> {
    pub fn new(ctx: &Arc<GeneratorContext>, terms: impl IntoIterator<Item = (Vec<u32>, Series<C>)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, Series<C>> = BTreeMap::new();
        let probe = Series::zero(ctx);
        for (mut idx, coeff) in terms {
            if !coeff.same_context(&probe) {
                return Err(Error::ContextMismatch);
            }
            while idx.last() == Some(&0) {
                idx.pop();
            }
            let sum = match map.remove(&idx) {
                Some(prev) => &prev + &coeff,
                None => coeff,
            };
            if !sum.is_exact_zero() {
                map.insert(idx, sum);
            }
        }
        let order = map.keys().map(|k| k.len().saturating_sub(1)).max().unwrap_or(0);
        Ok(DiffPoly {
            ctx: ctx.clone(),
            order,
            terms: map,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Series<C>)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// `P(y)`, substituting `y, y', ..., y^(r)`.
    pub fn eval(&self, y: &Series<C>, derivation: &Derivation<C>) -> Result<Series<C>> {
        if !y.same_context(&Series::zero(&self.ctx)) {
            return Err(Error::ContextMismatch);
        }
        let mut jets = vec![y.clone()];
        for _ in 0..self.order {
            let next = derivation.derive(jets.last().expect("nonempty"))?;
            jets.push(next);
        }
        let mut acc = Series::zero(&self.ctx);
        for (idx, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (jet, &d) in jets.iter().zip(idx) {
                if d > 0 {
                    term = &term * &jet.powi(d);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

/// `P_c = (c+1) Y Y' + c Y' - Y^2 - Y`.
pub fn make_pc<C: Scalar>(ctx: &Arc<GeneratorContext>, c: &Rational) -> Result<DiffPoly<C>> {
    if !c.is_positive() {
        return Err(Error::NonPositiveC);
    }
    let k = |q: Rational| Series::from_rational(ctx, &q);
    DiffPoly::new(
        ctx,
        [
            (vec![1, 1], k(c + Rational::one())),
            (vec![0, 1], k(c.clone())),
            (vec![2], k(-Rational::one())),
            (vec![1], k(-Rational::one())),
        ],
    )
}

/// `R_c = Y(Y+1) / (c(Y+1) + Y)`, so that `P_c(y) = 0` iff
/// `y' * denominator(y) = numerator(y)`.
#[derive(Clone, Debug)]
pub struct PcQuotient<C = Rational> {
    pub numerator: DiffPoly<C>,
    pub denominator: DiffPoly<C>,
}

pub fn pc_quotient<C: Scalar>(ctx: &Arc<GeneratorContext>, c: &Rational) -> Result<PcQuotient<C>> {
    if !c.is_positive() {
        return Err(Error::NonPositiveC);
    }
    let k = |q: Rational| Series::from_rational(ctx, &q);
    Ok(PcQuotient {
        numerator: DiffPoly::new(ctx, [(vec![2], k(Rational::one())), (vec![1], k(Rational::one()))])?,
        denominator: DiffPoly::new(ctx, [(vec![1], k(c + Rational::one())), (vec![], k(c.clone()))])?,
    })
}

impl<C: Scalar> PcQuotient<C> {
    /// `y' * denominator(y) - numerator(y)`.
    pub fn residual(&self, y: &Series<C>, derivation: &Derivation<C>) -> Result<Series<C>> {
        let yp = derivation.derive(y)?;
        let den = self.denominator.eval(y, derivation)?;
        let num = self.numerator.eval(y, derivation)?;
        Ok(&(&yp * &den) - &num)
    }
}

/// The monomial `e^(x/(c+1))`.
fn growth_monomial(ctx: &GeneratorContext, c: &Rational) -> Result<Monomial> {
    let q = (c + Rational::one()).recip();
    ctx.exp_monomial(&q)
        .ok_or_else(|| Error::MissingExpGenerator(q.to_string()))
}

/// The unique zero `y ∼ b e^(x/(c+1))` of `P_c`, reliable at most through
/// weight `depth`.
pub fn solve_pc<C: Scalar>(derivation: &Derivation<C>, c: &Rational, b: &C, depth: &Rational) -> Result<Series<C>> {
    solve_pc_from(derivation, c, b, depth, None)
}

/// [`solve_pc`] with an explicit seed for the Hensel iteration on `z`.
pub fn solve_pc_from<C: Scalar>(
    derivation: &Derivation<C>,
    c: &Rational,
    b: &C,
    depth: &Rational,
    seed: Option<&Series<C>>,
) -> Result<Series<C>> {
    if !c.is_positive() {
        return Err(Error::NonPositiveC);
    }
    if b.is_zero() {
        return Err(Error::PreconditionFailed("b must be nonzero".into()));
    }
    let ctx = derivation.context();
    let m = growth_monomial(ctx, c)?;
    let eps = Series::monomial(ctx, m.inv(), C::one() / b.clone());
    // y = b m (1+z): y is reliable through depth when z is through depth - w(m)
    let z_depth = depth - ctx.weight(&m);
    let zero = Series::zero(ctx);
    let z = solve_unit_eq_from(c, &eps, &z_depth, seed.unwrap_or(&zero))?.root;
    let y = (&Series::one(ctx) + &z).mul_monomial(&m).scale(b);

    let (lc, lm) = y.leading_term()?;
    if lc != *b || lm != m {
        return Err(Error::Postcondition(format!(
            "leading term of y is not {b}*e^(x/({c}+1))"
        )));
    }
    let residual = make_pc(ctx, c)?.eval(&y, derivation)?;
    if !residual.is_zero() {
        return Err(Error::Postcondition(
            "P_c(y) has terms inside its reliability bound".into(),
        ));
    }
    Ok(y)
}

/// Signed root `b` with `|b|^c b = a` and the monomial `e^(x/(c+1))`:
/// any `y` with `|y|^c (y+1) = a e^x` satisfies `y ∼ b e^(x/(c+1))`.
pub fn leading_from_a(ctx: &GeneratorContext, a: &Rational, c: &Rational) -> Result<(Rational, Monomial)> {
    if !c.is_positive() {
        return Err(Error::NonPositiveC);
    }
    if a.is_zero() {
        return Err(Error::PreconditionFailed("a must be nonzero".into()));
    }
    let index = c + Rational::one();
    let root = a
        .abs()
        .pow_rational(&index.recip())
        .ok_or_else(|| Error::IrrationalRoot {
            base: a.abs().to_string(),
            index: index.to_string(),
        })?;
    let b = if a.is_negative() { -root } else { root };
    Ok((b, growth_monomial(ctx, c)?))
}

/// Result of checking `U(y)† = 1` for `U(y) = |y|^c (y+1)`.
#[derive(Clone, Debug)]
pub struct UCheck<C = Rational> {
    /// `U(y)† - 1`.
    pub residual: Series<C>,
    /// `U(y) e^-x / |d|^c` where `d` is the leading coefficient of `y`;
    /// a constant exactly when `U(y) ∈ R e^x`.
    pub unit: Series<C>,
    /// `a` with `U(y) = a e^x`, when `unit` is a constant and `|d|^c` is in
    /// the coefficient field.
    pub a: Option<C>,
}

impl<C: Scalar> UCheck<C> {
    /// Both the residual and the non-constant part of `unit` vanish inside
    /// their bounds.
    pub fn is_zero_certificate(&self) -> bool {
        let one = self.unit.context().one();
        self.residual.is_zero() && self.unit.len() == 1 && self.unit.coeff(&one).is_some()
    }
}

/// Computes `U(y)† - 1` and the constant `a` of `U(y) = a e^x`.
pub fn u_check<C: Scalar>(
    derivation: &Derivation<C>,
    y: &Series<C>,
    c: &Rational,
    depth: &Rational,
) -> Result<UCheck<C>> {
    let ctx = derivation.context();
    let y1 = &Series::one(ctx) + y;
    if y.is_zero() || y1.is_zero() {
        return Err(Error::DegenerateY);
    }
    let (d, _) = y.leading_term()?;
    let d_abs = d.abs();
    // |y|^c = |d|^c (|y|/|d|)^c; the scalar factor drops out of U†
    let normalized = y.abs().scale(&(C::one() / d_abs.clone()));
    let low = y1.min_weight().unwrap_or_else(Rational::zero);
    let u = &power(&normalized, c, &(depth - low))? * &y1;
    let residual = &derivation.log_derivative(&u, depth)? - &Series::one(ctx);

    let e_minus_x = ctx
        .exp_monomial(&-Rational::one())
        .ok_or_else(|| Error::MissingExpGenerator("-1".into()))?;
    let unit = u.mul_monomial(&e_minus_x);
    let a = match (unit.len(), unit.coeff(&ctx.one())) {
        (1, Some(k)) => d_abs.pow_rational(c).map(|s| s * k.clone()),
        _ => None,
    };
    Ok(UCheck { residual, unit, a })
}

//! Derivations determined by the logarithmic derivatives of the generators.
//!
//! `∂(c g_1^a_1 ... g_k^a_k) = (sum_i a_i g_i†) c g_1^a_1 ... g_k^a_k`, with
//! rational constants. For the preset generators this is `d/dx`:
//! `(e^(-r x))† = -r` and `(x^-1)† = -x^-1`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::monomial::{GeneratorContext, GeneratorKind};
use crate::scalar::Scalar;
use crate::series::{Bound, Series};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<C = Rational> {
    ctx: Arc<GeneratorContext>,
    logderivs: Vec<Option<Series<C>>>,
}

impl<C: Scalar> Derivation<C> {
    /// Explicit logarithmic derivatives, one slot per generator. Each given
    /// series must be exact and live in `ctx`.
    pub fn new(ctx: &Arc<GeneratorContext>, logderivs: Vec<Option<Series<C>>>) -> Result<Self> {
        if logderivs.len() != ctx.len() {
            return Err(Error::InvalidContext(format!(
                "{} logarithmic derivatives for {} generators",
                logderivs.len(),
                ctx.len()
            )));
        }
        let probe = Series::zero(ctx);
        for (g, ld) in ctx.generators().iter().zip(&logderivs) {
            let Some(ld) = ld else { continue };
            if !ld.same_context(&probe) {
                return Err(Error::ContextMismatch);
            }
            if !ld.is_exact() {
                return Err(Error::InvalidContext(format!(
                    "logarithmic derivative of {} must be exact",
                    g.name
                )));
            }
        }
        Ok(Derivation {
            ctx: ctx.clone(),
            logderivs,
        })
    }

    /// `d/dx` for exponential and `x^-1` generators; plain generators get no
    /// logarithmic derivative.
    pub fn standard(ctx: &Arc<GeneratorContext>) -> Self {
        let logderivs = ctx
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| match &g.kind {
                GeneratorKind::Exp { rate } => Some(Series::from_rational(ctx, &-rate)),
                GeneratorKind::RecipX => Some(-Series::generator(ctx, i)),
                GeneratorKind::Plain => None,
            })
            .collect();
        Derivation {
            ctx: ctx.clone(),
            logderivs,
        }
    }

    pub fn context(&self) -> &Arc<GeneratorContext> {
        &self.ctx
    }

    pub fn logderiv(&self, i: usize) -> Option<&Series<C>> {
        self.logderivs[i].as_ref()
    }

    pub fn with_logderiv(mut self, i: usize, ld: Series<C>) -> Result<Self> {
        self.logderivs[i] = Some(ld);
        Derivation::new(&self.ctx, self.logderivs)
    }

    /// Weight shift the derivation can cause: `min(0, least weight of any
    /// declared logarithmic derivative)`.
    fn weight_drop(&self) -> Rational {
        self.logderivs
            .iter()
            .flatten()
            .filter_map(Series::min_weight)
            .fold(Rational::zero(), |acc, w| acc.min(w))
    }

    pub fn derive(&self, f: &Series<C>) -> Result<Series<C>> {
        if !f.same_context(&Series::zero(&self.ctx)) {
            return Err(Error::ContextMismatch);
        }
        let bound = f.known_below().shift(&self.weight_drop());
        let mut terms = Vec::new();
        for (m, c) in f.terms() {
            for (i, e) in m.exponents().iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let ld = self.logderivs[i]
                    .as_ref()
                    .ok_or_else(|| Error::MissingSpec(self.ctx.generator(i).name.clone()))?;
                let k = c.clone() * C::from_rational(e);
                terms.extend(ld.terms().map(|(lm, lc)| (lm * m, lc.clone() * k.clone())));
            }
        }
        Series::from_terms(&self.ctx, terms, bound)
    }

    /// `k`-th derivative.
    pub fn derive_n(&self, f: &Series<C>, k: usize) -> Result<Series<C>> {
        let mut d = f.clone();
        for _ in 0..k {
            d = self.derive(&d)?;
        }
        Ok(d)
    }

    /// `f† = f'/f`, reliable at most through `depth`.
    pub fn log_derivative(&self, f: &Series<C>, depth: &Rational) -> Result<Series<C>> {
        if f.is_exact_zero() {
            return Err(Error::ZeroDivision);
        }
        let fp = self.derive(f)?;
        if fp.is_exact_zero() {
            return Ok(fp);
        }
        let low = match fp.lower_cut() {
            Bound::Below(w) | Bound::Through(w) => w,
            Bound::Exact => Rational::zero(),
        };
        let inv = f.invert(&(depth - low))?;
        Ok((&fp * &inv).truncate(depth))
    }
}

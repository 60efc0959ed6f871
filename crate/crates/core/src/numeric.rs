//! Floating-point evaluation of series as germs at `+∞`.
//!
//! Each generator gets a positive infinitesimal rule (`e^(-r t)` or
//! `t^-p`) and a series is summed term by term at a sample point `t`.
//! Terms are formed in log space, `sign(c) exp(ln|c| + Σ a_i ln g_i(t))`,
//! so `e^(40)`-sized intermediate factors never overflow. These checks are
//! advisory; the exact engine is the source of truth.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::derivation::Derivation;
use crate::diffpoly::{make_pc, solve_pc};
use crate::error::{Error, Result};
use crate::monomial::{GeneratorContext, GeneratorKind};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::Rational;

/// The real numbers germs are evaluated in.
pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &Rational) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

macro_rules! float_real {
    ($t:ty) => {
        impl Real for $t {
            fn from_rational(q: &Rational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
        }
    };
}

float_real!(f64);
float_real!(f32);

/// How a generator is read as a function of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GermRule {
    /// `e^(-rate t)`.
    Exp { rate: Rational },
    /// `t^(-power)`.
    InversePower { power: Rational },
}

impl GermRule {
    fn log_at<R: Real>(&self, t: &R) -> R {
        match self {
            GermRule::Exp { rate } => -(R::from_rational(rate) * t.clone()),
            GermRule::InversePower { power } => -(R::from_rational(power) * t.ln()),
        }
    }
}

/// Germ rules per generator and the sample points used by the checks.
#[derive(Clone, Debug, PartialEq)]
pub struct GermAssignment {
    rules: Vec<Option<GermRule>>,
    samples: Vec<f64>,
}

impl GermAssignment {
    pub const DEFAULT_SAMPLES: [f64; 3] = [10.0, 20.0, 40.0];

    pub fn new(rules: Vec<Option<GermRule>>, samples: Vec<f64>) -> Result<Self> {
        for rule in rules.iter().flatten() {
            let ok = match rule {
                GermRule::Exp { rate } => rate.is_positive(),
                GermRule::InversePower { power } => power.is_positive(),
            };
            if !ok {
                return Err(Error::PreconditionFailed(format!(
                    "germ rule {rule:?} is not a positive infinitesimal"
                )));
            }
        }
        if samples.is_empty()
            || samples[0].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || samples
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::PreconditionFailed(
                "sample points must be positive and strictly increasing".into(),
            ));
        }
        Ok(GermAssignment { rules, samples })
    }

    /// Rules read off the generator kinds; plain generators get none.
    pub fn from_context(ctx: &GeneratorContext) -> Self {
        let rules = ctx
            .generators()
            .iter()
            .map(|g| match &g.kind {
                GeneratorKind::Exp { rate } => Some(GermRule::Exp { rate: rate.clone() }),
                GeneratorKind::RecipX => Some(GermRule::InversePower {
                    power: num_traits::One::one(),
                }),
                GeneratorKind::Plain => None,
            })
            .collect();
        GermAssignment {
            rules,
            samples: Self::DEFAULT_SAMPLES.to_vec(),
        }
    }

    pub fn with_rule(mut self, i: usize, rule: GermRule) -> Result<Self> {
        self.rules[i] = Some(rule);
        GermAssignment::new(self.rules, self.samples)
    }

    pub fn with_samples(self, samples: Vec<f64>) -> Result<Self> {
        GermAssignment::new(self.rules, samples)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rule(&self, i: usize) -> Option<&GermRule> {
        self.rules.get(i).and_then(Option::as_ref)
    }
}

/// `(sign, ln|value|)` of each stored term of `f` at `t`, leading term first.
fn log_terms<C: Scalar, R: Real>(f: &Series<C>, assignment: &GermAssignment, t: &R) -> Result<Vec<(bool, R)>> {
    let ctx = f.context();
    let mut logs: Vec<Option<R>> = vec![None; ctx.len()];
    let mut out = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let q = c
            .to_rational()
            .ok_or_else(|| Error::PreconditionFailed(format!("coefficient {c} is not a finite number")))?;
        let mut acc = R::from_rational(&q.abs()).ln();
        for (i, e) in m.exponents().iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if logs[i].is_none() {
                let rule = assignment
                    .rule(i)
                    .ok_or_else(|| Error::MissingRule(ctx.generator(i).name.clone()))?;
                logs[i] = Some(rule.log_at(t));
            }
            acc = acc + R::from_rational(e) * logs[i].clone().expect("just set");
        }
        out.push((q.is_negative(), acc));
    }
    Ok(out)
}

/// The stored part of `f` as a real number at `t`.
pub fn eval_germ<C: Scalar, R: Real>(f: &Series<C>, assignment: &GermAssignment, t: &R) -> Result<R> {
    Ok(log_terms(f, assignment, t)?
        .into_iter()
        .fold(R::zero(), |acc, (neg, l)| {
            let v = l.exp();
            if neg {
                acc - v
            } else {
                acc + v
            }
        }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayEntry {
    pub depth: String,
    pub t: f64,
    /// `|P_c(y_N)|` at `t`.
    pub residual: f64,
    /// `residual / previous residual`, absent for the first depth.
    pub decay_ratio: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub entries: Vec<DecayEntry>,
    pub pass: bool,
}

/// Solves `P_c(y) = 0` with `y ∼ b e^(x/(c+1))` at each depth and evaluates
/// `|P_c(y_N)|` at `t`, treating `y_N` as an exact function. Each entry
/// passes when its residual is strictly below the previous one.
pub fn residual_decay_check<R: Real>(c: &Rational, b: &Rational, depths: &[Rational], t: &R) -> Result<DecayReport> {
    let ctx = GeneratorContext::transseries(c)?;
    residual_decay_check_in(&Derivation::standard(&ctx), c, b, depths, t)
}

/// [`residual_decay_check`] in the context of `derivation`, whose
/// generators must all carry germ rules.
pub fn residual_decay_check_in<R: Real>(
    derivation: &Derivation,
    c: &Rational,
    b: &Rational,
    depths: &[Rational],
    t: &R,
) -> Result<DecayReport> {
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionFailed("depths must be increasing".into()));
    }
    let ctx = derivation.context();
    let pc = make_pc(ctx, c)?;
    let assignment = GermAssignment::from_context(ctx);
    let mut entries = Vec::with_capacity(depths.len());
    let mut previous: Option<R> = None;
    for n in depths {
        let y = solve_pc(derivation, c, b, n)?.assume_exact();
        let r = eval_germ(&pc.eval(&y, derivation)?, &assignment, t)?.abs();
        let decay_ratio = previous.as_ref().map(|p| (r.clone() / p.clone()).to_f64());
        let pass = previous.as_ref().is_none_or(|p| r < *p);
        entries.push(DecayEntry {
            depth: n.to_string(),
            t: t.to_f64(),
            residual: r.to_f64(),
            decay_ratio,
            pass,
        });
        previous = Some(r);
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(DecayReport { entries, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignSample {
    pub t: f64,
    pub value: f64,
    /// `|leading term| / Σ |other terms|`; above 1 the leading term fixes
    /// the sign.
    pub margin: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignReport {
    pub samples: Vec<SignSample>,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Compares the numeric sign of `f` at every sample point with its formal
/// sign.
pub fn sign_report<C: Scalar>(f: &Series<C>, assignment: &GermAssignment) -> Result<SignReport> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let formal = f.sign();
    let mut samples = Vec::new();
    let mut warnings = Vec::new();
    for &t in assignment.samples() {
        let logs = log_terms::<C, f64>(f, assignment, &t)?;
        let value = eval_germ::<C, f64>(f, assignment, &t)?;
        let lead = logs[0].1.exp();
        let rest: f64 = logs[1..].iter().map(|(_, l)| l.exp()).sum();
        let margin = if rest == 0.0 { f64::INFINITY } else { lead / rest };
        let numeric = if value > 0.0 {
            1
        } else if value < 0.0 {
            -1
        } else {
            0
        };
        let agrees = numeric == formal;
        if !agrees {
            warnings.push(format!(
                "sign mismatch at t = {t}: value {value:e}, dominance margin {margin:e}"
            ));
        }
        samples.push(SignSample {
            t,
            value,
            margin,
            agrees,
        });
    }
    let pass = samples.iter().all(|s| s.agrees);
    Ok(SignReport {
        samples,
        pass,
        warnings,
    })
}

pub fn sign_check<C: Scalar>(f: &Series<C>, assignment: &GermAssignment) -> Result<bool> {
    Ok(sign_report(f, assignment)?.pass)
}

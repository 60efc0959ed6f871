//! Coefficient fields.
//!
//! Series arithmetic is generic over [`Scalar`]. Exact work uses
//! [`Rational`](crate::Rational); `f64` and `f32` are available for quick
//! numeric experiments where bit-exactness is not needed.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// A coefficient field for series.
pub trait Scalar: Clone + Debug + Display + PartialEq + Signed + ToPrimitive + Send + Sync + 'static {
    /// Embeds an exact rational.
    fn from_rational(q: &Rational) -> Self;

    /// Real power `self^e`, or `None` when the result is not representable
    /// in this field (irrational root, even root of a negative number, ...).
    fn pow_rational(&self, e: &Rational) -> Option<Self>;

    /// The exact value as a rational, `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;
}

/// Exact integer `n`-th root, if there is one.
fn exact_root(value: &BigInt, n: u32) -> Option<BigInt> {
    if value.is_negative() {
        if n.is_multiple_of(2) {
            return None;
        }
        return exact_root(&-value, n).map(|r| -r);
    }
    let r = value.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *value {
        Some(r)
    } else {
        None
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn pow_rational(&self, e: &Rational) -> Option<Self> {
        if e.is_zero() {
            return Some(Rational::one());
        }
        if self.is_zero() {
            return if e.is_positive() { Some(Rational::zero()) } else { None };
        }
        let q = e.denom().to_u32()?;
        let p = e.numer().to_i32()?;
        let root = Rational::new(exact_root(self.numer(), q)?, exact_root(self.denom(), q)?);
        let raised = num_traits::pow(root, p.unsigned_abs() as usize);
        Some(if p < 0 { raised.recip() } else { raised })
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(q: &Rational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn pow_rational(&self, e: &Rational) -> Option<Self> {
                let v = self.powf(e.to_f64()? as $t);
                v.is_finite().then_some(v)
            }

            fn to_rational(&self) -> Option<Rational> {
                Rational::from_float(*self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

//! Exact truncated Hahn series and transseries arithmetic.
//!
//! The crate provides
//!
//! * the monomial group over declared generators ([`monomial`]),
//! * truncated series with tracked reliability bounds and the asymptotic
//!   relations `≼ ≺ ≍ ∼` ([`series`]),
//! * power series on the maximal ideal, the Hensel-type fixed-point solver
//!   and the unit equation `(1+z)^c (1+ε+z) = 1` ([`analytic`]),
//! * derivations given by generator logarithmic derivatives
//!   ([`derivation`]),
//! * differential polynomials and the zeros of
//!   `P_c(Y) = Y'(c(Y+1)+Y) - Y(Y+1)` ([`diffpoly`]),
//! * a floating-point germ evaluator for cross-checks ([`numeric`]),
//! * a text/JSON front end and session configuration ([`text`],
//!   [`session`], [`cli`]).
//!
//! Everything is generic over the coefficient field ([`Scalar`]); exact work
//! uses [`Rational`] and the aliases below.

pub mod analytic;
pub mod cli;
pub mod derivation;
pub mod diffpoly;
pub mod error;
pub mod monomial;
pub mod numeric;
pub mod scalar;
pub mod series;
pub mod session;
pub mod text;

pub use analytic::PowerSeries;
pub use derivation::Derivation;
pub use diffpoly::DiffPoly;
pub use error::{Error, Result};
pub use monomial::{Generator, GeneratorContext, GeneratorKind, Monomial};
pub use scalar::Scalar;
pub use series::{Bound, Dominance, Series};

/// Exact rationals: exponents, weights and the default coefficient field.
pub type Rational = num_rational::BigRational;

pub type QSeries = Series<Rational>;
pub type F64Series = Series<f64>;
pub type F32Series = Series<f32>;
pub type QPowerSeries = PowerSeries<Rational>;
pub type QDerivation = Derivation<Rational>;
pub type QDiffPoly = DiffPoly<Rational>;

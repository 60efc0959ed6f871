//! The monomial group: exponent vectors over declared generators.
//!
//! Generators are always stored as infinitesimals. The user-visible `x` is
//! the stored generator `x^-1` raised to `-1`, and `e^x` is an exponential
//! generator `e^(-r*x)` raised to `-1/r`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// What a generator stands for. Only used for printing, parsing sugar and
/// the default derivation / germ rules; the algebra never looks at it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// A formal infinitesimal with no further meaning.
    Plain,
    /// `e^(-rate*x)` with `rate > 0`.
    Exp { rate: Rational },
    /// `x^-1`.
    RecipX,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: Rational,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn plain(name: impl Into<String>) -> Self {
        Generator {
            name: name.into(),
            weight: Rational::one(),
            kind: GeneratorKind::Plain,
        }
    }

    /// The generator `e^(-rate*x)`.
    pub fn exp(name: impl Into<String>, rate: Rational) -> Self {
        Generator {
            name: name.into(),
            weight: Rational::one(),
            kind: GeneratorKind::Exp { rate },
        }
    }

    /// The generator `x^-1`.
    pub fn recip_x(name: impl Into<String>) -> Self {
        Generator {
            name: name.into(),
            weight: Rational::one(),
            kind: GeneratorKind::RecipX,
        }
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }
}

/// Generators listed from most rapidly varying to least, with their
/// truncation weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorContext {
    generators: Vec<Generator>,
}

impl GeneratorContext {
    pub fn new(generators: Vec<Generator>) -> Result<Arc<Self>> {
        let mut seen = HashSet::new();
        for g in &generators {
            let valid_name = g
                .name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid_name {
                return Err(Error::InvalidContext(format!("bad generator name {:?}", g.name)));
            }
            if matches!(g.name.as_str(), "x" | "e" | "exp1") || crate::text::is_function_name(&g.name) {
                return Err(Error::InvalidContext(format!("generator name {} is reserved", g.name)));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::InvalidContext(format!("duplicate generator {}", g.name)));
            }
            if !g.weight.is_positive() {
                return Err(Error::InvalidContext(format!("weight of {} must be positive", g.name)));
            }
            if let GeneratorKind::Exp { rate } = &g.kind {
                if !rate.is_positive() {
                    return Err(Error::InvalidContext(format!("rate of {} must be positive", g.name)));
                }
            }
        }
        if generators.iter().filter(|g| g.kind == GeneratorKind::RecipX).count() > 1 {
            return Err(Error::InvalidContext("at most one x^-1 generator".into()));
        }
        Ok(Arc::new(GeneratorContext { generators }))
    }

    /// Generators `E = e^(-x/(c+1))` and `X = x^-1`, in that order.
    pub fn transseries(c: &Rational) -> Result<Arc<Self>> {
        let denom = c + Rational::one();
        if !denom.is_positive() {
            return Err(Error::InvalidContext("transseries preset needs c > -1".into()));
        }
        GeneratorContext::new(vec![Generator::exp("E", denom.recip()), Generator::recip_x("X")])
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.len())
    }

    /// The monomial consisting of generator `i` to the first power.
    pub fn gen(&self, i: usize) -> Monomial {
        let mut m = self.one();
        m.exps[i] = Rational::one();
        m
    }

    /// `sum_i weight_i * exponent_i`.
    pub fn weight(&self, m: &Monomial) -> Rational {
        debug_assert_eq!(m.exps.len(), self.len());
        self.generators
            .iter()
            .zip(&m.exps)
            .filter(|(_, e)| !e.is_zero())
            .fold(Rational::zero(), |acc, (g, e)| acc + &g.weight * e)
    }

    /// The monomial `e^(q*x)`, expressed through the first exponential
    /// generator.
    pub fn exp_monomial(&self, q: &Rational) -> Option<Monomial> {
        let (i, rate) = self.generators.iter().enumerate().find_map(|(i, g)| match &g.kind {
            GeneratorKind::Exp { rate } => Some((i, rate)),
            _ => None,
        })?;
        let mut m = self.one();
        m.exps[i] = -q / rate;
        Some(m)
    }

    /// The monomial `x`, if an `x^-1` generator is declared.
    pub fn x_monomial(&self) -> Option<Monomial> {
        let i = self.generators.iter().position(|g| g.kind == GeneratorKind::RecipX)?;
        let mut m = self.one();
        m.exps[i] = -Rational::one();
        Some(m)
    }
}

/// An element of the monomial group.
///
/// `Ord` is the dominance order: `a < b` iff `a ≺ b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<Rational>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            exps: vec![Rational::zero(); n],
        }
    }

    pub fn from_exponents(exps: Vec<Rational>) -> Self {
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Monomial) -> Result<()> {
        if self.exps.len() == other.exps.len() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        self.check(other)?;
        Ok(self * other)
    }

    pub fn checked_div(&self, other: &Monomial) -> Result<Monomial> {
        self.check(other)?;
        Ok(self * &other.inv())
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|e| -e).collect(),
        }
    }

    pub fn pow(&self, q: &Rational) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|e| e * q).collect(),
        }
    }

    /// `Less` means `self ≺ other`.
    pub fn compare(&self, other: &Monomial) -> Result<Ordering> {
        self.check(other)?;
        Ok(self.cmp(other))
    }

    /// `self ≺ 1`: the first nonzero exponent is positive.
    pub fn is_infinitesimal(&self) -> bool {
        self.exps.iter().find(|e| !e.is_zero()).is_some_and(|e| e.is_positive())
    }

    /// `self ≼ 1`.
    pub fn is_bounded(&self) -> bool {
        !self.exps.iter().find(|e| !e.is_zero()).is_some_and(|e| e.is_negative())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.exps.len(), other.exps.len(), "monomials from different contexts");
        for (a, b) in self.exps.iter().zip(&other.exps) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                // a larger exponent on an infinitesimal means a smaller monomial
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        assert_eq!(self.exps.len(), rhs.exps.len(), "monomials from different contexts");
        Monomial {
            exps: self.exps.iter().zip(&rhs.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

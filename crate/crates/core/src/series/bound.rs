use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Rational;

/// Reliability bound of a truncated series: the set of weights for which
/// every term of the exact object is present.
///
/// `Below(b)` certifies weights `< b`, `Through(b)` weights `<= b`, `Exact`
/// all weights. Truncating "at depth N" yields `Through(N)`. Read as a lower
/// cut on weights, the same type also describes where the terms of a series
/// start (see [`Series::lower_cut`](crate::Series::lower_cut)).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Below(Rational),
    Through(Rational),
    Exact,
}

impl Bound {
    pub fn contains(&self, weight: &Rational) -> bool {
        match self {
            Bound::Below(b) => weight < b,
            Bound::Through(b) => weight <= b,
            Bound::Exact => true,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Bound::Exact)
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Below(b) | Bound::Through(b) => Some(b),
            Bound::Exact => None,
        }
    }

    /// Translates the bound by a weight.
    pub fn shift(&self, w: &Rational) -> Bound {
        match self {
            Bound::Below(b) => Bound::Below(b + w),
            Bound::Through(b) => Bound::Through(b + w),
            Bound::Exact => Bound::Exact,
        }
    }

    /// Sum of an upper bound and a lower cut: if the unknown part of one
    /// factor starts at `self` and every term of the other factor starts at
    /// `lower`, the product's unknown part starts at `self.plus(lower)`.
    pub fn plus(&self, lower: &Bound) -> Bound {
        match (self, lower) {
            (Bound::Exact, _) | (_, Bound::Exact) => Bound::Exact,
            (Bound::Below(a), Bound::Below(b)) => Bound::Below(a + b),
            (Bound::Below(a), Bound::Through(b))
            | (Bound::Through(a), Bound::Below(b))
            | (Bound::Through(a), Bound::Through(b)) => Bound::Through(a + b),
        }
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(b: &Bound) -> u8 {
            match b {
                Bound::Below(_) => 0,
                Bound::Through(_) => 1,
                Bound::Exact => 2,
            }
        }
        match (self.value(), other.value()) {
            (Some(a), Some(b)) => a.cmp(b).then(rank(self).cmp(&rank(other))),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Below(b) => write!(f, "<{b}"),
            Bound::Through(b) => write!(f, "<={b}"),
            Bound::Exact => write!(f, "exact"),
        }
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bound> {
        let s = s.trim();
        let parse = |v: &str| {
            v.trim().parse::<Rational>().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("bad bound {s:?}"),
            })
        };
        if s == "exact" {
            Ok(Bound::Exact)
        } else if let Some(v) = s.strip_prefix("<=") {
            Ok(Bound::Through(parse(v)?))
        } else if let Some(v) = s.strip_prefix('<') {
            Ok(Bound::Below(parse(v)?))
        } else {
            Err(Error::Syntax {
                pos: 0,
                msg: format!("bad bound {s:?}"),
            })
        }
    }
}

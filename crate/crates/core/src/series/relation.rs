//! Asymptotic relations `≼`, `≺`, `≍`, `∼` on truncated series.

use serde::Serialize;

use super::{Lead, Series};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The four relations between `f` and `g`. The JSON form carries `prec`,
/// `asymp` and `sim`; `preceq` is `prec || asymp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dominance {
    #[serde(skip)]
    pub preceq: bool,
    pub prec: bool,
    pub asymp: bool,
    pub sim: bool,
}

fn inconclusive() -> Error {
    Error::Inconclusive("comparison depends on terms beyond a reliability bound".into())
}

impl<C: Scalar> Series<C> {
    /// `self ≼ other`, i.e. `self = O(other)`.
    pub fn preceq(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        match (self.lead(), other.lead()) {
            (Lead::Zero, _) => Ok(true),
            (Lead::Term(..), Lead::Zero) => Ok(false),
            (Lead::Unknown(_), Lead::Zero) => Err(inconclusive()),
            (Lead::Term(a, ..), Lead::Term(b, ..)) => Ok(a <= b),
            (Lead::Unknown(bf), Lead::Term(_, _, wg)) if bf.contains(&wg) => Ok(true),
            (Lead::Term(_, _, wf), Lead::Unknown(bg)) if bg.contains(&wf) => Ok(false),
            _ => Err(inconclusive()),
        }
    }

    /// `self ≺ other`, i.e. `self = o(other)`.
    pub fn prec(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        match (self.lead(), other.lead()) {
            (_, Lead::Zero) => Ok(false),
            (Lead::Zero, Lead::Term(..)) => Ok(true),
            (Lead::Term(a, ..), Lead::Term(b, ..)) => Ok(a < b),
            (Lead::Unknown(bf), Lead::Term(_, _, wg)) if bf.contains(&wg) => Ok(true),
            (Lead::Term(_, _, wf), Lead::Unknown(bg)) if bg.contains(&wf) => Ok(false),
            _ => Err(inconclusive()),
        }
    }

    /// `self ≍ other`.
    pub fn asymp(&self, other: &Self) -> Result<bool> {
        Ok(self.preceq(other)? && other.preceq(self)?)
    }

    /// `self ∼ other`, i.e. `self - other ≺ other`.
    pub fn sim(&self, other: &Self) -> Result<bool> {
        self.checked_sub(other)?.prec(other)
    }

    pub fn dominance(&self, other: &Self) -> Result<Dominance> {
        Ok(Dominance {
            preceq: self.preceq(other)?,
            prec: self.prec(other)?,
            asymp: self.asymp(other)?,
            sim: self.sim(other)?,
        })
    }
}

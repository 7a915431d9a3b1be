use std::fmt;

use thiserror::Error;

use crate::formula::FormulaError;
use crate::system::SystemError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("fragment violation: {0}")]
    Fragment(String),
    #[error("search infeasible: {what} needs about {estimate} intervals, ceiling is {ceiling}")]
    Infeasible {
        what: String,
        estimate: String,
        ceiling: u128,
    },
    #[error("bound violation: {0}")]
    Bound(String),
}

impl CheckError {
    /// Errors caused by the size of the search rather than by bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, CheckError::Infeasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Agrees with the unbounded semantics.
    Conclusive,
    /// Some witness search stopped at this interval length.
    BoundedAt(usize),
}

impl Regime {
    /// The weaker of two regimes (the smaller cut-off wins).
    pub fn meet(self, other: Regime) -> Regime {
        match (self, other) {
            (Regime::Conclusive, r) | (r, Regime::Conclusive) => r,
            (Regime::BoundedAt(a), Regime::BoundedAt(b)) => Regime::BoundedAt(a.min(b)),
        }
    }

    pub fn is_conclusive(self) -> bool {
        self == Regime::Conclusive
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Conclusive => f.write_str("conclusive"),
            Regime::BoundedAt(k) => write!(f, "bounded at {k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub holds: bool,
    pub regime: Regime,
}

impl Verdict {
    pub fn conclusive(holds: bool) -> Self {
        Verdict {
            holds,
            regime: Regime::Conclusive,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({})",
            if self.holds { "holds" } else { "fails" },
            self.regime
        )
    }
}

use thiserror::Error;

use crate::lattice::LatticeVector;

/// Everything that can go wrong in an analysis.
///
/// The variants split into two families: input problems (bad dimensions,
/// values outside an operation's domain, malformed documents) and
/// mathematical refusals (an isotropy report requested for a derivation that
/// is not maximal, an infeasible construction, an inconclusive search).
/// [`Error::is_refusal`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("exponent {exponent:?} leaves the semigroup of the algebra")]
    ClosureViolation { exponent: Vec<i64> },

    #[error("refused: {reason}")]
    Refused { reason: String, witness: Option<Witness> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Machine-readable evidence attached to a refusal.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A Demazure root on another ray whose derivation commutes with the input.
    ToricRoot { ray: usize, root: LatticeVector },
    /// A trinomial derivation that commutes with the input without being
    /// equivalent to it.
    TrinomialLnd { label: String },
    /// A named condition that blocks the analysis.
    Condition { name: String, detail: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn dimension(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }

    /// True when the input was well formed but the mathematics says no.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::Refused { .. }
                | Error::Infeasible(_)
                | Error::NotFound(_)
                | Error::Inconclusive(_)
                | Error::ClosureViolation { .. }
        )
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Error::Refused { witness, .. } => witness.as_ref(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

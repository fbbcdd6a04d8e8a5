use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::decide::DecideError;
use crate::filtration::FiltrationError;
use crate::io::FormatError;
use crate::proof::ProofError;
use crate::semantics::SemanticsError;
use crate::syntax::SyntaxError;

/// A projected enumeration size that exceeds a configured cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUp {
    pub what: String,
    pub projected: BigUint,
    pub cap: u64,
}

impl BlowUp {
    pub fn new(what: impl Into<String>, projected: BigUint, cap: u64) -> Self {
        Self { what: what.into(), projected, cap }
    }

    /// Returns an error when `projected` exceeds `cap`.
    pub fn check(what: impl Into<String>, projected: &BigUint, cap: u64) -> Result<(), BlowUp> {
        if *projected > BigUint::from(cap) {
            Err(Self::new(what, projected.clone(), cap))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for BlowUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: projected count {} exceeds cap {}", self.what, self.projected, self.cap)
    }
}

impl std::error::Error for BlowUp {}

/// Umbrella error for callers that mix several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl Error {
    /// The cap violation behind this error, if any.
    pub fn blow_up(&self) -> Option<&BlowUp> {
        match self {
            Error::Semantics(SemanticsError::CapExceeded(b)) => Some(b),
            Error::Filtration(FiltrationError::Semantics(SemanticsError::CapExceeded(b))) => Some(b),
            Error::Decide(e) => e.blow_up(),
            Error::Proof(e) => e.blow_up(),
            Error::Format(FormatError::Semantics(SemanticsError::CapExceeded(b))) => Some(b),
            _ => None,
        }
    }
}

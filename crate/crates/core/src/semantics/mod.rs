//! Coalgebraic models over finite algebras.
//!
//! A model pairs a finite carrier with a structure map `σ : S → TS` for one
//! of five functors and an atom valuation. Elements of `TS` are
//! [`Successors`] values; neighborhood and selection structures are total
//! tables indexed by the base-`k` code of a function `S → A` (see
//! [`encode`]).

mod eval;
mod functor;
mod lifting;
mod naturality;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Rational, TruthValue};
use crate::error::BlowUp;

pub use eval::{eval, eval0, eval1, eval1_with, eval_with, EvalOptions, Evaluation, OneStepModel};
pub(crate) use functor::lex_vectors;
pub use functor::{count_ts, enumerate_ts, functor_map, random_successors, table_keys};
pub use lifting::{Lifted, Lifting, PredicateLifting};
pub use naturality::{naturality_check, NaturalityConfig, NaturalityReport, NaturalityWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctorKind {
    /// Crisp Kripke frames: `σ(s) ⊆ S`.
    Powerset,
    /// Many-valued accessibility: `σ(s) : S → A`.
    Fuzzy,
    /// Many-valued neighborhoods: `σ(s) : (S → A) → A`.
    Neighborhood,
    /// Fuzzy selection functions: `σ(s) : (S → A) → (S → A)`.
    Selection,
    /// Probability distributions over `S`.
    Distribution,
}

impl FunctorKind {
    pub const ALL: [FunctorKind; 5] = [
        FunctorKind::Powerset,
        FunctorKind::Fuzzy,
        FunctorKind::Neighborhood,
        FunctorKind::Selection,
        FunctorKind::Distribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctorKind::Powerset => "powerset",
            FunctorKind::Fuzzy => "fuzzy",
            FunctorKind::Neighborhood => "neighborhood",
            FunctorKind::Selection => "selection",
            FunctorKind::Distribution => "distribution",
        }
    }
}

impl fmt::Display for FunctorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctorKind {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SemanticsError::Malformed(format!("unknown functor `{s}`")))
    }
}

/// An element of `TS` for a carrier of `n` states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Successors {
    /// Sorted, duplicate-free state indices.
    Powerset(Vec<usize>),
    /// One value per state.
    Fuzzy(Vec<TruthValue>),
    /// `N(g)` for every `g : S → A`, indexed by `encode(g)`.
    Neighborhood(Vec<TruthValue>),
    /// `encode(s(g))` for every `g : S → A`, indexed by `encode(g)`.
    Selection(Vec<usize>),
    /// One probability per state; entries sum to 1.
    Distribution(Vec<Rational>),
}

impl Successors {
    pub fn kind(&self) -> FunctorKind {
        match self {
            Successors::Powerset(_) => FunctorKind::Powerset,
            Successors::Fuzzy(_) => FunctorKind::Fuzzy,
            Successors::Neighborhood(_) => FunctorKind::Neighborhood,
            Successors::Selection(_) => FunctorKind::Selection,
            Successors::Distribution(_) => FunctorKind::Distribution,
        }
    }

    /// Checks that this is a well-formed element of `TS` with `|S| = n`.
    pub fn validate(&self, n: usize, alg: &FiniteAlgebra) -> Result<(), SemanticsError> {
        let bad = |msg: String| Err(SemanticsError::Malformed(msg));
        match self {
            Successors::Powerset(set) => {
                if set.iter().any(|&s| s >= n) {
                    return bad(format!("successor index out of range for {n} states"));
                }
                if set.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("successor set must be sorted and duplicate-free".into());
                }
            }
            Successors::Fuzzy(row) => {
                if row.len() != n {
                    return bad(format!("fuzzy row has {} entries for {n} states", row.len()));
                }
                for &v in row {
                    alg.check(v)?;
                }
            }
            Successors::Neighborhood(table) => {
                let keys = table_keys(alg.size(), n)?;
                if table.len() != keys {
                    return bad(format!("neighborhood table has {} entries, expected {keys}", table.len()));
                }
                for &v in table {
                    alg.check(v)?;
                }
            }
            Successors::Selection(table) => {
                let keys = table_keys(alg.size(), n)?;
                if table.len() != keys {
                    return bad(format!("selection table has {} entries, expected {keys}", table.len()));
                }
                if table.iter().any(|&c| c >= keys) {
                    return bad("selection output code out of range".into());
                }
            }
            Successors::Distribution(mu) => {
                if !alg.is_lukasiewicz() {
                    return Err(SemanticsError::NotLukasiewicz("distribution"));
                }
                if mu.len() != n {
                    return bad(format!("distribution has {} entries for {n} states", mu.len()));
                }
                if mu.iter().any(|p| *p < Rational::zero()) {
                    return bad("negative probability".into());
                }
                let total: Rational = mu.iter().sum();
                if !total.is_one() {
                    return bad(format!("probabilities sum to {total}, not 1"));
                }
            }
        }
        Ok(())
    }
}

/// Base-`k` code of a value vector, little-endian in the state index.
pub fn encode(values: &[TruthValue], k: usize) -> usize {
    values.iter().rev().fold(0, |acc, v| acc * k + v.index())
}

/// Inverse of [`encode`] for vectors of length `n`.
pub fn decode(mut code: usize, n: usize, k: usize) -> Vec<TruthValue> {
    (0..n)
        .map(|_| {
            let v = TruthValue::new((code % k) as u32);
            code /= k;
            v
        })
        .collect()
}

/// A model `⟨S, σ, V⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TModel {
    algebra: Arc<FiniteAlgebra>,
    kind: FunctorKind,
    states: Vec<String>,
    sigma: Vec<Successors>,
    valuation: BTreeMap<String, Vec<TruthValue>>,
}

impl TModel {
    pub fn new(
        algebra: Arc<FiniteAlgebra>,
        kind: FunctorKind,
        states: Vec<String>,
        sigma: Vec<Successors>,
        valuation: BTreeMap<String, Vec<TruthValue>>,
    ) -> Result<Self, SemanticsError> {
        let n = states.len();
        if n == 0 {
            return Err(SemanticsError::Malformed("a model needs at least one state".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(SemanticsError::Malformed(format!("duplicate state `{s}`")));
            }
        }
        if sigma.len() != n {
            return Err(SemanticsError::Malformed(format!("sigma has {} rows for {n} states", sigma.len())));
        }
        for (s, row) in sigma.iter().enumerate() {
            if row.kind() != kind {
                return Err(SemanticsError::Malformed(format!(
                    "sigma({}) is a {} structure in a {kind} model",
                    states[s],
                    row.kind()
                )));
            }
            row.validate(n, &algebra)?;
        }
        for (p, values) in &valuation {
            if values.len() != n {
                return Err(SemanticsError::Malformed(format!("valuation of `{p}` has {} entries", values.len())));
            }
            for &v in values {
                algebra.check(v)?;
            }
        }
        Ok(Self { algebra, kind, states, sigma, valuation })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn kind(&self) -> FunctorKind {
        self.kind
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sigma(&self) -> &[Successors] {
        &self.sigma
    }

    pub fn valuation(&self) -> &BTreeMap<String, Vec<TruthValue>> {
        &self.valuation
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}

/// How the `prob` lifting treats a weighted sum that is not an element of
/// the (finite) algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbMode {
    /// Report an out-of-domain error.
    #[default]
    Strict,
    /// Round down to the largest element below the exact sum.
    Floor,
}

impl FromStr for ProbMode {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(ProbMode::Strict),
            "floor" => Ok(ProbMode::Floor),
            other => Err(SemanticsError::Malformed(format!("unknown prob mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("lifting `{lifting}` is defined for {expected} structures, not {found}")]
    FunctorMismatch { lifting: String, expected: FunctorKind, found: FunctorKind },
    #[error("lifting `{lifting}` expects {expected} argument(s), got {found}")]
    Arity { lifting: String, expected: usize, found: usize },
    #[error("unknown lifting `{0}`")]
    UnknownLifting(String),
    #[error("atom `{0}` has no valuation")]
    UndeclaredAtom(String),
    #[error("formula `{formula}` is not of rank {expected}")]
    Rank { formula: String, expected: u8 },
    #[error("`{lifting}` produced {value}, which is not an element of the algebra")]
    OutOfDomain { lifting: String, value: Rational },
    #[error("{0} semantics needs a Łukasiewicz algebra")]
    NotLukasiewicz(&'static str),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error(transparent)]
    CapExceeded(#[from] BlowUp),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

//! Brute-force decision procedures.
//!
//! Bounded searches are refutation-complete only: a countermodel is
//! definitive, while "valid up to bound" says nothing about larger models
//! unless the bound reaches the closure bound reported in the verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, TruthValue};
use crate::error::BlowUp;
use crate::filtration::fmp_bound;
use crate::limits::Limits;
use crate::proof::{consequence_counterexample, ProofError, Rule, RuleKind};
use crate::semantics::lex_vectors;
use crate::semantics::{
    count_ts, enumerate_ts, eval0, eval1_with, eval_with, table_keys, EvalOptions, FunctorKind, OneStepModel,
    SemanticsError, Successors, TModel,
};
use crate::syntax::{Flavor, Formula, Signature, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("rule `{0}` is not a one-step rule (premises modality-free, conclusion rank 1)")]
    NotOneStep(String),
    #[error("`{0}` is not in any language flavor over this algebra")]
    NoFlavor(String),
    #[error("self-verification failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    CapExceeded(#[from] BlowUp),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

impl DecideError {
    pub fn blow_up(&self) -> Option<&BlowUp> {
        match self {
            DecideError::CapExceeded(b) | DecideError::Semantics(SemanticsError::CapExceeded(b)) => Some(b),
            DecideError::Proof(e) => e.blow_up(),
            _ => None,
        }
    }
}

/// Result of [`prop_consequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consequence {
    pub holds: bool,
    /// The least assignment refuting the sequent.
    pub witness: Option<BTreeMap<String, TruthValue>>,
}

/// `Γ ⊨_A φ` by enumerating all assignments to the atoms.
pub fn prop_consequence(
    alg: &FiniteAlgebra,
    gamma: &[Formula],
    phi: &Formula,
    flavor: Flavor,
    limits: &Limits,
) -> Result<Consequence, DecideError> {
    let witness = consequence_counterexample(alg, gamma, phi, flavor, limits)?;
    if let Some(h) = &witness {
        let coloring = h.iter().map(|(p, &v)| (p.clone(), vec![v])).collect();
        let one = alg.one();
        let premises_hold = gamma
            .iter()
            .map(|g| eval0(alg, &coloring, 1, g))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .all(|v| v[0] == one);
        if !premises_hold || eval0(alg, &coloring, 1, phi)?[0] == one {
            return Err(DecideError::SelfCheck("assignment does not refute the sequent".into()));
        }
    }
    Ok(Consequence { holds: witness.is_none(), witness })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Look for a state where the formula is below 1.
    #[default]
    Validity,
    /// Look for a state where the formula equals 1.
    Sat1,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Validity => "validity",
            SearchMode::Sat1 => "sat-1",
        })
    }
}

impl FromStr for SearchMode {
    type Err = DecideError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "validity" => Ok(SearchMode::Validity),
            "sat-1" => Ok(SearchMode::Sat1),
            other => Err(DecideError::Semantics(SemanticsError::Malformed(format!("unknown search mode `{other}`")))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    ValidUpToBound,
    Countermodel { model: TModel, state: usize, value: TruthValue },
    Satisfied { model: TModel, state: usize, value: TruthValue },
    UnsatisfiableUpToBound,
    SoundUpToBound,
    Unsound { model: OneStepModel, value: TruthValue },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::ValidUpToBound => "valid-up-to-bound",
            Outcome::Countermodel { .. } => "countermodel",
            Outcome::Satisfied { .. } => "satisfied",
            Outcome::UnsatisfiableUpToBound => "unsatisfiable-up-to-bound",
            Outcome::SoundUpToBound => "sound-up-to-bound",
            Outcome::Unsound { .. } => "unsound",
        }
    }

    /// True for outcomes carrying a witness that refutes the query.
    pub fn is_negative(&self) -> bool {
        matches!(self, Outcome::Countermodel { .. } | Outcome::Unsound { .. } | Outcome::UnsatisfiableUpToBound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchVerdict {
    pub outcome: Outcome,
    pub functor: FunctorKind,
    pub max_states: usize,
    pub granularity: u32,
    /// Models (or marking/structure pairs) examined.
    pub examined: u64,
    /// Points skipped because `prob` left the algebra in strict mode.
    pub undefined: u64,
    /// `k^|closure|` for validity searches.
    pub closure_bound: Option<BigUint>,
}

impl SearchVerdict {
    /// Whether the searched bound reaches the closure bound, making a
    /// negative answer definitive.
    pub fn complete(&self) -> bool {
        self.closure_bound.as_ref().is_some_and(|b| BigUint::from(self.max_states) >= *b)
    }
}

fn out_of_domain(e: &SemanticsError) -> bool {
    matches!(e, SemanticsError::OutOfDomain { .. })
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// Per-atom value columns over `n` states from an atom-major vector.
fn coloring(atoms: &[String], values: &[usize], n: usize) -> BTreeMap<String, Vec<TruthValue>> {
    atoms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), values[i * n..(i + 1) * n].iter().map(|&v| TruthValue::new(v as u32)).collect()))
        .collect()
}

fn check_language(kind: FunctorKind, alg: &FiniteAlgebra, formulas: &[&Formula]) -> Result<(), DecideError> {
    let sig = Signature::for_functor(kind);
    for f in formulas {
        sig.check(f)?;
        if Flavor::infer(f, alg).is_none() {
            return Err(DecideError::NoFlavor(f.to_string()));
        }
    }
    Ok(())
}

/// Searches every model with `1..=max_states` states over the atoms of
/// `phi`: state counts ascending, then valuations (atoms in order, each
/// state-major), then `σ` tuples with `σ(s0)` varying slowest, then states.
/// The first hit is returned.
pub fn bounded_validity(
    kind: FunctorKind,
    alg: &Arc<FiniteAlgebra>,
    phi: &Formula,
    max_states: usize,
    mode: SearchMode,
    limits: &Limits,
    opts: EvalOptions,
) -> Result<SearchVerdict, DecideError> {
    check_language(kind, alg, &[phi])?;
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let k = alg.size();
    let m = atoms.len();
    let d = limits.granularity;

    let mut projected = BigUint::zero();
    for n in 1..=max_states {
        if matches!(kind, FunctorKind::Neighborhood | FunctorKind::Selection) {
            BlowUp::check(format!("{k}^{n} table keys"), &BigUint::from(k).pow(n as u32), limits.max_table_keys)?;
        }
        projected += BigUint::from(k).pow((n * m) as u32) * count_ts(kind, n, k, d).pow(n as u32);
    }
    BlowUp::check(format!("{kind} models with at most {max_states} states"), &projected, limits.max_evaluations)?;

    let flavor = Flavor::infer(phi, alg).expect("checked above");
    let mut verdict = SearchVerdict {
        outcome: match mode {
            SearchMode::Validity => Outcome::ValidUpToBound,
            SearchMode::Sat1 => Outcome::UnsatisfiableUpToBound,
        },
        functor: kind,
        max_states,
        granularity: d,
        examined: 0,
        undefined: 0,
        closure_bound: Some(fmp_bound(phi, alg, flavor).bound),
    };
    let one = alg.one();
    for n in 1..=max_states {
        let structures = enumerate_ts(kind, n, alg, d, limits.max_evaluations)?;
        let names = state_names(n);
        for values in lex_vectors(n * m, k) {
            let valuation = coloring(&atoms, &values, n);
            for choice in lex_vectors(n, structures.len()) {
                let sigma: Vec<Successors> = choice.iter().map(|&i| structures[i].clone()).collect();
                let model = TModel::new(Arc::clone(alg), kind, names.clone(), sigma, valuation.clone())?;
                verdict.examined += 1;
                let evaluation = match eval_with(&model, phi, opts) {
                    Ok(e) => e,
                    Err(e) if out_of_domain(&e) => {
                        verdict.undefined += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                let hit = evaluation.values.iter().position(|&v| match mode {
                    SearchMode::Validity => v != one,
                    SearchMode::Sat1 => v == one,
                });
                if let Some(state) = hit {
                    let value = evaluation.values[state];
                    let recheck = eval_with(&model, phi, opts)?.values[state];
                    if recheck != value {
                        return Err(DecideError::SelfCheck(format!(
                            "witness state {} re-evaluates to {}, reported {}",
                            names[state],
                            alg.format_value(recheck),
                            alg.format_value(value)
                        )));
                    }
                    verdict.outcome = match mode {
                        SearchMode::Validity => Outcome::Countermodel { model, state, value },
                        SearchMode::Sat1 => Outcome::Satisfied { model, state, value },
                    };
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// Table keys a one-step formula can read: codes of the first argument of
/// every modal atom under the coloring.
fn relevant_keys(
    alg: &FiniteAlgebra,
    coloring: &BTreeMap<String, Vec<TruthValue>>,
    n: usize,
    modal_args: &[Formula],
) -> Result<Vec<usize>, SemanticsError> {
    let mut keys = BTreeSet::new();
    for a in modal_args {
        keys.insert(crate::semantics::encode(&eval0(alg, coloring, n, a)?, alg.size()));
    }
    Ok(keys.into_iter().collect())
}

/// Structures that differ at least on the `keys` entries; every other
/// entry is fixed to its least value.
fn structures_on_keys(
    kind: FunctorKind,
    n: usize,
    k: usize,
    keys: &[usize],
) -> Result<Vec<Successors>, SemanticsError> {
    let total = table_keys(k, n)?;
    let base = match kind {
        FunctorKind::Neighborhood => k,
        _ => total,
    };
    Ok(lex_vectors(keys.len(), base)
        .map(|vals| {
            let mut table = vec![0usize; total];
            for (&key, v) in keys.iter().zip(vals) {
                table[key] = v;
            }
            match kind {
                FunctorKind::Neighborhood => {
                    Successors::Neighborhood(table.into_iter().map(|v| TruthValue::new(v as u32)).collect())
                }
                _ => Successors::Selection(table),
            }
        })
        .collect())
}

/// Checks one-step soundness of `rule` on carriers of `1..=max_states`
/// states: every marking (metavariables in order, state-major) under which
/// all premises are constantly 1, against every structure `δ ∈ TS`.
///
/// Neighborhood and selection structures are enumerated only on the table
/// keys the conclusion reads, which is exhaustive up to agreement on those
/// keys.
pub fn onestep_sound_bounded(
    rule: &Rule,
    kind: FunctorKind,
    alg: &Arc<FiniteAlgebra>,
    max_states: usize,
    limits: &Limits,
    opts: EvalOptions,
) -> Result<SearchVerdict, DecideError> {
    if rule.kind() != RuleKind::OneStep {
        return Err(DecideError::NotOneStep(rule.name.clone()));
    }
    let mut all: Vec<&Formula> = rule.premises.iter().collect();
    all.push(&rule.conclusion);
    check_language(kind, alg, &all)?;
    let atoms: Vec<String> = rule.metavariables().into_iter().collect();
    let k = alg.size();
    let m = atoms.len();
    let d = limits.granularity;
    let tabular = matches!(kind, FunctorKind::Neighborhood | FunctorKind::Selection);

    let mut modal_args = BTreeSet::new();
    rule.conclusion.visit(&mut |f| {
        if let Formula::Modal(_, args) = f {
            modal_args.insert(args[0].clone());
        }
    });
    let modal_args: Vec<Formula> = modal_args.into_iter().collect();

    let mut projected = BigUint::zero();
    for n in 1..=max_states {
        let per_marking = if tabular {
            BlowUp::check(format!("{k}^{n} table keys"), &BigUint::from(k).pow(n as u32), limits.max_table_keys)?;
            let base =
                if kind == FunctorKind::Neighborhood { BigUint::from(k) } else { BigUint::from(k).pow(n as u32) };
            base.pow(modal_args.len() as u32)
        } else {
            count_ts(kind, n, k, d)
        };
        projected += BigUint::from(k).pow((n * m) as u32) * per_marking;
    }
    BlowUp::check(format!("one-step models with at most {max_states} states"), &projected, limits.max_evaluations)?;

    let mut verdict = SearchVerdict {
        outcome: Outcome::SoundUpToBound,
        functor: kind,
        max_states,
        granularity: d,
        examined: 0,
        undefined: 0,
        closure_bound: None,
    };
    let one = alg.one();
    let premises_hold = |col: &BTreeMap<String, Vec<TruthValue>>, n: usize| -> Result<bool, SemanticsError> {
        for p in &rule.premises {
            if eval0(alg, col, n, p)?.iter().any(|&v| v != one) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for n in 1..=max_states {
        let full = if tabular { Vec::new() } else { enumerate_ts(kind, n, alg, d, limits.max_evaluations)? };
        for values in lex_vectors(n * m, k) {
            let col = coloring(&atoms, &values, n);
            if !premises_hold(&col, n)? {
                continue;
            }
            let reduced;
            let structures = if tabular {
                reduced = structures_on_keys(kind, n, k, &relevant_keys(alg, &col, n, &modal_args)?)?;
                &reduced
            } else {
                &full
            };
            for delta in structures {
                verdict.examined += 1;
                let value = match eval1_with(alg, &col, n, &rule.conclusion, delta, opts) {
                    Ok((v, _)) => v,
                    Err(e) if out_of_domain(&e) => {
                        verdict.undefined += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                if value != one {
                    let model = OneStepModel::new(Arc::clone(alg), n, delta.clone(), col)?;
                    if !premises_hold(&model.coloring, n)? || model.eval1(&rule.conclusion, opts)? != value {
                        return Err(DecideError::SelfCheck(format!(
                            "one-step witness for `{}` does not re-evaluate",
                            rule.name
                        )));
                    }
                    verdict.outcome = Outcome::Unsound { model, value };
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// Total number of models [`bounded_validity`] would examine.
pub fn projected_models(kind: FunctorKind, k: usize, atoms: usize, max_states: usize, granularity: u32) -> BigUint {
    (1..=max_states).fold(BigUint::zero(), |acc, n| {
        acc + BigUint::from(k).pow((n * atoms) as u32) * count_ts(kind, n, k, granularity).pow(n as u32)
    })
}

//! Quotients of a model by agreement on a closed formula set.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, TruthValue};
use crate::limits::Limits;
use crate::semantics::{eval_with, functor_map, EvalOptions, SemanticsError, TModel};
use crate::syntax::{closure, ClosedSet, Flavor, Formula};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("representative {state} is not a member of class {class}")]
    BadRepresentative { class: usize, state: usize },
    #[error("expected {expected} representatives, got {found}")]
    RepresentativeCount { expected: usize, found: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiltrationOptions {
    pub eval: EvalOptions,
    /// Key cap for quotient neighborhood/selection tables.
    pub table_cap: u64,
}

impl Default for FiltrationOptions {
    fn default() -> Self {
        Self { eval: EvalOptions::default(), table_cap: Limits::DEFAULT_MAX_TABLE_KEYS }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationResult {
    /// Classes ordered by least member; members ascending.
    pub classes: Vec<Vec<usize>>,
    /// `q[s]` is the class of state `s`.
    pub q: Vec<usize>,
    /// `r[c]` is the representative of class `c`.
    pub r: Vec<usize>,
    pub quotient: TModel,
    pub options: FiltrationOptions,
}

impl FiltrationResult {
    /// `{state: class name}` for every original state.
    pub fn mapping(&self, model: &TModel) -> BTreeMap<String, String> {
        model.states().iter().zip(&self.q).map(|(s, &c)| (s.clone(), self.quotient.states()[c].clone())).collect()
    }
}

/// Values of every formula of `phi` at every state: `profiles[s][i]`.
fn profiles(model: &TModel, phi: &ClosedSet, opts: EvalOptions) -> Result<Vec<Vec<TruthValue>>, SemanticsError> {
    let mut out = vec![Vec::with_capacity(phi.len()); model.len()];
    for f in phi.formulas() {
        let values = eval_with(model, f, opts)?.values;
        for (s, v) in values.into_iter().enumerate() {
            out[s].push(v);
        }
    }
    Ok(out)
}

fn partition(profiles: &[Vec<TruthValue>]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut index: BTreeMap<&[TruthValue], usize> = BTreeMap::new();
    for (s, p) in profiles.iter().enumerate() {
        let c = *index.entry(p.as_slice()).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(s);
    }
    classes
}

/// The `≡_Φ` classes of a model, ordered by least member.
pub fn equiv_classes(model: &TModel, phi: &ClosedSet) -> Result<Vec<Vec<usize>>, FiltrationError> {
    equiv_classes_with(model, phi, EvalOptions::default())
}

pub fn equiv_classes_with(
    model: &TModel,
    phi: &ClosedSet,
    opts: EvalOptions,
) -> Result<Vec<Vec<usize>>, FiltrationError> {
    Ok(partition(&profiles(model, phi, opts)?))
}

/// The filtration with `σ̲ = Tq ∘ σ ∘ r` and `V̲(p)(s̲) = V(p)(r(s̲))`.
/// Representatives default to the least member of each class.
pub fn filtrate(
    model: &TModel,
    phi: &ClosedSet,
    r_choice: Option<&[usize]>,
) -> Result<FiltrationResult, FiltrationError> {
    filtrate_with(model, phi, r_choice, FiltrationOptions::default())
}

pub fn filtrate_with(
    model: &TModel,
    phi: &ClosedSet,
    r_choice: Option<&[usize]>,
    options: FiltrationOptions,
) -> Result<FiltrationResult, FiltrationError> {
    let classes = equiv_classes_with(model, phi, options.eval)?;
    let mut q = vec![0; model.len()];
    for (c, members) in classes.iter().enumerate() {
        for &s in members {
            q[s] = c;
        }
    }
    let r: Vec<usize> = match r_choice {
        None => classes.iter().map(|m| m[0]).collect(),
        Some(r) => {
            if r.len() != classes.len() {
                return Err(FiltrationError::RepresentativeCount { expected: classes.len(), found: r.len() });
            }
            for (c, &s) in r.iter().enumerate() {
                if !classes[c].contains(&s) {
                    return Err(FiltrationError::BadRepresentative { class: c, state: s });
                }
            }
            r.to_vec()
        }
    };
    let alg = model.algebra();
    let target = classes.len();
    let sigma = r
        .iter()
        .map(|&s| functor_map(alg, &q, target, &model.sigma()[s], options.table_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let valuation =
        model.valuation().iter().map(|(p, values)| (p.clone(), r.iter().map(|&s| values[s]).collect())).collect();
    let names = classes
        .iter()
        .map(|m| {
            let members: Vec<&str> = m.iter().map(|&s| model.states()[s].as_str()).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    let quotient = TModel::new(Arc::clone(model.algebra_arc()), model.kind(), names, sigma, valuation)?;
    Ok(FiltrationResult { classes, q, r, quotient, options })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub formula: String,
    pub state: String,
    pub original: String,
    pub quotient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub formulas: usize,
    pub states: usize,
    pub violations: Vec<LemmaViolation>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `‖φ‖_σ(s) = ‖φ‖_σ̲(q(s))` for every `φ ∈ Φ` and `s ∈ S`.
pub fn check_filtration_lemma(
    model: &TModel,
    phi: &ClosedSet,
    result: &FiltrationResult,
) -> Result<LemmaReport, FiltrationError> {
    let alg = model.algebra();
    let opts = result.options.eval;
    let mut violations = Vec::new();
    for f in phi.formulas() {
        let original = eval_with(model, f, opts)?.values;
        let quotient = eval_with(&result.quotient, f, opts)?.values;
        for (s, &v) in original.iter().enumerate() {
            let w = quotient[result.q[s]];
            if v != w {
                violations.push(LemmaViolation {
                    formula: f.to_string(),
                    state: model.states()[s].clone(),
                    original: alg.format_value(v),
                    quotient: alg.format_value(w),
                });
            }
        }
    }
    Ok(LemmaReport { formulas: phi.len(), states: model.len(), violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FmpBound {
    pub closure_size: usize,
    pub formula_size: usize,
    /// How `formula_size` counts.
    pub size_convention: &'static str,
    #[serde(serialize_with = "as_decimal")]
    pub bound: BigUint,
}

fn as_decimal<S: serde::Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// `k^|closure({φ})|`, the size bound on a filtrated model of `φ`.
pub fn fmp_bound(phi: &Formula, alg: &FiniteAlgebra, flavor: Flavor) -> FmpBound {
    let closure_size = closure([phi], flavor, alg).len();
    FmpBound {
        closure_size,
        formula_size: phi.size(),
        size_convention: "AST nodes",
        bound: BigUint::from(alg.size()).pow(closure_size as u32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{FunctorKind, Successors};
    use crate::Rational;

    fn tv(i: u32) -> TruthValue {
        TruthValue::new(i)
    }

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn kripke() -> TModel {
        let l2 = Arc::new(FiniteAlgebra::lukasiewicz(2).unwrap());
        TModel::new(
            l2,
            FunctorKind::Powerset,
            vec!["u".into(), "v".into(), "w".into()],
            vec![Successors::Powerset(vec![1]), Successors::Powerset(vec![2]), Successors::Powerset(vec![0])],
            BTreeMap::from([("p".to_string(), vec![tv(1), tv(1), tv(0)])]),
        )
        .unwrap()
    }

    #[test]
    fn atom_profile_partition() {
        let m = kripke();
        let phi = ClosedSet::closure_of([&f("p")], Flavor::Basic, m.algebra());
        assert_eq!(equiv_classes(&m, &phi).unwrap(), vec![vec![0, 1], vec![2]]);
        let constants = ClosedSet::closure_of([], Flavor::Basic, m.algebra());
        assert_eq!(equiv_classes(&m, &constants).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn kripke_quotient_by_hand() {
        let m = kripke();
        let phi = ClosedSet::closure_of([&f("p")], Flavor::Basic, m.algebra());
        let res = filtrate(&m, &phi, None).unwrap();
        // r = (u, w); σ(u) = {v} ↦ {0}, σ(w) = {u} ↦ {0}
        assert_eq!(res.r, vec![0, 2]);
        assert_eq!(res.quotient.sigma(), &[Successors::Powerset(vec![0]), Successors::Powerset(vec![0])]);
        assert_eq!(res.quotient.states(), &["{u,v}".to_string(), "{w}".to_string()]);
        // choosing v as representative: σ(v) = {w} ↦ {1}
        let other = filtrate(&m, &phi, Some(&[1, 2])).unwrap();
        assert_eq!(other.quotient.sigma()[0], Successors::Powerset(vec![1]));
        assert!(check_filtration_lemma(&m, &phi, &other).unwrap().passed());
        assert!(matches!(filtrate(&m, &phi, Some(&[2, 2])), Err(FiltrationError::BadRepresentative { .. })));
    }

    #[test]
    fn distribution_merge() {
        let l3 = Arc::new(FiniteAlgebra::lukasiewicz(3).unwrap());
        let half = Rational::new(1, 2);
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        let m = TModel::new(
            l3,
            FunctorKind::Distribution,
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                Successors::Distribution(vec![one, zero, zero]),
                Successors::Distribution(vec![zero, one, zero]),
                Successors::Distribution(vec![half, half, zero]),
            ],
            BTreeMap::from([("p".to_string(), vec![tv(2), tv(2), tv(0)])]),
        )
        .unwrap();
        let phi = ClosedSet::closure_of([&f("p")], Flavor::Basic, m.algebra());
        let res = filtrate(&m, &phi, None).unwrap();
        assert_eq!(res.quotient.sigma()[1], Successors::Distribution(vec![one, zero]));
    }

    #[test]
    fn lemma_holds_and_corruption_is_caught() {
        let m = kripke();
        let phi = ClosedSet::closure_of([&f("<box>(p) -> p"), &f("<dia>(<dia>(p))")], Flavor::Basic, m.algebra());
        let res = filtrate(&m, &phi, None).unwrap();
        assert!(check_filtration_lemma(&m, &phi, &res).unwrap().passed());
        let mut bad = res.clone();
        let n = bad.quotient.len();
        bad.quotient = TModel::new(
            Arc::clone(m.algebra_arc()),
            FunctorKind::Powerset,
            bad.quotient.states().to_vec(),
            vec![Successors::Powerset(vec![]); n],
            bad.quotient.valuation().clone(),
        )
        .unwrap();
        let report = check_filtration_lemma(&m, &phi, &bad).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn idempotent_up_to_isomorphism() {
        let m = kripke();
        let phi = ClosedSet::closure_of([&f("<box>(p)")], Flavor::Basic, m.algebra());
        let once = filtrate(&m, &phi, None).unwrap();
        let twice = filtrate(&once.quotient, &phi, None).unwrap();
        assert_eq!(twice.classes.len(), once.quotient.len());
    }

    #[test]
    fn fmp_bounds() {
        let l3 = FiniteAlgebra::lukasiewicz(3).unwrap();
        let b = fmp_bound(&f("<box>(p) -> p"), &l3, Flavor::Basic);
        assert_eq!((b.closure_size, b.bound.clone()), (5, BigUint::from(243u32)));
        let l2 = FiniteAlgebra::lukasiewicz(2).unwrap();
        assert_eq!(fmp_bound(&f("p"), &l2, Flavor::Basic).bound, BigUint::from(8u32));
        // delta flavor: {p, 0, 1/2, 1}
        assert_eq!(fmp_bound(&f("p"), &l3, Flavor::Delta).closure_size, 4);
    }
}

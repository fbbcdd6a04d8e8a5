use num_traits::Zero;

use crate::algebra::{FiniteAlgebra, Rational, TruthValue};
use crate::semantics::{decode, encode, FunctorKind, ProbMode, SemanticsError, Successors};
use crate::syntax::Modality;

/// A lifting's value at one structure, with a flag recording whether the
/// `prob` lifting rounded the exact result down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lifted {
    pub value: TruthValue,
    pub floored: bool,
}

impl Lifted {
    fn exact(value: TruthValue) -> Self {
        Self { value, floored: false }
    }
}

/// The component `λ_S : (S → A)^n → (TS → A)` of a predicate lifting.
///
/// `args[i]` lists the values of the i-th argument function on the states
/// of `S`; `delta` must be an element of `TS` for the same carrier.
pub trait PredicateLifting {
    fn name(&self) -> String;
    fn arity(&self) -> usize;
    fn functor(&self) -> FunctorKind;
    fn apply(
        &self,
        alg: &FiniteAlgebra,
        args: &[&[TruthValue]],
        delta: &Successors,
        mode: ProbMode,
    ) -> Result<Lifted, SemanticsError>;
}

/// The built-in liftings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lifting {
    /// Meet over the successor set.
    Box,
    /// Join over the successor set.
    Dia,
    /// `⋀_x g(x) → f(x)` over a many-valued accessibility row `g`.
    FuzzyBox,
    /// `⋁_x g(x) ⊙ f(x)`.
    FuzzyDia,
    /// `N(f)`.
    NeighborhoodBox,
    /// Binary conditional: inclusion degree of `s(f)` in `g`.
    Conditional,
    /// Expected truth value `Σ_x f(x)·μ(x)`.
    Probably,
    /// `⋁{α | μ(f_α) > r}` where `f_α` is the α-cut of `f`.
    MoreThan(Rational),
}

impl Lifting {
    /// Every built-in lifting, with `M` instantiated at the given thresholds.
    pub fn builtins(thresholds: &[Rational]) -> Vec<Lifting> {
        let mut out = vec![
            Lifting::Box,
            Lifting::Dia,
            Lifting::FuzzyBox,
            Lifting::FuzzyDia,
            Lifting::NeighborhoodBox,
            Lifting::Conditional,
            Lifting::Probably,
        ];
        out.extend(thresholds.iter().map(|&r| Lifting::MoreThan(r)));
        out
    }

    pub fn from_modality(m: &Modality) -> Result<Lifting, SemanticsError> {
        let plain = |l: Lifting| match m.param {
            None => Ok(l),
            Some(_) => Err(SemanticsError::UnknownLifting(m.to_string())),
        };
        match m.name.as_str() {
            "box" => plain(Lifting::Box),
            "dia" => plain(Lifting::Dia),
            "fbox" => plain(Lifting::FuzzyBox),
            "fdia" => plain(Lifting::FuzzyDia),
            "nbox" => plain(Lifting::NeighborhoodBox),
            "cond" => plain(Lifting::Conditional),
            "prob" => plain(Lifting::Probably),
            "M" => m.param.map(Lifting::MoreThan).ok_or_else(|| SemanticsError::UnknownLifting(m.to_string())),
            _ => Err(SemanticsError::UnknownLifting(m.to_string())),
        }
    }

    pub fn modality(&self) -> Modality {
        let name = match self {
            Lifting::Box => "box",
            Lifting::Dia => "dia",
            Lifting::FuzzyBox => "fbox",
            Lifting::FuzzyDia => "fdia",
            Lifting::NeighborhoodBox => "nbox",
            Lifting::Conditional => "cond",
            Lifting::Probably => "prob",
            Lifting::MoreThan(r) => return Modality::with_param("M", *r),
        };
        Modality::new(name)
    }

    /// Liftings that are monotone in each argument.
    pub fn is_monotone(&self) -> bool {
        matches!(self, Lifting::Box | Lifting::Dia | Lifting::FuzzyBox | Lifting::FuzzyDia | Lifting::Probably)
    }
}

fn mismatch(l: &dyn PredicateLifting, delta: &Successors) -> SemanticsError {
    SemanticsError::FunctorMismatch { lifting: l.name(), expected: l.functor(), found: delta.kind() }
}

impl PredicateLifting for Lifting {
    fn name(&self) -> String {
        self.modality().to_string()
    }

    fn arity(&self) -> usize {
        match self {
            Lifting::Conditional => 2,
            _ => 1,
        }
    }

    fn functor(&self) -> FunctorKind {
        match self {
            Lifting::Box | Lifting::Dia => FunctorKind::Powerset,
            Lifting::FuzzyBox | Lifting::FuzzyDia => FunctorKind::Fuzzy,
            Lifting::NeighborhoodBox => FunctorKind::Neighborhood,
            Lifting::Conditional => FunctorKind::Selection,
            Lifting::Probably | Lifting::MoreThan(_) => FunctorKind::Distribution,
        }
    }

    fn apply(
        &self,
        alg: &FiniteAlgebra,
        args: &[&[TruthValue]],
        delta: &Successors,
        mode: ProbMode,
    ) -> Result<Lifted, SemanticsError> {
        if args.len() != self.arity() {
            return Err(SemanticsError::Arity { lifting: self.name(), expected: self.arity(), found: args.len() });
        }
        let n = args[0].len();
        if args.iter().any(|a| a.len() != n) {
            return Err(SemanticsError::Malformed("lifting arguments have different carriers".into()));
        }
        let f = args[0];
        let k = alg.size();
        let value = match (self, delta) {
            (Lifting::Box, Successors::Powerset(set)) => alg.big_meet(set.iter().map(|&x| f[x])),
            (Lifting::Dia, Successors::Powerset(set)) => alg.big_join(set.iter().map(|&x| f[x])),
            (Lifting::FuzzyBox, Successors::Fuzzy(g)) => {
                alg.big_meet(g.iter().zip(f).map(|(&gx, &fx)| alg.imp(gx, fx)))
            }
            (Lifting::FuzzyDia, Successors::Fuzzy(g)) => {
                alg.big_join(g.iter().zip(f).map(|(&gx, &fx)| alg.prod(gx, fx)))
            }
            (Lifting::NeighborhoodBox, Successors::Neighborhood(table)) => table[encode(f, k)],
            (Lifting::Conditional, Successors::Selection(table)) => {
                let selected = decode(table[encode(f, k)], n, k);
                alg.big_meet(selected.iter().zip(args[1]).map(|(&sx, &gx)| alg.imp(sx, gx)))
            }
            (Lifting::Probably, Successors::Distribution(mu)) => {
                return probably(alg, f, mu, mode);
            }
            (Lifting::MoreThan(r), Successors::Distribution(mu)) => alg.big_join(alg.elements().filter(|&alpha| {
                let mass: Rational = f.iter().zip(mu).filter(|(&fx, _)| alg.leq(alpha, fx)).map(|(_, p)| *p).sum();
                mass > *r
            })),
            _ => return Err(mismatch(self, delta)),
        };
        Ok(Lifted::exact(value))
    }
}

fn probably(alg: &FiniteAlgebra, f: &[TruthValue], mu: &[Rational], mode: ProbMode) -> Result<Lifted, SemanticsError> {
    if !alg.is_lukasiewicz() {
        return Err(SemanticsError::NotLukasiewicz("prob"));
    }
    let sum: Rational =
        f.iter().zip(mu).map(|(&fx, p)| alg.rational(fx).expect("Łukasiewicz values are rational") * p).sum();
    if let Some(v) = alg.from_rational(sum) {
        return Ok(Lifted::exact(v));
    }
    match mode {
        ProbMode::Strict => Err(SemanticsError::OutOfDomain { lifting: "prob".into(), value: sum }),
        ProbMode::Floor => {
            let value =
                alg.elements().filter(|&a| alg.rational(a).is_some_and(|r| r <= sum)).last().unwrap_or(alg.zero());
            debug_assert!(sum > Rational::zero());
            Ok(Lifted { value, floored: true })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l3() -> FiniteAlgebra {
        FiniteAlgebra::lukasiewicz(3).unwrap()
    }

    fn tv(i: u32) -> TruthValue {
        TruthValue::new(i)
    }

    fn apply(l: Lifting, alg: &FiniteAlgebra, args: &[&[TruthValue]], d: &Successors) -> TruthValue {
        l.apply(alg, args, d, ProbMode::Strict).unwrap().value
    }

    #[test]
    fn box_and_dia_on_empty_set() {
        let alg = l3();
        let f = [tv(1)];
        let empty = Successors::Powerset(vec![]);
        assert_eq!(apply(Lifting::Box, &alg, &[&f], &empty), alg.one());
        assert_eq!(apply(Lifting::Dia, &alg, &[&f], &empty), alg.zero());
    }

    #[test]
    fn fuzzy_box_uses_residuum() {
        let alg = l3();
        // σ(w)(u) = 1/2, f(u) = 0: 1/2 -> 0 = 1/2
        let g = Successors::Fuzzy(vec![tv(1)]);
        assert_eq!(apply(Lifting::FuzzyBox, &alg, &[&[tv(0)]], &g), tv(1));
        assert_eq!(apply(Lifting::FuzzyDia, &alg, &[&[tv(2)]], &g), tv(1));
    }

    #[test]
    fn conditional_reflexive_inclusion() {
        let alg = l3();
        // s returns its argument unchanged, so s(f) ⊆ f holds to degree 1.
        let identity = Successors::Selection((0..9).collect());
        let f = [tv(1), tv(2)];
        assert_eq!(apply(Lifting::Conditional, &alg, &[&f, &f], &identity), alg.one());
    }

    #[test]
    fn more_than_cuts() {
        let alg = l3();
        let mu = Successors::Distribution(vec![Rational::new(1, 2), Rational::new(1, 2)]);
        let f = [tv(1), tv(2)];
        assert_eq!(apply(Lifting::MoreThan(Rational::new(1, 4)), &alg, &[&f], &mu), alg.one());
        // μ(f_1) = 1/2 is not > 1/2, but μ(f_{1/2}) = 1 is.
        assert_eq!(apply(Lifting::MoreThan(Rational::new(1, 2)), &alg, &[&f], &mu), tv(1));
        assert_eq!(apply(Lifting::MoreThan(Rational::new(1, 1)), &alg, &[&f], &mu), alg.zero());
    }

    #[test]
    fn probably_total_and_out_of_domain() {
        let l2 = FiniteAlgebra::lukasiewicz(2).unwrap();
        let mu = Successors::Distribution(vec![Rational::new(1, 3), Rational::new(2, 3)]);
        assert_eq!(apply(Lifting::Probably, &l2, &[&[tv(1), tv(1)]], &mu), l2.one());
        let err = Lifting::Probably.apply(&l2, &[&[tv(1), tv(0)]], &mu, ProbMode::Strict).unwrap_err();
        assert_eq!(err, SemanticsError::OutOfDomain { lifting: "prob".into(), value: Rational::new(1, 3) });
        let floored = Lifting::Probably.apply(&l2, &[&[tv(0), tv(1)]], &mu, ProbMode::Floor).unwrap();
        assert_eq!(floored, Lifted { value: l2.zero(), floored: true });
    }

    #[test]
    fn kind_and_arity_mismatch() {
        let alg = l3();
        let f = [tv(0)];
        assert!(matches!(
            Lifting::Box.apply(&alg, &[&f], &Successors::Fuzzy(vec![tv(0)]), ProbMode::Strict),
            Err(SemanticsError::FunctorMismatch { .. })
        ));
        assert!(matches!(
            Lifting::Conditional.apply(&alg, &[&f], &Successors::Selection(vec![0; 3]), ProbMode::Strict),
            Err(SemanticsError::Arity { .. })
        ));
    }

    #[test]
    fn modality_round_trip() {
        for l in Lifting::builtins(&[Rational::new(1, 4)]) {
            assert_eq!(Lifting::from_modality(&l.modality()).unwrap(), l);
        }
        assert!(Lifting::from_modality(&Modality::new("M")).is_err());
    }
}

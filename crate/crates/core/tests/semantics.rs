mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use mvcml::algebra::Constant;
use mvcml::io;
use mvcml::semantics::{eval, eval_with, random_successors, EvalOptions, Lifting, PredicateLifting, SemanticsError};
use mvcml::{FiniteAlgebra, Flavor, Formula, FunctorKind, ProbMode, Rational, Successors, TModel, TruthValue};
use proptest::prelude::*;
use rand::Rng;

const KINDS: [FunctorKind; 5] = [
    FunctorKind::Powerset,
    FunctorKind::Fuzzy,
    FunctorKind::Neighborhood,
    FunctorKind::Selection,
    FunctorKind::Distribution,
];

fn zero() -> Rational {
    Rational::from_integer(0)
}

fn one() -> Rational {
    Rational::from_integer(1)
}

fn imp(x: Rational, y: Rational) -> Rational {
    (one() - x + y).min(one())
}

/// Rational value of a model-level element.
fn rv(alg: &FiniteAlgebra, a: TruthValue) -> Rational {
    lval(alg, a)
}

/// Reference semantics over exact rationals, written from the lifting
/// definitions with `prob` rounded down to the chain.
fn reference(model: &TModel, f: &Formula) -> Vec<Rational> {
    let alg = model.algebra();
    let n = model.len();
    let k = alg.size() as i64;
    let constant = |c: &Constant| match c {
        Constant::Ratio(r) => *r,
        Constant::Index(_) => unreachable!(),
    };
    let crisp = |b: bool| if b { one() } else { zero() };
    let pair = |a: &Formula, b: &Formula| (reference(model, a), reference(model, b));
    let zip = |(x, y): (Vec<Rational>, Vec<Rational>), op: &dyn Fn(Rational, Rational) -> Rational| {
        x.into_iter().zip(y).map(|(u, v)| op(u, v)).collect()
    };
    match f {
        Formula::Atom(p) => model.valuation()[p].iter().map(|&a| rv(alg, a)).collect(),
        Formula::Const(c) => vec![constant(c); n],
        Formula::And(a, b) => zip(pair(a, b), &|u, v| u.min(v)),
        Formula::Or(a, b) => zip(pair(a, b), &|u, v| u.max(v)),
        Formula::Fuse(a, b) => zip(pair(a, b), &|u, v| (u + v - one()).max(zero())),
        Formula::Imp(a, b) => zip(pair(a, b), &imp),
        Formula::Delta(a) => reference(model, a).into_iter().map(|u| crisp(u == one())).collect(),
        Formula::Tau(c, a) => reference(model, a).into_iter().map(|u| crisp(u == constant(c))).collect(),
        Formula::Upsilon(c, a) => reference(model, a).into_iter().map(|u| crisp(u >= constant(c))).collect(),
        Formula::Modal(m, args) => {
            let vals: Vec<Vec<Rational>> = args.iter().map(|a| reference(model, a)).collect();
            let fx = &vals[0];
            let code = |v: &[Rational]| {
                v.iter()
                    .rev()
                    .fold(0usize, |acc, x| acc * k as usize + (x * Rational::from_integer(k - 1)).to_integer() as usize)
            };
            model
                .sigma()
                .iter()
                .map(|delta| match (m.name.as_str(), delta) {
                    ("box", Successors::Powerset(s)) => s.iter().map(|&x| fx[x]).fold(one(), Rational::min),
                    ("dia", Successors::Powerset(s)) => s.iter().map(|&x| fx[x]).fold(zero(), Rational::max),
                    ("fbox", Successors::Fuzzy(g)) => {
                        (0..n).map(|x| imp(rv(alg, g[x]), fx[x])).fold(one(), Rational::min)
                    }
                    ("fdia", Successors::Fuzzy(g)) => {
                        (0..n).map(|x| (rv(alg, g[x]) + fx[x] - one()).max(zero())).fold(zero(), Rational::max)
                    }
                    ("nbox", Successors::Neighborhood(t)) => rv(alg, t[code(fx)]),
                    ("cond", Successors::Selection(t)) => {
                        let mut out = t[code(fx)];
                        (0..n)
                            .map(|x| {
                                let sx = Rational::new((out % k as usize) as i64, k - 1);
                                out /= k as usize;
                                imp(sx, vals[1][x])
                            })
                            .fold(one(), Rational::min)
                    }
                    ("prob", Successors::Distribution(mu)) => {
                        let sum: Rational = (0..n).map(|x| fx[x] * mu[x]).sum();
                        (sum * Rational::from_integer(k - 1)).floor() / Rational::from_integer(k - 1)
                    }
                    ("M", Successors::Distribution(mu)) => {
                        let r = m.param.unwrap();
                        (0..k)
                            .map(|a| Rational::new(a, k - 1))
                            .filter(|&alpha| (0..n).filter(|&x| fx[x] >= alpha).map(|x| mu[x]).sum::<Rational>() > r)
                            .fold(zero(), Rational::max)
                    }
                    other => panic!("unexpected {other:?}"),
                })
                .collect()
        }
    }
}

fn random_case(seed: u64) -> (TModel, Formula) {
    let mut rng = rng(seed);
    let kind = KINDS[rng.gen_range(0..5)];
    let alg = luk(rng.gen_range(2..=4));
    let states = if matches!(kind, FunctorKind::Neighborhood | FunctorKind::Selection) {
        rng.gen_range(1..=2)
    } else {
        rng.gen_range(1..=4)
    };
    let width = rng.gen_range(1..=4);
    let model = random_model(&mut rng, kind, &alg, states, &["p", "q"], width);
    let flavor = Flavor::ALL[rng.gen_range(0..3)];
    let phi = random_formula(&mut rng, 4, &["p", "q"], flavor, &alg, &modalities(kind));
    (model, phi)
}

fn floor() -> EvalOptions {
    EvalOptions { prob: ProbMode::Floor }
}

fn values(model: &TModel, f: &Formula) -> Vec<Rational> {
    eval_with(model, f, floor()).unwrap().values.into_iter().map(|a| rv(model.algebra(), a)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn eval_matches_reference(seed in any::<u64>()) {
        let (model, phi) = random_case(seed);
        prop_assert_eq!(values(&model, &phi), reference(&model, &phi), "{}", phi);
    }

    #[test]
    fn substitution_lemma(seed in any::<u64>()) {
        let (model, phi) = random_case(seed);
        let mut rng = rng(seed ^ 0x9e37);
        let flavor = Flavor::ALL[rng.gen_range(0..3)];
        let psi = random_formula(&mut rng, 3, &["p", "q"], flavor, model.algebra(), &modalities(model.kind()));
        let rho = BTreeMap::from([("p".to_string(), psi.clone())]);
        let mut valuation = model.valuation().clone();
        valuation.insert("p".into(), eval_with(&model, &psi, floor()).unwrap().values);
        let updated = TModel::new(
            Arc::clone(model.algebra_arc()),
            model.kind(),
            model.states().to_vec(),
            model.sigma().to_vec(),
            valuation,
        ).unwrap();
        prop_assert_eq!(values(&model, &phi.substitute(&rho)), values(&updated, &phi));
    }

    #[test]
    fn self_equivalence_is_true(seed in any::<u64>()) {
        let (model, phi) = random_case(seed);
        let v = values(&model, &Formula::iff(phi.clone(), phi));
        prop_assert!(v.iter().all(|x| *x == one()));
    }

    #[test]
    fn monotone_liftings_are_monotone(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let alg = luk(rng.gen_range(2..=5));
        let n = rng.gen_range(1..=4);
        for lifting in [Lifting::Box, Lifting::Dia, Lifting::FuzzyBox, Lifting::FuzzyDia, Lifting::Probably] {
            let width = rng.gen_range(1..=4);
            let delta = random_successors(lifting.functor(), n, &alg, width, &mut rng).unwrap();
            let lo: Vec<TruthValue> = (0..n).map(|_| tv(rng.gen_range(0..alg.size() as u32))).collect();
            let hi: Vec<TruthValue> =
                lo.iter().map(|a| tv(rng.gen_range(a.index() as u32..alg.size() as u32))).collect();
            let a = lifting.apply(&alg, &[&lo], &delta, ProbMode::Floor).unwrap().value;
            let b = lifting.apply(&alg, &[&hi], &delta, ProbMode::Floor).unwrap().value;
            prop_assert!(alg.leq(a, b), "{} not monotone", lifting.name());
        }
    }
}

fn fixture(name: &str) -> TModel {
    let path = format!("{}/../../data/models/{name}.json", env!("CARGO_MANIFEST_DIR"));
    io::model_from_json(&io::parse_json(&std::fs::read_to_string(path).unwrap()).unwrap()).unwrap()
}

fn shown(model: &TModel, f: &str) -> Vec<String> {
    let alg = model.algebra();
    eval(model, &f.parse().unwrap()).unwrap().into_iter().map(|a| alg.format_value(a)).collect()
}

#[test]
fn box_fixture() {
    let m = fixture("box_l3");
    assert_eq!(shown(&m, "<box>(p)"), ["1/2", "1", "1"]);
    assert_eq!(shown(&m, "<dia>(p)"), ["1", "0", "1"]);
    assert_eq!(shown(&m, "<box>(p) -> p"), ["1/2", "1/2", "1"]);
}

#[test]
fn other_fixtures() {
    let fuzzy = fixture("fuzzy_l3");
    assert_eq!(shown(&fuzzy, "<fbox>(p)"), ["1/2", "0"]);
    assert_eq!(shown(&fuzzy, "<fdia>(p & q)"), ["0", "1/2"]);

    let dist = fixture("distribution_l3");
    assert_eq!(shown(&dist, "<prob>(p)"), ["1", "1", "1"]);
    assert_eq!(shown(&dist, "<M[1/2]>(p)"), ["1", "1", "1"]);
    assert_eq!(shown(&dist, "<prob>(!p)"), ["0", "0", "0"]);

    let nbhd = fixture("neighborhood_l2");
    assert_eq!(shown(&nbhd, "<nbox>(p)"), ["1", "0"]);
    assert_eq!(shown(&nbhd, "<nbox>(c(1))"), ["1", "1"]);

    let sel = fixture("selection_l2");
    assert_eq!(shown(&sel, "<cond>(p, q)"), ["0"]);
    assert_eq!(shown(&sel, "<cond>(q, p)"), ["1"]);

    let godel = fixture("godel4_kripke");
    assert_eq!(shown(&godel, "<box>(p)"), ["1", "3"]);
}

#[test]
fn strict_prob_reports_out_of_domain() {
    let l3 = luk(3);
    let model = TModel::new(
        l3.clone(),
        FunctorKind::Distribution,
        vec!["a".into(), "b".into()],
        vec![
            Successors::Distribution(vec![Rational::new(1, 2), Rational::new(1, 2)]),
            Successors::Distribution(vec![one(), zero()]),
        ],
        BTreeMap::from([("p".to_string(), vec![tv(1), tv(2)])]),
    )
    .unwrap();
    let f: Formula = "<prob>(p)".parse().unwrap();
    assert!(matches!(eval(&model, &f), Err(SemanticsError::OutOfDomain { .. })));
    let floored = eval_with(&model, &f, floor()).unwrap();
    assert!(floored.floored);
    assert_eq!(floored.values, vec![tv(1), tv(1)]);
}

#[test]
fn mismatched_functor_is_an_error() {
    let m = fixture("box_l3");
    assert!(matches!(eval(&m, &"<fbox>(p)".parse().unwrap()), Err(SemanticsError::FunctorMismatch { .. })));
    assert!(matches!(eval(&m, &"<box>(r)".parse().unwrap()), Err(SemanticsError::UndeclaredAtom(_))));
}

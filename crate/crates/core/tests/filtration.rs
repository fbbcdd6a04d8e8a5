mod common;

use std::collections::BTreeMap;

use common::*;
use mvcml::filtration::{
    check_filtration_lemma, equiv_classes, filtrate, filtrate_with, fmp_bound, FiltrationError, FiltrationOptions,
};
use mvcml::io;
use mvcml::semantics::EvalOptions;
use mvcml::syntax::ClosedSet;
use mvcml::{Flavor, Formula, FunctorKind, ProbMode, Successors, TModel};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

const KINDS: [FunctorKind; 5] = [
    FunctorKind::Powerset,
    FunctorKind::Fuzzy,
    FunctorKind::Neighborhood,
    FunctorKind::Selection,
    FunctorKind::Distribution,
];

fn fixture(name: &str) -> TModel {
    let path = format!("{}/../../data/models/{name}.json", env!("CARGO_MANIFEST_DIR"));
    io::model_from_json(&io::parse_json(&std::fs::read_to_string(path).unwrap()).unwrap()).unwrap()
}

fn options() -> FiltrationOptions {
    FiltrationOptions { eval: EvalOptions { prob: ProbMode::Floor }, ..FiltrationOptions::default() }
}

#[test]
fn kripke_fixture_quotient() {
    let m = fixture("kripke_l2");
    let phi = ClosedSet::closure_of([&f("p")], Flavor::Basic, m.algebra());
    let res = filtrate(&m, &phi, None).unwrap();
    let mapping = res.mapping(&m);
    assert_eq!(mapping["u"], "{u,v}");
    assert_eq!(mapping["v"], "{u,v}");
    assert_eq!(mapping["w"], "{w}");
    assert_eq!(res.quotient.sigma(), &[Successors::Powerset(vec![0]), Successors::Powerset(vec![0])]);
    assert!(check_filtration_lemma(&m, &phi, &res).unwrap().passed());

    // With <box>(p) in the closure, u and v come apart.
    let phi = ClosedSet::closure_of([&f("<box>(p)")], Flavor::Basic, m.algebra());
    assert_eq!(equiv_classes(&m, &phi).unwrap(), vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn representatives_are_validated() {
    let m = fixture("kripke_l2");
    let phi = ClosedSet::closure_of([&f("p")], Flavor::Basic, m.algebra());
    assert!(matches!(
        filtrate(&m, &phi, Some(&[2, 2])),
        Err(FiltrationError::BadRepresentative { class: 0, state: 2 })
    ));
    assert!(matches!(filtrate(&m, &phi, Some(&[0])), Err(FiltrationError::RepresentativeCount { .. })));
    let alt = filtrate(&m, &phi, Some(&[1, 2])).unwrap();
    assert_eq!(alt.quotient.sigma()[0], Successors::Powerset(vec![1]));
    assert!(check_filtration_lemma(&m, &phi, &alt).unwrap().passed());
}

#[test]
fn distribution_masses_are_pushed_forward() {
    let m = fixture("distribution_l3");
    let phi = ClosedSet::closure_of([&f("<prob>(p)")], Flavor::Basic, m.algebra());
    let res = filtrate_with(&m, &phi, None, options()).unwrap();
    assert_eq!(res.classes, vec![vec![0, 1], vec![2]]);
    assert_eq!(res.quotient.sigma()[1], Successors::Distribution(vec![1.into(), 0.into()]));
    assert!(check_filtration_lemma(&m, &phi, &res).unwrap().passed());
}

fn case(seed: u64) -> (TModel, ClosedSet) {
    let mut rng = rng(seed);
    let kind = KINDS[rng.gen_range(0..5)];
    let alg = luk(rng.gen_range(2..=3));
    let tabular = matches!(kind, FunctorKind::Neighborhood | FunctorKind::Selection);
    let states = rng.gen_range(1..=if tabular { 2 } else { 5 });
    let width = rng.gen_range(1..=3);
    let model = random_model(&mut rng, kind, &alg, states, &["p", "q"], width);
    let flavor = Flavor::ALL[rng.gen_range(0..3)];
    let gens: Vec<Formula> = (0..rng.gen_range(0..=2))
        .map(|_| random_formula(&mut rng, 3, &["p", "q"], flavor, &alg, &modalities(kind)))
        .collect();
    let phi = ClosedSet::closure_of(&gens, flavor, &alg);
    (model, phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lemma_and_size_bound(seed in any::<u64>()) {
        let (model, phi) = case(seed);
        let res = filtrate_with(&model, &phi, None, options()).unwrap();
        prop_assert!(check_filtration_lemma(&model, &phi, &res).unwrap().passed());
        let k = model.algebra().size();
        prop_assert!(BigUint::from(res.quotient.len()) <= BigUint::from(k).pow(phi.len() as u32));
        let mut seen: Vec<usize> = res.classes.concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..model.len()).collect::<Vec<_>>());
        for (c, members) in res.classes.iter().enumerate() {
            prop_assert!(members.iter().all(|&s| res.q[s] == c));
        }
    }

    #[test]
    fn quotient_is_already_reduced(seed in any::<u64>()) {
        let (model, phi) = case(seed);
        let res = filtrate_with(&model, &phi, None, options()).unwrap();
        let again = filtrate_with(&res.quotient, &phi, None, options()).unwrap();
        prop_assert_eq!(again.quotient.len(), res.quotient.len());
    }

    #[test]
    fn any_representatives_work(seed in any::<u64>(), pick in any::<u64>()) {
        let (model, phi) = case(seed);
        let res = filtrate_with(&model, &phi, None, options()).unwrap();
        let r: Vec<usize> = res.classes.iter().map(|c| c[(pick as usize) % c.len()]).collect();
        let alt = filtrate_with(&model, &phi, Some(&r), options()).unwrap();
        prop_assert!(check_filtration_lemma(&model, &phi, &alt).unwrap().passed());
    }
}

#[test]
fn fmp_bound_counts_closure() {
    let l3 = luk(3);
    let b = fmp_bound(&f("<box>(p) -> p"), &l3, Flavor::Basic);
    assert_eq!((b.closure_size, b.formula_size, b.bound.clone()), (5, 4, BigUint::from(243u32)));
    let json = serde_json::to_value(&b).unwrap();
    assert_eq!(json["bound"], "243");
    let by_name: BTreeMap<&str, usize> = [("basic", 5), ("tau-upsilon", 5), ("delta", 6)].into_iter().collect();
    for flavor in Flavor::ALL {
        assert_eq!(fmp_bound(&f("<box>(p) -> p"), &l3, flavor).closure_size, by_name[flavor.to_string().as_str()]);
    }
}

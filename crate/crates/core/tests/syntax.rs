mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use mvcml::syntax::{closure, parse, ClosedSet, Rank};
use mvcml::{Flavor, Formula, FunctorKind, Signature};
use proptest::prelude::*;

const KINDS: [FunctorKind; 5] = [
    FunctorKind::Powerset,
    FunctorKind::Fuzzy,
    FunctorKind::Neighborhood,
    FunctorKind::Selection,
    FunctorKind::Distribution,
];

fn arbitrary(seed: u64, depth: usize) -> (Formula, Flavor, u32) {
    let mut rng = rng(seed);
    let n = 2 + (seed % 4) as u32;
    let flavor = Flavor::ALL[(seed / 4 % 3) as usize];
    let kind = KINDS[(seed / 12 % 5) as usize];
    let alg = luk(n);
    (random_formula(&mut rng, depth, &["p", "q", "r"], flavor, &alg, &modalities(kind)), flavor, n)
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), depth in 0usize..6) {
        let (f, flavor, n) = arbitrary(seed, depth);
        let text = f.to_string();
        let back: Formula = text.parse().unwrap();
        prop_assert_eq!(&back, &f, "{}", text);
        let strict = parse(&text, &Signature::builtin(), flavor, &luk(n)).unwrap();
        prop_assert_eq!(strict, f);
    }

    #[test]
    fn closure_is_closed_and_idempotent(seed in any::<u64>(), depth in 0usize..5) {
        let (f, flavor, n) = arbitrary(seed, depth);
        let alg = luk(n);
        let c = closure([&f], flavor, &alg);
        let set: BTreeSet<&Formula> = c.iter().collect();
        for g in &c {
            for h in g.children() {
                prop_assert!(set.contains(h));
            }
        }
        prop_assert!(set.contains(&Formula::top(&alg)) && set.contains(&Formula::bottom(&alg)));
        prop_assert_eq!(closure(&c, flavor, &alg), c.clone());
        prop_assert!(ClosedSet::new(c.clone(), flavor, &alg).is_ok());
        let extra = if flavor == Flavor::Delta { n as usize } else { 0 };
        prop_assert!(c.len() <= f.size() + 2 + extra);
    }

    #[test]
    fn substitution_composes(seed in any::<u64>()) {
        let (f, _, _) = arbitrary(seed, 3);
        let (g, _, _) = arbitrary(seed.wrapping_add(1), 2);
        let (h, _, _) = arbitrary(seed.wrapping_add(2), 2);
        let first = BTreeMap::from([("p".to_string(), g.clone())]);
        let second = BTreeMap::from([("q".to_string(), h.clone())]);
        let composed = BTreeMap::from([
            ("p".to_string(), g.substitute(&second)),
            ("q".to_string(), h),
        ]);
        prop_assert_eq!(f.substitute(&first).substitute(&second), f.substitute(&composed));
        prop_assert_eq!(f.substitute(&BTreeMap::new()), f.clone());
    }

    #[test]
    fn rank_is_consistent(seed in any::<u64>()) {
        let (f, _, _) = arbitrary(seed, 4);
        match f.rank() {
            Rank::Zero => prop_assert!(f.is_modal_free()),
            Rank::One => prop_assert!(f.is_rank1_shape()),
            Rank::Other => prop_assert!(!f.is_modal_free() && !f.is_rank1_shape()),
        }
    }
}

#[test]
fn parse_errors_are_reported() {
    for bad in ["p &", "<box>(p, q)", "<nope>(p)", "(p", "p q", "<M>(p)", "tau[1/2] p"] {
        let alg = luk(3);
        assert!(parse(bad, &Signature::builtin(), Flavor::Basic, &alg).is_err(), "{bad}");
    }
}

#[test]
fn flavors_are_nested_as_expected() {
    let alg = luk(3);
    let cases = [
        ("p -> c(1)", Some(Flavor::Basic)),
        ("D (c(1/2) -> p)", Some(Flavor::Delta)),
        ("tau[1/2] p", Some(Flavor::TauUpsilon)),
        ("D (tau[1/2] p)", None),
    ];
    for (text, expected) in cases {
        let f: Formula = text.parse().unwrap();
        assert_eq!(Flavor::infer(&f, &alg), expected, "{text}");
    }
}

mod common;

use common::*;
use mvcml::algebra::{parse_rational, Law};
use mvcml::io;
use mvcml::{FiniteAlgebra, Rational, TruthValue};
use proptest::prelude::*;

fn godel(k: usize) -> FiniteAlgebra {
    let meet: Vec<Vec<usize>> = (0..k).map(|a| (0..k).map(|b| a.min(b)).collect()).collect();
    let join: Vec<Vec<usize>> = (0..k).map(|a| (0..k).map(|b| a.max(b)).collect()).collect();
    // Residuum found by search: the largest c with a ∧ c <= b.
    let imp: Vec<Vec<usize>> =
        (0..k).map(|a| (0..k).map(|b| (0..k).filter(|&c| a.min(c) <= b).max().unwrap()).collect()).collect();
    FiniteAlgebra::from_tables(k, &meet, &join, &meet, &imp, 0, k - 1).unwrap()
}

#[test]
fn godel_chain_fixture_matches_search() {
    let from_file = io::algebra_from_json(
        &io::parse_json(
            &std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/algebras/godel4.json")).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    let built = godel(4);
    for a in built.elements() {
        for b in built.elements() {
            assert_eq!(from_file.imp(a, b), built.imp(a, b));
            assert_eq!(from_file.prod(a, b), built.prod(a, b));
        }
    }
    assert!(built.validate().passed());
}

#[test]
fn lukasiewicz_operations_match_formulas() {
    for n in 2..=9 {
        let alg = FiniteAlgebra::lukasiewicz(n).unwrap();
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        for a in alg.elements() {
            for b in alg.elements() {
                let (x, y) = (lval(&alg, a), lval(&alg, b));
                assert_eq!(lval(&alg, alg.prod(a, b)), (x + y - one).max(zero));
                assert_eq!(lval(&alg, alg.imp(a, b)), (one - x + y).min(one));
                assert_eq!(lval(&alg, alg.meet(a, b)), x.min(y));
                assert_eq!(lval(&alg, alg.join(a, b)), x.max(y));
                assert_eq!(alg.leq(a, b), x <= y);
            }
            assert_eq!(lval(&alg, alg.neg(a)), one - lval(&alg, a));
        }
    }
}

#[test]
fn broken_tables_name_the_law() {
    // A 3-chain whose product is not commutative.
    let meet = vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]];
    let join = vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]];
    let prod = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2]];
    let imp = vec![vec![2, 2, 2], vec![1, 2, 2], vec![0, 1, 2]];
    let err = FiniteAlgebra::from_tables(3, &meet, &join, &prod, &imp, 0, 2).unwrap_err();
    assert!(err.to_string().contains("commutativity"), "{err}");

    let wrong_one = FiniteAlgebra::from_tables(3, &meet, &join, &meet, &imp, 0, 1);
    assert!(wrong_one.is_err());
}

#[test]
fn validate_reports_every_law() {
    let report = FiniteAlgebra::lukasiewicz(5).unwrap().validate();
    assert_eq!(report.checks.len(), Law::ALL.len());
    assert!(report.check(Law::Residuation).unwrap().passed());
}

#[test]
fn value_text_round_trips() {
    let l5 = FiniteAlgebra::lukasiewicz(5).unwrap();
    for a in l5.elements() {
        assert_eq!(l5.parse_value(&l5.format_value(a)).unwrap(), a);
    }
    assert_eq!(l5.parse_value("2/4").unwrap(), tv(2));
    assert!(l5.parse_value("1/3").is_err());
    assert_eq!(parse_rational("2/4"), Some(Rational::new(1, 2)));
}

proptest! {
    #[test]
    fn delta_tau_upsilon_are_crisp(n in 2u32..12, a in 0u32..12, c in 0u32..12) {
        let alg = FiniteAlgebra::lukasiewicz(n).unwrap();
        let (a, c) = (TruthValue::new(a % n), TruthValue::new(c % n));
        for v in [alg.delta(a), alg.tau(c, a), alg.upsilon(c, a)] {
            prop_assert!(v == alg.zero() || v == alg.one());
        }
        prop_assert_eq!(alg.tau(c, a) == alg.one(), a == c);
        prop_assert_eq!(alg.upsilon(c, a) == alg.one(), alg.leq(c, a));
        prop_assert_eq!(alg.iff(a, c) == alg.one(), a == c);
    }

    #[test]
    fn residuation_in_random_chains(n in 2u32..30, a in 0u32..30, b in 0u32..30, c in 0u32..30) {
        let alg = FiniteAlgebra::lukasiewicz(n).unwrap();
        let (a, b, c) = (TruthValue::new(a % n), TruthValue::new(b % n), TruthValue::new(c % n));
        prop_assert_eq!(alg.leq(alg.prod(a, b), c), alg.leq(b, alg.imp(a, c)));
    }
}

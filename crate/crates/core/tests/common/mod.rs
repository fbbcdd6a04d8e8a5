//! Random generators and independent reference implementations shared by
//! the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use mvcml::algebra::Constant;
use mvcml::semantics::random_successors;
use mvcml::syntax::Modality;
use mvcml::{FiniteAlgebra, Flavor, Formula, FunctorKind, Rational, Signature, TModel, TruthValue};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tv(i: u32) -> TruthValue {
    TruthValue::new(i)
}

pub fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

pub fn luk(n: u32) -> Arc<FiniteAlgebra> {
    Arc::new(FiniteAlgebra::lukasiewicz(n).unwrap())
}

/// Modalities (with arity) usable over one functor kind. `M` is
/// instantiated at a few thresholds.
pub fn modalities(kind: FunctorKind) -> Vec<(Modality, usize)> {
    let mut out = Vec::new();
    for (name, decl) in Signature::for_functor(kind).iter() {
        if decl.parameterized {
            for r in [Rational::new(0, 1), Rational::new(1, 2)] {
                out.push((Modality::with_param(name, r), decl.arity));
            }
        } else {
            out.push((Modality::new(name), decl.arity));
        }
    }
    out
}

/// A random formula of at most the given depth in `flavor`.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    depth: usize,
    atoms: &[&str],
    flavor: Flavor,
    alg: &FiniteAlgebra,
    mods: &[(Modality, usize)],
) -> Formula {
    let constant = |rng: &mut ChaCha8Rng| -> Formula {
        let a = match flavor {
            Flavor::Delta => TruthValue::new(rng.gen_range(0..alg.size() as u32)),
            _ if rng.gen_bool(0.5) => alg.one(),
            _ => alg.zero(),
        };
        Formula::Const(alg.constant(a))
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.8) { Formula::atom(*atoms.choose(rng).unwrap()) } else { constant(rng) };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, depth - 1, atoms, flavor, alg, mods);
    let any_constant = |rng: &mut ChaCha8Rng| alg.constant(TruthValue::new(rng.gen_range(0..alg.size() as u32)));
    match rng.gen_range(0..7) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::fuse(sub(rng), sub(rng)),
        3 => Formula::imp(sub(rng), sub(rng)),
        4 if !mods.is_empty() => {
            let (m, arity) = mods.choose(rng).unwrap().clone();
            Formula::modal(m, (0..arity).map(|_| sub(rng)).collect())
        }
        5 if flavor == Flavor::Delta => Formula::delta(sub(rng)),
        5 if flavor == Flavor::TauUpsilon => {
            let c = any_constant(rng);
            if rng.gen_bool(0.5) {
                Formula::Tau(c, Box::new(sub(rng)))
            } else {
                Formula::Upsilon(c, Box::new(sub(rng)))
            }
        }
        _ => Formula::imp(sub(rng), Formula::bottom(alg)),
    }
}

pub fn random_model(
    rng: &mut ChaCha8Rng,
    kind: FunctorKind,
    alg: &Arc<FiniteAlgebra>,
    states: usize,
    atoms: &[&str],
    granularity: u32,
) -> TModel {
    let sigma = (0..states).map(|_| random_successors(kind, states, alg, granularity, rng).unwrap()).collect();
    let valuation = atoms
        .iter()
        .map(|p| (p.to_string(), (0..states).map(|_| TruthValue::new(rng.gen_range(0..alg.size() as u32))).collect()))
        .collect();
    TModel::new(Arc::clone(alg), kind, (0..states).map(|i| format!("w{i}")).collect(), sigma, valuation).unwrap()
}

/// Łukasiewicz value `m/(n-1)` of an element, as an exact rational.
pub fn lval(alg: &FiniteAlgebra, a: TruthValue) -> Rational {
    alg.rational(a).unwrap()
}

/// Reference Łukasiewicz semantics written directly over rationals.
#[allow(clippy::only_used_in_recursion)]
pub fn luk_eval(alg: &FiniteAlgebra, f: &Formula, h: &BTreeMap<String, Rational>) -> Rational {
    let one = Rational::from_integer(1);
    let zero = Rational::from_integer(0);
    let c = |c: &Constant| match c {
        Constant::Ratio(r) => *r,
        Constant::Index(_) => panic!("table constant in a Łukasiewicz formula"),
    };
    match f {
        Formula::Atom(p) => h[p],
        Formula::Const(k) => c(k),
        Formula::And(a, b) => luk_eval(alg, a, h).min(luk_eval(alg, b, h)),
        Formula::Or(a, b) => luk_eval(alg, a, h).max(luk_eval(alg, b, h)),
        Formula::Fuse(a, b) => (luk_eval(alg, a, h) + luk_eval(alg, b, h) - one).max(zero),
        Formula::Imp(a, b) => (one - luk_eval(alg, a, h) + luk_eval(alg, b, h)).min(one),
        Formula::Delta(a) => {
            if luk_eval(alg, a, h) == one {
                one
            } else {
                zero
            }
        }
        Formula::Tau(k, a) => {
            if luk_eval(alg, a, h) == c(k) {
                one
            } else {
                zero
            }
        }
        Formula::Upsilon(k, a) => {
            if luk_eval(alg, a, h) >= c(k) {
                one
            } else {
                zero
            }
        }
        Formula::Modal(..) => panic!("modal formula in a propositional oracle"),
    }
}

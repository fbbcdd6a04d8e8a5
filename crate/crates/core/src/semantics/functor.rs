use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::{FiniteAlgebra, Rational, TruthValue};
use crate::error::BlowUp;
use crate::semantics::{decode, encode, FunctorKind, SemanticsError, Successors};

/// `k^n`, the number of functions from an `n`-element carrier into the
/// algebra, i.e. the key count of neighborhood and selection tables.
pub fn table_keys(k: usize, n: usize) -> Result<usize, SemanticsError> {
    u32::try_from(n)
        .ok()
        .and_then(|n| k.checked_pow(n))
        .ok_or_else(|| BlowUp::new("table keys", BigUint::from(k).pow(n as u32), u64::MAX).into())
}

fn capped_keys(k: usize, n: usize, cap: u64) -> Result<usize, SemanticsError> {
    let keys = BigUint::from(k).pow(n as u32);
    BlowUp::check(format!("{}^{} table keys", k, n), &keys, cap)?;
    table_keys(k, n)
}

/// The action `Tq : TS → TS'` of the functor on a map `q : S → S'` given as
/// `q[x] ∈ 0..target`. Tables of the result are capped at `table_cap` keys.
pub fn functor_map(
    alg: &FiniteAlgebra,
    q: &[usize],
    target: usize,
    elem: &Successors,
    table_cap: u64,
) -> Result<Successors, SemanticsError> {
    let k = alg.size();
    let n = q.len();
    if let Some(&bad) = q.iter().find(|&&y| y >= target) {
        return Err(SemanticsError::Malformed(format!("map sends a state to {bad}, outside 0..{target}")));
    }
    // g' ∘ q for the function with code `code` on the target carrier.
    let pull_back = |code: usize| -> Vec<TruthValue> {
        let g = decode(code, target, k);
        q.iter().map(|&y| g[y]).collect()
    };
    Ok(match elem {
        Successors::Powerset(set) => {
            let mut image: Vec<usize> = set.iter().map(|&x| q[x]).collect();
            image.sort_unstable();
            image.dedup();
            Successors::Powerset(image)
        }
        Successors::Fuzzy(f) => {
            let mut out = vec![alg.zero(); target];
            for (x, &v) in f.iter().enumerate() {
                out[q[x]] = alg.join(out[q[x]], v);
            }
            Successors::Fuzzy(out)
        }
        Successors::Distribution(mu) => {
            let mut out = vec![Rational::zero(); target];
            for (x, p) in mu.iter().enumerate() {
                out[q[x]] += p;
            }
            Successors::Distribution(out)
        }
        Successors::Neighborhood(table) => {
            let keys = capped_keys(k, target, table_cap)?;
            Successors::Neighborhood((0..keys).map(|code| table[encode(&pull_back(code), k)]).collect())
        }
        Successors::Selection(table) => {
            let keys = capped_keys(k, target, table_cap)?;
            Successors::Selection(
                (0..keys)
                    .map(|code| {
                        let selected = decode(table[encode(&pull_back(code), k)], n, k);
                        let mut out = vec![alg.zero(); target];
                        for (x, &v) in selected.iter().enumerate() {
                            out[q[x]] = alg.join(out[q[x]], v);
                        }
                        encode(&out, k)
                    })
                    .collect(),
            )
        }
    })
}

/// Number of elements [`enumerate_ts`] yields.
pub fn count_ts(kind: FunctorKind, n: usize, k: usize, granularity: u32) -> BigUint {
    let kn = BigUint::from(k).pow(n as u32);
    match kind {
        FunctorKind::Powerset => BigUint::from(2u32).pow(n as u32),
        FunctorKind::Fuzzy => kn,
        FunctorKind::Neighborhood => match kn.to_u32() {
            Some(e) => BigUint::from(k).pow(e),
            None => BigUint::from(u64::MAX),
        },
        FunctorKind::Selection => match kn.to_u32() {
            Some(e) => kn.pow(e),
            None => BigUint::from(u64::MAX),
        },
        FunctorKind::Distribution => {
            if n == 0 {
                return BigUint::zero();
            }
            // compositions of d into n parts: C(d + n - 1, n - 1)
            let d = granularity as usize;
            let mut c = BigUint::one();
            for i in 0..(n - 1) {
                c = c * BigUint::from(d + n - 1 - i) / BigUint::from(i + 1);
            }
            c
        }
    }
}

/// All vectors of the given length over `0..base` in lexicographic order.
pub(crate) fn lex_vectors(len: usize, base: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = (base > 0 || len == 0).then(|| vec![0; len]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for i in (0..len).rev() {
            succ[i] += 1;
            if succ[i] < base {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// Compositions of `d` into `n` ordered parts, first part descending.
fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .rev()
        .flat_map(|first| {
            compositions(d - first, n - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Every element of `TS` for `|S| = n`, duplicate-free and in a fixed
/// order. Distributions are restricted to multiples of `1/granularity`.
pub fn enumerate_ts(
    kind: FunctorKind,
    n: usize,
    alg: &FiniteAlgebra,
    granularity: u32,
    cap: u64,
) -> Result<Vec<Successors>, SemanticsError> {
    let k = alg.size();
    if kind == FunctorKind::Distribution && !alg.is_lukasiewicz() {
        return Err(SemanticsError::NotLukasiewicz("distribution"));
    }
    let projected = count_ts(kind, n, k, granularity);
    BlowUp::check(format!("{kind} structures over {n} states"), &projected, cap)?;
    let tv = |v: usize| TruthValue::new(v as u32);
    Ok(match kind {
        FunctorKind::Powerset => {
            lex_vectors(n, 2).map(|bits| Successors::Powerset((0..n).filter(|&i| bits[i] == 1).collect())).collect()
        }
        FunctorKind::Fuzzy => lex_vectors(n, k).map(|v| Successors::Fuzzy(v.into_iter().map(tv).collect())).collect(),
        FunctorKind::Neighborhood => {
            let keys = table_keys(k, n)?;
            lex_vectors(keys, k).map(|v| Successors::Neighborhood(v.into_iter().map(tv).collect())).collect()
        }
        FunctorKind::Selection => {
            let keys = table_keys(k, n)?;
            lex_vectors(keys, keys).map(Successors::Selection).collect()
        }
        FunctorKind::Distribution => {
            if granularity == 0 {
                return Err(SemanticsError::Malformed("distribution granularity must be positive".into()));
            }
            let d = i64::from(granularity);
            compositions(granularity as usize, n)
                .into_iter()
                .map(|parts| Successors::Distribution(parts.into_iter().map(|c| Rational::new(c as i64, d)).collect()))
                .collect()
        }
    })
}

/// A uniformly drawn element of `TS` (distributions: `granularity` unit
/// masses dropped on random states).
pub fn random_successors<R: Rng + ?Sized>(
    kind: FunctorKind,
    n: usize,
    alg: &FiniteAlgebra,
    granularity: u32,
    rng: &mut R,
) -> Result<Successors, SemanticsError> {
    let k = alg.size();
    let tv = |v: usize| TruthValue::new(v as u32);
    Ok(match kind {
        FunctorKind::Powerset => Successors::Powerset((0..n).filter(|_| rng.gen_bool(0.5)).collect()),
        FunctorKind::Fuzzy => Successors::Fuzzy((0..n).map(|_| tv(rng.gen_range(0..k))).collect()),
        FunctorKind::Neighborhood => {
            let keys = table_keys(k, n)?;
            Successors::Neighborhood((0..keys).map(|_| tv(rng.gen_range(0..k))).collect())
        }
        FunctorKind::Selection => {
            let keys = table_keys(k, n)?;
            Successors::Selection((0..keys).map(|_| rng.gen_range(0..keys)).collect())
        }
        FunctorKind::Distribution => {
            if !alg.is_lukasiewicz() {
                return Err(SemanticsError::NotLukasiewicz("distribution"));
            }
            let mut parts = vec![0i64; n];
            for _ in 0..granularity.max(1) {
                parts[rng.gen_range(0..n)] += 1;
            }
            let d = i64::from(granularity.max(1));
            Successors::Distribution(parts.into_iter().map(|c| Rational::new(c, d)).collect())
        }
    })
}

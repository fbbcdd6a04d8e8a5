//! Brute-force check of the naturality square
//! `λ_X(g ∘ f)(δ) = λ_Y(g)(Tf(δ))` for all maps `f : X → Y` between small
//! carriers.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{FiniteAlgebra, TruthValue};
use crate::semantics::functor::lex_vectors;
use crate::semantics::{
    count_ts, encode, enumerate_ts, functor_map, random_successors, table_keys, FunctorKind, Lifted, PredicateLifting,
    ProbMode, SemanticsError, Successors,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityConfig {
    /// Largest carrier size for both `X` and `Y`.
    pub max_carrier: usize,
    /// Distribution granularities to test (ignored for other functors).
    pub granularities: Vec<u32>,
    /// `TX` is enumerated exhaustively up to this many elements, sampled above.
    pub structure_cap: u64,
    /// Argument tuples `g : Y → A^n` are enumerated up to this many, sampled above.
    pub argument_cap: u64,
    /// Sample size used whenever a cap is exceeded.
    pub samples: usize,
    pub seed: u64,
    pub prob: ProbMode,
    pub table_cap: u64,
    /// For neighborhood and selection structures above `structure_cap`,
    /// enumerate every value at the one key both sides of the square read
    /// (`encode(g_0 ∘ f)`) on a few base tables, instead of sampling whole
    /// tables. Valid for liftings that read `δ` only at the code of their
    /// first argument, as all built-ins do.
    pub key_reduction: bool,
}

impl Default for NaturalityConfig {
    fn default() -> Self {
        Self {
            max_carrier: 3,
            granularities: vec![1, 2, 3, 4],
            structure_cap: 20_000,
            argument_cap: 20_000,
            samples: 300,
            seed: 0x5eed,
            prob: ProbMode::Strict,
            table_cap: 10_000,
            key_reduction: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NaturalityWitness {
    pub domain_size: usize,
    pub codomain_size: usize,
    /// `f[x]` for every `x ∈ X`.
    pub map: Vec<usize>,
    /// Argument functions on `Y`, as element indices.
    pub args: Vec<Vec<usize>>,
    pub structure: String,
    /// `λ_X(g ∘ f)(δ)`
    pub direct: String,
    /// `λ_Y(g)(Tf(δ))`
    pub mapped: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NaturalityReport {
    pub lifting: String,
    pub checks: u64,
    /// False if any configuration fell back to sampling.
    pub exhaustive: bool,
    /// Configurations that were sampled, e.g. `|X|=3 structures`.
    pub sampled: Vec<String>,
    /// Configurations checked by per-key enumeration.
    pub key_reduced: Vec<String>,
    pub violation: Option<NaturalityWitness>,
}

impl NaturalityReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn show(alg: &FiniteAlgebra, r: &Result<Lifted, SemanticsError>) -> String {
    match r {
        Ok(l) if l.floored => format!("{} (floored)", alg.format_value(l.value)),
        Ok(l) => alg.format_value(l.value),
        Err(e) => format!("error: {e}"),
    }
}

pub fn naturality_check(
    lifting: &dyn PredicateLifting,
    alg: &FiniteAlgebra,
    config: &NaturalityConfig,
) -> Result<NaturalityReport, SemanticsError> {
    let kind = lifting.functor();
    let arity = lifting.arity();
    let k = alg.size();
    let granularities: Vec<u32> =
        if kind == FunctorKind::Distribution { config.granularities.clone() } else { vec![0] };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = NaturalityReport {
        lifting: lifting.name(),
        checks: 0,
        exhaustive: true,
        sampled: Vec::new(),
        key_reduced: Vec::new(),
        violation: None,
    };
    let tabular = matches!(kind, FunctorKind::Neighborhood | FunctorKind::Selection);

    for x in 1..=config.max_carrier {
        for &d in &granularities {
            let count = count_ts(kind, x, k, d);
            let per_key = tabular && config.key_reduction && count > BigUint::from(config.structure_cap);
            let structures: Vec<Successors> = if count <= BigUint::from(config.structure_cap) {
                enumerate_ts(kind, x, alg, d, config.structure_cap)?
            } else if per_key {
                report.key_reduced.push(format!("|X|={x} structures ({count}) by key"));
                base_tables(kind, x, k, config.samples.min(8), &mut rng)?
            } else {
                report.exhaustive = false;
                report.sampled.push(format!("|X|={x} structures ({count} > {})", config.structure_cap));
                (0..config.samples).map(|_| random_successors(kind, x, alg, d, &mut rng)).collect::<Result<_, _>>()?
            };
            for y in 1..=config.max_carrier {
                let arg_count = BigUint::from(k).pow((arity * y) as u32);
                let tuples: Vec<Vec<usize>> = match arg_count.to_u64().filter(|&c| c <= config.argument_cap) {
                    Some(_) => lex_vectors(arity * y, k).collect(),
                    None => {
                        report.exhaustive = false;
                        report.sampled.push(format!("|Y|={y} arguments ({arg_count} > {})", config.argument_cap));
                        (0..config.samples).map(|_| (0..arity * y).map(|_| rng.gen_range(0..k)).collect()).collect()
                    }
                };
                for map in lex_vectors(x, y) {
                    for base in &structures {
                        let pushed =
                            if per_key { None } else { Some(functor_map(alg, &map, y, base, config.table_cap)?) };
                        for tuple in &tuples {
                            let on_y: Vec<Vec<TruthValue>> = tuple
                                .chunks(y)
                                .map(|c| c.iter().map(|&v| TruthValue::new(v as u32)).collect())
                                .collect();
                            let on_x: Vec<Vec<TruthValue>> =
                                on_y.iter().map(|g| map.iter().map(|&fy| g[fy]).collect()).collect();
                            let xs: Vec<&[TruthValue]> = on_x.iter().map(Vec::as_slice).collect();
                            let ys: Vec<&[TruthValue]> = on_y.iter().map(Vec::as_slice).collect();
                            let mut check = |delta: &Successors, pushed: &Successors| {
                                let direct = lifting.apply(alg, &xs, delta, config.prob);
                                let mapped = lifting.apply(alg, &ys, pushed, config.prob);
                                report.checks += 1;
                                (direct != mapped).then(|| NaturalityWitness {
                                    domain_size: x,
                                    codomain_size: y,
                                    map: map.clone(),
                                    args: on_y.iter().map(|g| g.iter().map(|v| v.index()).collect()).collect(),
                                    structure: format!("{delta:?}"),
                                    direct: show(alg, &direct),
                                    mapped: show(alg, &mapped),
                                })
                            };
                            let witness = match &pushed {
                                Some(pushed) => check(base, pushed),
                                None => vary_key(base, encode(&on_x[0], k), k, x, alg, &map, y, config.table_cap)?
                                    .iter()
                                    .find_map(|(delta, pushed)| check(delta, pushed)),
                            };
                            if witness.is_some() {
                                report.violation = witness;
                                return Ok(report);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Base tables for per-key enumeration: constant least, constant greatest,
/// then random tables.
fn base_tables(
    kind: FunctorKind,
    n: usize,
    k: usize,
    random: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Successors>, SemanticsError> {
    let keys = table_keys(k, n)?;
    let top = if kind == FunctorKind::Neighborhood { k - 1 } else { keys - 1 };
    let make = |table: Vec<usize>| match kind {
        FunctorKind::Neighborhood => {
            Successors::Neighborhood(table.into_iter().map(|v| TruthValue::new(v as u32)).collect())
        }
        _ => Successors::Selection(table),
    };
    let mut out = vec![make(vec![0; keys]), make(vec![top; keys])];
    out.extend((0..random).map(|_| make((0..keys).map(|_| rng.gen_range(0..=top)).collect())));
    Ok(out)
}

/// Every table that agrees with `base` off `key`, paired with its image.
#[allow(clippy::too_many_arguments)]
fn vary_key(
    base: &Successors,
    key: usize,
    k: usize,
    n: usize,
    alg: &FiniteAlgebra,
    map: &[usize],
    target: usize,
    table_cap: u64,
) -> Result<Vec<(Successors, Successors)>, SemanticsError> {
    let variants: Vec<Successors> = match base {
        Successors::Neighborhood(t) => (0..k)
            .map(|v| {
                let mut t = t.clone();
                t[key] = TruthValue::new(v as u32);
                Successors::Neighborhood(t)
            })
            .collect(),
        Successors::Selection(t) => (0..table_keys(k, n)?)
            .map(|v| {
                let mut t = t.clone();
                t[key] = v;
                Successors::Selection(t)
            })
            .collect(),
        other => vec![other.clone()],
    };
    variants
        .into_iter()
        .map(|d| {
            let pushed = functor_map(alg, map, target, &d, table_cap)?;
            Ok((d, pushed))
        })
        .collect()
}

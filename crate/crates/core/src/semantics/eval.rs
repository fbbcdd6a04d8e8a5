use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{FiniteAlgebra, TruthValue};
use crate::semantics::{Lifting, PredicateLifting, ProbMode, SemanticsError, Successors, TModel};
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub prob: ProbMode,
}

/// Truth values at every state, plus whether any `prob` value was floored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub values: Vec<TruthValue>,
    pub floored: bool,
}

struct Ctx<'a> {
    alg: &'a FiniteAlgebra,
    points: usize,
    mode: ProbMode,
    floored: bool,
}

impl Ctx<'_> {
    fn apply(
        &mut self,
        lifting: &Lifting,
        args: &[&[TruthValue]],
        delta: &Successors,
    ) -> Result<TruthValue, SemanticsError> {
        let out = lifting.apply(self.alg, args, delta, self.mode)?;
        self.floored |= out.floored;
        Ok(out.value)
    }
}

type Leaf<'m> = dyn FnMut(&mut Ctx<'_>, &Formula) -> Result<Vec<TruthValue>, SemanticsError> + 'm;

/// `x[i] = op(x[i], y[i])`, reusing `x`.
fn zip_in_place(
    mut x: Vec<TruthValue>,
    y: &[TruthValue],
    op: impl Fn(TruthValue, TruthValue) -> TruthValue,
) -> Vec<TruthValue> {
    for (u, &v) in x.iter_mut().zip(y) {
        *u = op(*u, v);
    }
    x
}

fn map_in_place(mut x: Vec<TruthValue>, op: impl Fn(TruthValue) -> TruthValue) -> Vec<TruthValue> {
    for u in x.iter_mut() {
        *u = op(*u);
    }
    x
}

/// Structural recursion over the propositional layer; atoms and modal nodes
/// are delegated to `leaf`.
fn propositional(ctx: &mut Ctx<'_>, f: &Formula, leaf: &mut Leaf<'_>) -> Result<Vec<TruthValue>, SemanticsError> {
    let alg = ctx.alg;
    let mut both = |ctx: &mut Ctx<'_>, a: &Formula, b: &Formula| -> Result<_, SemanticsError> {
        Ok((propositional(ctx, a, leaf)?, propositional(ctx, b, leaf)?))
    };
    Ok(match f {
        Formula::Atom(_) | Formula::Modal(..) => return leaf(ctx, f),
        Formula::Const(c) => vec![alg.resolve(c)?; ctx.points],
        Formula::And(a, b) => {
            let (x, y) = both(ctx, a, b)?;
            zip_in_place(x, &y, |u, v| alg.meet(u, v))
        }
        Formula::Or(a, b) => {
            let (x, y) = both(ctx, a, b)?;
            zip_in_place(x, &y, |u, v| alg.join(u, v))
        }
        Formula::Fuse(a, b) => {
            let (x, y) = both(ctx, a, b)?;
            zip_in_place(x, &y, |u, v| alg.prod(u, v))
        }
        Formula::Imp(a, b) => {
            let (x, y) = both(ctx, a, b)?;
            zip_in_place(x, &y, |u, v| alg.imp(u, v))
        }
        Formula::Delta(a) => map_in_place(propositional(ctx, a, leaf)?, |v| alg.delta(v)),
        Formula::Tau(c, a) => {
            let c = alg.resolve(c)?;
            map_in_place(propositional(ctx, a, leaf)?, |v| alg.tau(c, v))
        }
        Formula::Upsilon(c, a) => {
            let c = alg.resolve(c)?;
            map_in_place(propositional(ctx, a, leaf)?, |v| alg.upsilon(c, v))
        }
    })
}

fn atom_values(valuation: &BTreeMap<String, Vec<TruthValue>>, p: &str) -> Result<Vec<TruthValue>, SemanticsError> {
    valuation.get(p).cloned().ok_or_else(|| SemanticsError::UndeclaredAtom(p.to_string()))
}

/// `‖φ‖_σ` at every state, with `prob` in strict mode.
pub fn eval(model: &TModel, f: &Formula) -> Result<Vec<TruthValue>, SemanticsError> {
    eval_with(model, f, EvalOptions::default()).map(|e| e.values)
}

pub fn eval_with(model: &TModel, f: &Formula, opts: EvalOptions) -> Result<Evaluation, SemanticsError> {
    let mut ctx = Ctx { alg: model.algebra(), points: model.len(), mode: opts.prob, floored: false };
    let values = eval_full(&mut ctx, model, f)?;
    Ok(Evaluation { values, floored: ctx.floored })
}

fn eval_full(ctx: &mut Ctx<'_>, model: &TModel, f: &Formula) -> Result<Vec<TruthValue>, SemanticsError> {
    propositional(ctx, f, &mut |ctx, node| match node {
        Formula::Atom(p) => atom_values(model.valuation(), p),
        Formula::Modal(m, args) => {
            let lifting = Lifting::from_modality(m)?;
            if lifting.functor() != model.kind() {
                return Err(SemanticsError::FunctorMismatch {
                    lifting: lifting.name(),
                    expected: lifting.functor(),
                    found: model.kind(),
                });
            }
            let evaluated = args.iter().map(|a| eval_full(ctx, model, a)).collect::<Result<Vec<_>, _>>()?;
            let slices: Vec<&[TruthValue]> = evaluated.iter().map(Vec::as_slice).collect();
            model.sigma().iter().map(|delta| ctx.apply(&lifting, &slices, delta)).collect()
        }
        _ => unreachable!("propositional delegates only atoms and modal nodes"),
    })
}

/// The 0-step interpretation of a modality-free formula under a coloring
/// over `n` states.
pub fn eval0(
    alg: &FiniteAlgebra,
    coloring: &BTreeMap<String, Vec<TruthValue>>,
    n: usize,
    f: &Formula,
) -> Result<Vec<TruthValue>, SemanticsError> {
    if !f.is_modal_free() {
        return Err(SemanticsError::Rank { formula: f.to_string(), expected: 0 });
    }
    let mut ctx = Ctx { alg, points: n, mode: ProbMode::Strict, floored: false };
    propositional(&mut ctx, f, &mut |_, node| match node {
        Formula::Atom(p) => atom_values(coloring, p),
        _ => unreachable!("modal-free formula"),
    })
}

/// The 1-step interpretation of a rank-1 formula at `delta ∈ TS`.
pub fn eval1(
    alg: &FiniteAlgebra,
    coloring: &BTreeMap<String, Vec<TruthValue>>,
    n: usize,
    f: &Formula,
    delta: &Successors,
) -> Result<TruthValue, SemanticsError> {
    eval1_with(alg, coloring, n, f, delta, EvalOptions::default()).map(|(v, _)| v)
}

/// Like [`eval1`]; also reports whether a `prob` value was floored.
pub fn eval1_with(
    alg: &FiniteAlgebra,
    coloring: &BTreeMap<String, Vec<TruthValue>>,
    n: usize,
    f: &Formula,
    delta: &Successors,
    opts: EvalOptions,
) -> Result<(TruthValue, bool), SemanticsError> {
    if !f.is_rank1_shape() {
        return Err(SemanticsError::Rank { formula: f.to_string(), expected: 1 });
    }
    let mut ctx = Ctx { alg, points: 1, mode: opts.prob, floored: false };
    let out = propositional(&mut ctx, f, &mut |ctx, node| match node {
        Formula::Modal(m, args) => {
            let lifting = Lifting::from_modality(m)?;
            let evaluated = args.iter().map(|a| eval0(alg, coloring, n, a)).collect::<Result<Vec<_>, _>>()?;
            let slices: Vec<&[TruthValue]> = evaluated.iter().map(Vec::as_slice).collect();
            Ok(vec![ctx.apply(&lifting, &slices, delta)?])
        }
        _ => unreachable!("rank-1 shape has no top-level atoms"),
    })?;
    Ok((out[0], ctx.floored))
}

/// A one-step model `⟨S, δ, m⟩`, stored through its coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneStepModel {
    pub algebra: Arc<FiniteAlgebra>,
    pub states: usize,
    pub delta: Successors,
    pub coloring: BTreeMap<String, Vec<TruthValue>>,
}

impl OneStepModel {
    pub fn new(
        algebra: Arc<FiniteAlgebra>,
        states: usize,
        delta: Successors,
        coloring: BTreeMap<String, Vec<TruthValue>>,
    ) -> Result<Self, SemanticsError> {
        delta.validate(states, &algebra)?;
        for (p, col) in &coloring {
            if col.len() != states {
                return Err(SemanticsError::Malformed(format!("coloring of `{p}` has {} entries", col.len())));
            }
        }
        Ok(Self { algebra, states, delta, coloring })
    }

    /// Builds the coloring `m♭(p)(s) = m(s)(p)` from a marking.
    pub fn from_marking(
        algebra: Arc<FiniteAlgebra>,
        delta: Successors,
        marking: &[BTreeMap<String, TruthValue>],
    ) -> Result<Self, SemanticsError> {
        let mut coloring: BTreeMap<String, Vec<TruthValue>> = BTreeMap::new();
        for (s, row) in marking.iter().enumerate() {
            for (p, &v) in row {
                coloring.entry(p.clone()).or_insert_with(|| vec![algebra.zero(); marking.len()])[s] = v;
            }
        }
        for (s, row) in marking.iter().enumerate() {
            if let Some(p) = coloring.keys().find(|p| !row.contains_key(*p)) {
                return Err(SemanticsError::Malformed(format!("marking of state {s} misses atom `{p}`")));
            }
        }
        Self::new(algebra, marking.len(), delta, coloring)
    }

    /// The marking `m(s)(p)`.
    pub fn marking(&self) -> Vec<BTreeMap<String, TruthValue>> {
        (0..self.states).map(|s| self.coloring.iter().map(|(p, col)| (p.clone(), col[s])).collect()).collect()
    }

    pub fn eval0(&self, f: &Formula) -> Result<Vec<TruthValue>, SemanticsError> {
        eval0(&self.algebra, &self.coloring, self.states, f)
    }

    pub fn eval1(&self, f: &Formula, opts: EvalOptions) -> Result<TruthValue, SemanticsError> {
        eval1_with(&self.algebra, &self.coloring, self.states, f, &self.delta, opts).map(|(v, _)| v)
    }
}

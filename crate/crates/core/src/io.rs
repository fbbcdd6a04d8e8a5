//! JSON file formats for algebras, models, rules, derivation systems,
//! proofs and search verdicts.
//!
//! Truth values are written as reduced rational strings (`"1/2"`) for
//! Łukasiewicz chains and as integer indices for table algebras; readers
//! accept either a string or a number.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{parse_rational, AlgebraError, AlgebraKind, FiniteAlgebra, Rational, TruthValue};
use crate::decide::{Outcome, SearchVerdict};
use crate::proof::{DerivationSystem, Justification, ProofError, ProofTree, Rule};
use crate::semantics::{decode, encode, table_keys, FunctorKind, OneStepModel, SemanticsError, Successors, TModel};
use crate::syntax::{parse_any, Flavor, Formula, Signature, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e.to_string())
    }
}

type Result<T> = std::result::Result<T, FormatError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError::Invalid(msg.into()))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| FormatError::Missing(name.into()))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| FormatError::Invalid(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| FormatError::Invalid(format!("{what} must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| FormatError::Invalid(format!("{what} must be a string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| FormatError::Invalid(format!("{what} must be a non-negative integer")))
}

/// Numbers are rendered without a fractional part when possible.
fn scalar_text(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => invalid(format!("{what} must be a string or number")),
    }
}

pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

// ---------------------------------------------------------------- algebra

pub fn algebra_from_json(v: &Value) -> Result<FiniteAlgebra> {
    match as_str(field(v, "kind")?, "kind")? {
        "lukasiewicz" => {
            let n = as_usize(field(v, "n")?, "n")?;
            Ok(FiniteAlgebra::lukasiewicz(
                u32::try_from(n).map_err(|_| FormatError::Invalid("n is too large".into()))?,
            )?)
        }
        "table" => {
            let k = as_usize(field(v, "k")?, "k")?;
            let table = |name: &str| -> Result<Vec<Vec<usize>>> {
                as_array(field(v, name)?, name)?
                    .iter()
                    .map(|row| as_array(row, name)?.iter().map(|x| as_usize(x, name)).collect())
                    .collect()
            };
            let zero = as_usize(field(v, "zero")?, "zero")?;
            let one = as_usize(field(v, "one")?, "one")?;
            Ok(FiniteAlgebra::from_tables(
                k,
                &table("meet")?,
                &table("join")?,
                &table("prod")?,
                &table("impl")?,
                zero,
                one,
            )?)
        }
        other => invalid(format!("unknown algebra kind `{other}`")),
    }
}

pub fn algebra_to_json(alg: &FiniteAlgebra) -> Value {
    match alg.kind() {
        AlgebraKind::Lukasiewicz { n } => json!({ "kind": "lukasiewicz", "n": n }),
        AlgebraKind::Table => {
            let table = |op: fn(&FiniteAlgebra, TruthValue, TruthValue) -> TruthValue| -> Value {
                alg.elements()
                    .map(|a| alg.elements().map(|b| op(alg, a, b).index()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
                    .into()
            };
            json!({
                "kind": "table",
                "k": alg.size(),
                "meet": table(FiniteAlgebra::meet),
                "join": table(FiniteAlgebra::join),
                "prod": table(FiniteAlgebra::prod),
                "impl": table(FiniteAlgebra::imp),
                "zero": alg.zero().index(),
                "one": alg.one().index(),
            })
        }
    }
}

fn value_from_json(alg: &FiniteAlgebra, v: &Value, what: &str) -> Result<TruthValue> {
    Ok(alg.parse_value(&scalar_text(v, what)?)?)
}

pub fn value_to_json(alg: &FiniteAlgebra, a: TruthValue) -> Value {
    match alg.kind() {
        AlgebraKind::Lukasiewicz { .. } => Value::String(alg.format_value(a)),
        AlgebraKind::Table => a.index().into(),
    }
}

fn rational_from_json(v: &Value, what: &str) -> Result<Rational> {
    let text = scalar_text(v, what)?;
    parse_rational(&text).ok_or_else(|| FormatError::Invalid(format!("{what}: `{text}` is not a rational")))
}

// ---------------------------------------------------------------- models

struct Carrier<'a> {
    states: &'a [String],
    index: BTreeMap<&'a str, usize>,
}

impl<'a> Carrier<'a> {
    fn new(states: &'a [String]) -> Self {
        Self { states, index: states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect() }
    }

    fn state(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| FormatError::Invalid(format!("unknown state `{name}`")))
    }

    /// A total function `S → A` written as `{state: value}`.
    fn function(&self, alg: &FiniteAlgebra, v: &Value, what: &str) -> Result<Vec<TruthValue>> {
        let obj = as_object(v, what)?;
        let mut out = vec![None; self.states.len()];
        for (s, x) in obj {
            out[self.state(s)?] = Some(value_from_json(alg, x, what)?);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, x)| {
                x.ok_or_else(|| FormatError::Invalid(format!("{what} has no entry for `{}`", self.states[i])))
            })
            .collect()
    }

    fn function_to_json(&self, alg: &FiniteAlgebra, f: &[TruthValue]) -> Value {
        Value::Object(self.states.iter().zip(f).map(|(s, &v)| (s.clone(), value_to_json(alg, v))).collect())
    }
}

fn table_from_entries<T: Clone>(
    entries: &[Value],
    keys: usize,
    what: &str,
    mut parse: impl FnMut(&Value) -> Result<(usize, T)>,
) -> Result<Vec<T>> {
    let mut table: Vec<Option<T>> = vec![None; keys];
    for e in entries {
        let (code, value) = parse(e)?;
        if table[code].is_some() {
            return invalid(format!("{what} lists the same argument twice"));
        }
        table[code] = Some(value);
    }
    let missing = table.iter().filter(|x| x.is_none()).count();
    if missing > 0 {
        return invalid(format!("{what} is not total: {missing} of {keys} arguments missing"));
    }
    Ok(table.into_iter().map(Option::unwrap).collect())
}

fn successors_from_json(
    alg: &FiniteAlgebra,
    kind: FunctorKind,
    carrier: &Carrier<'_>,
    v: &Value,
    what: &str,
) -> Result<Successors> {
    let n = carrier.states.len();
    let k = alg.size();
    Ok(match kind {
        FunctorKind::Powerset => {
            let mut set =
                as_array(v, what)?.iter().map(|s| carrier.state(as_str(s, what)?)).collect::<Result<Vec<_>>>()?;
            set.sort_unstable();
            set.dedup();
            Successors::Powerset(set)
        }
        FunctorKind::Fuzzy => Successors::Fuzzy(carrier.function(alg, v, what)?),
        FunctorKind::Distribution => {
            let obj = as_object(v, what)?;
            let mut mu = vec![Rational::from_integer(0); n];
            for (s, p) in obj {
                mu[carrier.state(s)?] = rational_from_json(p, what)?;
            }
            Successors::Distribution(mu)
        }
        FunctorKind::Neighborhood => {
            let keys = table_keys(k, n)?;
            Successors::Neighborhood(table_from_entries(as_array(v, what)?, keys, what, |e| {
                let set = carrier.function(alg, field(e, "set")?, what)?;
                Ok((encode(&set, k), value_from_json(alg, field(e, "value")?, what)?))
            })?)
        }
        FunctorKind::Selection => {
            let keys = table_keys(k, n)?;
            Successors::Selection(table_from_entries(as_array(v, what)?, keys, what, |e| {
                let input = carrier.function(alg, field(e, "in")?, what)?;
                let output = carrier.function(alg, field(e, "out")?, what)?;
                Ok((encode(&input, k), encode(&output, k)))
            })?)
        }
    })
}

fn successors_to_json(alg: &FiniteAlgebra, carrier: &Carrier<'_>, delta: &Successors) -> Value {
    let n = carrier.states.len();
    let k = alg.size();
    match delta {
        Successors::Powerset(set) => set.iter().map(|&s| Value::String(carrier.states[s].clone())).collect(),
        Successors::Fuzzy(row) => carrier.function_to_json(alg, row),
        Successors::Distribution(mu) => Value::Object(
            carrier.states.iter().zip(mu).map(|(s, p)| (s.clone(), Value::String(p.to_string()))).collect(),
        ),
        Successors::Neighborhood(table) => table
            .iter()
            .enumerate()
            .map(|(code, &v)| {
                json!({ "set": carrier.function_to_json(alg, &decode(code, n, k)), "value": value_to_json(alg, v) })
            })
            .collect(),
        Successors::Selection(table) => table
            .iter()
            .enumerate()
            .map(|(code, &out)| {
                json!({
                    "in": carrier.function_to_json(alg, &decode(code, n, k)),
                    "out": carrier.function_to_json(alg, &decode(out, n, k)),
                })
            })
            .collect(),
    }
}

fn states_from_json(v: &Value) -> Result<Vec<String>> {
    as_array(v, "states")?.iter().map(|s| as_str(s, "states").map(str::to_string)).collect()
}

pub fn model_from_json(v: &Value) -> Result<TModel> {
    let alg = Arc::new(algebra_from_json(field(v, "algebra")?)?);
    let kind: FunctorKind = as_str(field(v, "functor")?, "functor")?.parse()?;
    let states = states_from_json(field(v, "states")?)?;
    let carrier = Carrier::new(&states);
    let sigma_obj = as_object(field(v, "sigma")?, "sigma")?;
    let mut sigma = Vec::with_capacity(states.len());
    for s in &states {
        let row = sigma_obj.get(s).ok_or_else(|| FormatError::Invalid(format!("sigma has no entry for `{s}`")))?;
        sigma.push(successors_from_json(&alg, kind, &carrier, row, &format!("sigma({s})"))?);
    }
    if let Some(extra) = sigma_obj.keys().find(|s| !states.contains(s)) {
        return invalid(format!("sigma mentions unknown state `{extra}`"));
    }
    let mut valuation = BTreeMap::new();
    if let Some(val) = v.get("valuation") {
        for (p, f) in as_object(val, "valuation")? {
            valuation.insert(p.clone(), carrier.function(&alg, f, &format!("valuation of `{p}`"))?);
        }
    }
    Ok(TModel::new(alg, kind, states, sigma, valuation)?)
}

pub fn model_to_json(model: &TModel) -> Value {
    let alg = model.algebra();
    let carrier = Carrier::new(model.states());
    let sigma: Map<String, Value> = model
        .states()
        .iter()
        .zip(model.sigma())
        .map(|(s, row)| (s.clone(), successors_to_json(alg, &carrier, row)))
        .collect();
    let valuation: Map<String, Value> =
        model.valuation().iter().map(|(p, f)| (p.clone(), carrier.function_to_json(alg, f))).collect();
    json!({
        "algebra": algebra_to_json(alg),
        "functor": model.kind().name(),
        "states": model.states(),
        "sigma": sigma,
        "valuation": valuation,
    })
}

pub fn one_step_to_json(model: &OneStepModel, kind: FunctorKind) -> Value {
    let alg = &model.algebra;
    let states: Vec<String> = (0..model.states).map(|i| format!("s{i}")).collect();
    let carrier = Carrier::new(&states);
    let marking: Map<String, Value> = model
        .marking()
        .into_iter()
        .zip(&states)
        .map(|(row, s)| (s.clone(), Value::Object(row.into_iter().map(|(p, v)| (p, value_to_json(alg, v))).collect())))
        .collect();
    json!({
        "algebra": algebra_to_json(alg),
        "functor": kind.name(),
        "states": states,
        "delta": successors_to_json(alg, &carrier, &model.delta),
        "marking": marking,
    })
}

// ---------------------------------------------------------------- rules and proofs

fn formula_from_json(v: &Value, alg: &FiniteAlgebra, what: &str) -> Result<Formula> {
    Ok(parse_any(as_str(v, what)?, &Signature::builtin(), alg)?)
}

pub fn rule_from_json(v: &Value, alg: &FiniteAlgebra) -> Result<Rule> {
    let name = as_str(field(v, "name")?, "name")?;
    let premises = match v.get("premises") {
        Some(p) => {
            as_array(p, "premises")?.iter().map(|f| formula_from_json(f, alg, "premise")).collect::<Result<_>>()?
        }
        None => Vec::new(),
    };
    let conclusion = formula_from_json(field(v, "conclusion")?, alg, "conclusion")?;
    Ok(Rule::new(name, premises, conclusion))
}

pub fn rule_to_json(rule: &Rule) -> Value {
    json!({
        "name": rule.name,
        "premises": rule.premises.iter().map(Formula::to_string).collect::<Vec<_>>(),
        "conclusion": rule.conclusion.to_string(),
    })
}

/// `{"flavor": "basic", "congruence": true, "monotonicity": false, "rules": [...]}`.
/// Congruence rules default to on; monotonicity rules to off.
pub fn system_from_json(v: &Value, alg: &FiniteAlgebra) -> Result<DerivationSystem> {
    let flavor: Flavor = match v.get("flavor") {
        Some(f) => as_str(f, "flavor")?.parse()?,
        None => Flavor::Basic,
    };
    let flag = |name: &str, default: bool| -> Result<bool> {
        match v.get(name) {
            None => Ok(default),
            Some(b) => b.as_bool().ok_or_else(|| FormatError::Invalid(format!("{name} must be a boolean"))),
        }
    };
    let congruence = flag("congruence", true)?;
    let monotone = flag("monotonicity", false)?;
    let mut system = if congruence {
        DerivationSystem::standard(flavor, &Signature::builtin(), monotone)?
    } else {
        DerivationSystem::new(flavor)
    };
    if let Some(rules) = v.get("rules") {
        for r in as_array(rules, "rules")? {
            system.add_rule(rule_from_json(r, alg)?)?;
        }
    }
    Ok(system)
}

pub fn proof_from_json(v: &Value, alg: &FiniteAlgebra) -> Result<ProofTree> {
    let formula = formula_from_json(field(v, "formula")?, alg, "formula")?;
    let mut justification = Justification::from_tag(as_str(field(v, "rule")?, "rule")?);
    if let Some(sub) = v.get("substitution") {
        let rho = as_object(sub, "substitution")?
            .iter()
            .map(|(x, f)| Ok((x.clone(), formula_from_json(f, alg, "substitution")?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        match &mut justification {
            Justification::Rule { substitution, .. } => *substitution = Some(rho),
            _ => return invalid("only rule nodes may carry a substitution"),
        }
    }
    let children = match v.get("children") {
        Some(c) => as_array(c, "children")?.iter().map(|c| proof_from_json(c, alg)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(ProofTree { formula, justification, children })
}

pub fn proof_to_json(tree: &ProofTree) -> Value {
    let mut obj = Map::new();
    obj.insert("formula".into(), tree.formula.to_string().into());
    obj.insert("rule".into(), tree.justification.tag().into());
    if let Justification::Rule { substitution: Some(rho), .. } = &tree.justification {
        obj.insert(
            "substitution".into(),
            Value::Object(rho.iter().map(|(x, f)| (x.clone(), f.to_string().into())).collect()),
        );
    }
    obj.insert("children".into(), tree.children.iter().map(proof_to_json).collect());
    Value::Object(obj)
}

/// One formula per line; `#` starts a comment and blank lines are skipped.
pub fn formulas_from_text(text: &str, alg: &FiniteAlgebra) -> Result<Vec<Formula>> {
    text.lines()
        .map(|line| line.split_once('#').map_or(line, |(f, _)| f).trim())
        .filter(|line| !line.is_empty())
        .map(|line| Ok(parse_any(line, &Signature::builtin(), alg)?))
        .collect()
}

// ---------------------------------------------------------------- verdicts

pub fn verdict_to_json(verdict: &SearchVerdict) -> Value {
    let mut obj = Map::new();
    obj.insert("outcome".into(), verdict.outcome.name().into());
    obj.insert("functor".into(), verdict.functor.name().into());
    obj.insert("max_states".into(), verdict.max_states.into());
    if verdict.functor == FunctorKind::Distribution {
        obj.insert("granularity".into(), verdict.granularity.into());
    }
    obj.insert("examined".into(), verdict.examined.into());
    obj.insert("undefined".into(), verdict.undefined.into());
    if let Some(b) = &verdict.closure_bound {
        obj.insert("closure_bound".into(), b.to_string().into());
        obj.insert("complete".into(), verdict.complete().into());
    }
    match &verdict.outcome {
        Outcome::Countermodel { model, state, value } | Outcome::Satisfied { model, state, value } => {
            obj.insert("state".into(), model.states()[*state].clone().into());
            obj.insert("value".into(), value_to_json(model.algebra(), *value));
            obj.insert("model".into(), model_to_json(model));
        }
        Outcome::Unsound { model, value } => {
            obj.insert("value".into(), value_to_json(&model.algebra, *value));
            obj.insert("witness".into(), one_step_to_json(model, verdict.functor));
        }
        _ => {}
    }
    Value::Object(obj)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
